#!/usr/bin/env python3
"""Regenerates include/geoparse/detail/unicode_data.hpp from Python's unicodedata.

The header carries the sorted lookup tables behind geoparse/text.hpp:
category ranges, simple case-fold pairs, combining classes, full canonical
decompositions (Hangul excluded, handled algorithmically) and primary
composition pairs. Run from the repository root:

    python3 tools/gen_unicode_tables.py > include/geoparse/detail/unicode_data.hpp
"""

import sys
import unicodedata as ud

HANGUL_S, HANGUL_COUNT = 0xAC00, 11172


def to_ranges(cps):
    out = []
    for cp in cps:
        if out and out[-1][1] == cp - 1:
            out[-1][1] = cp
        else:
            out.append([cp, cp])
    return out


def collect():
    letters, cased, upper, marks, digits = [], [], [], [], []
    fold, ccc, comp = [], [], {}
    decomp = {}
    for cp in range(0x110000):
        if 0xD800 <= cp <= 0xDFFF:
            continue
        ch = chr(cp)
        c = ud.category(ch)
        if c == "Cn":
            continue
        if c.startswith("L"):
            letters.append(cp)
        if c in ("Lu", "Ll", "Lt"):
            cased.append(cp)
        if c in ("Lu", "Lt"):
            upper.append(cp)
        if c.startswith("M"):
            marks.append(cp)
        if c == "Nd":
            digits.append(cp)
        cf = ch.casefold()
        if len(cf) == 1 and cf != ch:
            fold.append((cp, ord(cf)))
        elif len(cf) > 1:
            # full fold is multi-char (ss for U+00DF etc.); keep the simple
            # single-char lowercase mapping when one exists, else identity
            lo = ch.lower()
            if len(lo) == 1 and lo != ch:
                fold.append((cp, ord(lo)))
        cc = ud.combining(ch)
        if cc:
            ccc.append((cp, cc))
        if HANGUL_S <= cp < HANGUL_S + HANGUL_COUNT:
            continue
        d = ud.normalize("NFD", ch)
        if d != ch:
            decomp[cp] = [ord(x) for x in d]
        raw = ud.decomposition(ch)
        if raw and not raw.startswith("<"):
            parts = [int(x, 16) for x in raw.split()]
            # round-trip test applies the composition-exclusion rules for us
            if len(parts) == 2 and ud.normalize("NFC", chr(parts[0]) + chr(parts[1])) == ch:
                comp[(parts[0], parts[1])] = cp
    return letters, cased, upper, marks, digits, fold, ccc, decomp, comp


def emit_ranges(name, ranges, out):
    out.write(f"inline constexpr Range {name}[] = {{\n")
    for i in range(0, len(ranges), 6):
        row = ", ".join(f"{{0x{lo:X}, 0x{hi:X}}}" for lo, hi in ranges[i : i + 6])
        out.write(f"    {row},\n")
    out.write("};\n\n")


def main(out):
    letters, cased, upper, marks, digits, fold, ccc, decomp, comp = collect()
    out.write("// Generated by tools/gen_unicode_tables.py (Unicode %s). Do not edit.\n" % ud.unidata_version)
    out.write("#pragma once\n\n#include <cstdint>\n\n")
    out.write("namespace geoparse::detail {\n\n")
    out.write("struct Range { char32_t lo, hi; };\n")
    out.write("struct FoldPair { char32_t from, to; };\n")
    out.write("struct CombiningClass { char32_t cp; std::uint8_t ccc; };\n")
    out.write("struct Decomposition { char32_t cp; std::uint16_t offset; std::uint8_t length; };\n")
    out.write("struct Composition { char32_t first, second, composed; };\n\n")

    emit_ranges("kLetterRanges", to_ranges(letters), out)
    emit_ranges("kCasedRanges", to_ranges(cased), out)
    emit_ranges("kUpperRanges", to_ranges(upper), out)
    emit_ranges("kMarkRanges", to_ranges(marks), out)
    emit_ranges("kDigitRanges", to_ranges(digits), out)

    out.write("inline constexpr FoldPair kSimpleFold[] = {\n")
    for i in range(0, len(fold), 6):
        row = ", ".join(f"{{0x{a:X}, 0x{b:X}}}" for a, b in fold[i : i + 6])
        out.write(f"    {row},\n")
    out.write("};\n\n")

    out.write("inline constexpr CombiningClass kCombiningClasses[] = {\n")
    for i in range(0, len(ccc), 6):
        row = ", ".join(f"{{0x{a:X}, {b}}}" for a, b in ccc[i : i + 6])
        out.write(f"    {row},\n")
    out.write("};\n\n")

    data, index = [], []
    for cp in sorted(decomp):
        seq = decomp[cp]
        index.append((cp, len(data), len(seq)))
        data.extend(seq)
    out.write("inline constexpr char32_t kDecompositionData[] = {\n")
    for i in range(0, len(data), 10):
        row = ", ".join(f"0x{x:X}" for x in data[i : i + 10])
        out.write(f"    {row},\n")
    out.write("};\n\n")
    out.write("inline constexpr Decomposition kDecompositions[] = {\n")
    for i in range(0, len(index), 5):
        row = ", ".join(f"{{0x{cp:X}, {off}, {ln}}}" for cp, off, ln in index[i : i + 5])
        out.write(f"    {row},\n")
    out.write("};\n\n")

    out.write("inline constexpr Composition kCompositions[] = {\n")
    for (a, b), c in sorted(comp.items()):
        out.write(f"    {{0x{a:X}, 0x{b:X}, 0x{c:X}}},\n")
    out.write("};\n\n")
    out.write("}  // namespace geoparse::detail\n")


if __name__ == "__main__":
    main(sys.stdout)
