#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <string>

#include "geoparse/text.hpp"

using namespace geoparse;

TEST_CASE("utf8 round trip") {
    const std::string samples[] = {"", "plain ascii", "München", "وارسو", "Київ", "𝔾𝕖𝕠", "a b"};
    for (const std::string& s : samples) CHECK(text::encode(text::decode(s)) == s);
}

TEST_CASE("utf8 malformed bytes decode to replacement chars") {
    const std::string bad = "a\xC3(";  // truncated two-byte sequence
    const auto cps = text::decode(bad);
    REQUIRE(cps.size() == 3);
    CHECK(cps[0] == U'a');
    CHECK(cps[1] == text::kReplacementChar);
    CHECK(cps[2] == U'(');
    // overlong encoding of '/' must not decode to '/'
    const std::string overlong = "\xC0\xAF";
    for (char32_t cp : text::decode(overlong)) CHECK(cp == text::kReplacementChar);
}

TEST_CASE("nfc composes combining sequences") {
    CHECK(text::nfc(std::string_view("é")) == "é");
    // both mark orders canonical-order to the same composed form
    CHECK(text::nfc(std::string_view("ệ")) == "ệ");
    CHECK(text::nfc(std::string_view("ệ")) == "ệ");
    CHECK(text::nfc(std::string_view("München")) == "München");
    // Hangul LVT composition is algorithmic
    CHECK(text::nfc(std::string_view("각")) == "각");
}

TEST_CASE("simple case fold") {
    CHECK(text::fold_case("PARIS") == "paris");
    CHECK(text::fold_case("MÜNCHEN") == "münchen");
    CHECK(text::fold_case("ΣΟΦΙΑ") == "σοφια");
    CHECK(text::fold_case("ς") == "σ");  // final sigma folds to sigma
    CHECK(text::fold_case("ß") == "ß");  // simple fold keeps sharp s
    CHECK(text::fold_case("وارسو") == "وارسو");
}

TEST_CASE("whitespace collapse") {
    CHECK(text::collapse_whitespace("  New   York ") == "New York");
    CHECK(text::collapse_whitespace("a\t\nb") == "a b");
    CHECK(text::collapse_whitespace("a  b") == "a b");
    CHECK(text::collapse_whitespace("   ") == "");
}

TEST_CASE("normalize_key combines nfc, fold and collapse") {
    CHECK(text::normalize_key("  San  Antonio ") == "san antonio");
    CHECK(text::normalize_key("PARIS") == "paris");
    CHECK(text::normalize_key("München") == "münchen");  // decomposed input
    CHECK(text::normalize_cased("  New   York ") == "New York");
    CHECK(text::normalize_cased("Paris") == "Paris");
}

TEST_CASE("classification queries") {
    CHECK(text::is_letter(U'a'));
    CHECK(text::is_letter(U'ب'));
    CHECK(text::is_uppercase(U'A'));
    CHECK_FALSE(text::is_uppercase(U'a'));
    CHECK_FALSE(text::is_uppercase(U'ب'));
    CHECK(text::is_cased_letter(U'ü'));
    CHECK_FALSE(text::is_cased_letter(U'ب'));  // Arabic letters carry no case
    CHECK(text::is_digit(U'7'));
    CHECK_FALSE(text::is_letter(U'.'));
    CHECK(text::is_mark(0x0301));
}

TEST_CASE("normalize_key is idempotent", "[property]") {
    std::mt19937 rng(20240811);
    const std::string alphabet[] = {"a", "B", "é", "ü", " ", "  ", "ß", "نـ", "Z", "'", "-", "Σ", "ς"};
    std::uniform_int_distribution<std::size_t> pick(0, std::size(alphabet) - 1);
    for (int trial = 0; trial < 500; ++trial) {
        std::string s;
        const int len = static_cast<int>(rng() % 12);
        for (int i = 0; i < len; ++i) s += alphabet[pick(rng)];
        const std::string once = text::normalize_key(s);
        CHECK(text::normalize_key(once) == once);
    }
}
