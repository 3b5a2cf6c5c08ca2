#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "geoparse/textmatch.hpp"

using namespace geoparse;

namespace {

GazetteerIndex toy_index() {
    std::vector<PlaceEntry> places = {
        {"FR-PAR", "Paris", "FR", 48.8566, 2.3522, 1, "gd"},
        {"US-TX-PAR", "Paris", "US", 33.6609, -95.5555, 4, "gd"},
        {"PL-WAW", "Warsaw", "PL", 52.2297, 21.0122, 1, "gd"},
        {"BY-BRE", "Brest", "BY", 52.0976, 23.7341, 3, "gd"},
        {"FR-BRE", "Brest", "FR", 48.3904, -4.4861, 3, "gd"},
        {"US-NY", "New York", "US", 40.7128, -74.0060, 2, "gd"},
        {"US-TX-SAT", "San Antonio", "US", 29.4241, -98.4936, 2, "gd"},
        {"PH-ANT", "Antonio", "PH", 15.0, 120.0, 5, "gd"},
        {"IT-AQ", "L'Aquila", "IT", 42.3499, 13.3995, 3, "gd"},
    };
    std::vector<NameVariant> variants = {
        {"FR-PAR", "باريس", "ar", VariantKind::exonym},
        {"PL-WAW", "وارسو", "ar", VariantKind::exonym},
    };
    return GazetteerIndex::build(std::move(places), std::move(variants));
}

std::vector<MorphRule> starter_rules() {
    auto loaded = load_rules(std::string(GEOPARSE_DATA_DIR) + "/rules.tsv");
    REQUIRE(loaded.rejected == 0);
    return std::move(loaded.rows);
}

// Independent leftmost-longest reference: at the leftmost token where any
// span matches, take the longest matching span, then continue after it.
std::vector<std::pair<std::size_t, std::size_t>> leftmost_longest_oracle(
    const std::vector<Token>& tokens, std::string_view doc_text, const GazetteerIndex& index,
    std::string_view lang, std::size_t max_len) {
    std::vector<std::pair<std::size_t, std::size_t>> spans;
    std::size_t i = 0;
    while (i < tokens.size()) {
        std::size_t best_len = 0;
        if (!tokens[i].script_cased || tokens[i].starts_uppercase) {
            for (std::size_t len = 1; len <= max_len && i + len <= tokens.size(); ++len) {
                bool contiguous = true;
                for (std::size_t k = 1; k < len; ++k)
                    contiguous = contiguous && detail_match::whitespace_only(doc_text, tokens[i + k - 1].end,
                                                                             tokens[i + k].start);
                if (!contiguous) break;
                const auto key = text::normalize_key(
                    doc_text.substr(tokens[i].start, tokens[i + len - 1].end - tokens[i].start));
                if (!index.lookup(key, lang).empty()) best_len = len;
            }
        }
        if (best_len == 0) {
            ++i;
            continue;
        }
        spans.push_back({tokens[i].start, tokens[i + best_len - 1].end});
        i += best_len;
    }
    return spans;
}

}  // namespace

TEST_CASE("tokenize basic sentence") {
    const auto tokens = tokenize("George Bush visited Paris.", "en");
    REQUIRE(tokens.size() == 4);
    CHECK(tokens[0].surface == "George");
    CHECK(tokens[1].surface == "Bush");
    CHECK(tokens[2].surface == "visited");
    CHECK(tokens[3].surface == "Paris");
    CHECK(tokens[0].starts_uppercase);
    CHECK(tokens[1].starts_uppercase);
    CHECK_FALSE(tokens[2].starts_uppercase);
    CHECK(tokens[3].starts_uppercase);
    for (const Token& t : tokens) CHECK(t.script_cased);
    // offsets slice back to the surfaces
    const std::string text = "George Bush visited Paris.";
    for (const Token& t : tokens) CHECK(text.substr(t.start, t.end - t.start) == t.surface);
}

TEST_CASE("tokenize arabic text is caseless") {
    const auto tokens = tokenize("سافر الوفد من وارسو", "ar");
    REQUIRE(tokens.size() == 4);
    for (const Token& t : tokens) {
        CHECK_FALSE(t.script_cased);
        CHECK_FALSE(t.starts_uppercase);
    }
}

TEST_CASE("tokenize empty and punctuation-only") {
    CHECK(tokenize("", "en").empty());
    CHECK(tokenize("... !!", "en").empty());
}

TEST_CASE("tokenize joins internal apostrophes and hyphens") {
    auto tokens = tokenize("L'Aquila and Saint-Cyr-sous-Dourdan", "fr");
    REQUIRE(tokens.size() == 3);
    CHECK(tokens[0].surface == "L'Aquila");
    CHECK(tokens[2].surface == "Saint-Cyr-sous-Dourdan");
    // trailing joiner stays outside the token
    tokens = tokenize("end- of'", "en");
    REQUIRE(tokens.size() == 2);
    CHECK(tokens[0].surface == "end");
    CHECK(tokens[1].surface == "of");
}

TEST_CASE("candidate_keys applies declension and inhabitant rules") {
    const auto rules = starter_rules();
    const auto keys_of = [&](const std::string& surface, const std::string& lang) {
        Token token;
        token.surface = surface;
        std::vector<std::string> keys;
        for (const auto& ck : candidate_keys(token, lang, rules)) keys.push_back(ck.key);
        return keys;
    };
    CHECK(keys_of("Parisului", "ro") == std::vector<std::string>{"parisului", "paris"});
    CHECK(keys_of("Parisiens", "fr") == std::vector<std::string>{"parisiens", "paris"});
    const auto arabic = keys_of("الباريسيون", "ar");
    REQUIRE(arabic.size() >= 2);
    CHECK(arabic[0] == "الباريسيون");
    CHECK(arabic[1] == "باريس");  // inhabitant-plural rule fires first
    // rules from other languages never apply
    CHECK(keys_of("Parisului", "fr") == std::vector<std::string>{"parisului"});
}

TEST_CASE("candidate_keys keeps direct form first and dedups") {
    std::vector<MorphRule> rules;
    MorphRule same;
    same.lang = "en";
    same.pattern = "^(.*x)$";
    same.replacement = "$1";  // substitution equals the input, must be dropped
    same.compiled = std::regex(same.pattern);
    MorphRule strip_x;
    strip_x.lang = "en";
    strip_x.pattern = "^(.*)x$";
    strip_x.replacement = "$1";
    strip_x.compiled = std::regex(strip_x.pattern);
    rules.push_back(same);
    rules.push_back(strip_x);
    Token token;
    token.surface = "Bordeaux";
    const auto keys = candidate_keys(token, "en", rules);
    REQUIRE(keys.size() == 2);
    CHECK(keys[0].key == "bordeaux");
    CHECK_FALSE(keys[0].rule_index.has_value());
    CHECK(keys[1].key == "bordeau");
    CHECK(keys[1].rule_index == 1);
}

TEST_CASE("scan finds mentions with candidate sets") {
    const auto index = toy_index();
    const auto mentions = scan("He flew from Warsaw to Brest.", "en", index, {});
    REQUIRE(mentions.size() == 2);
    CHECK(mentions[0].surface == "Warsaw");
    CHECK(mentions[0].candidates.size() == 1);
    CHECK(mentions[1].surface == "Brest");
    CHECK(mentions[1].candidates.size() == 2);
    CHECK(mentions[1].lookup_key == "brest");
    // lookup_key is recoverable
    for (const auto& m : mentions) {
        const auto again = index.lookup(m.lookup_key, "en");
        REQUIRE(again.size() == m.candidates.size());
        for (std::size_t i = 0; i < again.size(); ++i) CHECK(again[i] == m.candidates[i]);
    }
}

TEST_CASE("cased scripts require an uppercase first token") {
    const auto index = toy_index();
    CHECK(scan("new york is big", "en", index, {}).empty());
    const auto mentions = scan("New york is big", "en", index, {});
    REQUIRE(mentions.size() == 1);
    CHECK(mentions[0].lookup_key == "new york");
    // all-caps headlines still match
    CHECK(scan("WARSAW AND BREST", "en", index, {}).size() == 2);
}

TEST_CASE("leftmost-longest wins over inner names") {
    const auto index = toy_index();
    const auto mentions = scan("They met in San Antonio today.", "en", index, {});
    REQUIRE(mentions.size() == 1);
    CHECK(mentions[0].surface == "San Antonio");
    CHECK(mentions[0].lookup_key == "san antonio");
    // the single-word name still works on its own
    const auto alone = scan("They met in Antonio today.", "en", index, {});
    REQUIRE(alone.size() == 1);
    CHECK(alone[0].lookup_key == "antonio");
}

TEST_CASE("multiword spans do not cross punctuation") {
    const auto index = toy_index();
    const auto mentions = scan("San. Antonio waited.", "en", index, {});
    REQUIRE(mentions.size() == 1);
    CHECK(mentions[0].lookup_key == "antonio");
}

TEST_CASE("morph keys only rescue single-token misses") {
    const auto index = toy_index();
    const auto rules = starter_rules();
    const auto mentions = scan("Primarul Parisului a sosit.", "ro", index, rules);
    REQUIRE(mentions.size() == 1);
    CHECK(mentions[0].surface == "Parisului");
    CHECK(mentions[0].lookup_key == "paris");
    REQUIRE(mentions[0].morph_rule.has_value());
    CHECK(mentions[0].candidates.size() == 2);
}

TEST_CASE("arabic inhabitant form resolves through rules") {
    const auto index = toy_index();
    const auto rules = starter_rules();
    const auto mentions = scan("الباريسيون يحتفلون", "ar", index, rules);
    REQUIRE(mentions.size() == 1);
    CHECK(mentions[0].lookup_key == "باريس");
    CHECK(mentions[0].candidates.size() == 1);
    CHECK(mentions[0].candidates[0]->place_id == "FR-PAR");
}

TEST_CASE("scan agrees with the leftmost-longest oracle", "[property]") {
    const auto index = toy_index();
    std::mt19937 rng(42);
    const std::string words[] = {"San",   "Antonio", "New",   "York", "Paris",    "Warsaw",
                                 "Brest", "visited", "today", "the",  "L'Aquila", "and"};
    for (int trial = 0; trial < 300; ++trial) {
        std::string doc;
        const int len = 1 + static_cast<int>(rng() % 10);
        for (int i = 0; i < len; ++i) {
            if (!doc.empty()) doc += (rng() % 5 == 0) ? ". " : " ";
            doc += words[rng() % std::size(words)];
        }
        const auto tokens = tokenize(doc, "en");
        const auto expected = leftmost_longest_oracle(tokens, doc, index, "en", 4);
        const auto mentions = scan(doc, "en", index, {});
        INFO(doc);
        REQUIRE(mentions.size() == expected.size());
        for (std::size_t i = 0; i < mentions.size(); ++i) {
            CHECK(mentions[i].start == expected[i].first);
            CHECK(mentions[i].end == expected[i].second);
        }
        // non-overlap, strictly increasing
        for (std::size_t i = 1; i < mentions.size(); ++i) CHECK(mentions[i - 1].end <= mentions[i].start);
    }
}

TEST_CASE("irrelevant rules never change scan output", "[property]") {
    const auto index = toy_index();
    auto rules = starter_rules();
    const std::string doc = "Primarul Parisului visited San Antonio and Warsaw.";
    const auto before = scan(doc, "ro", index, rules);
    MorphRule noop;
    noop.lang = "ro";
    noop.pattern = "^zzzqqqxyz$";
    noop.replacement = "never";
    noop.compiled = std::regex(noop.pattern);
    rules.insert(rules.begin(), noop);
    const auto after = scan(doc, "ro", index, rules);
    REQUIRE(before.size() == after.size());
    for (std::size_t i = 0; i < before.size(); ++i) {
        CHECK(before[i].start == after[i].start);
        CHECK(before[i].lookup_key == after[i].lookup_key);
    }
}

TEST_CASE("caseless text ignores synthetic case flips") {
    const auto index = toy_index();
    const std::string doc = "سافر الوفد من وارسو إلى باريس";
    std::string flipped = doc;  // ASCII flips are no-ops here; outputs must agree
    for (char& c : flipped) {
        if (c >= 'a' && c <= 'z')
            c = static_cast<char>(c - 'a' + 'A');
        else if (c >= 'A' && c <= 'Z')
            c = static_cast<char>(c - 'A' + 'a');
    }
    const auto a = scan(doc, "ar", index, {});
    const auto b = scan(flipped, "ar", index, {});
    REQUIRE(a.size() == 2);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].lookup_key == b[i].lookup_key);
}
