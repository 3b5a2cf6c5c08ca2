#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "geoparse/disambig.hpp"

using namespace geoparse;

namespace {

constexpr double kPi = 3.14159265358979323846;

const GeoPoint kWarsaw{52.2297, 21.0122};
const GeoPoint kBrestBy{52.0976, 23.7341};
const GeoPoint kBrestFr{48.3904, -4.4861};

// independent route: spherical law of cosines
double law_of_cosines_km(const GeoPoint& a, const GeoPoint& b, double radius = 6371.0) {
    const double p1 = a.lat * kPi / 180.0, p2 = b.lat * kPi / 180.0;
    const double dl = (b.lon - a.lon) * kPi / 180.0;
    const double c = std::sin(p1) * std::sin(p2) + std::cos(p1) * std::cos(p2) * std::cos(dl);
    return radius * std::acos(std::max(-1.0, std::min(1.0, c)));
}

GeoPoint random_point(std::mt19937& rng) {
    std::uniform_real_distribution<double> lat(-89.0, 89.0), lon(-179.9, 180.0);
    return {lat(rng), lon(rng)};
}

const PlaceEntry kParisFr{"FR-PAR", "Paris", "FR", 48.8566, 2.3522, 1, "gd"};
const PlaceEntry kParisTx{"US-TX-PAR", "Paris", "US", 33.6609, -95.5555, 4, "gd"};
const PlaceEntry kByBrest{"BY-BRE", "Brest", "BY", 52.0976, 23.7341, 3, "gd"};
const PlaceEntry kFrBrest{"FR-BRE", "Brest", "FR", 48.3904, -4.4861, 3, "gd"};
const PlaceEntry kWawEntry{"PL-WAW", "Warsaw", "PL", 52.2297, 21.0122, 1, "gd"};
const PlaceEntry kSpringfield{"US-IL-SPI", "Springfield", "US", 39.7817, -89.6501, 4, "gd"};

CandidateMention mention(std::initializer_list<const PlaceEntry*> candidates, std::size_t start) {
    CandidateMention m;
    m.start = start;
    m.end = start + 5;
    m.surface = "m";
    m.lookup_key = "m";
    m.candidates = candidates;
    return m;
}

GeoContext context_of(std::initializer_list<std::string> countries) {
    GeoContext ctx;
    for (const std::string& c : countries) ctx.countries[c] = GeoContext::from_shallow;
    return ctx;
}

}  // namespace

TEST_CASE("haversine matches the fixture distances") {
    // frozen from an independent evaluation of the formula
    CHECK(haversine_km(kWarsaw, kBrestBy) == Catch::Approx(186.22411256624045).margin(1e-6));
    CHECK(haversine_km(kWarsaw, kBrestFr) == Catch::Approx(1849.9140114515128).margin(1e-6));
    CHECK(haversine_km(kWarsaw, kWarsaw) == 0.0);
}

TEST_CASE("haversine symmetry, identity and triangle inequality", "[property]") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 500; ++trial) {
        const GeoPoint a = random_point(rng), b = random_point(rng), c = random_point(rng);
        CHECK(std::abs(haversine_km(a, b) - haversine_km(b, a)) < 1e-9);
        CHECK(haversine_km(a, a) == 0.0);
        CHECK(haversine_km(a, b) + haversine_km(b, c) + 1e-6 >= haversine_km(a, c));
        // cross-check against the law-of-cosines route
        CHECK(std::abs(haversine_km(a, b) - law_of_cosines_km(a, b)) < 0.5);
    }
}

TEST_CASE("km_weight matches the closed form") {
    const ScoringParams params;
    CHECK(km_weight(0.0, params) == 1.0);  // numerator equals denominator
    // (pi/2) / arcCot(-3), frozen from independent evaluation
    CHECK(km_weight(300.0, params) == Catch::Approx(0.557051165114654).margin(1e-9));
    CHECK(km_weight(10000.0, params) == Catch::Approx(0.0036558476622478215).margin(1e-9));
    CHECK(km_weight(10000.0, params) > 0.0);
    CHECK(km_weight(10000.0, params) < 0.01);
    CHECK(arccot(-3.0) == Catch::Approx(2.819842099193151).margin(1e-12));
}

TEST_CASE("km_weight is strictly decreasing with range (0, 1]", "[property]") {
    const ScoringParams params;
    double previous = km_weight(0.0, params);
    CHECK(previous == 1.0);
    for (int d = 100; d <= 50000; d += 100) {
        const double w = km_weight(static_cast<double>(d), params);
        CHECK(w < previous);
        CHECK(w > 0.0);
        previous = w;
    }
}

TEST_CASE("score_candidate composes the three terms") {
    const ScoringParams params;
    SECTION("class term only") {
        const auto trace = score_candidate(kParisFr, {}, {}, params);
        CHECK(trace.class_term == 80.0);
        CHECK(trace.context_term == 0.0);
        CHECK(trace.km_term == 0.0);
        CHECK_FALSE(trace.min_distance_km.has_value());
        CHECK(trace.total() == 80.0);
    }
    SECTION("context bonus") {
        const auto trace = score_candidate(kParisTx, context_of({"US"}), {}, params);
        CHECK(trace.total() == Catch::Approx(120.0));
    }
    SECTION("km term against the Warsaw anchor") {
        const auto trace = score_candidate(kByBrest, context_of({"PL"}), {kWarsaw}, params);
        CHECK(trace.class_term == 30.0);
        CHECK(trace.context_term == 0.0);
        REQUIRE(trace.min_distance_km.has_value());
        CHECK(*trace.min_distance_km == Catch::Approx(186.22411256624045).margin(1e-6));
        // frozen composition of haversine and Eq. 1
        CHECK(trace.total() == Catch::Approx(47.16795635400807).margin(1e-9));
    }
    SECTION("minimum over several anchors") {
        const auto trace = score_candidate(kByBrest, {}, {kBrestFr, kWarsaw}, params);
        CHECK(*trace.min_distance_km == Catch::Approx(186.22411256624045).margin(1e-6));
    }
}

TEST_CASE("resolve prefers importance with no other clues") {
    const auto resolved = resolve({mention({&kParisFr, &kParisTx}, 0)}, {}, {});
    REQUIRE(resolved.size() == 1);
    CHECK(resolved[0].place->place_id == "FR-PAR");
    CHECK(resolved[0].score == 80.0);
    CHECK_FALSE(resolved[0].tie_break_used);
}

TEST_CASE("resolve follows the kilometric clue on the Warsaw-Brest fixture") {
    const std::vector<CandidateMention> mentions = {mention({&kWawEntry}, 0),
                                                    mention({&kByBrest, &kFrBrest}, 10)};
    const auto resolved = resolve(mentions, context_of({"PL"}), {});
    REQUIRE(resolved.size() == 2);
    CHECK(resolved[1].place->place_id == "BY-BRE");
    REQUIRE(resolved[1].trace.size() == 2);
    CHECK(resolved[1].trace[0].total() == Catch::Approx(47.16795635400807).margin(1e-9));
    CHECK(resolved[1].trace[1].total() == Catch::Approx(30.45697880695575).margin(1e-9));

    // disabling the km heuristic turns it into a pure tie
    const auto no_km = resolve(mentions, context_of({"PL"}), {}, ResolveMode::scored,
                               ScoreToggles{true, true, false});
    CHECK(no_km[1].trace[0].total() == no_km[1].trace[1].total());
    CHECK(no_km[1].tie_break_used);
    CHECK(no_km[1].place->place_id == "BY-BRE");  // lower place_id on equal class
}

TEST_CASE("strict mode drops small out-of-context winners") {
    const std::vector<CandidateMention> mentions = {mention({&kSpringfield}, 0)};
    const auto scored = resolve(mentions, context_of({"GB"}), {}, ResolveMode::scored);
    CHECK(scored.size() == 1);
    const auto strict = resolve(mentions, context_of({"GB"}), {}, ResolveMode::strict);
    CHECK(strict.empty());
    // in-context winners survive strict mode
    CHECK(resolve(mentions, context_of({"US"}), {}, ResolveMode::strict).size() == 1);
    // important places survive regardless of context
    CHECK(resolve({mention({&kParisFr}, 0)}, context_of({"GB"}), {}, ResolveMode::strict).size() == 1);
}

TEST_CASE("ties break to lower class, then smaller place_id") {
    const PlaceEntry a{"B-PLACE", "X", "XA", 10.0, 10.0, 4, "t"};
    const PlaceEntry b{"A-PLACE", "X", "XB", 20.0, 20.0, 4, "t"};
    const PlaceEntry c{"C-PLACE", "X", "XC", 30.0, 30.0, 3, "t"};
    // same class: lexicographic id
    auto resolved = resolve({mention({&a, &b}, 0)}, {}, {}, ResolveMode::scored,
                            ScoreToggles{false, false, false});
    CHECK(resolved[0].place->place_id == "A-PLACE");
    CHECK(resolved[0].tie_break_used);
    // lower class beats id order
    resolved = resolve({mention({&a, &b, &c}, 0)}, {}, {}, ResolveMode::scored,
                       ScoreToggles{false, false, false});
    CHECK(resolved[0].place->place_id == "C-PLACE");
}

TEST_CASE("score equals the sum of its trace terms", "[property]") {
    std::mt19937 rng(17);
    const std::vector<const PlaceEntry*> pool = {&kParisFr, &kParisTx, &kByBrest, &kFrBrest, &kWawEntry,
                                                 &kSpringfield};
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<CandidateMention> mentions;
        const int n = 1 + static_cast<int>(rng() % 4);
        for (int i = 0; i < n; ++i) {
            const auto* first = pool[rng() % pool.size()];
            const auto* second = pool[rng() % pool.size()];
            if (first == second || rng() % 2)
                mentions.push_back(mention({first}, static_cast<std::size_t>(i) * 10));
            else if (first->place_id < second->place_id)
                mentions.push_back(mention({first, second}, static_cast<std::size_t>(i) * 10));
            else
                mentions.push_back(mention({second, first}, static_cast<std::size_t>(i) * 10));
        }
        const GeoContext ctx = rng() % 2 ? context_of({"PL", "US"}) : GeoContext{};
        for (const auto& r : resolve(mentions, ctx, {})) {
            double sum = 0.0;
            bool winner_in_candidates = false;
            for (const auto& t : r.trace) {
                if (t.entry == r.place) {
                    sum = t.class_term + t.context_term + t.km_term;
                    winner_in_candidates = true;
                }
            }
            CHECK(winner_in_candidates);
            CHECK(std::abs(r.score - sum) < 1e-9);
        }
    }
}

TEST_CASE("argmax is invariant under common positive scaling", "[property]") {
    std::mt19937 rng(23);
    const std::vector<const PlaceEntry*> pool = {&kParisFr, &kParisTx, &kByBrest, &kFrBrest,
                                                 &kSpringfield};
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<CandidateMention> mentions = {mention({&kWawEntry}, 0)};
        const auto* a = pool[rng() % pool.size()];
        const auto* b = pool[rng() % pool.size()];
        if (a == b) continue;
        mentions.push_back(a->place_id < b->place_id ? mention({a, b}, 10) : mention({b, a}, 10));

        const double k = std::uniform_real_distribution<double>(0.1, 9.0)(rng);
        ScoringParams scaled;
        for (auto& w : scaled.class_weights) w *= k;
        scaled.context_bonus *= k;
        scaled.km_coefficient *= k;

        const auto base = resolve(mentions, context_of({"US"}), {});
        const auto big = resolve(mentions, context_of({"US"}), scaled);
        REQUIRE(base.size() == big.size());
        for (std::size_t i = 0; i < base.size(); ++i) CHECK(base[i].place == big[i].place);
    }
}

TEST_CASE("load_params overrides fields and validates") {
    namespace fs = std::filesystem;
    const fs::path path = fs::temp_directory_path() / "geoparse_params.conf";
    std::ofstream(path, std::ios::trunc) << "# tuned\nclass_weight_3 = 40\ncontext_bonus=55\n"
                                         << "km_coefficient = 10\ninflexion_km = 200\n";
    const ScoringParams params = load_params(path.string());
    CHECK(params.class_weights[3] == 40.0);
    CHECK(params.class_weights[0] == 80.0);
    CHECK(params.context_bonus == 55.0);
    CHECK(params.km_coefficient == 10.0);
    CHECK(params.inflexion_km == 200.0);
    CHECK(params.steepness_km == 100.0);

    std::ofstream(path, std::ios::trunc) << "mystery_knob = 1\n";
    CHECK_THROWS_WITH(load_params(path.string()), Catch::Matchers::ContainsSubstring("mystery_knob"));
    std::ofstream(path, std::ios::trunc) << "inflexion_km = 0\n";
    CHECK_THROWS(load_params(path.string()));
    std::ofstream(path, std::ios::trunc) << "context_bonus = abc\n";
    CHECK_THROWS(load_params(path.string()));
}
