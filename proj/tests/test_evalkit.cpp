#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "geoparse/evalkit.hpp"

using namespace geoparse;

namespace {

GoldAnnotation gold(const std::string& doc, std::size_t start, std::size_t end, const std::string& place,
                    const std::string& country, const std::string& lang = "en") {
    GoldAnnotation g;
    g.doc_id = doc;
    g.start = start;
    g.end = end;
    g.place_id = place;
    g.country = country;
    g.lang = lang;
    return g;
}

PredictedMention pred(const std::string& doc, std::size_t start, std::size_t end, const std::string& place,
                      const std::string& country, const std::string& lang = "en") {
    return {doc, lang, start, end, place, country};
}

}  // namespace

TEST_CASE("compare counts exact hits") {
    const auto counts = compare({gold("d1", 10, 15, "FR-PAR", "FR")},
                                {pred("d1", 10, 15, "FR-PAR", "FR")}, MatchMode::place);
    CHECK(counts.true_positives == 1);
    CHECK(counts.predicted_total == 1);
    CHECK(counts.gold_total == 1);
}

TEST_CASE("wrong entity never matches in either mode") {
    const std::vector<GoldAnnotation> g = {gold("d1", 10, 15, "FR-PAR", "FR")};
    const std::vector<PredictedMention> p = {pred("d1", 10, 15, "US-TX-PAR", "US")};
    CHECK(compare(g, p, MatchMode::place).true_positives == 0);
    CHECK(compare(g, p, MatchMode::country).true_positives == 0);
}

TEST_CASE("country mode matches on country alone") {
    const std::vector<GoldAnnotation> g = {gold("d1", 10, 15, "FR-PAR", "FR")};
    const std::vector<PredictedMention> p = {pred("d1", 10, 15, "FR-OTHER", "FR")};
    CHECK(compare(g, p, MatchMode::place).true_positives == 0);
    CHECK(compare(g, p, MatchMode::country).true_positives == 1);
}

TEST_CASE("overlap suffices, exact span equality is not required") {
    const auto counts = compare({gold("d1", 10, 20, "FR-PAR", "FR")},
                                {pred("d1", 14, 25, "FR-PAR", "FR")}, MatchMode::place);
    CHECK(counts.true_positives == 1);
    // disjoint spans never match
    CHECK(compare({gold("d1", 10, 20, "FR-PAR", "FR")}, {pred("d1", 20, 25, "FR-PAR", "FR")},
                  MatchMode::place)
              .true_positives == 0);
}

TEST_CASE("each gold span credits at most one prediction") {
    // hand-computed one-credit oracle: two correct predictions, one gold
    const auto counts = compare({gold("d1", 10, 20, "FR-PAR", "FR")},
                                {pred("d1", 10, 14, "FR-PAR", "FR"), pred("d1", 15, 20, "FR-PAR", "FR")},
                                MatchMode::place);
    CHECK(counts.true_positives == 1);
    CHECK(counts.predicted_total == 2);
    CHECK(counts.gold_total == 1);
}

TEST_CASE("predictions for unknown documents are an error") {
    CHECK_THROWS_AS(compare({gold("d1", 0, 5, "X", "XX")}, {pred("d2", 0, 5, "X", "XX")}, MatchMode::place),
                    EvalError);
}

TEST_CASE("prf formulas") {
    SECTION("hand-computed example") {
        const Prf scores = prf({3, 4, 5});
        CHECK(scores.precision == Catch::Approx(0.75).margin(1e-12));
        CHECK(scores.recall == Catch::Approx(0.60).margin(1e-12));
        CHECK(scores.f_measure == Catch::Approx(2.0 / 3.0).margin(1e-9));
    }
    SECTION("perfect run") {
        const Prf scores = prf({5, 5, 5});
        CHECK(scores.precision == 1.0);
        CHECK(scores.recall == 1.0);
        CHECK(scores.f_measure == 1.0);
    }
    SECTION("zero true positives") {
        const Prf scores = prf({0, 4, 5});
        CHECK(scores.precision == 0.0);
        CHECK(scores.recall == 0.0);
        CHECK(scores.f_measure == 0.0);
    }
    SECTION("nothing predicted, nothing gold") {
        const Prf scores = prf({0, 0, 0});
        CHECK(scores.precision == 1.0);
        CHECK(scores.recall == 1.0);
        CHECK(scores.f_measure == 1.0);
    }
    SECTION("nothing predicted, gold present") {
        const Prf scores = prf({0, 0, 5});
        CHECK(scores.precision == 0.0);
        CHECK(scores.recall == 0.0);
        CHECK(scores.f_measure == 0.0);
    }
}

TEST_CASE("prf invariants on random counts", "[property]") {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t predicted = rng() % 20;
        const std::size_t gold_total = rng() % 20;
        const std::size_t tp = std::min(predicted, gold_total) ? rng() % (std::min(predicted, gold_total) + 1) : 0;
        const Prf s = prf({tp, predicted, gold_total});
        CHECK(s.precision >= 0.0);
        CHECK(s.precision <= 1.0);
        CHECK(s.recall >= 0.0);
        CHECK(s.recall <= 1.0);
        CHECK(s.f_measure <= std::max(s.precision, s.recall) + 1e-12);
        if (gold_total > 0) CHECK((s.f_measure == 0.0) == (tp == 0));
    }
}

TEST_CASE("per-language micro counts sum to the global counts") {
    const std::vector<GoldAnnotation> g = {
        gold("en-1", 0, 5, "A", "AA", "en"), gold("en-1", 10, 15, "B", "BB", "en"),
        gold("fr-1", 0, 5, "C", "CC", "fr"), gold("ar-1", 0, 5, "D", "DD", "ar")};
    const std::vector<PredictedMention> p = {
        pred("en-1", 0, 5, "A", "AA", "en"), pred("en-1", 20, 25, "X", "XX", "en"),
        pred("fr-1", 0, 5, "C", "CC", "fr"), pred("ar-1", 0, 5, "WRONG", "DD", "ar")};
    const MetricsReport report = make_report(g, p, MatchMode::place, "unit");
    CHECK(report.ablation_label == "unit");
    CHECK(report.overall.counts.true_positives == 2);
    CHECK(report.overall.counts.predicted_total == 4);
    CHECK(report.overall.counts.gold_total == 4);
    REQUIRE(report.per_language.size() == 3);
    std::size_t tp = 0, predicted = 0, gold_total = 0;
    double f_sum = 0.0;
    for (const MetricsRow& row : report.per_language) {
        tp += row.counts.true_positives;
        predicted += row.counts.predicted_total;
        gold_total += row.counts.gold_total;
        f_sum += row.scores.f_measure;
    }
    CHECK(tp == report.overall.counts.true_positives);
    CHECK(predicted == report.overall.counts.predicted_total);
    CHECK(gold_total == report.overall.counts.gold_total);
    CHECK(report.macro_average.f_measure ==
          Catch::Approx(f_sum / static_cast<double>(report.per_language.size())));
    // country mode agrees with hand count: ar prediction has the right country
    CHECK(make_report(g, p, MatchMode::country).overall.counts.true_positives == 3);
}

TEST_CASE("compare is stable under document reordering") {
    const std::vector<GoldAnnotation> g = {gold("a", 0, 5, "P", "PP"), gold("b", 0, 5, "Q", "QQ")};
    std::vector<PredictedMention> p = {pred("a", 0, 5, "P", "PP"), pred("b", 0, 5, "Q", "QQ")};
    const auto before = compare(g, p, MatchMode::place);
    std::swap(p[0], p[1]);
    const auto after = compare(g, p, MatchMode::place);
    CHECK(before.true_positives == after.true_positives);
}

TEST_CASE("heuristic toggle helpers") {
    HeuristicToggles toggles;
    CHECK(disable_heuristic(toggles, "km-distance"));
    CHECK_FALSE(toggles.km_distance);
    CHECK(toggles.geo_context);
    CHECK_FALSE(disable_heuristic(toggles, "made-up"));

    const auto configs = standard_ablation_configs();
    REQUIRE(configs.size() == 7);
    CHECK(configs.front().first == "none");
    CHECK_FALSE(configs.front().second.geo_context);
    CHECK_FALSE(configs.front().second.stoplist);
    CHECK(configs.back().first == "all");
    CHECK(configs.back().second.km_distance);
    // each single-heuristic row enables exactly one toggle
    for (std::size_t i = 1; i + 1 < configs.size(); ++i) {
        const auto& t = configs[i].second;
        const int on = int(t.geo_context) + int(t.class_importance) + int(t.km_distance) +
                       int(t.person_filter) + int(t.stoplist);
        CHECK(on == 1);
    }
}

TEST_CASE("ablation_run evaluates every configuration") {
    const std::vector<GoldAnnotation> g = {gold("d", 0, 5, "P", "PP")};
    const auto reports = ablation_run(
        g, standard_ablation_configs(), MatchMode::place, [&](const HeuristicToggles& toggles) {
            // a fake pipeline: only the all-on configuration finds the place
            std::vector<PredictedMention> out;
            if (toggles.geo_context && toggles.km_distance) out.push_back(pred("d", 0, 5, "P", "PP"));
            return out;
        });
    REQUIRE(reports.size() == 7);
    CHECK(reports.front().ablation_label == "none");
    CHECK(reports.front().overall.scores.f_measure == 0.0);
    CHECK(reports.back().ablation_label == "all");
    CHECK(reports.back().overall.scores.f_measure == 1.0);
}
