#pragma once

// Evaluation against gold annotations: span-overlap matching with
// one-credit-per-gold accounting, precision/recall/F, per-language
// breakdowns (micro and macro) and the per-heuristic ablation harness.

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace geoparse {

class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct GoldAnnotation {
    std::string doc_id;
    std::size_t start = 0;
    std::size_t end = 0;
    std::optional<std::string> place_id;
    std::optional<std::string> country;
    std::optional<double> lat, lon;
    std::optional<std::string> lang;
};

struct PredictedMention {
    std::string doc_id;
    std::string lang;
    std::size_t start = 0;
    std::size_t end = 0;
    std::string place_id;
    std::string country;
};

enum class MatchMode { place, country };

struct EvalCounts {
    std::size_t true_positives = 0;
    std::size_t predicted_total = 0;
    std::size_t gold_total = 0;
};

// A prediction is a true positive iff its span overlaps a gold span in the
// same document and the place (or country) matches; each gold span credits
// at most one prediction. Predictions for unknown documents are an error.
inline EvalCounts compare(const std::vector<GoldAnnotation>& gold,
                          const std::vector<PredictedMention>& predicted, MatchMode mode) {
    std::map<std::string, std::vector<const GoldAnnotation*>> gold_by_doc;
    for (const GoldAnnotation& g : gold) gold_by_doc[g.doc_id].push_back(&g);

    EvalCounts counts;
    counts.gold_total = gold.size();
    counts.predicted_total = predicted.size();
    std::set<const GoldAnnotation*> credited;
    for (const PredictedMention& pred : predicted) {
        const auto it = gold_by_doc.find(pred.doc_id);
        if (it == gold_by_doc.end())
            throw EvalError("prediction references doc_id '" + pred.doc_id + "' absent from the gold corpus");
        for (const GoldAnnotation* g : it->second) {
            if (credited.count(g)) continue;
            if (!(pred.start < g->end && g->start < pred.end)) continue;
            bool match = false;
            if (mode == MatchMode::place) {
                match = g->place_id && *g->place_id == pred.place_id;
            } else {
                match = g->country && *g->country == pred.country;
            }
            if (match) {
                ++counts.true_positives;
                credited.insert(g);
                break;
            }
        }
    }
    return counts;
}

struct Prf {
    double precision = 0.0;
    double recall = 0.0;
    double f_measure = 0.0;
};

inline Prf prf(const EvalCounts& counts) {
    Prf out;
    const double tp = static_cast<double>(counts.true_positives);
    if (counts.predicted_total > 0)
        out.precision = tp / static_cast<double>(counts.predicted_total);
    else
        out.precision = counts.gold_total == 0 ? 1.0 : 0.0;
    out.recall = counts.gold_total > 0 ? tp / static_cast<double>(counts.gold_total) : 1.0;
    const double sum = out.precision + out.recall;
    out.f_measure = sum > 0.0 ? 2.0 * out.precision * out.recall / sum : 0.0;
    return out;
}

struct MetricsRow {
    std::string label;
    EvalCounts counts;
    Prf scores;
};

struct MetricsReport {
    std::string ablation_label;
    MetricsRow overall;                  // micro-averaged
    std::vector<MetricsRow> per_language;
    Prf macro_average;                   // unweighted mean over languages
};

// Languages come from the predictions' document records; gold annotations
// may override per annotation.
inline MetricsReport make_report(const std::vector<GoldAnnotation>& gold,
                                 const std::vector<PredictedMention>& predicted, MatchMode mode,
                                 std::string label = {}) {
    MetricsReport report;
    report.ablation_label = std::move(label);
    report.overall.label = "all";
    report.overall.counts = compare(gold, predicted, mode);
    report.overall.scores = prf(report.overall.counts);

    std::map<std::string, std::string> doc_lang;
    for (const PredictedMention& pred : predicted)
        if (!pred.lang.empty()) doc_lang[pred.doc_id] = pred.lang;
    for (const GoldAnnotation& g : gold)
        if (g.lang) doc_lang[g.doc_id] = *g.lang;
    const auto lang_of = [&](const std::string& doc_id) {
        const auto it = doc_lang.find(doc_id);
        return it == doc_lang.end() ? std::string("und") : it->second;
    };

    std::map<std::string, std::pair<std::vector<GoldAnnotation>, std::vector<PredictedMention>>> by_lang;
    for (const GoldAnnotation& g : gold) by_lang[lang_of(g.doc_id)].first.push_back(g);
    for (const PredictedMention& pred : predicted) by_lang[lang_of(pred.doc_id)].second.push_back(pred);

    double p_sum = 0.0, r_sum = 0.0, f_sum = 0.0;
    for (const auto& [lang, split] : by_lang) {
        MetricsRow row;
        row.label = lang;
        row.counts = compare(split.first, split.second, mode);
        row.scores = prf(row.counts);
        p_sum += row.scores.precision;
        r_sum += row.scores.recall;
        f_sum += row.scores.f_measure;
        report.per_language.push_back(std::move(row));
    }
    if (!report.per_language.empty()) {
        const double n = static_cast<double>(report.per_language.size());
        report.macro_average = {p_sum / n, r_sum / n, f_sum / n};
    }
    return report;
}

// The five disambiguation/filtering heuristics the ablation rows toggle.
struct HeuristicToggles {
    bool geo_context = true;
    bool class_importance = true;
    bool km_distance = true;
    bool person_filter = true;
    bool stoplist = true;
};

inline constexpr const char* kHeuristicNames[] = {"geo-context", "class-importance", "km-distance",
                                                  "person-filter", "stoplist"};

inline bool disable_heuristic(HeuristicToggles& toggles, std::string_view name) {
    if (name == "geo-context") return toggles.geo_context = false, true;
    if (name == "class-importance") return toggles.class_importance = false, true;
    if (name == "km-distance") return toggles.km_distance = false, true;
    if (name == "person-filter") return toggles.person_filter = false, true;
    if (name == "stoplist") return toggles.stoplist = false, true;
    return false;
}

// Table-style rows: no heuristics, each alone, all together.
inline std::vector<std::pair<std::string, HeuristicToggles>> standard_ablation_configs() {
    const HeuristicToggles none{false, false, false, false, false};
    std::vector<std::pair<std::string, HeuristicToggles>> configs;
    configs.emplace_back("none", none);
    for (const char* name : kHeuristicNames) {
        HeuristicToggles only = none;
        if (std::string_view(name) == "geo-context") only.geo_context = true;
        if (std::string_view(name) == "class-importance") only.class_importance = true;
        if (std::string_view(name) == "km-distance") only.km_distance = true;
        if (std::string_view(name) == "person-filter") only.person_filter = true;
        if (std::string_view(name) == "stoplist") only.stoplist = true;
        configs.emplace_back(name, only);
    }
    configs.emplace_back("all", HeuristicToggles{});
    return configs;
}

// One full tag+eval cycle per configuration. |run| maps a toggle set to
// the predictions it produces on the corpus.
template <typename RunFn>
std::vector<MetricsReport> ablation_run(const std::vector<GoldAnnotation>& gold,
                                        const std::vector<std::pair<std::string, HeuristicToggles>>& configs,
                                        MatchMode mode, RunFn&& run) {
    std::vector<MetricsReport> reports;
    reports.reserve(configs.size());
    for (const auto& [label, toggles] : configs)
        reports.push_back(make_report(gold, run(toggles), mode, label));
    return reports;
}

}  // namespace geoparse
