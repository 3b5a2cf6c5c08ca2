#pragma once

// Score-based toponym resolution: class weight + country-context bonus +
// kilometric-distance weight. Distances use the Sinnott haversine formula;
// the distance weight is the normalized arc-cotangent with its inflexion
// point at 300 km.

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "geoparse/context.hpp"
#include "geoparse/textmatch.hpp"

namespace geoparse {

struct ScoringParams {
    std::array<double, 7> class_weights{80.0, 80.0, 80.0, 30.0, 20.0, 10.0, 5.0};
    double context_bonus = 100.0;
    double km_coefficient = 20.0;
    double inflexion_km = 300.0;
    double steepness_km = 100.0;
    double earth_radius_km = 6371.0;
};

// Config file: key=value lines, '#' comments. Keys: class_weight_0 ..
// class_weight_6, context_bonus, km_coefficient, inflexion_km,
// steepness_km, earth_radius_km.
inline ScoringParams load_params(const std::string& path, ScoringParams base = {}) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open params file: " + path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string_view view = line;
        while (!view.empty() && (view.front() == ' ' || view.front() == '\t')) view.remove_prefix(1);
        if (view.empty() || view.front() == '#') continue;
        const std::size_t eq = view.find('=');
        if (eq == std::string_view::npos)
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected key=value");
        auto trim = [](std::string_view s) {
            while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
            while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
            return s;
        };
        const std::string key(trim(view.substr(0, eq)));
        const auto value = detail_gaz::parse_double(trim(view.substr(eq + 1)));
        if (!value)
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": invalid number for '" + key + "'");
        bool known = false;
        for (int c = 0; c <= 6; ++c) {
            if (key == "class_weight_" + std::to_string(c)) {
                base.class_weights[static_cast<std::size_t>(c)] = *value;
                known = true;
            }
        }
        if (key == "context_bonus") base.context_bonus = *value, known = true;
        if (key == "km_coefficient") base.km_coefficient = *value, known = true;
        if (key == "inflexion_km") base.inflexion_km = *value, known = true;
        if (key == "steepness_km") base.steepness_km = *value, known = true;
        if (key == "earth_radius_km") base.earth_radius_km = *value, known = true;
        if (!known)
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    if (base.inflexion_km <= 0.0 || base.steepness_km <= 0.0)
        throw std::runtime_error(path + ": inflexion_km and steepness_km must be positive");
    return base;
}

struct GeoPoint {
    double lat = 0.0;
    double lon = 0.0;
};

// Great-circle distance in km (Sinnott's haversine form).
inline double haversine_km(const GeoPoint& a, const GeoPoint& b, double radius_km = 6371.0) {
    constexpr double kDegToRad = 3.14159265358979323846 / 180.0;
    const double phi1 = a.lat * kDegToRad;
    const double phi2 = b.lat * kDegToRad;
    const double dphi = (b.lat - a.lat) * kDegToRad;
    const double dlambda = (b.lon - a.lon) * kDegToRad;
    const double s1 = std::sin(dphi / 2.0);
    const double s2 = std::sin(dlambda / 2.0);
    const double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
    return 2.0 * radius_km * std::asin(std::min(1.0, std::sqrt(h)));
}

// arc-cotangent on the continuous (0, pi) branch
inline double arccot(double x) { return 3.14159265358979323846 / 2.0 - std::atan(x); }

// Closeness weight in (0, 1]: 1 at distance 0, ~0.557 at the inflexion
// point, decaying towards 0. Strictly decreasing in d.
inline double km_weight(double distance_km, const ScoringParams& params = {}) {
    return arccot((distance_km - params.inflexion_km) / params.steepness_km) /
           arccot(-params.inflexion_km / params.steepness_km);
}

// Coordinates of the unambiguous mentions (candidate cardinality 1).
using AnchorSet = std::vector<GeoPoint>;

inline AnchorSet collect_anchors(const std::vector<CandidateMention>& mentions) {
    AnchorSet anchors;
    for (const CandidateMention& mention : mentions)
        if (mention.candidates.size() == 1)
            anchors.push_back({mention.candidates.front()->lat, mention.candidates.front()->lon});
    return anchors;
}

struct ScoreToggles {
    bool class_importance = true;
    bool geo_context = true;
    bool km_distance = true;
};

struct CandidateTrace {
    const PlaceEntry* entry = nullptr;
    double class_term = 0.0;
    double context_term = 0.0;
    double km_term = 0.0;
    std::optional<double> min_distance_km;  // min over anchors, when any exist
    double total() const { return class_term + context_term + km_term; }
};

inline CandidateTrace score_candidate(const PlaceEntry& candidate, const GeoContext& context,
                                      const AnchorSet& anchors, const ScoringParams& params,
                                      const ScoreToggles& toggles = {}) {
    CandidateTrace trace;
    trace.entry = &candidate;
    if (toggles.class_importance) {
        const int cls = std::clamp(candidate.importance_class, 0, 6);
        trace.class_term = params.class_weights[static_cast<std::size_t>(cls)];
    }
    if (toggles.geo_context && context.contains(candidate.country)) trace.context_term = params.context_bonus;
    if (!anchors.empty()) {
        const GeoPoint here{candidate.lat, candidate.lon};
        double min_d = haversine_km(here, anchors.front(), params.earth_radius_km);
        for (std::size_t i = 1; i < anchors.size(); ++i)
            min_d = std::min(min_d, haversine_km(here, anchors[i], params.earth_radius_km));
        trace.min_distance_km = min_d;
        if (toggles.km_distance) trace.km_term = params.km_coefficient * km_weight(min_d, params);
    }
    return trace;
}

enum class ResolveMode { scored, strict };

struct ResolvedMention {
    std::size_t start = 0;
    std::size_t end = 0;
    std::string surface;
    std::string lookup_key;
    const PlaceEntry* place = nullptr;  // winner, always one of the candidates
    double score = 0.0;
    std::vector<CandidateTrace> trace;  // per-candidate breakdown, candidate order
    bool tie_break_used = false;
};

// Every mention resolves to its argmax candidate; ties break to the lower
// class, then the lexicographically smaller place_id. In strict mode a
// winner of class >= 3 whose country is outside the context drops the
// mention entirely.
inline std::vector<ResolvedMention> resolve(const std::vector<CandidateMention>& mentions,
                                            const GeoContext& context, const ScoringParams& params,
                                            ResolveMode mode = ResolveMode::scored,
                                            const ScoreToggles& toggles = {}) {
    const AnchorSet anchors = collect_anchors(mentions);
    std::vector<ResolvedMention> resolved;
    resolved.reserve(mentions.size());
    for (const CandidateMention& mention : mentions) {
        ResolvedMention out;
        out.start = mention.start;
        out.end = mention.end;
        out.surface = mention.surface;
        out.lookup_key = mention.lookup_key;
        out.trace.reserve(mention.candidates.size());
        for (const PlaceEntry* candidate : mention.candidates)
            out.trace.push_back(score_candidate(*candidate, context, anchors, params, toggles));

        const CandidateTrace* best = &out.trace.front();
        for (const CandidateTrace& trace : out.trace) {
            if (trace.total() > best->total() ||
                (trace.total() == best->total() &&
                 (trace.entry->importance_class < best->entry->importance_class ||
                  (trace.entry->importance_class == best->entry->importance_class &&
                   trace.entry->place_id < best->entry->place_id))))
                best = &trace;
        }
        for (const CandidateTrace& trace : out.trace)
            out.tie_break_used = out.tie_break_used || (&trace != best && trace.total() == best->total());
        out.place = best->entry;
        out.score = best->total();

        if (mode == ResolveMode::strict && out.place->importance_class >= 3 &&
            !context.contains(out.place->country))
            continue;
        resolved.push_back(std::move(out));
    }
    return resolved;
}

}  // namespace geoparse
