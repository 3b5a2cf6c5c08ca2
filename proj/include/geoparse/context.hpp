#pragma once

// GeoContext: the countries a document is about, assembled from the
// publishing place in the metadata and a shallow pass over the filtered
// mentions.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "geoparse/textmatch.hpp"

namespace geoparse {

struct GeoContext {
    enum Provenance : unsigned { from_metadata = 1u, from_shallow = 2u };

    std::map<std::string, unsigned> countries;  // country code -> provenance mask

    bool contains(std::string_view country) const { return countries.count(std::string(country)) > 0; }
    bool empty() const { return countries.empty(); }
};

// A mention qualifies for the shallow pass iff every candidate has class
// <= 2 and all candidates agree on the country; homographs spanning
// countries or touching class >= 3 are ignored.
inline bool shallow_eligible(const CandidateMention& mention) {
    const std::string* country = nullptr;
    for (const PlaceEntry* candidate : mention.candidates) {
        if (candidate->importance_class > 2) return false;
        if (country && *country != candidate->country) return false;
        country = &candidate->country;
    }
    return country != nullptr;
}

inline std::set<std::string> shallow_parse(const std::vector<CandidateMention>& mentions) {
    std::set<std::string> countries;
    for (const CandidateMention& mention : mentions)
        if (shallow_eligible(mention)) countries.insert(mention.candidates.front()->country);
    return countries;
}

// Union of the metadata country (when present and well-formed) and the
// shallow-pass countries. A malformed source_country is reported through
// |warnings| and ignored.
inline GeoContext assemble_context(const std::optional<std::string>& source_country,
                                   const std::set<std::string>& shallow_countries,
                                   std::vector<std::string>* warnings = nullptr) {
    GeoContext context;
    if (source_country) {
        if (detail_gaz::valid_country(*source_country)) {
            context.countries[detail_gaz::upper_ascii(*source_country)] |= GeoContext::from_metadata;
        } else if (warnings) {
            warnings->push_back("malformed source_country '" + *source_country + "' ignored");
        }
    }
    for (const std::string& country : shallow_countries)
        context.countries[country] |= GeoContext::from_shallow;
    return context;
}

}  // namespace geoparse
