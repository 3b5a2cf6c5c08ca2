#pragma once

// The per-document tagging pipeline: scan -> person filter -> stop filter
// -> shallow context -> resolve. Pure per document over the shared
// immutable index; documents may be processed in parallel.

#include <string>
#include <utility>
#include <vector>

#include "geoparse/context.hpp"
#include "geoparse/disambig.hpp"
#include "geoparse/evalkit.hpp"
#include "geoparse/filters.hpp"
#include "geoparse/records.hpp"
#include "geoparse/textmatch.hpp"

namespace geoparse {

struct TaggerConfig {
    ScanOptions scan;
    ScoringParams params;
    ResolveMode mode = ResolveMode::scored;
    HeuristicToggles toggles;
};

// Everything resolve produced for one document, traces included.
struct DocResolution {
    std::vector<CandidateMention> mentions;  // after filters
    GeoContext context;
    std::vector<ResolvedMention> resolved;
    std::vector<std::string> warnings;
};

class GeoTagger {
public:
    GeoTagger(const GazetteerIndex& index, std::vector<MorphRule> rules, PersonLexicon persons,
              StopList stoplist, TaggerConfig config = {})
        : index_(&index),
          rules_(std::move(rules)),
          persons_(std::move(persons)),
          stoplist_(std::move(stoplist)),
          config_(std::move(config)) {}

    const TaggerConfig& config() const { return config_; }

    DocResolution resolve_document(const DocumentRecord& doc) const {
        DocResolution result;
        result.mentions = scan(doc.text, doc.lang, *index_, rules_, config_.scan);
        if (config_.toggles.person_filter && !persons_.empty()) {
            const PersonMatches matches = match_persons(doc.text, tokenize(doc.text, doc.lang), persons_);
            result.mentions = filter_persons(result.mentions, matches);
        }
        if (config_.toggles.stoplist)
            result.mentions = filter_stopwords(result.mentions, stoplist_, doc.lang);
        result.context =
            assemble_context(doc.source_country, shallow_parse(result.mentions), &result.warnings);
        const ScoreToggles score_toggles{config_.toggles.class_importance, config_.toggles.geo_context,
                                         config_.toggles.km_distance};
        result.resolved = resolve(result.mentions, result.context, config_.params, config_.mode, score_toggles);
        return result;
    }

    TaggedRecord tag(const DocumentRecord& doc) const {
        const DocResolution resolution = resolve_document(doc);
        TaggedRecord record;
        record.doc = doc;
        record.mentions.reserve(resolution.resolved.size());
        for (std::size_t i = 0; i < resolution.resolved.size(); ++i) {
            const ResolvedMention& r = resolution.resolved[i];
            MentionOut m;
            m.start = r.start;
            m.end = r.end;
            m.surface = r.surface;
            m.place_id = r.place->place_id;
            m.country = r.place->country;
            m.lat = r.place->lat;
            m.lon = r.place->lon;
            m.importance_class = r.place->importance_class;
            m.score = r.score;
            m.method = "deep";
            for (const CandidateMention& mention : resolution.mentions)
                if (mention.start == r.start && mention.end == r.end && shallow_eligible(mention))
                    m.method = "shallow";
            record.mentions.push_back(std::move(m));
        }
        return record;
    }

    std::vector<TaggedRecord> tag_all(const std::vector<DocumentRecord>& docs) const {
        std::vector<TaggedRecord> out;
        out.reserve(docs.size());
        for (const DocumentRecord& doc : docs) out.push_back(tag(doc));
        return out;
    }

private:
    const GazetteerIndex* index_;
    std::vector<MorphRule> rules_;
    PersonLexicon persons_;
    StopList stoplist_;
    TaggerConfig config_;
};

// One tag pass over the corpus with the given toggles; feeds ablation_run.
inline std::vector<PredictedMention> run_pipeline(const GazetteerIndex& index,
                                                  const std::vector<MorphRule>& rules,
                                                  const PersonLexicon& persons, const StopList& stoplist,
                                                  const std::vector<DocumentRecord>& docs,
                                                  TaggerConfig config) {
    const GeoTagger tagger(index, rules, persons, stoplist, std::move(config));
    return predictions_from(tagger.tag_all(docs));
}

}  // namespace geoparse
