// geoparse: gazetteer-driven place recognition and disambiguation.
//
// Subcommands: build-index, tag, eval, export, stopwords build.
// Exit codes: 0 success, 1 data error, 2 usage error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "geoparse/exporters.hpp"
#include "geoparse/pipeline.hpp"

namespace {

using namespace geoparse;

void report_issues(const std::string& path, const std::vector<RowIssue>& issues) {
    for (const RowIssue& issue : issues)
        std::cerr << path << ":" << issue.line << ": " << issue.message << "\n";
}

struct BuildIndexArgs {
    std::vector<std::string> places_paths;
    std::vector<std::string> variants_paths;
    std::string out_path;
};

int cmd_build_index(const BuildIndexArgs& args) {
    std::vector<PlaceEntry> places;
    std::size_t rejected_places = 0;
    for (const std::string& path : args.places_paths) {
        auto loaded = load_places(path);
        report_issues(path, loaded.issues);
        rejected_places += loaded.rejected;
        for (auto& row : loaded.rows) places.push_back(std::move(row));
    }
    std::vector<NameVariant> variants;
    std::size_t rejected_variants = 0;
    for (const std::string& path : args.variants_paths) {
        auto loaded = load_variants(path);
        report_issues(path, loaded.issues);
        rejected_variants += loaded.rejected;
        for (auto& row : loaded.rows) variants.push_back(std::move(row));
    }
    std::vector<std::string> build_issues;
    const GazetteerIndex index = GazetteerIndex::build(std::move(places), std::move(variants), &build_issues);
    for (const std::string& issue : build_issues) std::cerr << issue << "\n";
    index.persist(args.out_path);
    std::cout << "places: " << index.meta().place_count << " (" << rejected_places << " rejected)\n"
              << "variants: " << index.meta().variant_count << " (" << rejected_variants
              << " rejected, " << build_issues.size() << " dropped at build)\n"
              << "checksum: " << index.meta().checksum << "\n"
              << "index written to " << args.out_path << "\n";
    return 0;
}

struct TagArgs {
    std::string index_path;
    std::string input_path;
    std::string output_path;
    std::string persons_path;
    std::string stoplist_path;
    std::string rules_path;
    std::string params_path;
    std::string mode = "scored";
    std::vector<std::string> disabled;
    std::size_t max_span = 4;
};

GeoTagger make_tagger(const GazetteerIndex& index, const TagArgs& args) {
    std::vector<MorphRule> rules;
    if (!args.rules_path.empty()) {
        auto loaded = load_rules(args.rules_path);
        report_issues(args.rules_path, loaded.issues);
        rules = std::move(loaded.rows);
    }
    PersonLexicon persons;
    if (!args.persons_path.empty()) persons = PersonLexicon::load(args.persons_path);
    StopList stoplist;
    if (!args.stoplist_path.empty()) stoplist = StopList::load(args.stoplist_path);

    TaggerConfig config;
    config.scan.max_span_tokens = args.max_span;
    if (!args.params_path.empty()) config.params = load_params(args.params_path);
    if (args.mode == "strict")
        config.mode = ResolveMode::strict;
    else if (args.mode != "scored")
        throw CLI::ValidationError("--mode", "expected 'scored' or 'strict'");
    for (const std::string& name : args.disabled)
        if (!disable_heuristic(config.toggles, name))
            throw CLI::ValidationError("--disable", "unknown heuristic '" + name + "'");
    return GeoTagger(index, std::move(rules), std::move(persons), std::move(stoplist), std::move(config));
}

int cmd_tag(const TagArgs& args) {
    const GazetteerIndex index = GazetteerIndex::restore(args.index_path);
    const GeoTagger tagger = make_tagger(index, args);

    std::ifstream in(args.input_path, std::ios::binary);
    if (!in) throw SchemaError("cannot open documents file: " + args.input_path);
    std::ostream* out = &std::cout;
    std::ofstream file_out;
    if (!args.output_path.empty()) {
        file_out.open(args.output_path, std::ios::binary | std::ios::trunc);
        if (!file_out) throw SchemaError("cannot open output file: " + args.output_path);
        out = &file_out;
    }

    std::set<std::string> seen_ids;
    std::string line;
    std::size_t line_no = 0, tagged = 0, skipped = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            const DocumentRecord doc = parse_document(line, line_no, args.input_path);
            if (!seen_ids.insert(doc.id).second)
                throw SchemaError(args.input_path + ":" + std::to_string(line_no) +
                                  ": duplicate document id '" + doc.id + "'");
            const TaggedRecord record = tagger.tag(doc);
            (*out) << to_json(record).dump() << "\n";
            ++tagged;
        } catch (const SchemaError& e) {
            std::cerr << "skipping document: " << e.what() << "\n";
            ++skipped;
        }
    }
    std::cerr << "tagged " << tagged << " documents (" << skipped << " skipped)\n";
    return 0;
}

struct EvalArgs {
    std::string gold_path;
    std::string pred_path;
    std::string match = "place";
    std::string report_path;
    std::string index_path;
    bool ablation = false;
    // ablation inputs (tag-side)
    std::string input_path;
    std::string persons_path;
    std::string stoplist_path;
    std::string rules_path;
    std::string params_path;
    std::size_t max_span = 4;
};

MatchMode parse_match_mode(const std::string& value) {
    if (value == "place") return MatchMode::place;
    if (value == "country") return MatchMode::country;
    throw CLI::ValidationError("--match", "expected 'place' or 'country'");
}

void backfill_gold_countries(std::vector<GoldAnnotation>& gold, const GazetteerIndex& index) {
    for (GoldAnnotation& g : gold)
        if (!g.country && g.place_id)
            if (const PlaceEntry* entry = index.find(*g.place_id)) g.country = entry->country;
}

void print_row(std::ostream& out, const std::string& label, const EvalCounts& counts, const Prf& scores) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-18s tp=%-5zu pred=%-5zu gold=%-5zu P=%.4f R=%.4f F=%.4f",
                  label.c_str(), counts.true_positives, counts.predicted_total, counts.gold_total,
                  scores.precision, scores.recall, scores.f_measure);
    out << buf << "\n";
}

void write_report_tsv(const std::string& path, const std::vector<MetricsReport>& reports) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw EvalError("cannot open report file: " + path);
    out << "run\tscope\ttp\tpredicted\tgold\tprecision\trecall\tf_measure\n";
    char buf[64];
    const auto emit = [&](const std::string& run, const std::string& scope, const EvalCounts& c,
                          const Prf& s) {
        std::snprintf(buf, sizeof buf, "%.6f\t%.6f\t%.6f", s.precision, s.recall, s.f_measure);
        out << run << "\t" << scope << "\t" << c.true_positives << "\t" << c.predicted_total << "\t"
            << c.gold_total << "\t" << buf << "\n";
    };
    for (const MetricsReport& report : reports) {
        const std::string run = report.ablation_label.empty() ? "eval" : report.ablation_label;
        emit(run, "all", report.overall.counts, report.overall.scores);
        for (const MetricsRow& row : report.per_language) emit(run, row.label, row.counts, row.scores);
        std::snprintf(buf, sizeof buf, "%.6f\t%.6f\t%.6f", report.macro_average.precision,
                      report.macro_average.recall, report.macro_average.f_measure);
        out << run << "\tmacro-average\t-\t-\t-\t" << buf << "\n";
    }
}

void print_report(const MetricsReport& report) {
    if (!report.ablation_label.empty()) std::cout << "[" << report.ablation_label << "]\n";
    print_row(std::cout, "all", report.overall.counts, report.overall.scores);
    for (const MetricsRow& row : report.per_language) print_row(std::cout, row.label, row.counts, row.scores);
    char buf[96];
    std::snprintf(buf, sizeof buf, "%-18s P=%.4f R=%.4f F=%.4f", "macro-average",
                  report.macro_average.precision, report.macro_average.recall,
                  report.macro_average.f_measure);
    std::cout << buf << "\n";
}

int cmd_eval(const EvalArgs& args) {
    const MatchMode mode = parse_match_mode(args.match);
    std::vector<GoldAnnotation> gold = load_gold(args.gold_path);

    if (args.ablation) {
        if (args.index_path.empty() || args.input_path.empty())
            throw CLI::ValidationError("--ablation", "requires --index and --input");
        const GazetteerIndex index = GazetteerIndex::restore(args.index_path);
        backfill_gold_countries(gold, index);
        const std::vector<DocumentRecord> docs = load_documents(args.input_path);

        std::vector<MorphRule> rules;
        if (!args.rules_path.empty()) {
            auto loaded = load_rules(args.rules_path);
            report_issues(args.rules_path, loaded.issues);
            rules = std::move(loaded.rows);
        }
        PersonLexicon persons;
        if (!args.persons_path.empty()) persons = PersonLexicon::load(args.persons_path);
        StopList stoplist;
        if (!args.stoplist_path.empty()) stoplist = StopList::load(args.stoplist_path);
        TaggerConfig config;
        config.scan.max_span_tokens = args.max_span;
        if (!args.params_path.empty()) config.params = load_params(args.params_path);

        const std::vector<MetricsReport> reports =
            ablation_run(gold, standard_ablation_configs(), mode, [&](const HeuristicToggles& toggles) {
                TaggerConfig per = config;
                per.toggles = toggles;
                return run_pipeline(index, rules, persons, stoplist, docs, per);
            });
        for (const MetricsReport& report : reports) print_report(report);
        if (!args.report_path.empty()) write_report_tsv(args.report_path, reports);
        return 0;
    }

    const std::vector<TaggedRecord> pred_records = load_tagged(args.pred_path);
    if (!args.index_path.empty()) {
        const GazetteerIndex index = GazetteerIndex::restore(args.index_path);
        backfill_gold_countries(gold, index);
    }
    const MetricsReport report = make_report(gold, predictions_from(pred_records), mode);
    print_report(report);
    if (!args.report_path.empty()) write_report_tsv(args.report_path, {report});
    return 0;
}

struct ExportArgs {
    std::string format;
    std::string input_path;
    std::string out_path;
    std::string stories_path;
};

int cmd_export(const ExportArgs& args) {
    const std::vector<TaggedRecord> records = load_tagged(args.input_path);
    std::string payload;
    std::size_t skipped = 0;
    if (args.format == "georss") {
        GeoRssResult result = to_georss(records);
        payload = std::move(result.xml);
        skipped = result.skipped_documents;
    } else if (args.format == "kml") {
        std::vector<Story> metadata;
        if (!args.stories_path.empty()) metadata = load_story_metadata(args.stories_path);
        payload = to_kml(build_stories(records, metadata));
    } else if (args.format == "geojson") {
        payload = to_geojson(records);
    } else {
        throw CLI::ValidationError("--format", "expected georss, kml or geojson");
    }
    std::ofstream out(args.out_path, std::ios::binary | std::ios::trunc);
    if (!out) throw SchemaError("cannot open output file: " + args.out_path);
    out << payload;
    std::cerr << "wrote " << args.out_path;
    if (args.format == "georss") std::cerr << " (" << skipped << " documents without mentions skipped)";
    std::cerr << "\n";
    return 0;
}

struct StopwordsArgs {
    std::string index_path;
    std::string corpus_path;
    std::string firstnames_path;
    std::string out_path;
    std::string stoplist_out;
    std::string lang = "*";
    double threshold = 5.0;
    bool accept_all = false;
};

int cmd_stopwords_build(const StopwordsArgs& args) {
    const GazetteerIndex index = GazetteerIndex::restore(args.index_path);
    std::vector<StopProposal> proposals;
    if (!args.corpus_path.empty()) {
        auto corpus_proposals =
            build_stoplist_from_corpus(args.corpus_path, index, args.threshold, args.lang);
        proposals.insert(proposals.end(), corpus_proposals.begin(), corpus_proposals.end());
    }
    if (!args.firstnames_path.empty()) {
        auto firstname_proposals = build_stoplist_from_firstnames(load_firstnames(args.firstnames_path), index);
        proposals.insert(proposals.end(), firstname_proposals.begin(), firstname_proposals.end());
    }
    if (args.accept_all)
        for (StopProposal& p : proposals) p.accepted = true;

    std::ofstream out(args.out_path, std::ios::binary | std::ios::trunc);
    if (!out) throw FilterError("cannot open proposals file: " + args.out_path);
    out << "# name\tlang\tsource\tfreq_per_million\taccepted\n";
    char buf[32];
    for (const StopProposal& p : proposals) {
        std::snprintf(buf, sizeof buf, "%.3f", p.frequency_per_million);
        out << p.name << "\t" << p.lang << "\t" << p.source << "\t" << buf << "\t"
            << (p.accepted ? 1 : 0) << "\n";
    }
    std::cout << proposals.size() << " proposals written to " << args.out_path << "\n";

    if (!args.stoplist_out.empty()) {
        const StopList accepted = to_stoplist(proposals);
        std::ofstream stop_out(args.stoplist_out, std::ios::binary | std::ios::trunc);
        if (!stop_out) throw FilterError("cannot open stoplist file: " + args.stoplist_out);
        for (const StopEntry& entry : accepted.entries())
            stop_out << entry.name << "\t" << entry.lang << "\t" << entry.provenance << "\n";
        std::cout << accepted.size() << " accepted entries written to " << args.stoplist_out << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multilingual geoparsing: recognition, disambiguation, evaluation, export"};
    app.require_subcommand(1);

    BuildIndexArgs build_args;
    CLI::App* build = app.add_subcommand("build-index", "build a binary gazetteer index from TSV tables");
    build->add_option("--places", build_args.places_paths, "places.tsv (repeatable)")->required();
    build->add_option("--variants", build_args.variants_paths, "variants.tsv (repeatable)");
    build->add_option("--out", build_args.out_path, "output index file")->required();

    TagArgs tag_args;
    CLI::App* tag = app.add_subcommand("tag", "tag documents with resolved place mentions");
    tag->add_option("--index", tag_args.index_path, "binary index file")->required();
    tag->add_option("--input", tag_args.input_path, "documents JSONL")->required();
    tag->add_option("--output", tag_args.output_path, "tagged JSONL (default stdout)");
    tag->add_option("--persons", tag_args.persons_path, "person lexicon, one full name per line");
    tag->add_option("--stoplist", tag_args.stoplist_path, "geo-stop word TSV");
    tag->add_option("--rules", tag_args.rules_path, "morphological rules TSV");
    tag->add_option("--params", tag_args.params_path, "scoring params key=value file");
    tag->add_option("--mode", tag_args.mode, "scored|strict (default scored)");
    tag->add_option("--disable", tag_args.disabled,
                    "disable a heuristic: geo-context, class-importance, km-distance, person-filter, stoplist");
    tag->add_option("--max-span", tag_args.max_span, "max tokens per multiword name (default 4)");

    EvalArgs eval_args;
    CLI::App* eval = app.add_subcommand("eval", "score tagged output against gold annotations");
    eval->add_option("--gold", eval_args.gold_path, "gold JSONL")->required();
    eval->add_option("--pred", eval_args.pred_path, "tagged JSONL to score");
    eval->add_option("--match", eval_args.match, "place|country (default place)");
    eval->add_option("--report", eval_args.report_path, "write TSV report here");
    eval->add_option("--index", eval_args.index_path, "index (fills gold countries from place ids)");
    eval->add_flag("--ablation", eval_args.ablation, "run the per-heuristic ablation table");
    eval->add_option("--input", eval_args.input_path, "documents JSONL (ablation)");
    eval->add_option("--persons", eval_args.persons_path, "person lexicon (ablation)");
    eval->add_option("--stoplist", eval_args.stoplist_path, "stop list (ablation)");
    eval->add_option("--rules", eval_args.rules_path, "morph rules (ablation)");
    eval->add_option("--params", eval_args.params_path, "scoring params (ablation)");
    eval->add_option("--max-span", eval_args.max_span, "max tokens per multiword name");

    ExportArgs export_args;
    CLI::App* exporter = app.add_subcommand("export", "emit GeoRSS, KML or GeoJSON");
    exporter->add_option("--format", export_args.format, "georss|kml|geojson")->required();
    exporter->add_option("--input", export_args.input_path, "tagged JSONL")->required();
    exporter->add_option("--out", export_args.out_path, "output file")->required();
    exporter->add_option("--stories", export_args.stories_path, "stories.jsonl metadata (kml)");

    StopwordsArgs stop_args;
    CLI::App* stopwords = app.add_subcommand("stopwords", "geo-stop word tooling");
    stopwords->require_subcommand(1);
    CLI::App* stop_build = stopwords->add_subcommand("build", "propose stop words from a corpus or first names");
    stop_build->add_option("--index", stop_args.index_path, "binary index file")->required();
    stop_build->add_option("--corpus", stop_args.corpus_path, "plain-text reference corpus");
    stop_build->add_option("--threshold", stop_args.threshold,
                           "corpus frequency threshold per million tokens (default 5)");
    stop_build->add_option("--firstnames", stop_args.firstnames_path, "first names, one per line");
    stop_build->add_option("--lang", stop_args.lang, "language scope for proposals (default *)");
    stop_build->add_option("--out", stop_args.out_path, "proposals TSV")->required();
    stop_build->add_flag("--accept-all", stop_args.accept_all, "mark every proposal accepted");
    stop_build->add_option("--stoplist-out", stop_args.stoplist_out, "write accepted entries as stoplist TSV");

    try {
        app.parse(argc, argv);
        if (*build) return cmd_build_index(build_args);
        if (*tag) return cmd_tag(tag_args);
        if (*eval) {
            if (!eval_args.ablation && eval_args.pred_path.empty())
                throw CLI::ValidationError("--pred", "required unless --ablation is given");
            return cmd_eval(eval_args);
        }
        if (*exporter) return cmd_export(export_args);
        if (*stopwords) {
            if (stop_args.corpus_path.empty() && stop_args.firstnames_path.empty())
                throw CLI::ValidationError("stopwords build", "needs --corpus and/or --firstnames");
            return cmd_stopwords_build(stop_args);
        }
        return 2;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
