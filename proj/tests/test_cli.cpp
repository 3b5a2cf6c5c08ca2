// End-to-end checks of the geoparse binary: subcommands, exit codes,
// deterministic output files.

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::string kBin = GEOPARSE_BIN;
const std::string kDataDir = GEOPARSE_DATA_DIR;

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

fs::path work_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "geoparse_cli_tests";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

RunResult run(const std::string& args) {
    static int counter = 0;
    const fs::path out = work_dir() / ("stdout." + std::to_string(counter));
    const fs::path err = work_dir() / ("stderr." + std::to_string(counter));
    ++counter;
    const std::string command = kBin + " " + args + " > " + out.string() + " 2> " + err.string();
    const int status = std::system(command.c_str());
    RunResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = slurp(out);
    result.err = slurp(err);
    return result;
}

const std::string& index_path() {
    static const std::string path = [] {
        const std::string p = (work_dir() / "fixture.gzix").string();
        const RunResult r = run("build-index --places " + kDataDir + "/places.tsv --variants " +
                                kDataDir + "/variants.tsv --out " + p);
        REQUIRE(r.exit_code == 0);
        return p;
    }();
    return path;
}

std::string tag_fixture_corpus(const std::string& extra_flags, const std::string& out_name) {
    const std::string out = (work_dir() / out_name).string();
    const RunResult r = run("tag --index " + index_path() + " --input " + kDataDir +
                            "/docs.jsonl --persons " + kDataDir + "/persons.txt --stoplist " +
                            kDataDir + "/stoplist.tsv --rules " + kDataDir + "/rules.tsv --output " +
                            out + " " + extra_flags);
    REQUIRE(r.exit_code == 0);
    return out;
}

}  // namespace

TEST_CASE("build-index writes an index and a summary") {
    const RunResult r = run("build-index --places " + kDataDir + "/places.tsv --variants " + kDataDir +
                            "/variants.tsv --out " + (work_dir() / "summary.gzix").string());
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("places: 66") != std::string::npos);
    CHECK(r.out.find("checksum:") != std::string::npos);
    CHECK(fs::exists(work_dir() / "summary.gzix"));
}

TEST_CASE("usage errors exit with code 2") {
    CHECK(run("build-index --out /tmp/x.gzix").exit_code == 2);      // missing --places
    CHECK(run("frobnicate").exit_code == 2);                         // unknown subcommand
    CHECK(run("tag --index i").exit_code == 2);                      // missing --input
    CHECK(run("").exit_code == 2);                                   // subcommand required
    CHECK(run("--help").exit_code == 0);
}

TEST_CASE("duplicate place ids across sources exit 1 naming both") {
    const fs::path dup = work_dir() / "dup.tsv";
    std::ofstream(dup, std::ios::trunc) << "FR-PAR\tParis encore\tFR\t48.0\t2.0\t2\tknab\n";
    const RunResult r = run("build-index --places " + kDataDir + "/places.tsv --places " + dup.string() +
                            " --out " + (work_dir() / "dup.gzix").string());
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("FR-PAR") != std::string::npos);
    CHECK(r.err.find("gd") != std::string::npos);
    CHECK(r.err.find("knab") != std::string::npos);
}

TEST_CASE("tag emits deterministic jsonl with resolved mentions") {
    const std::string first = tag_fixture_corpus("", "tagged_a.jsonl");
    const std::string second = tag_fixture_corpus("", "tagged_b.jsonl");
    CHECK(slurp(first) == slurp(second));

    std::ifstream in(first);
    std::string line;
    bool saw_brest = false;
    std::size_t docs = 0;
    while (std::getline(in, line)) {
        ++docs;
        const json record = json::parse(line);
        if (record["id"] == "en-001") {
            REQUIRE(record["mentions"].size() == 2);
            CHECK(record["mentions"][1]["place_id"] == "BY-BRE");
            CHECK(record["mentions"][1]["country"] == "BY");
            saw_brest = true;
        }
    }
    CHECK(docs == 20);
    CHECK(saw_brest);

    // the ablation flag changes the output (scores drop to the tie value)
    const std::string no_km = tag_fixture_corpus("--disable km-distance", "tagged_nokm.jsonl");
    CHECK(slurp(no_km) != slurp(first));
    CHECK(run("tag --index " + index_path() + " --input " + kDataDir +
              "/docs.jsonl --disable made-up-heuristic")
              .exit_code == 2);
}

TEST_CASE("tag skips malformed documents and continues") {
    const fs::path docs = work_dir() / "mixed.jsonl";
    std::ofstream(docs, std::ios::trunc)
        << R"({"id":"ok-1","lang":"en","text":"Warsaw images."})" << "\n"
        << "this is not json\n"
        << R"({"id":"ok-2","lang":"en","text":"Brest waits."})" << "\n";
    const fs::path out = work_dir() / "mixed_out.jsonl";
    const RunResult r =
        run("tag --index " + index_path() + " --input " + docs.string() + " --output " + out.string());
    CHECK(r.exit_code == 0);
    CHECK(r.err.find("skipping") != std::string::npos);
    CHECK(r.err.find(":2") != std::string::npos);  // offending line named
    std::istringstream lines(slurp(out));
    std::string line;
    std::size_t count = 0;
    while (std::getline(lines, line)) ++count;
    CHECK(count == 2);
}

TEST_CASE("eval reports perfect scores on the fixture pipeline") {
    const std::string tagged = tag_fixture_corpus("", "tagged_eval.jsonl");
    const RunResult r = run("eval --gold " + kDataDir + "/gold.jsonl --pred " + tagged + " --report " +
                            (work_dir() / "report.tsv").string());
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("P=1.0000 R=1.0000 F=1.0000") != std::string::npos);
    const std::string tsv = slurp(work_dir() / "report.tsv");
    CHECK(tsv.find("run\tscope\ttp") == 0);
    CHECK(tsv.find("\tar\t") != std::string::npos);  // per-language rows present

    // country mode works off the annotations' country field
    CHECK(run("eval --gold " + kDataDir + "/gold.jsonl --pred " + tagged + " --match country")
              .exit_code == 0);
}

TEST_CASE("eval rejects predictions for unknown documents") {
    const fs::path pred = work_dir() / "ghost.jsonl";
    std::ofstream(pred, std::ios::trunc) << R"({"id":"ghost","lang":"en","text":"x","mentions":)"
                                         << R"([{"start":0,"end":1,"surface":"x","place_id":"P","country":"PP"}]})"
                                         << "\n";
    const RunResult r = run("eval --gold " + kDataDir + "/gold.jsonl --pred " + pred.string());
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("ghost") != std::string::npos);
}

TEST_CASE("eval names the offending line on schema violations") {
    const fs::path pred = work_dir() / "badpred.jsonl";
    std::ofstream(pred, std::ios::trunc) << R"({"id":"x","lang":"en","mentions":[]})" << "\n"
                                         << R"({"id":"y"})" << "\n";
    const RunResult r = run("eval --gold " + kDataDir + "/gold.jsonl --pred " + pred.string());
    CHECK(r.exit_code == 1);
    CHECK(r.err.find(":2") != std::string::npos);
}

TEST_CASE("ablation table runs every configuration") {
    const RunResult r = run("eval --ablation --gold " + kDataDir + "/gold.jsonl --index " +
                            index_path() + " --input " + kDataDir + "/docs.jsonl --persons " +
                            kDataDir + "/persons.txt --stoplist " + kDataDir +
                            "/stoplist.tsv --rules " + kDataDir + "/rules.tsv --report " +
                            (work_dir() / "ablation.tsv").string());
    CHECK(r.exit_code == 0);
    for (const char* label : {"[none]", "[geo-context]", "[class-importance]", "[km-distance]",
                              "[person-filter]", "[stoplist]", "[all]"})
        CHECK(r.out.find(label) != std::string::npos);
    const std::string tsv = slurp(work_dir() / "ablation.tsv");
    CHECK(tsv.find("none\tall\t") != std::string::npos);
    CHECK(tsv.find("all\tall\t") != std::string::npos);
}

TEST_CASE("export emits the three formats") {
    const std::string tagged = tag_fixture_corpus("", "tagged_export.jsonl");
    const fs::path rss = work_dir() / "out.rss";
    const fs::path kml = work_dir() / "out.kml";
    const fs::path geojson = work_dir() / "out.geojson";

    CHECK(run("export --format georss --input " + tagged + " --out " + rss.string()).exit_code == 0);
    CHECK(run("export --format kml --input " + tagged + " --out " + kml.string() + " --stories " +
              kDataDir + "/stories.jsonl")
              .exit_code == 0);
    CHECK(run("export --format geojson --input " + tagged + " --out " + geojson.string()).exit_code == 0);
    CHECK(run("export --format dot --input " + tagged + " --out /tmp/x").exit_code == 2);

    const std::string rss_text = slurp(rss);
    CHECK(rss_text.find("<rss version=\"2.0\"") != std::string::npos);
    CHECK(rss_text.back() == '\n');
    const std::string kml_text = slurp(kml);
    CHECK(kml_text.find("coverage-high") != std::string::npos);
    CHECK(json::parse(slurp(geojson))["type"] == "FeatureCollection");

    // repeated export runs are byte-identical
    const fs::path rss2 = work_dir() / "out2.rss";
    REQUIRE(run("export --format georss --input " + tagged + " --out " + rss2.string()).exit_code == 0);
    CHECK(slurp(rss2) == rss_text);
}

TEST_CASE("stopwords build proposes corpus and firstname homographs") {
    const fs::path proposals = work_dir() / "proposals.tsv";
    const fs::path stoplist = work_dir() / "stop_accepted.tsv";
    const RunResult r = run("stopwords build --index " + index_path() + " --corpus " + kDataDir +
                            "/corpus_en.txt --threshold 5 --firstnames " + kDataDir +
                            "/firstnames.txt --lang en --out " + proposals.string() +
                            " --accept-all --stoplist-out " + stoplist.string());
    CHECK(r.exit_code == 0);
    const std::string text = slurp(proposals);
    CHECK(text.find("and\ten\tcorpus") != std::string::npos);
    CHECK(text.find("to\ten\tcorpus") != std::string::npos);
    CHECK(text.find("be\ten\tcorpus") != std::string::npos);
    CHECK(text.find("javier\t*\tfirstname") != std::string::npos);
    const std::string accepted = slurp(stoplist);
    CHECK(accepted.find("and\ten\tcorpus") != std::string::npos);

    // stopwords requires a source
    CHECK(run("stopwords build --index " + index_path() + " --out /tmp/p.tsv").exit_code == 2);
}
