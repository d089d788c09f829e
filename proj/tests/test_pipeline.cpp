#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lexdyn/pipeline.hpp"
#include "lexdyn/synth.hpp"

using namespace lexdyn;
namespace fs = std::filesystem;

namespace {

const char* kSourceDir = LEXDYN_SOURCE_DIR;
const char* kCliPath = LEXDYN_CLI_PATH;

int run_cli(const std::string& args) {
    const std::string cmd = std::string(kCliPath) + " " + args + " >/dev/null 2>&1";
    const int ret = std::system(cmd.c_str());
    return WEXITSTATUS(ret);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunConfig mini_config(const fs::path& out) {
    RunConfig cfg = load_run_config(std::string(kSourceDir) + "/data/mini.conf");
    cfg.corpus_path = std::string(kSourceDir) + "/data/mini_corpus.jsonl";
    cfg.keywords_path = std::string(kSourceDir) + "/data/keywords.csv";
    cfg.output_dir = out.string();
    cfg.quiet = true;
    return cfg;
}

}  // namespace

TEST_CASE("run config file: sections, comments, overrides, bad keys") {
    const auto dir = fs::temp_directory_path() / "lexdyn_cfg_test";
    fs::create_directories(dir);
    const auto path = (dir / "run.conf").string();
    {
        std::ofstream out(path);
        out << "# comment\n"
            << "corpus = c.jsonl\n"
            << "keywords = k.csv\n"
            << "[series]\n"
            << "bin_width_days = 365   # inline comment\n"
            << "[granger]\n"
            << "max_lag = 4\n"
            << "alpha = 0.01\n"
            << "windows = 5, 9, 11\n";
    }
    const RunConfig cfg = load_run_config(path);
    CHECK(cfg.corpus_path == "c.jsonl");
    CHECK(cfg.bin_width_days == 365);
    CHECK(cfg.granger.max_lag == 4);
    CHECK(cfg.alpha == doctest::Approx(0.01));
    CHECK(cfg.granger.alpha == doctest::Approx(0.01));
    CHECK(cfg.afa.window_sizes == std::vector<int>{5, 9, 11});

    {
        std::ofstream out(path);
        out << "no_such_key = 1\n";
    }
    CHECK_THROWS_AS(load_run_config(path), ConfigError);
    {
        std::ofstream out(path);
        out << "bin_width_days = abc\n";
    }
    CHECK_THROWS_AS(load_run_config(path), ConfigError);
    fs::remove_all(dir);
}

TEST_CASE("smoothing window defaults to five years of bins") {
    RunConfig cfg;
    cfg.bin_width_days = 730;
    CHECK(cfg.effective_smoothing_bins() == 3);  // round(5 * 365.25 / 730)
    cfg.bin_width_days = 30;
    CHECK(cfg.effective_smoothing_bins() == 61);
    cfg.smoothing_window_bins = 5;
    CHECK(cfg.effective_smoothing_bins() == 5);
}

TEST_CASE("ingest on the bundled corpus: counts and independent series oracle") {
    const auto out = fs::temp_directory_path() / "lexdyn_ingest_out";
    fs::remove_all(out);
    RunConfig cfg = mini_config(out);
    const IngestOutcome res = cmd_ingest(cfg);
    CHECK(res.n_docs == res.n_articles + res.n_ads);
    CHECK(res.files.size() == 12);  // 6 keywords x 2 discourses
    CHECK(res.n_bins >= 120);

    // brute-force oracle: tally the radio/article series straight from the
    // JSONL with direct loops, then compare to the written file
    std::ifstream in(cfg.corpus_path);
    REQUIRE(in.good());
    std::string line;
    std::vector<Document> docs;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto j = nlohmann::json::parse(line);
        docs.push_back(Document{j["id"], parse_date(j["date"].get<std::string>()),
                                discourse_from_string(j["type"].get<std::string>()), j["source"],
                                j["text"]});
    }
    long min_day = day_number(docs.front().date);
    long max_day = min_day;
    for (const auto& d : docs) {
        min_day = std::min(min_day, day_number(d.date));
        max_day = std::max(max_day, day_number(d.date));
    }
    const std::size_t n_bins = std::size_t((max_day - min_day) / 30) + 1;
    std::vector<double> sums(n_bins, 0.0);
    std::vector<long> counts(n_bins, 0);
    const KeywordSpec radio{"radio", {"radio", "radios", "radiotoestel"}};
    for (const auto& d : docs) {
        if (d.discourse != Discourse::Article) continue;
        long matches = 0, total = 0;
        for (const auto& tok : tokenize(d.text)) {
            ++total;
            if (tok == "radio" || tok == "radios" || tok == "radiotoestel") ++matches;
        }
        if (total == 0) continue;
        const std::size_t bin = std::size_t((day_number(d.date) - min_day) / 30);
        sums[bin] += double(matches) / double(total);
        counts[bin] += 1;
    }
    const FrequencySeries written = read_series_csv((out / "series" / "radio_article.csv").string());
    REQUIRE(written.values.size() == n_bins);
    for (std::size_t b = 0; b < n_bins; ++b) {
        const double expect = counts[b] ? sums[b] / double(counts[b]) : 0.0;
        CHECK(written.values[b] == doctest::Approx(expect).epsilon(1e-5));
        CHECK(written.counts[b] == counts[b]);
    }
    fs::remove_all(out);
}

TEST_CASE("analyze is idempotent and reports the degenerate keyword as skipped") {
    const auto out = fs::temp_directory_path() / "lexdyn_analyze_out";
    fs::remove_all(out);
    RunConfig cfg = mini_config(out);
    const AnalyzeOutcome first = cmd_analyze(cfg);
    const std::string report1 = slurp(out / "report.csv");
    const std::string summary1 = slurp(out / "summary.json");
    const AnalyzeOutcome second = cmd_analyze(cfg);
    CHECK(slurp(out / "report.csv") == report1);
    CHECK(slurp(out / "summary.json") == summary1);

    CHECK(first.cells.size() == 5);
    REQUIRE(first.extras.skipped.size() == 1);
    CHECK(first.extras.skipped[0].first == "boterham");  // no advertisement hits
    // threads must not change results
    cfg.threads = 1;
    const AnalyzeOutcome serial = cmd_analyze(cfg);
    CHECK(slurp(out / "report.csv") == report1);
    CHECK(serial.cells.size() == first.cells.size());
    fs::remove_all(out);
}

TEST_CASE("a corpus built on coupled VAR frequencies classifies as Shaping") {
    // construct per-bin keyword frequencies that follow an integrated VAR
    // pair with ads driving articles, then run the whole corpus pipeline
    VarSpec spec;
    spec.n = 200;
    spec.a_xx = 0.5;
    spec.a_yy = 0.5;
    spec.a_xy = 0.8;
    spec.seed = 424242;
    const auto [ads_sig, art_sig] = gen_var(spec);  // x = ads drives y = articles

    const auto dir = fs::temp_directory_path() / "lexdyn_var_corpus";
    fs::create_directories(dir);
    const auto corpus_path = (dir / "corpus.jsonl").string();
    {
        std::ofstream outf(corpus_path);
        double ax = 0.0, ay = 0.0;  // integrate so differencing recovers the pair
        const long day0 = day_number(parse_date("1900-01-01"));
        for (std::size_t t = 0; t < spec.n; ++t) {
            ax += ads_sig[t];
            ay += art_sig[t];
            const auto freq_of = [](double level) {
                const double f = 0.2 + 0.01 * level;
                return std::min(0.5, std::max(0.02, f));
            };
            const auto doc = [&](const char* type, const char* id_prefix, double f) {
                const int total = 1000;
                const int matches = int(std::lround(f * total));
                std::string text;
                for (int i = 0; i < matches; ++i) text += "zeep ";
                for (int i = 0; i < total - matches; ++i) text += "de ";
                nlohmann::json j;
                j["id"] = std::string(id_prefix) + std::to_string(t);
                j["date"] = format_date(date_from_day_number(day0 + long(t) * 30));
                j["type"] = type;
                j["source"] = "synthetic";
                j["text"] = text;
                return j.dump();
            };
            outf << doc("advertisement", "ad-", freq_of(ax)) << "\n";
            outf << doc("article", "art-", freq_of(ay)) << "\n";
        }
    }
    const auto kw_path = (dir / "kw.csv").string();
    {
        std::ofstream outf(kw_path);
        outf << "canonical,surface_forms\nzeep,zeep\n";
    }

    RunConfig cfg;
    cfg.corpus_path = corpus_path;
    cfg.keywords_path = kw_path;
    cfg.output_dir = (dir / "out").string();
    cfg.bin_width_days = 30;
    cfg.quiet = true;
    const AnalyzeOutcome res = cmd_analyze(cfg);
    REQUIRE(res.cells.size() == 1);
    CHECK(res.cells[0].causal == CausalClass::Shaping);
    CHECK(res.cells[0].granger.p_xy < 0.005);
    CHECK(res.cells[0].granger.p_yx >= 0.005);
    fs::remove_all(dir);
}

TEST_CASE("validate batteries pass at small sizes") {
    RunConfig cfg;
    cfg.seed = 20260808;
    cfg.threads = 2;
    ValidateParams params;
    params.reps = 5;
    params.n = 2048;
    params.hurst = 0.7;
    const auto results = cmd_validate(cfg, params);
    REQUIRE(results.size() == 1);
    CHECK(results[0].pass);

    params.reps = 0;
    CHECK_THROWS_AS(cmd_validate(cfg, params), ConfigError);
}

TEST_CASE("cli exit codes follow the documented table") {
    const std::string src = kSourceDir;
    const auto dir = fs::temp_directory_path() / "lexdyn_cli_test";
    fs::create_directories(dir);

    // 0: success
    CHECK(run_cli("synth fgn --n 128 --hurst 0.5 --seed 1 --out " +
                  (dir / "fgn.csv").string()) == 0);
    // 1: usage/config errors
    CHECK(run_cli("ingest --corpus /nonexistent.jsonl --keywords " + src +
                  "/data/keywords.csv --output " + (dir / "o1").string()) == 1);
    CHECK(run_cli("validate --reps 0") == 1);
    CHECK(run_cli("no_such_command") == 1);
    // 2: malformed data
    const auto bad = dir / "bad.jsonl";
    {
        std::ofstream out(bad);
        out << R"({"id":"1","date":"1930-01-01","type":"article","source":"s","text":"fiets ja"})"
            << "\n";
        out << R"({"id":"2","date":"1930-01-02","type":"editorial","source":"s","text":"x"})"
            << "\n";
    }
    CHECK(run_cli("ingest --corpus " + bad.string() + " --keywords " + src +
                  "/data/keywords.csv --output " + (dir / "o2").string()) == 2);
    // 3: numerical/degenerate input
    const auto flat = dir / "flat.csv";
    {
        std::ofstream out(flat);
        out << "value\n";
        for (int i = 0; i < 256; ++i) out << "1.0\n";
    }
    CHECK(run_cli("afa " + flat.string() + " --output " + (dir / "o3").string()) == 3);

    // empty keyword list -> 1
    const auto empty_kw = dir / "empty.csv";
    {
        std::ofstream out(empty_kw);
        out << "canonical,surface_forms\n";
    }
    CHECK(run_cli("analyze --corpus " + src + "/data/mini_corpus.jsonl --keywords " +
                  empty_kw.string() + " --output " + (dir / "o4").string()) == 1);
    fs::remove_all(dir);
}

TEST_CASE("cli synth output is deterministic and feeds the afa subcommand") {
    const auto dir = fs::temp_directory_path() / "lexdyn_cli_synth";
    fs::create_directories(dir);
    const auto a = dir / "a.csv";
    const auto b = dir / "b.csv";
    REQUIRE(run_cli("synth fgn --n 1024 --hurst 0.7 --seed 9 --out " + a.string()) == 0);
    REQUIRE(run_cli("synth fgn --n 1024 --hurst 0.7 --seed 9 --out " + b.string()) == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(a).find("mt19937_64") != std::string::npos);  // rng metadata present

    REQUIRE(run_cli("afa " + a.string() + " --output " + (dir / "out").string()) == 0);
    const auto js = nlohmann::json::parse(slurp(dir / "out" / "afa.json"));
    CHECK(js["hurst"].get<double>() == doctest::Approx(0.7).epsilon(0.25));
    CHECK(js.contains("log2_w"));
    CHECK(fs::exists(dir / "out" / "afa_fluctuations.csv"));

    // two-column var output feeds the granger subcommand
    const auto v = dir / "v.csv";
    REQUIRE(run_cli("synth var --n 400 --axy 0.6 --seed 3 --out " + v.string()) == 0);
    // split columns
    std::istringstream in(slurp(v));
    std::ofstream xout(dir / "x.csv"), yout(dir / "y.csv");
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line == "x,y") continue;
        const auto comma = line.find(',');
        xout << line.substr(0, comma) << "\n";
        yout << line.substr(comma + 1) << "\n";
    }
    xout.close();
    yout.close();
    REQUIRE(run_cli("granger " + (dir / "x.csv").string() + " " + (dir / "y.csv").string() +
                    " --output " + (dir / "gout").string()) == 0);
    const auto gj = nlohmann::json::parse(slurp(dir / "gout" / "granger.json"));
    CHECK(gj["p_xy"].get<double>() < 0.005);
    fs::remove_all(dir);
}

TEST_CASE("ingest output feeds the afa and granger subcommands directly") {
    const auto dir = fs::temp_directory_path() / "lexdyn_feed_test";
    fs::remove_all(dir);
    RunConfig cfg = mini_config(dir);
    cmd_ingest(cfg);
    // series files carry bin_start,value,count; the value column is picked up
    const auto art = (dir / "series" / "radio_article.csv").string();
    const std::vector<double> v = read_value_column(art);
    const FrequencySeries s = read_series_csv(art);
    REQUIRE(v.size() == s.values.size());
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(v[i] == doctest::Approx(s.values[i]));

    const auto ads = (dir / "series" / "radio_advertisement.csv").string();
    CHECK(run_cli("afa " + art + " --output " + (dir / "afa_out").string()) == 0);
    CHECK(run_cli("granger " + ads + " " + art + " --output " + (dir / "g_out").string()) == 0);
    fs::remove_all(dir);
}

TEST_CASE("report subcommand writes a plot table for a keyword") {
    const auto dir = fs::temp_directory_path() / "lexdyn_cli_report";
    fs::remove_all(dir);
    RunConfig cfg = mini_config(dir);
    const auto path = cmd_report(cfg, "radio", 5.0);
    const std::string content = slurp(path);
    CHECK(content.find("bin_start,article_raw,article_smooth,article_ci95,"
                       "advertisement_raw,advertisement_smooth,advertisement_ci95") == 0);
    CHECK_THROWS_AS(cmd_report(cfg, "onbekend", 5.0), ConfigError);
    fs::remove_all(dir);
}
