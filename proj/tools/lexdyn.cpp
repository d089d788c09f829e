// lexdyn command line: corpus ingestion, Hurst/causality analysis, synthetic
// signal generation and the self-validation batteries.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "lexdyn/pipeline.hpp"

namespace {

using namespace lexdyn;

struct GlobalFlags {
    std::string config_path;
    std::string output_dir;
    std::optional<std::uint64_t> seed;
    bool quiet = false;
};

RunConfig make_config(const GlobalFlags& g) {
    RunConfig cfg;
    if (!g.config_path.empty()) cfg = load_run_config(g.config_path);
    if (!g.output_dir.empty()) cfg.output_dir = g.output_dir;
    if (g.seed) cfg.seed = *g.seed;
    cfg.quiet = g.quiet;
    return cfg;
}

void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& fn) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    fn(out);
}

int run_validate(const RunConfig& cfg, const ValidateParams& params) {
    const std::vector<BatteryResult> results = cmd_validate(cfg, params);
    bool all_pass = true;
    std::printf("%-24s %10s %10s %22s %8s  %s\n", "battery", "truth", "estimate", "pass band",
                "worst", "result");
    for (const auto& r : results) {
        std::printf("%-24s %10.4f %10.4f [%9.4f, %9.4f] %8.4f  %s\n", r.name.c_str(), r.truth,
                    r.estimate, r.lo, r.hi, r.worst, r.pass ? "pass" : "FAIL");
        all_pass = all_pass && r.pass;
    }
    return all_pass ? 0 : int(ExitStatus::Numeric);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"keyword time-series toolkit: frequency series from document corpora, "
                 "adaptive fractal analysis, bidirectional Granger causality, and the "
                 "causality x persistence taxonomy"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    GlobalFlags g;
    app.add_option("--config", g.config_path, "run configuration file");
    app.add_option("--output", g.output_dir, "output directory (overrides config)");
    app.add_option("--seed", g.seed, "random seed (overrides config)");
    app.add_flag("--quiet", g.quiet, "suppress progress output");

    // ingest / analyze / report share the data flags
    std::string corpus, keywords, aggregation;
    std::optional<int> bin_width, smooth_bins, max_lag, fixed_lag, poly_order, threads;
    std::optional<double> alpha;
    const auto add_data_flags = [&](CLI::App* cmd) {
        cmd->add_option("--corpus", corpus, "corpus JSONL file");
        cmd->add_option("--keywords", keywords, "keyword CSV file");
        cmd->add_option("--bin-width", bin_width, "bin width in days");
        cmd->add_option("--aggregation", aggregation, "per_doc_mean or pooled");
    };
    const auto add_analysis_flags = [&](CLI::App* cmd) {
        cmd->add_option("--alpha", alpha, "significance level");
        cmd->add_option("--max-lag", max_lag, "maximum Granger lag order (BIC-selected)");
        cmd->add_option("--fixed-lag", fixed_lag, "fixed Granger lag order");
        cmd->add_option("--poly-order", poly_order, "AFA local polynomial order");
        cmd->add_option("--smooth-bins", smooth_bins, "smoothing window in bins");
        cmd->add_option("--threads", threads, "worker threads (0 = hardware)");
    };

    CLI::App* c_ingest = app.add_subcommand("ingest", "parse a corpus and write frequency series");
    add_data_flags(c_ingest);

    CLI::App* c_analyze = app.add_subcommand(
        "analyze", "run Granger + AFA per keyword and write the classification report");
    add_data_flags(c_analyze);
    add_analysis_flags(c_analyze);

    CLI::App* c_report = app.add_subcommand("report", "write a smoothed plot table for a keyword");
    add_data_flags(c_report);
    std::string report_keyword;
    double window_years = 5.0;
    c_report->add_option("--keyword", report_keyword, "keyword to plot")->required();
    c_report->add_option("--window-years", window_years, "smoothing window in years");

    CLI::App* c_afa = app.add_subcommand("afa", "estimate the Hurst exponent of a series file");
    std::string afa_input, afa_windows, afa_fit_range;
    c_afa->add_option("input", afa_input, "single-column CSV series")->required();
    c_afa->add_option("--poly-order", poly_order, "local polynomial order");
    c_afa->add_option("--windows", afa_windows, "comma-separated odd window sizes");
    c_afa->add_option("--fit-range", afa_fit_range, "lo:hi window index range for the slope fit");

    CLI::App* c_granger = app.add_subcommand("granger",
                                             "bidirectional Granger test between two series files");
    std::string granger_x, granger_y;
    c_granger->add_option("x", granger_x, "first series CSV (x)")->required();
    c_granger->add_option("y", granger_y, "second series CSV (y)")->required();
    add_analysis_flags(c_granger);

    CLI::App* c_synth = app.add_subcommand("synth", "generate synthetic ground-truth signals");
    c_synth->require_subcommand(1);
    c_synth->fallthrough();
    CLI::App* c_fgn = c_synth->add_subcommand("fgn", "fractional Gaussian noise with known H");
    std::size_t synth_n = 8192;
    double synth_h = 0.5;
    std::string synth_out;
    c_fgn->add_option("--n", synth_n, "length (power of two)");
    c_fgn->add_option("--hurst", synth_h, "target Hurst exponent in (0,1)");
    c_fgn->add_option("--out", synth_out, "output CSV (default: stdout)");
    CLI::App* c_var = c_synth->add_subcommand("var", "coupled VAR(1) pair with known direction");
    VarSpec var_spec;
    var_spec.n = 500;
    var_spec.a_xx = 0.5;
    var_spec.a_yy = 0.5;
    c_var->add_option("--n", var_spec.n, "length");
    c_var->add_option("--axx", var_spec.a_xx, "x own-lag coefficient");
    c_var->add_option("--ayy", var_spec.a_yy, "y own-lag coefficient");
    c_var->add_option("--axy", var_spec.a_xy, "coupling x -> y");
    c_var->add_option("--ayx", var_spec.a_yx, "coupling y -> x");
    c_var->add_option("--noise-sd", var_spec.noise_sd, "innovation standard deviation");
    c_var->add_option("--out", synth_out, "output CSV (default: stdout)");

    CLI::App* c_validate = app.add_subcommand("validate",
                                              "run the synthetic calibration batteries");
    ValidateParams vp;
    std::optional<double> validate_hurst;
    c_validate->add_option("--reps", vp.reps, "fGn replications per H target");
    c_validate->add_option("--n", vp.n, "fGn length (power of two)");
    c_validate->add_option("--hurst", validate_hurst, "run a single H target only");
    c_validate->add_option("--calib-reps", vp.calib_reps, "independent pairs for the type-I battery");
    c_validate->add_option("--power-reps", vp.power_reps, "coupled pairs for the power battery");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : int(lexdyn::ExitStatus::Usage);
    }

    try {
        RunConfig cfg = make_config(g);
        if (!corpus.empty()) cfg.corpus_path = corpus;
        if (!keywords.empty()) cfg.keywords_path = keywords;
        if (bin_width) cfg.bin_width_days = *bin_width;
        if (smooth_bins) cfg.smoothing_window_bins = *smooth_bins;
        if (alpha) {
            cfg.alpha = *alpha;
            cfg.granger.alpha = *alpha;
        }
        if (max_lag) cfg.granger.max_lag = *max_lag;
        if (fixed_lag) {
            cfg.granger.fixed_lag = *fixed_lag;
            cfg.granger.lag_selection = LagSelection::Fixed;
        }
        if (poly_order) cfg.afa.poly_order = *poly_order;
        if (threads) cfg.threads = unsigned(*threads);
        if (!aggregation.empty()) {
            if (aggregation == "per_doc_mean") cfg.aggregation = Aggregation::PerDocMean;
            else if (aggregation == "pooled") cfg.aggregation = Aggregation::Pooled;
            else throw ConfigError("aggregation must be per_doc_mean or pooled");
        }

        if (app.got_subcommand(c_ingest)) {
            const IngestOutcome out = cmd_ingest(cfg);
            if (!cfg.quiet)
                std::printf("parsed %zu documents (%zu articles, %zu advertisements, "
                            "%zu zero-token), wrote %zu series of %zu bins under %s/series\n",
                            out.n_docs, out.n_articles, out.n_ads, out.n_zero_token,
                            out.files.size(), out.n_bins, cfg.output_dir.c_str());
        } else if (app.got_subcommand(c_analyze)) {
            const AnalyzeOutcome out = cmd_analyze(cfg);
            if (!cfg.quiet) {
                std::printf("analyzed %zu keywords (%zu skipped): shaping %.1f%%, "
                            "reflecting %.1f%%, complex %.1f%%, none %.1f%%\n",
                            out.cells.size(), out.extras.skipped.size(),
                            out.summary.pct_causal[0], out.summary.pct_causal[1],
                            out.summary.pct_causal[2], out.summary.pct_causal[3]);
                std::printf("report: %s\n", out.report_path.string().c_str());
            }
        } else if (app.got_subcommand(c_report)) {
            const auto path = cmd_report(cfg, report_keyword, window_years);
            if (!cfg.quiet) std::printf("plot table: %s\n", path.string().c_str());
        } else if (app.got_subcommand(c_afa)) {
            if (poly_order) cfg.afa.poly_order = *poly_order;
            if (!afa_windows.empty()) {
                cfg.afa.window_sizes.clear();
                std::stringstream ss(afa_windows);
                std::string item;
                while (std::getline(ss, item, ','))
                    cfg.afa.window_sizes.push_back(std::stoi(item));
            }
            if (!afa_fit_range.empty()) {
                const auto colon = afa_fit_range.find(':');
                if (colon == std::string::npos) throw ConfigError("--fit-range must be lo:hi");
                cfg.afa.fit_range = {std::stoi(afa_fit_range.substr(0, colon)),
                                     std::stoi(afa_fit_range.substr(colon + 1))};
            }
            const std::vector<double> series = read_value_column(afa_input);
            const AfaResult res = estimate_hurst(series, cfg.afa);
            write_file(std::filesystem::path(cfg.output_dir) / "afa.json",
                       [&](std::ostream& o) { write_afa_json(o, res); });
            write_file(std::filesystem::path(cfg.output_dir) / "afa_fluctuations.csv",
                       [&](std::ostream& o) { write_fluctuation_csv(o, res); });
            if (!cfg.quiet)
                std::printf("H = %.4f (stderr %.4f, r^2 %.4f, %zu scales)\n", res.hurst,
                            res.slope_stderr, res.r_squared, res.windows.size());
        } else if (app.got_subcommand(c_granger)) {
            const std::vector<double> x = read_value_column(granger_x);
            const std::vector<double> y = read_value_column(granger_y);
            const GrangerResult res = bidirectional(x, y, cfg.granger);
            write_file(std::filesystem::path(cfg.output_dir) / "granger.json",
                       [&](std::ostream& o) { write_granger_json(o, res, cfg.granger.alpha); });
            if (!cfg.quiet)
                std::printf("lag %d: p(x->y) = %s, p(y->x) = %s (n_obs %d)\n", res.lag,
                            fmt6(res.p_xy).c_str(), fmt6(res.p_yx).c_str(), res.n_obs);
        } else if (app.got_subcommand(c_synth)) {
            const auto emit = [&](const std::function<void(std::ostream&)>& fn) {
                if (synth_out.empty()) {
                    fn(std::cout);
                } else {
                    write_file(synth_out, fn);
                }
            };
            if (c_synth->got_subcommand(c_fgn)) {
                FgnSpec spec{synth_n, synth_h, cfg.seed};
                const std::vector<double> v = gen_fgn(spec);
                emit([&](std::ostream& o) {
                    o << "# rng: " << kRngAlgorithm << " seed: " << cfg.seed << " hurst: "
                      << fmt6(synth_h) << "\nvalue\n";
                    for (double d : v) o << fmt6(d) << '\n';
                });
            } else {
                var_spec.seed = cfg.seed;
                const auto [x, y] = gen_var(var_spec);
                emit([&](std::ostream& o) {
                    o << "# rng: " << kRngAlgorithm << " seed: " << cfg.seed << "\nx,y\n";
                    for (std::size_t i = 0; i < x.size(); ++i)
                        o << fmt6(x[i]) << ',' << fmt6(y[i]) << '\n';
                });
            }
        } else if (app.got_subcommand(c_validate)) {
            vp.hurst = validate_hurst;
            return run_validate(cfg, vp);
        }
        return 0;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return int(lexdyn::ExitStatus::Usage);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return int(lexdyn::ExitStatus::Usage);
    } catch (const DataError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return int(lexdyn::ExitStatus::Data);
    } catch (const NumericError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return int(lexdyn::ExitStatus::Numeric);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return int(lexdyn::ExitStatus::Usage);
    }
}
