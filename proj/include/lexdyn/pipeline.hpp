#ifndef LEXDYN_PIPELINE_HPP
#define LEXDYN_PIPELINE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lexdyn/classify.hpp"
#include "lexdyn/corpus_io.hpp"
#include "lexdyn/parallel.hpp"
#include "lexdyn/rng.hpp"
#include "lexdyn/synth.hpp"

namespace lexdyn {

// ---------------------------------------------------------------------------
// run configuration

struct RunConfig {
    std::string corpus_path;
    std::string keywords_path;
    std::string output_dir = "out";
    int bin_width_days = 730;           // bi-annual bins
    int smoothing_window_bins = 0;      // 0 = derive from smoothing_window_years
    double smoothing_window_years = 5.0;
    double alpha = 0.005;
    Aggregation aggregation = Aggregation::PerDocMean;
    std::uint64_t seed = 0;
    unsigned threads = 0;               // 0 = hardware concurrency
    AfaConfig afa;
    GrangerConfig granger;
    std::optional<Date> date_min, date_max;
    bool quiet = false;

    int effective_smoothing_bins() const {
        if (smoothing_window_bins > 0) return smoothing_window_bins;
        return std::max(1, int(std::lround(smoothing_window_years * 365.25 /
                                           double(bin_width_days))));
    }

    void validate() const {
        if (bin_width_days < 1) throw ConfigError("bin_width_days must be >= 1");
        if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
        if (granger.max_lag < 1) throw ConfigError("max_lag must be >= 1");
        if (afa.poly_order < 1) throw ConfigError("poly_order must be >= 1");
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

inline int to_int(const std::string& v, const std::string& where) {
    try {
        std::size_t pos = 0;
        const int r = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return r;
    } catch (const std::exception&) {
        throw ConfigError(where + ": expected integer, got '" + v + "'");
    }
}

inline double to_double(const std::string& v, const std::string& where) {
    try {
        std::size_t pos = 0;
        const double r = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return r;
    } catch (const std::exception&) {
        throw ConfigError(where + ": expected number, got '" + v + "'");
    }
}

}  // namespace detail

/// Flat key = value file with optional [section] headers and # comments.
/// Section headers are cosmetic; keys are global and must be known.
inline RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    RunConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(path + ":" + std::to_string(lineno) + ": bad section header");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string val = detail::trim(line.substr(eq + 1));
        const std::string where = path + ":" + std::to_string(lineno);

        if (key == "corpus") cfg.corpus_path = val;
        else if (key == "keywords") cfg.keywords_path = val;
        else if (key == "output_dir") cfg.output_dir = val;
        else if (key == "bin_width_days") cfg.bin_width_days = detail::to_int(val, where);
        else if (key == "smoothing_window_bins") cfg.smoothing_window_bins = detail::to_int(val, where);
        else if (key == "smoothing_window_years") cfg.smoothing_window_years = detail::to_double(val, where);
        else if (key == "alpha") {
            cfg.alpha = detail::to_double(val, where);
            cfg.granger.alpha = cfg.alpha;
        } else if (key == "aggregation") {
            if (val == "per_doc_mean") cfg.aggregation = Aggregation::PerDocMean;
            else if (val == "pooled") cfg.aggregation = Aggregation::Pooled;
            else throw ConfigError(where + ": aggregation must be per_doc_mean or pooled");
        } else if (key == "seed") cfg.seed = std::uint64_t(detail::to_double(val, where));
        else if (key == "threads") cfg.threads = unsigned(detail::to_int(val, where));
        else if (key == "date_min") cfg.date_min = parse_date(val);
        else if (key == "date_max") cfg.date_max = parse_date(val);
        else if (key == "poly_order") cfg.afa.poly_order = detail::to_int(val, where);
        else if (key == "windows") {
            cfg.afa.window_sizes.clear();
            std::stringstream ss(val);
            std::string item;
            while (std::getline(ss, item, ','))
                cfg.afa.window_sizes.push_back(detail::to_int(detail::trim(item), where));
        } else if (key == "fit_range") {
            const auto colon = val.find(':');
            if (colon == std::string::npos)
                throw ConfigError(where + ": fit_range must be lo:hi");
            cfg.afa.fit_range = {detail::to_int(detail::trim(val.substr(0, colon)), where),
                                 detail::to_int(detail::trim(val.substr(colon + 1)), where)};
        } else if (key == "max_lag") cfg.granger.max_lag = detail::to_int(val, where);
        else if (key == "fixed_lag") {
            cfg.granger.fixed_lag = detail::to_int(val, where);
            cfg.granger.lag_selection = LagSelection::Fixed;
        } else if (key == "lag_selection") {
            if (val == "bic") cfg.granger.lag_selection = LagSelection::Bic;
            else if (val == "fixed") cfg.granger.lag_selection = LagSelection::Fixed;
            else throw ConfigError(where + ": lag_selection must be bic or fixed");
        } else {
            throw ConfigError(where + ": unknown key '" + key + "'");
        }
    }
    return cfg;
}

// ---------------------------------------------------------------------------
// ingest command

struct IngestOutcome {
    std::size_t n_docs = 0, n_articles = 0, n_ads = 0, n_zero_token = 0;
    std::size_t n_bins = 0;
    std::vector<std::filesystem::path> files;
};

inline std::string series_filename(const std::string& keyword, Discourse d) {
    return keyword + "_" + to_string(d) + ".csv";
}

/// Builds one frequency series per (keyword, discourse) and writes them as
/// CSV under <output_dir>/series/.
inline IngestOutcome cmd_ingest(const RunConfig& cfg) {
    cfg.validate();
    if (cfg.corpus_path.empty()) throw ConfigError("no corpus path configured");
    if (cfg.keywords_path.empty()) throw ConfigError("no keywords path configured");
    const std::vector<Document> docs = load_corpus(cfg.corpus_path, cfg.date_min, cfg.date_max);
    const std::vector<KeywordSpec> keywords = load_keywords(cfg.keywords_path);
    if (docs.empty()) throw DataError("corpus '" + cfg.corpus_path + "' has no documents");
    if (keywords.empty()) throw ConfigError("keyword list '" + cfg.keywords_path + "' is empty");

    IngestOutcome out;
    out.n_docs = docs.size();
    for (const auto& d : docs) {
        (d.discourse == Discourse::Article ? out.n_articles : out.n_ads) += 1;
        if (tokenize(d.text).empty()) out.n_zero_token += 1;
    }

    const std::filesystem::path dir = std::filesystem::path(cfg.output_dir) / "series";
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "'");

    for (const auto& kw : keywords) {
        for (const Discourse d : {Discourse::Article, Discourse::Advertisement}) {
            const FrequencySeries s = build_series(docs, kw, d, cfg.bin_width_days, cfg.aggregation);
            out.n_bins = s.values.size();
            const auto path = dir / series_filename(kw.canonical, d);
            write_series_csv(path.string(), s);
            out.files.push_back(path);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// analyze command

struct AnalyzeOutcome {
    std::vector<BehaviorCell> cells;
    TabulateSummary summary;
    ReportExtras extras;
    std::filesystem::path report_path;
};

/// Per keyword: bidirectional Granger between the two discourse series,
/// AFA per discourse, plain correlation, then the taxonomy assignment.
/// Degenerate keywords are skipped with a reason and do not abort the run.
inline AnalyzeOutcome cmd_analyze(const RunConfig& cfg) {
    cfg.validate();
    if (cfg.corpus_path.empty()) throw ConfigError("no corpus path configured");
    if (cfg.keywords_path.empty()) throw ConfigError("no keywords path configured");
    const std::vector<Document> docs = load_corpus(cfg.corpus_path, cfg.date_min, cfg.date_max);
    const std::vector<KeywordSpec> keywords = load_keywords(cfg.keywords_path);
    if (docs.empty()) throw DataError("corpus '" + cfg.corpus_path + "' has no documents");
    if (keywords.empty()) throw ConfigError("keyword list '" + cfg.keywords_path + "' is empty");

    struct Slot {
        std::optional<BehaviorCell> cell;
        std::optional<CorrelationSummary::Entry> corr;
        std::string skip_reason;
    };
    std::vector<Slot> slots(keywords.size());

    parallel_for(keywords.size(), cfg.threads, [&](std::size_t i) {
        const KeywordSpec& kw = keywords[i];
        Slot& slot = slots[i];
        try {
            const FrequencySeries art =
                build_series(docs, kw, Discourse::Article, cfg.bin_width_days, cfg.aggregation);
            const FrequencySeries ads = build_series(docs, kw, Discourse::Advertisement,
                                                     cfg.bin_width_days, cfg.aggregation);
            const std::vector<double>& x = ads.values;  // x = advertisements
            const std::vector<double>& y = art.values;  // y = articles

            BehaviorCell cell;
            cell.keyword = kw.canonical;
            cell.granger = bidirectional(x, y, cfg.granger);
            const AfaResult afa_art = estimate_hurst(y, cfg.afa);
            const AfaResult afa_ads = estimate_hurst(x, cfg.afa);
            cell.h_articles = afa_art.hurst;
            cell.h_articles_se = afa_art.slope_stderr;
            cell.h_ads = afa_ads.hurst;
            cell.h_ads_se = afa_ads.slope_stderr;
            cell.causal = causal_class(cell.granger.p_xy, cell.granger.p_yx, cfg.alpha);
            cell.persist_articles = persistence_class(afa_art);
            cell.persist_ads = persistence_class(afa_ads);

            try {
                const PearsonResult pr = pearson(x, y);
                slot.corr = CorrelationSummary::Entry{kw.canonical, pr.r, pr.p, pr.n};
            } catch (const NumericError&) {
                // constant series: no correlation entry, keyword still reported
            }
            slot.cell = std::move(cell);
        } catch (const NumericError& e) {
            slot.skip_reason = e.what();
        }
    });

    AnalyzeOutcome out;
    std::vector<CorrelationSummary::Entry> corr_entries;
    for (std::size_t i = 0; i < keywords.size(); ++i) {
        Slot& slot = slots[i];
        if (slot.cell) {
            out.cells.push_back(std::move(*slot.cell));
            if (slot.corr) corr_entries.push_back(std::move(*slot.corr));
        } else {
            out.extras.skipped.emplace_back(keywords[i].canonical, slot.skip_reason);
            if (!cfg.quiet)
                std::cerr << "warning: skipped '" << keywords[i].canonical << "': "
                          << slot.skip_reason << " (status=skipped)\n";
        }
    }
    if (out.cells.empty())
        throw NumericError("analyze: every keyword was degenerate, nothing to report");

    out.summary = tabulate(out.cells);
    if (!corr_entries.empty()) {
        const CorrelationSummary cs = summarize_correlations(std::move(corr_entries), cfg.alpha);
        out.extras.mean_r = cs.mean_r;
        out.extras.prop_r_significant = cs.prop_significant;
        out.extras.have_correlations = true;
    }
    out.report_path = emit_report(cfg.output_dir, out.summary, out.cells, ReportFormat::Csv,
                                  out.extras);
    return out;
}

// ---------------------------------------------------------------------------
// plot/report command

/// Builds the keyword's two discourse series, smooths them, and writes the
/// plot table CSV. Returns the file path.
inline std::filesystem::path cmd_report(const RunConfig& cfg, const std::string& keyword,
                                        double window_years) {
    cfg.validate();
    const std::vector<Document> docs = load_corpus(cfg.corpus_path, cfg.date_min, cfg.date_max);
    const std::vector<KeywordSpec> keywords = load_keywords(cfg.keywords_path);
    const KeywordSpec* kw = nullptr;
    for (const auto& k : keywords)
        if (k.canonical == keyword) kw = &k;
    if (!kw) throw ConfigError("keyword '" + keyword + "' not in keyword list");

    const FrequencySeries art =
        build_series(docs, *kw, Discourse::Article, cfg.bin_width_days, cfg.aggregation);
    const FrequencySeries ads =
        build_series(docs, *kw, Discourse::Advertisement, cfg.bin_width_days, cfg.aggregation);
    const std::vector<FrequencySeries> pair = {art, ads};
    const PlotTable table = plot_data(pair, window_years);

    const std::filesystem::path dir = std::filesystem::path(cfg.output_dir) / "plots";
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "'");
    const auto path = dir / (keyword + ".csv");
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    write_plot_csv(out, table);
    return path;
}

// ---------------------------------------------------------------------------
// result writers used by the afa/granger subcommands

inline void write_afa_json(std::ostream& out, const AfaResult& r) {
    const auto arr = [&](const std::vector<double>& v) {
        std::string s = "[";
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt6(v[i]);
        return s + "]";
    };
    const auto iarr = [&](const std::vector<int>& v) {
        std::string s = "[";
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + std::to_string(v[i]);
        return s + "]";
    };
    out << "{\n"
        << "  \"hurst\": " << fmt6(r.hurst) << ",\n"
        << "  \"slope_stderr\": " << fmt6(r.slope_stderr) << ",\n"
        << "  \"r_squared\": " << fmt6(r.r_squared) << ",\n"
        << "  \"windows\": " << iarr(r.windows) << ",\n"
        << "  \"excluded_windows\": " << iarr(r.excluded_windows) << ",\n"
        << "  \"log2_w\": " << arr(r.log2_w) << ",\n"
        << "  \"log2_f\": " << arr(r.log2_f) << "\n"
        << "}\n";
}

inline void write_fluctuation_csv(std::ostream& out, const AfaResult& r) {
    out << "log2w,log2F\n";
    for (std::size_t i = 0; i < r.log2_w.size(); ++i)
        out << fmt6(r.log2_w[i]) << ',' << fmt6(r.log2_f[i]) << '\n';
}

inline void write_granger_json(std::ostream& out, const GrangerResult& r, double alpha) {
    out << "{\n"
        << "  \"lag\": " << r.lag << ",\n"
        << "  \"f_xy\": " << fmt6(r.f_xy) << ",\n"
        << "  \"p_xy\": " << fmt6(r.p_xy) << ",\n"
        << "  \"f_yx\": " << fmt6(r.f_yx) << ",\n"
        << "  \"p_yx\": " << fmt6(r.p_yx) << ",\n"
        << "  \"n_obs\": " << r.n_obs << ",\n"
        << "  \"alpha\": " << fmt6(alpha) << "\n"
        << "}\n";
}

// ---------------------------------------------------------------------------
// validation batteries (synthetic ground truth through the estimators)

struct BatteryResult {
    std::string name;
    double truth = 0.0;
    double estimate = 0.0;
    double lo = 0.0, hi = 0.0;  // pass iff estimate in [lo, hi]
    double worst = 0.0;         // worst per-replication deviation, where meaningful
    bool pass = false;
};

/// Mean estimated H over `reps` fGn realizations against the known target.
inline BatteryResult hurst_battery(double target, std::size_t n, int reps, std::uint64_t seed,
                                   const AfaConfig& afa = {}, unsigned threads = 0) {
    if (reps < 1) throw ConfigError("hurst battery: reps must be >= 1");
    std::vector<double> est(std::size_t(reps), 0.0);
    parallel_for(std::size_t(reps), threads, [&](std::size_t i) {
        FgnSpec spec{n, target, Rng::derive_seed(seed, i)};
        est[i] = estimate_hurst(gen_fgn(spec), afa).hurst;
    });
    BatteryResult r;
    r.name = "hurst_" + fmt6(target);
    r.truth = target;
    for (double e : est) r.estimate += e;
    r.estimate /= double(reps);
    for (double e : est) r.worst = std::max(r.worst, std::fabs(e - target));
    r.lo = target - 0.05;
    r.hi = target + 0.05;
    r.pass = r.estimate >= r.lo && r.estimate <= r.hi;
    return r;
}

/// Cumulative-summed white noise has H around 1.5, the non-stationary regime.
inline BatteryResult nonstationary_battery(std::size_t n, int reps, std::uint64_t seed,
                                           const AfaConfig& afa = {}, unsigned threads = 0) {
    if (reps < 1) throw ConfigError("nonstationary battery: reps must be >= 1");
    std::vector<double> est(std::size_t(reps), 0.0);
    parallel_for(std::size_t(reps), threads, [&](std::size_t i) {
        Rng rng(Rng::derive_seed(seed ^ 0x6e6f6e7374ULL, i));
        std::vector<double> walk(n);
        double acc = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            acc += rng.normal();
            walk[t] = acc;
        }
        est[i] = estimate_hurst(walk, afa).hurst;
    });
    BatteryResult r;
    r.name = "hurst_integrated_noise";
    r.truth = 1.5;
    for (double e : est) r.estimate += e;
    r.estimate /= double(reps);
    for (double e : est) r.worst = std::max(r.worst, std::fabs(e - 1.5));
    r.lo = 1.4;
    r.hi = 1.6;
    r.pass = r.estimate >= r.lo && r.estimate <= r.hi;
    return r;
}

/// The pipeline's first step is lag-1 differencing, so the batteries hand it
/// integrated (cumulative-summed) pairs: differencing then recovers the
/// stationary AR/VAR pair exactly, the way the differenced corpus series are
/// meant to behave.
inline std::vector<double> integrate(std::span<const double> v) {
    std::vector<double> out(v.size() + 1);
    out[0] = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) out[i + 1] = out[i] + v[i];
    return out;
}

/// False-positive rate of the x->y test on independent AR(1) pairs; the pass
/// band is the 99% binomial interval around alpha.
inline BatteryResult granger_calibration_battery(int reps, std::size_t t_len, double phi,
                                                 std::uint64_t seed, const GrangerConfig& gcfg = {},
                                                 unsigned threads = 0) {
    if (reps < 1) throw ConfigError("granger calibration: reps must be >= 1");
    std::vector<unsigned char> reject(std::size_t(reps), 0);
    parallel_for(std::size_t(reps), threads, [&](std::size_t i) {
        VarSpec spec;
        spec.n = t_len;
        spec.a_xx = phi;
        spec.a_yy = phi;
        spec.seed = Rng::derive_seed(seed ^ 0x63616c6962ULL, i);
        const auto [x, y] = gen_var(spec);
        const GrangerResult res = bidirectional(integrate(x), integrate(y), gcfg);
        reject[i] = res.p_xy < gcfg.alpha ? 1 : 0;
    });
    BatteryResult r;
    r.name = "granger_type1_rate";
    r.truth = gcfg.alpha;
    std::size_t hits = 0;
    for (unsigned char v : reject) hits += v;
    r.estimate = double(hits) / double(reps);
    const double z99 = 2.5758293035489004;  // two-sided 99% normal quantile
    const double se = std::sqrt(gcfg.alpha * (1.0 - gcfg.alpha) / double(reps));
    r.lo = std::max(0.0, gcfg.alpha - z99 * se);
    r.hi = gcfg.alpha + z99 * se;
    r.pass = r.estimate >= r.lo && r.estimate <= r.hi;
    return r;
}

struct PowerBatteryResult {
    BatteryResult forward;  // detection rate of the true direction
    BatteryResult reverse;  // false-positive rate of the reverse direction
};

/// Detection and reverse-false-positive rates on coupled VAR pairs with the
/// causal direction known by construction (x drives y).
inline PowerBatteryResult granger_power_battery(int reps, std::size_t t_len, double coupling,
                                                double phi, std::uint64_t seed,
                                                const GrangerConfig& gcfg = {},
                                                unsigned threads = 0) {
    if (reps < 1) throw ConfigError("granger power: reps must be >= 1");
    std::vector<unsigned char> fwd(std::size_t(reps), 0), rev(std::size_t(reps), 0);
    parallel_for(std::size_t(reps), threads, [&](std::size_t i) {
        VarSpec spec;
        spec.n = t_len;
        spec.a_xx = phi;
        spec.a_yy = phi;
        spec.a_xy = coupling;
        spec.seed = Rng::derive_seed(seed ^ 0x706f776572ULL, i);
        const auto [x, y] = gen_var(spec);
        const GrangerResult res = bidirectional(integrate(x), integrate(y), gcfg);
        fwd[i] = res.p_xy < gcfg.alpha ? 1 : 0;
        rev[i] = res.p_yx < gcfg.alpha ? 1 : 0;
    });
    PowerBatteryResult out;
    std::size_t nf = 0, nr = 0;
    for (int i = 0; i < reps; ++i) {
        nf += fwd[std::size_t(i)];
        nr += rev[std::size_t(i)];
    }
    out.forward.name = "granger_power";
    out.forward.truth = 1.0;
    out.forward.estimate = double(nf) / double(reps);
    out.forward.lo = 0.95;
    out.forward.hi = 1.0;
    out.forward.pass = out.forward.estimate > 0.95;
    out.reverse.name = "granger_reverse_fp";
    out.reverse.truth = 0.0;
    out.reverse.estimate = double(nr) / double(reps);
    out.reverse.lo = 0.0;
    out.reverse.hi = 0.02;
    out.reverse.pass = out.reverse.estimate <= 0.02;
    return out;
}

struct ValidateParams {
    int reps = 20;
    std::size_t n = 8192;
    std::optional<double> hurst;  // run a single H target instead of the default set
    int calib_reps = 2000;
    int power_reps = 200;
    std::size_t calib_len = 400;
    std::size_t power_len = 500;
};

/// The self-check behind `lexdyn validate`: fGn H recovery, the
/// non-stationary regime, and the Granger calibration/power batteries.
inline std::vector<BatteryResult> cmd_validate(const RunConfig& cfg, const ValidateParams& params) {
    if (params.reps < 1) throw ConfigError("validate: --reps must be >= 1");
    std::vector<BatteryResult> results;
    if (params.hurst) {
        results.push_back(hurst_battery(*params.hurst, params.n, params.reps, cfg.seed, cfg.afa,
                                        cfg.threads));
    } else {
        for (double h : {0.3, 0.5, 0.7, 0.9})
            results.push_back(hurst_battery(h, params.n, params.reps, cfg.seed, cfg.afa,
                                            cfg.threads));
        results.push_back(nonstationary_battery(params.n, params.reps, cfg.seed, cfg.afa,
                                                cfg.threads));
        results.push_back(granger_calibration_battery(params.calib_reps, params.calib_len, 0.5,
                                                      cfg.seed, cfg.granger, cfg.threads));
        const PowerBatteryResult pw = granger_power_battery(params.power_reps, params.power_len,
                                                            0.5, 0.5, cfg.seed, cfg.granger,
                                                            cfg.threads);
        results.push_back(pw.forward);
        results.push_back(pw.reverse);
    }
    return results;
}

}  // namespace lexdyn

#endif
