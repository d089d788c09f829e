#ifndef LEXDYN_CLASSIFY_HPP
#define LEXDYN_CLASSIFY_HPP

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "lexdyn/afa.hpp"
#include "lexdyn/corpus_io.hpp"
#include "lexdyn/error.hpp"
#include "lexdyn/granger.hpp"
#include "lexdyn/ingest.hpp"
#include "lexdyn/stats.hpp"

namespace lexdyn {

// ---------------------------------------------------------------------------
// the causality x persistence taxonomy

enum class CausalClass { Shaping, Reflecting, Complex, None };

inline const char* to_string(CausalClass c) {
    switch (c) {
        case CausalClass::Shaping: return "shaping";
        case CausalClass::Reflecting: return "reflecting";
        case CausalClass::Complex: return "complex";
        default: return "none";
    }
}

enum class PersistenceClass { AntiPersistent, ShortRange, Persistent, NonStationary };

inline const char* to_string(PersistenceClass c) {
    switch (c) {
        case PersistenceClass::AntiPersistent: return "anti_persistent";
        case PersistenceClass::ShortRange: return "short_range";
        case PersistenceClass::Persistent: return "persistent";
        default: return "non_stationary";
    }
}

/// Direction labels follow the x = advertisements, y = articles convention:
/// p_xy significant alone means ads shaped articles.
inline CausalClass causal_class(double p_xy, double p_yx, double alpha) {
    const bool xy = p_xy < alpha;
    const bool yx = p_yx < alpha;
    if (xy && yx) return CausalClass::Complex;
    if (xy) return CausalClass::Shaping;
    if (yx) return CausalClass::Reflecting;
    return CausalClass::None;
}

/// Persistence regime from the fitted H and its standard error. A point
/// estimate never lands exactly on the 0.5 or 1 boundaries, so the call is
/// made on the 95% confidence interval: straddling 0.5 reads as short-range,
/// a CI entirely above 1 as non-stationary.
inline PersistenceClass persistence_class(const AfaResult& res) {
    const double half = 1.96 * res.slope_stderr;
    const double lo = res.hurst - half, hi = res.hurst + half;
    if (lo <= 0.5 && 0.5 <= hi) return PersistenceClass::ShortRange;
    if (res.hurst < 0.5) return PersistenceClass::AntiPersistent;
    if (lo > 1.0) return PersistenceClass::NonStationary;
    return PersistenceClass::Persistent;
}

/// Whether a regime counts as "persistent" for the grouping of keywords:
/// everything reliably above the no-memory baseline, including H > 1.
inline bool shows_persistence(PersistenceClass c) {
    return c == PersistenceClass::Persistent || c == PersistenceClass::NonStationary;
}

enum class PersistenceGroup { ArticlesOnly = 0, Both = 1, AdsOnly = 2, Neither = 3 };

inline const char* to_string(PersistenceGroup g) {
    switch (g) {
        case PersistenceGroup::ArticlesOnly: return "persistence_articles_only";
        case PersistenceGroup::Both: return "persistence_both";
        case PersistenceGroup::AdsOnly: return "persistence_ads_only";
        default: return "no_persistence";
    }
}

struct BehaviorCell {
    std::string keyword;
    CausalClass causal = CausalClass::None;
    PersistenceClass persist_articles = PersistenceClass::ShortRange;
    PersistenceClass persist_ads = PersistenceClass::ShortRange;
    double h_articles = 0.0, h_articles_se = 0.0;
    double h_ads = 0.0, h_ads_se = 0.0;
    GrangerResult granger;
};

inline PersistenceGroup persistence_group(const BehaviorCell& c) {
    const bool art = shows_persistence(c.persist_articles);
    const bool ads = shows_persistence(c.persist_ads);
    if (art && ads) return PersistenceGroup::Both;
    if (art) return PersistenceGroup::ArticlesOnly;
    if (ads) return PersistenceGroup::AdsOnly;
    return PersistenceGroup::Neither;
}

struct TabulateSummary {
    std::size_t n = 0;
    std::array<double, 4> pct_causal{};                    // indexed by CausalClass
    std::array<std::size_t, 4> group_counts{};             // indexed by PersistenceGroup
    std::array<std::array<std::size_t, 4>, 4> grid{};      // [causal][group]
    double mean_h_art = 0.0, mean_h_ads = 0.0, delta_h = 0.0;
};

/// Percentages per causal class, the persistence grouping, and the full
/// causal x persistence cross-tabulation.
inline TabulateSummary tabulate(std::span<const BehaviorCell> cells) {
    if (cells.empty()) throw NumericError("tabulate: no cells");
    TabulateSummary s;
    s.n = cells.size();
    std::array<std::size_t, 4> causal_counts{};
    for (const auto& c : cells) {
        const auto ci = std::size_t(c.causal);
        const auto gi = std::size_t(persistence_group(c));
        causal_counts[ci] += 1;
        s.group_counts[gi] += 1;
        s.grid[ci][gi] += 1;
        s.mean_h_art += c.h_articles;
        s.mean_h_ads += c.h_ads;
    }
    for (std::size_t i = 0; i < 4; ++i)
        s.pct_causal[i] = 100.0 * double(causal_counts[i]) / double(s.n);
    s.mean_h_art /= double(s.n);
    s.mean_h_ads /= double(s.n);
    s.delta_h = s.mean_h_ads - s.mean_h_art;
    return s;
}

// ---------------------------------------------------------------------------
// report files

inline constexpr const char* kReportCsvHeader =
    "keyword,h_art,h_art_se,h_ads,h_ads_se,p_ads_to_art,p_art_to_ads,lag,"
    "causal_class,persist_art,persist_ads";

inline void write_report_csv(std::ostream& out, std::span<const BehaviorCell> cells) {
    out << kReportCsvHeader << '\n';
    for (const auto& c : cells) {
        out << c.keyword << ',' << fmt6(c.h_articles) << ',' << fmt6(c.h_articles_se) << ','
            << fmt6(c.h_ads) << ',' << fmt6(c.h_ads_se) << ',' << fmt6(c.granger.p_xy) << ','
            << fmt6(c.granger.p_yx) << ',' << c.granger.lag << ',' << to_string(c.causal) << ','
            << to_string(c.persist_articles) << ',' << to_string(c.persist_ads) << '\n';
    }
}

inline void write_report_json(std::ostream& out, std::span<const BehaviorCell> cells) {
    out << "[\n";
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto& c = cells[i];
        out << "  {\"keyword\":\"" << c.keyword << "\",\"h_art\":" << fmt6(c.h_articles)
            << ",\"h_art_se\":" << fmt6(c.h_articles_se) << ",\"h_ads\":" << fmt6(c.h_ads)
            << ",\"h_ads_se\":" << fmt6(c.h_ads_se) << ",\"p_ads_to_art\":" << fmt6(c.granger.p_xy)
            << ",\"p_art_to_ads\":" << fmt6(c.granger.p_yx) << ",\"lag\":" << c.granger.lag
            << ",\"causal_class\":\"" << to_string(c.causal) << "\",\"persist_art\":\""
            << to_string(c.persist_articles) << "\",\"persist_ads\":\""
            << to_string(c.persist_ads) << "\"}" << (i + 1 < cells.size() ? "," : "") << '\n';
    }
    out << "]\n";
}

struct ReportExtras {
    double mean_r = 0.0;
    double prop_r_significant = 0.0;
    bool have_correlations = false;
    std::vector<std::pair<std::string, std::string>> skipped;  // keyword, reason
};

/// Summary JSON is written by hand with fixed key order and fmt6 formatting;
/// identical inputs must yield byte-identical files.
inline void write_summary_json(std::ostream& out, const TabulateSummary& s,
                               const ReportExtras& extras = {}) {
    out << "{\n";
    out << "  \"n_keywords\": " << s.n << ",\n";
    out << "  \"pct_shaping\": " << fmt6(s.pct_causal[0]) << ",\n";
    out << "  \"pct_reflecting\": " << fmt6(s.pct_causal[1]) << ",\n";
    out << "  \"pct_complex\": " << fmt6(s.pct_causal[2]) << ",\n";
    out << "  \"pct_none\": " << fmt6(s.pct_causal[3]) << ",\n";
    out << "  \"mean_h_art\": " << fmt6(s.mean_h_art) << ",\n";
    out << "  \"mean_h_ads\": " << fmt6(s.mean_h_ads) << ",\n";
    out << "  \"delta_h\": " << fmt6(s.delta_h) << ",\n";
    if (extras.have_correlations) {
        out << "  \"mean_r\": " << fmt6(extras.mean_r) << ",\n";
        out << "  \"pct_r_significant\": " << fmt6(100.0 * extras.prop_r_significant) << ",\n";
    }
    out << "  \"table1_groups\": {";
    for (std::size_t g = 0; g < 4; ++g)
        out << (g ? ", " : "") << '"' << to_string(PersistenceGroup(g)) << "\": "
            << s.group_counts[g];
    out << "},\n";
    out << "  \"causal_by_persistence\": {\n";
    for (std::size_t c = 0; c < 4; ++c) {
        out << "    \"" << to_string(CausalClass(c)) << "\": {";
        for (std::size_t g = 0; g < 4; ++g)
            out << (g ? ", " : "") << '"' << to_string(PersistenceGroup(g)) << "\": "
                << s.grid[c][g];
        out << (c + 1 < 4 ? "},\n" : "}\n");
    }
    out << "  },\n";
    // projection onto the three causal patterns x three persistence groups
    out << "  \"grid3\": {\n";
    for (std::size_t c = 0; c < 3; ++c) {
        out << "    \"" << to_string(CausalClass(c)) << "\": {";
        bool first = true;
        for (std::size_t g : {0u, 1u, 3u}) {
            out << (first ? "" : ", ") << '"' << to_string(PersistenceGroup(g)) << "\": "
                << s.grid[c][g];
            first = false;
        }
        out << (c + 1 < 3 ? "},\n" : "}\n");
    }
    out << "  },\n";
    out << "  \"skipped\": [";
    for (std::size_t i = 0; i < extras.skipped.size(); ++i)
        out << (i ? ", " : "") << "{\"keyword\": \"" << extras.skipped[i].first
            << "\", \"reason\": \"" << extras.skipped[i].second << "\"}";
    out << "]\n";
    out << "}\n";
}

enum class ReportFormat { Csv, Json };

/// Writes the per-keyword report (CSV or JSON) and the summary JSON into a
/// directory. Returns the report path.
inline std::filesystem::path emit_report(const std::filesystem::path& dir,
                                         const TabulateSummary& summary,
                                         std::span<const BehaviorCell> cells, ReportFormat format,
                                         const ReportExtras& extras = {}) {
    if (cells.empty()) throw NumericError("emit_report: no cells");
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    const auto report_path = dir / (format == ReportFormat::Csv ? "report.csv" : "report.json");
    {
        std::ofstream out(report_path);
        if (!out) throw ConfigError("cannot write '" + report_path.string() + "'");
        if (format == ReportFormat::Csv)
            write_report_csv(out, cells);
        else
            write_report_json(out, cells);
    }
    {
        const auto summary_path = dir / "summary.json";
        std::ofstream out(summary_path);
        if (!out) throw ConfigError("cannot write '" + summary_path.string() + "'");
        write_summary_json(out, summary, extras);
    }
    return report_path;
}

// ---------------------------------------------------------------------------
// plot tables

struct PlotColumn {
    std::string label;
    std::vector<double> raw;
    std::vector<double> smoothed;
    std::vector<double> ci_half;  // 1.96 * within-window standard error of the mean
};

struct PlotTable {
    Date start;
    int bin_width_days = 1;
    std::size_t n_bins = 0;
    std::vector<PlotColumn> columns;
};

/// Per-bin raw value, moving-average value and 95% band half-width for each
/// discourse series, enough to redraw a smoothed frequency panel.
inline PlotTable plot_data(std::span<const FrequencySeries> series, double window_years) {
    if (series.size() < 2) throw std::invalid_argument("plot_data: need at least 2 series");
    const auto& first = series.front();
    for (const auto& s : series)
        if (s.values.size() != first.values.size() || s.bin_width_days != first.bin_width_days ||
            !(s.start == first.start))
            throw DataError("plot_data: mismatched bin grids");

    const int window =
        std::max(1, int(std::lround(window_years * 365.25 / double(first.bin_width_days))));

    PlotTable t;
    t.start = first.start;
    t.bin_width_days = first.bin_width_days;
    t.n_bins = first.values.size();
    for (const auto& s : series) {
        PlotColumn col;
        col.label = to_string(s.discourse);
        for (const auto& existing : t.columns)
            if (existing.label == col.label) col.label += "_2";
        col.raw = s.values;
        col.smoothed = smooth_ma(std::span<const double>(s.values), window);
        col.ci_half.resize(s.values.size());
        for (std::size_t i = 0; i < s.values.size(); ++i) {
            const auto [lo, hi] = detail::ma_window_bounds(i, s.values.size(), window);
            const std::size_t m = hi - lo + 1;
            if (m < 2) {
                col.ci_half[i] = 0.0;
                continue;
            }
            double ss = 0.0;
            for (std::size_t j = lo; j <= hi; ++j) {
                const double d = s.values[j] - col.smoothed[i];
                ss += d * d;
            }
            const double sem = std::sqrt(ss / double(m - 1)) / std::sqrt(double(m));
            col.ci_half[i] = 1.96 * sem;
        }
        t.columns.push_back(std::move(col));
    }
    return t;
}

inline void write_plot_csv(std::ostream& out, const PlotTable& t) {
    out << "bin_start";
    for (const auto& c : t.columns)
        out << ',' << c.label << "_raw," << c.label << "_smooth," << c.label << "_ci95";
    out << '\n';
    const long day0 = day_number(t.start);
    for (std::size_t i = 0; i < t.n_bins; ++i) {
        out << format_date(date_from_day_number(day0 + long(i) * t.bin_width_days));
        for (const auto& c : t.columns)
            out << ',' << fmt6(c.raw[i]) << ',' << fmt6(c.smoothed[i]) << ',' << fmt6(c.ci_half[i]);
        out << '\n';
    }
}

/// H-by-discourse comparison: OLS of H on intercept plus an article dummy,
/// advertisement as baseline.
inline GroupRegressionResult group_h_regression(std::span<const double> h,
                                                std::span<const Discourse> groups) {
    if (h.size() != groups.size())
        throw std::invalid_argument("group_h_regression: length mismatch");
    std::vector<unsigned char> is_article(h.size());
    for (std::size_t i = 0; i < groups.size(); ++i)
        is_article[i] = groups[i] == Discourse::Article ? 1 : 0;
    return group_regression(h, is_article);
}

}  // namespace lexdyn

#endif
