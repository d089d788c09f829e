#ifndef LEXDYN_INGEST_HPP
#define LEXDYN_INGEST_HPP

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "lexdyn/error.hpp"

namespace lexdyn {

// ---------------------------------------------------------------------------
// calendar dates

struct Date {
    int year = 1900;
    unsigned month = 1;
    unsigned day = 1;

    bool operator==(const Date&) const = default;
};

inline bool date_ok(const Date& d) {
    return std::chrono::year_month_day{std::chrono::year{d.year}, std::chrono::month{d.month},
                                       std::chrono::day{d.day}}
        .ok();
}

/// Days since 1970-01-01.
inline long day_number(const Date& d) {
    const std::chrono::year_month_day ymd{std::chrono::year{d.year}, std::chrono::month{d.month},
                                          std::chrono::day{d.day}};
    return std::chrono::sys_days{ymd}.time_since_epoch().count();
}

inline Date date_from_day_number(long n) {
    const std::chrono::year_month_day ymd{std::chrono::sys_days{std::chrono::days{n}}};
    return Date{int(ymd.year()), unsigned(ymd.month()), unsigned(ymd.day())};
}

/// Strict ISO-8601 YYYY-MM-DD.
inline Date parse_date(std::string_view s) {
    const auto bad = [&] { throw DataError("bad date '" + std::string(s) + "', want YYYY-MM-DD"); };
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') bad();
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
        if (s[i] < '0' || s[i] > '9') bad();
    Date d;
    d.year = (s[0] - '0') * 1000 + (s[1] - '0') * 100 + (s[2] - '0') * 10 + (s[3] - '0');
    d.month = unsigned((s[5] - '0') * 10 + (s[6] - '0'));
    d.day = unsigned((s[8] - '0') * 10 + (s[9] - '0'));
    if (!date_ok(d)) bad();
    return d;
}

inline std::string format_date(const Date& d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", d.year, d.month, d.day);
    return buf;
}

// ---------------------------------------------------------------------------
// document model

enum class Discourse { Article, Advertisement };

inline const char* to_string(Discourse d) {
    return d == Discourse::Article ? "article" : "advertisement";
}

inline Discourse discourse_from_string(std::string_view s) {
    if (s == "article") return Discourse::Article;
    if (s == "advertisement") return Discourse::Advertisement;
    throw DataError("unknown document type '" + std::string(s) +
                    "', want 'article' or 'advertisement'");
}

/// One dated, typed text unit from a corpus.
struct Document {
    std::string id;
    Date date;
    Discourse discourse = Discourse::Article;
    std::string source;
    std::string text;
};

/// A keyword with the surface forms that count as a match (e.g. singular and
/// plural collapsed onto one canonical form). Forms are lowercase tokens.
struct KeywordSpec {
    std::string canonical;
    std::vector<std::string> surface_forms;

    bool matches(std::string_view token) const {
        for (const auto& f : surface_forms)
            if (f == token) return true;
        return false;
    }
};

/// Regularly sampled relative-frequency values for one keyword in one
/// discourse. `counts` holds the number of (non-degenerate) documents per bin.
struct FrequencySeries {
    std::string keyword;
    Discourse discourse = Discourse::Article;
    Date start;
    int bin_width_days = 1;
    std::vector<double> values;
    std::vector<long> counts;
};

// ---------------------------------------------------------------------------
// tokenization

namespace detail {

// letter test over code points: ASCII plus the Latin/Greek/Cyrillic ranges
// that occur in European newspaper text; everything else separates tokens
inline bool is_letter_cp(std::uint32_t cp) {
    if (cp < 0x80) return (cp >= 'A' && cp <= 'Z') || (cp >= 'a' && cp <= 'z');
    if (cp >= 0xC0 && cp <= 0xFF) return cp != 0xD7 && cp != 0xF7;
    if (cp >= 0x100 && cp <= 0x24F) return true;   // Latin Extended A/B
    if (cp >= 0x370 && cp <= 0x1FFF) return true;  // Greek, Cyrillic, ...
    if (cp >= 0x2C60 && cp <= 0x2C7F) return true;
    if (cp >= 0xA720 && cp <= 0xA7FF) return true;
    return false;
}

inline std::uint32_t lower_cp(std::uint32_t cp) {
    if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;  // Latin-1
    if (cp >= 0x100 && cp <= 0x137) return (cp % 2 == 0) ? cp + 1 : cp;
    if (cp >= 0x139 && cp <= 0x148) return (cp % 2 == 1) ? cp + 1 : cp;
    if (cp >= 0x14A && cp <= 0x177) return (cp % 2 == 0) ? cp + 1 : cp;
    if (cp == 0x178) return 0xFF;
    if (cp >= 0x179 && cp <= 0x17E) return (cp % 2 == 1) ? cp + 1 : cp;
    return cp;
}

inline void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp < 0x80) {
        out.push_back(char(cp));
    } else if (cp < 0x800) {
        out.push_back(char(0xC0 | (cp >> 6)));
        out.push_back(char(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(char(0xE0 | (cp >> 12)));
        out.push_back(char(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(char(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(char(0xF0 | (cp >> 18)));
        out.push_back(char(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(char(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(char(0x80 | (cp & 0x3F)));
    }
}

// decodes one code point; invalid bytes come back as 0xFFFD and advance by one
inline std::uint32_t next_cp(std::string_view s, std::size_t& i) {
    const unsigned char b0 = (unsigned char)s[i];
    if (b0 < 0x80) {
        ++i;
        return b0;
    }
    int extra;
    std::uint32_t cp;
    if ((b0 & 0xE0) == 0xC0) {
        extra = 1;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        extra = 2;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        extra = 3;
        cp = b0 & 0x07;
    } else {
        ++i;
        return 0xFFFD;
    }
    if (i + std::size_t(extra) >= s.size()) {  // truncated sequence
        ++i;
        return 0xFFFD;
    }
    for (int k = 1; k <= extra; ++k) {
        const unsigned char b = (unsigned char)s[i + std::size_t(k)];
        if ((b & 0xC0) != 0x80) {
            ++i;
            return 0xFFFD;
        }
        cp = (cp << 6) | (b & 0x3F);
    }
    i += std::size_t(extra) + 1;
    return cp;
}

}  // namespace detail

/// Lowercased maximal runs of letters; digits, punctuation and malformed
/// bytes all act as separators.
inline std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string cur;
    std::size_t i = 0;
    while (i < text.size()) {
        const std::uint32_t cp = detail::next_cp(text, i);
        if (detail::is_letter_cp(cp)) {
            detail::append_utf8(cur, detail::lower_cp(cp));
        } else if (!cur.empty()) {
            tokens.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

// ---------------------------------------------------------------------------
// frequencies and series

/// (matching tokens, total tokens) for one document.
inline std::pair<long, long> doc_match_counts(const Document& doc, const KeywordSpec& spec) {
    long matches = 0, total = 0;
    for (const auto& tok : tokenize(doc.text)) {
        ++total;
        if (spec.matches(tok)) ++matches;
    }
    return {matches, total};
}

/// Relative term frequency of the keyword within one document, or nullopt
/// for a zero-token document (degenerate OCR output, excluded upstream).
inline std::optional<double> doc_relative_frequency(const Document& doc, const KeywordSpec& spec) {
    const auto [matches, total] = doc_match_counts(doc, spec);
    if (total == 0) return std::nullopt;
    return double(matches) / double(total);
}

enum class Aggregation {
    PerDocMean,  // mean of per-document ratios (default)
    Pooled,      // total matches / total tokens per bin
};

/// Bin grid shared by every series built from the same document set, so the
/// two discourses stay aligned bin for bin.
struct BinGrid {
    Date start;
    int bin_width_days = 1;
    std::size_t n_bins = 0;
};

inline BinGrid make_bin_grid(std::span<const Document> docs, int bin_width_days) {
    if (bin_width_days < 1) throw std::invalid_argument("bin width must be >= 1 day");
    if (docs.empty()) throw DataError("empty corpus");
    long lo = day_number(docs.front().date), hi = lo;
    for (const auto& d : docs) {
        const long n = day_number(d.date);
        lo = std::min(lo, n);
        hi = std::max(hi, n);
    }
    BinGrid g;
    g.start = date_from_day_number(lo);
    g.bin_width_days = bin_width_days;
    g.n_bins = std::size_t((hi - lo) / bin_width_days) + 1;
    return g;
}

/// Per-bin relative frequency of one keyword in one discourse. Bins without
/// documents get value 0 and count 0: silence is a real observation for
/// burst dynamics, not missing data.
inline FrequencySeries build_series(std::span<const Document> docs, const KeywordSpec& spec,
                                    Discourse discourse, int bin_width_days,
                                    Aggregation aggregation = Aggregation::PerDocMean) {
    const BinGrid grid = make_bin_grid(docs, bin_width_days);
    if (grid.n_bins < 2)
        throw DataError("corpus spans a single bin; need at least 2");

    FrequencySeries s;
    s.keyword = spec.canonical;
    s.discourse = discourse;
    s.start = grid.start;
    s.bin_width_days = bin_width_days;
    s.values.assign(grid.n_bins, 0.0);
    s.counts.assign(grid.n_bins, 0);

    std::vector<double> ratio_sum(grid.n_bins, 0.0);
    std::vector<long> match_sum(grid.n_bins, 0), token_sum(grid.n_bins, 0);
    const long day0 = day_number(grid.start);
    bool any = false;
    for (const auto& doc : docs) {
        if (doc.discourse != discourse) continue;
        any = true;
        const auto [matches, total] = doc_match_counts(doc, spec);
        if (total == 0) continue;  // degenerate document
        const std::size_t bin = std::size_t((day_number(doc.date) - day0) / bin_width_days);
        s.counts[bin] += 1;
        ratio_sum[bin] += double(matches) / double(total);
        match_sum[bin] += matches;
        token_sum[bin] += total;
    }
    if (!any)
        throw DataError(std::string("no documents for discourse '") + to_string(discourse) + "'");

    for (std::size_t b = 0; b < grid.n_bins; ++b) {
        if (s.counts[b] == 0) continue;
        if (aggregation == Aggregation::PerDocMean)
            s.values[b] = ratio_sum[b] / double(s.counts[b]);
        else
            s.values[b] = token_sum[b] > 0 ? double(match_sum[b]) / double(token_sum[b]) : 0.0;
    }
    return s;
}

namespace detail {

/// Truncated centered window around index i: [lo, hi] inclusive.
inline std::pair<std::size_t, std::size_t> ma_window_bounds(std::size_t i, std::size_t n,
                                                            int window) {
    const std::size_t left = std::size_t(window - 1) / 2;
    const std::size_t right = std::size_t(window) / 2;
    const std::size_t lo = i >= left ? i - left : 0;
    const std::size_t hi = std::min(n - 1, i + right);
    return {lo, hi};
}

}  // namespace detail

/// Centered moving average; edges shrink to the available points, so output
/// length equals input length.
inline std::vector<double> smooth_ma(std::span<const double> values, int window) {
    if (window < 1) throw std::invalid_argument("smooth_ma: window must be >= 1");
    if (std::size_t(window) > values.size())
        throw NumericError("smooth_ma: window " + std::to_string(window) +
                           " exceeds series length " + std::to_string(values.size()));
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto [lo, hi] = detail::ma_window_bounds(i, values.size(), window);
        double acc = 0.0;
        for (std::size_t j = lo; j <= hi; ++j) acc += values[j];
        out[i] = acc / double(hi - lo + 1);
    }
    return out;
}

inline FrequencySeries smooth_ma(const FrequencySeries& s, int window) {
    FrequencySeries out = s;
    out.values = smooth_ma(std::span<const double>(s.values), window);
    return out;
}

}  // namespace lexdyn

#endif
