#ifndef LEXDYN_CORPUS_IO_HPP
#define LEXDYN_CORPUS_IO_HPP

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lexdyn/error.hpp"
#include "lexdyn/ingest.hpp"

namespace lexdyn {

/// Fixed float formatting for every generated file: 6 significant digits,
/// "-0" normalized, so identical inputs produce byte-identical output.
inline std::string fmt6(double v) {
    if (v == 0.0) v = 0.0;  // flush -0
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// corpus: newline-delimited JSON records

/// Reads a JSONL corpus: one object per line with fields `id`, `date`
/// (YYYY-MM-DD), `type` ("article"|"advertisement"), `source`, `text`.
/// Errors carry the 1-based line number. Blank lines are allowed.
inline std::vector<Document> load_corpus(const std::string& path,
                                         std::optional<Date> date_min = std::nullopt,
                                         std::optional<Date> date_max = std::nullopt) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open corpus file '" + path + "'");
    std::vector<Document> docs;
    std::string line;
    std::size_t lineno = 0;
    const auto fail = [&](const std::string& msg) {
        throw DataError(path + ":" + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json rec;
        try {
            rec = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            fail(std::string("invalid JSON: ") + e.what());
        }
        if (!rec.is_object()) fail("record is not a JSON object");
        Document d;
        try {
            d.id = rec.at("id").get<std::string>();
            d.date = parse_date(rec.at("date").get<std::string>());
            d.discourse = discourse_from_string(rec.at("type").get<std::string>());
            d.source = rec.at("source").get<std::string>();
            d.text = rec.at("text").get<std::string>();
        } catch (const DataError& e) {
            fail(e.what());
        } catch (const nlohmann::json::exception& e) {
            fail(std::string("bad record: ") + e.what());
        }
        const long day = day_number(d.date);
        if (date_min && day < day_number(*date_min)) fail("date before configured corpus range");
        if (date_max && day > day_number(*date_max)) fail("date after configured corpus range");
        docs.push_back(std::move(d));
    }
    return docs;
}

// ---------------------------------------------------------------------------
// keyword list: CSV `canonical,surface_forms` with '|' between forms

inline std::vector<KeywordSpec> load_keywords(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open keyword file '" + path + "'");
    std::vector<KeywordSpec> specs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (lineno == 1 && line == "canonical,surface_forms") continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw DataError(path + ":" + std::to_string(lineno) + ": expected 'canonical,forms'");
        KeywordSpec spec;
        const auto normalize_form = [&](const std::string& raw) -> std::string {
            const std::vector<std::string> toks = tokenize(raw);
            if (toks.size() != 1)
                throw DataError(path + ":" + std::to_string(lineno) + ": surface form '" + raw +
                                "' is not a single token");
            return toks[0];
        };
        spec.canonical = normalize_form(line.substr(0, comma));
        std::stringstream forms(line.substr(comma + 1));
        std::string form;
        while (std::getline(forms, form, '|')) {
            if (form.empty()) continue;
            const std::string norm = normalize_form(form);
            if (!spec.matches(norm)) spec.surface_forms.push_back(norm);
        }
        if (!spec.matches(spec.canonical)) spec.surface_forms.push_back(spec.canonical);
        if (spec.surface_forms.empty())
            throw DataError(path + ":" + std::to_string(lineno) + ": no surface forms");
        specs.push_back(std::move(spec));
    }
    return specs;
}

// ---------------------------------------------------------------------------
// series files: CSV `bin_start,value,count`

inline void write_series_csv(std::ostream& out, const FrequencySeries& s) {
    out << "bin_start,value,count\n";
    const long day0 = day_number(s.start);
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        const Date d = date_from_day_number(day0 + long(i) * s.bin_width_days);
        out << format_date(d) << ',' << fmt6(s.values[i]) << ',' << s.counts[i] << '\n';
    }
}

inline void write_series_csv(const std::string& path, const FrequencySeries& s) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write series file '" + path + "'");
    write_series_csv(out, s);
}

/// Reads back a `bin_start,value,count` series file.
inline FrequencySeries read_series_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open series file '" + path + "'");
    FrequencySeries s;
    std::string line;
    std::size_t lineno = 0;
    bool first_row = true;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (lineno == 1 && line == "bin_start,value,count") continue;
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 == std::string::npos ? c1 : c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            throw DataError(path + ":" + std::to_string(lineno) + ": expected 3 columns");
        try {
            const Date d = parse_date(line.substr(0, c1));
            if (first_row) {
                s.start = d;
                first_row = false;
            } else if (s.values.size() == 1) {
                s.bin_width_days = int(day_number(d) - day_number(s.start));
            }
            s.values.push_back(std::stod(line.substr(c1 + 1, c2 - c1 - 1)));
            s.counts.push_back(std::stol(line.substr(c2 + 1)));
        } catch (const DataError&) {
            throw;
        } catch (const std::exception&) {
            throw DataError(path + ":" + std::to_string(lineno) + ": malformed row");
        }
    }
    if (s.values.size() < 2)
        throw DataError(path + ": series needs at least 2 bins");
    return s;
}

/// Numeric series from a CSV. '#' comment lines are skipped. A leading
/// header line picks the column: a field named "value" wins (so the files
/// written by write_series_csv feed straight back in), otherwise the first
/// column is read.
inline std::vector<double> read_value_column(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open series file '" + path + "'");
    std::vector<double> values;
    std::string line;
    std::size_t lineno = 0;
    bool header_allowed = true;
    std::size_t column = 0;
    const auto field_at = [](const std::string& row, std::size_t index) {
        std::size_t start = 0;
        for (std::size_t c = 0; c < index; ++c) {
            const auto comma = row.find(',', start);
            if (comma == std::string::npos) return std::string();
            start = comma + 1;
        }
        const auto end = row.find(',', start);
        return row.substr(start, end == std::string::npos ? std::string::npos : end - start);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const std::string field = field_at(line, column);
        try {
            std::size_t pos = 0;
            const double v = std::stod(field, &pos);
            if (field.empty() || pos != field.size()) throw std::invalid_argument(field);
            values.push_back(v);
            header_allowed = false;
        } catch (const std::exception&) {
            if (header_allowed) {
                header_allowed = false;
                // a named "value" column selects itself
                std::size_t idx = 0, start = 0;
                for (;;) {
                    const auto comma = line.find(',', start);
                    const std::string name = line.substr(
                        start, comma == std::string::npos ? std::string::npos : comma - start);
                    if (name == "value") {
                        column = idx;
                        break;
                    }
                    if (comma == std::string::npos) break;
                    start = comma + 1;
                    ++idx;
                }
                continue;
            }
            throw DataError(path + ":" + std::to_string(lineno) + ": not a number: '" + field + "'");
        }
    }
    if (values.empty()) throw DataError(path + ": no numeric values");
    return values;
}

}  // namespace lexdyn

#endif
