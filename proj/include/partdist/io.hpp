#pragma once

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "partdist/labeling.hpp"
#include "partdist/rational.hpp"
#include "partdist/summary.hpp"
#include "partdist/version.hpp"

namespace partdist {

using ordered_json = nlohmann::ordered_json;

struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

inline std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

inline std::string format_double6(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

namespace detail {
inline bool is_comment_or_blank(const std::string& line) {
    for (char ch : line) {
        if (ch == '#') return true;
        if (!std::isspace(static_cast<unsigned char>(ch))) return false;
    }
    return true;
}
inline std::vector<std::string> split_fields(const std::string& line, char delimiter) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) {
            out.push_back(cur);
            cur.clear();
        }
    };
    for (char ch : line) {
        const bool sep = delimiter == '\0'
                             ? (ch == ',' || std::isspace(static_cast<unsigned char>(ch)))
                             : ch == delimiter;
        if (sep)
            flush();
        else
            cur.push_back(ch);
    }
    flush();
    return out;
}
}  // namespace detail

// Headerless CSV of nonnegative integers, one matrix row per line.  Commas
// and/or whitespace separate cells; '#' lines and blank lines are skipped.
inline ConfusionMatrix parse_matrix_csv(const std::string& text,
                                        const std::string& source = "matrix") {
    std::istringstream in(text);
    std::string line;
    std::vector<long long> cells;
    std::size_t cols = 0, rows = 0;
    long long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (detail::is_comment_or_blank(line)) continue;
        const auto fields = detail::split_fields(line, '\0');
        if (cols == 0)
            cols = fields.size();
        else if (fields.size() != cols)
            throw ParseError(source + " line " + std::to_string(line_no) + ": expected " +
                             std::to_string(cols) + " cells, found " +
                             std::to_string(fields.size()));
        for (const auto& f : fields) {
            std::size_t used = 0;
            long long v;
            try {
                v = std::stoll(f, &used);
            } catch (const std::exception&) {
                used = 0;
                v = 0;
            }
            if (used != f.size() || v < 0)
                throw ParseError(source + " line " + std::to_string(line_no) +
                                 ": not a nonnegative integer: '" + f + "'");
            cells.push_back(v);
        }
        ++rows;
    }
    if (rows == 0) throw ParseError(source + ": no data rows");
    return ConfusionMatrix(static_cast<int>(rows), static_cast<int>(cols), std::move(cells));
}

inline std::string serialize_matrix_csv(const ConfusionMatrix& m) {
    std::string out;
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j) {
            if (j) out += ',';
            out += std::to_string(m.at(i, j));
        }
        out += '\n';
    }
    return out;
}

// Two-column label file: one object per line, two tokens.  delimiter '\0'
// means "comma or any whitespace".  Tokens are arbitrary strings.
inline std::pair<Labeling, Labeling> parse_label_file(const std::string& text,
                                                      char delimiter = '\0',
                                                      const std::string& source = "labels") {
    std::istringstream in(text);
    std::string line;
    std::vector<std::string> left, right;
    long long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (detail::is_comment_or_blank(line)) continue;
        const auto fields = detail::split_fields(line, delimiter);
        if (fields.size() != 2)
            throw ParseError(source + " line " + std::to_string(line_no) +
                             ": expected 2 label columns, found " +
                             std::to_string(fields.size()));
        left.push_back(fields[0]);
        right.push_back(fields[1]);
    }
    if (left.empty()) throw ParseError(source + ": no data rows");
    return {Labeling::from_tokens(left), Labeling::from_tokens(right)};
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

// Ordered key=value pairs echoed into every output artifact.
class Provenance {
public:
    Provenance() { add("tool_version", version_string); }

    Provenance& add(const std::string& key, const std::string& value) {
        entries_.emplace_back(key, value);
        return *this;
    }
    Provenance& add(const std::string& key, long long value) {
        return add(key, std::to_string(value));
    }
    Provenance& add(const std::string& key, unsigned long long value) {
        return add(key, std::to_string(value));
    }
    Provenance& add(const std::string& key, int value) {
        return add(key, std::to_string(value));
    }

    std::string csv_header() const {
        std::string out;
        for (const auto& [k, v] : entries_) {
            out += "# ";
            out += k;
            out += '=';
            out += v;
            out += '\n';
        }
        return out;
    }

    ordered_json to_json() const {
        ordered_json j = ordered_json::object();
        for (const auto& [k, v] : entries_) j[k] = v;
        return j;
    }

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

// Minimal CSV builder: provenance comments, one header row, data rows.
class CsvBuilder {
public:
    explicit CsvBuilder(const Provenance& prov) : out_(prov.csv_header()) {}

    CsvBuilder& header(const std::vector<std::string>& names) {
        append_row(names);
        return *this;
    }
    CsvBuilder& row(const std::vector<std::string>& fields) {
        append_row(fields);
        return *this;
    }
    const std::string& str() const { return out_; }

private:
    void append_row(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out_ += ',';
            out_ += fields[i];
        }
        out_ += '\n';
    }
    std::string out_;
};

inline ordered_json rational_json(const Rational& v) {
    ordered_json j = ordered_json::object();
    j["exact"] = v.to_string();
    j["value"] = v.to_double();
    return j;
}

inline ordered_json matrix_json(const ConfusionMatrix& m) {
    ordered_json rows = ordered_json::array();
    for (int i = 0; i < m.rows(); ++i) {
        ordered_json row = ordered_json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(m.at(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline ordered_json summary_to_json(const DistributionSummary& s) {
    ordered_json j = ordered_json::object();
    j["criterion"] = s.name();
    j["count"] = s.count();
    j["mode"] = s.is_exact() ? "exact" : "binned";
    if (s.is_exact())
        j["denominator"] = s.denominator();
    else
        j["bin_width"] = s.bin_width();
    if (s.count() > 0) {
        j["mean"] = s.mean();
        if (s.is_exact()) j["mean_exact"] = s.mean_exact().to_string();
        j["sd"] = s.stddev();
        j["min"] = rational_json(*s.min_value());
        j["max"] = rational_json(*s.max_value());
        ordered_json q = ordered_json::object();
        q["p25"] = s.quantile(0.25);
        q["p50"] = s.quantile(0.50);
        q["p75"] = s.quantile(0.75);
        const auto f = s.whisker_fences();
        q["whisker_low"] = f.lower;
        q["whisker_high"] = f.upper;
        j["quantiles"] = std::move(q);
    }
    ordered_json hist = ordered_json::array();
    for (const auto& [key, cnt] : s.histogram()) {
        ordered_json h = ordered_json::object();
        if (s.is_exact()) {
            h["value_exact"] = Rational(key, s.denominator()).to_string();
            h["value"] = Rational(key, s.denominator()).to_double();
        } else {
            h["bin_low"] = key * s.bin_width();
        }
        h["count"] = cnt;
        hist.push_back(std::move(h));
    }
    j["histogram"] = std::move(hist);
    return j;
}

inline ordered_json conditional_to_json(const ConditionalTable& t,
                                        unsigned long long min_count = 0) {
    ordered_json j = ordered_json::object();
    j["r"] = t.r();
    j["s"] = t.s();
    j["n"] = t.n();
    j["total"] = t.total();
    j["ard_undefined"] = t.ard_undefined();
    if (t.total() > 0) {
        j["rd_max"] = rational_json(t.rd_max());
        j["rd_max_witness"] = matrix_json(t.rd_max_witness());
        j["ard_max"] = rational_json(t.ard_max());
        j["ard_max_witness"] = matrix_json(t.ard_max_witness());
        j["ard_max_med"] = rational_json(t.ard_max_med());
        if (auto key = t.ard_mean_argmax_key(min_count))
            j["ard_mean_argmax_med"] = rational_json(Rational(*key, t.n()));
    }
    ordered_json rows = ordered_json::array();
    for (const auto& [key, sl] : t.slices()) {
        if (sl.count < min_count) continue;
        ordered_json row = ordered_json::object();
        row["med"] = rational_json(Rational(key, t.n()));
        row["count"] = sl.count;
        row["rd_mean"] = t.slice_rd_mean(sl);
        row["rd_sd"] = t.slice_rd_stddev(sl);
        row["rd_min"] = rational_json(Rational(sl.rd_min_num, t.rd_denominator()));
        row["rd_max"] = rational_json(Rational(sl.rd_max_num, t.rd_denominator()));
        row["ard_defined"] = sl.ard_defined;
        if (sl.ard_defined > 0) {
            row["ard_mean"] = t.slice_ard_mean(sl);
            row["ard_sd"] = t.slice_ard_stddev(sl);
            row["ard_min"] = rational_json(*sl.ard_min);
            row["ard_max"] = rational_json(*sl.ard_max);
        }
        rows.push_back(std::move(row));
    }
    j["slices"] = std::move(rows);
    return j;
}

inline std::string conditional_to_csv(const ConditionalTable& t, const Provenance& prov,
                                      unsigned long long min_count = 0) {
    CsvBuilder csv(prov);
    csv.header({"med_exact", "med", "count", "rd_mean", "rd_sd", "rd_min", "rd_max",
                "ard_defined", "ard_mean", "ard_sd", "ard_min", "ard_max"});
    for (const auto& [key, sl] : t.slices()) {
        if (sl.count < min_count) continue;
        const Rational med_v(key, t.n());
        std::vector<std::string> fields = {
            med_v.to_string(),
            format_double(med_v.to_double()),
            std::to_string(sl.count),
            format_double(t.slice_rd_mean(sl)),
            format_double(t.slice_rd_stddev(sl)),
            Rational(sl.rd_min_num, t.rd_denominator()).to_string(),
            Rational(sl.rd_max_num, t.rd_denominator()).to_string(),
            std::to_string(sl.ard_defined)};
        if (sl.ard_defined > 0) {
            fields.push_back(format_double(t.slice_ard_mean(sl)));
            fields.push_back(format_double(t.slice_ard_stddev(sl)));
            fields.push_back(sl.ard_min->to_string());
            fields.push_back(sl.ard_max->to_string());
        } else {
            fields.insert(fields.end(), {"", "", "", ""});
        }
        csv.row(fields);
    }
    return csv.str();
}

inline std::string summary_histogram_csv(const std::vector<DistributionSummary>& summaries,
                                         const Provenance& prov) {
    CsvBuilder csv(prov);
    csv.header({"criterion", "value_exact", "value", "count"});
    for (const auto& s : summaries) {
        for (const auto& [key, cnt] : s.histogram()) {
            if (s.is_exact()) {
                const Rational v(key, s.denominator());
                csv.row({s.name(), v.to_string(), format_double(v.to_double()),
                         std::to_string(cnt)});
            } else {
                csv.row({s.name(), "", format_double(key * s.bin_width()),
                         std::to_string(cnt)});
            }
        }
    }
    return csv.str();
}

}  // namespace partdist
