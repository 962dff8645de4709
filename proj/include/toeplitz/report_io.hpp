// report_io.hpp
// CSV and JSON serialization of analytics reports. Every CSV starts with a
// '#' comment line echoing the run configuration, then a header row.

#pragma once

#include <cstdint>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "toeplitz/analytics.hpp"

namespace toeplitz {

// Ordered key/value pairs describing the run that produced a report.
using ConfigEcho = std::vector<std::pair<std::string, std::string>>;

// A report flattened to named columns; both serializers work from this.
struct Table {
    std::string kind;
    ConfigEcho config;
    std::vector<std::string> columns;
    std::vector<std::vector<nlohmann::json>> rows;
};

namespace detail {

inline std::string format_cell(const nlohmann::json& v, int precision) {
    if (v.is_number_float()) {
        std::ostringstream os;
        os << std::setprecision(precision) << v.get<double>();
        return os.str();
    }
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

}  // namespace detail

inline std::string config_comment(const std::string& kind, const ConfigEcho& config) {
    std::string s = "# report=" + kind;
    for (const auto& [k, v] : config) s += " " + k + "=" + v;
    return s;
}

inline void write_csv(const Table& t, std::ostream& out, int precision = 12) {
    out << config_comment(t.kind, t.config) << '\n';
    for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
    out << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << detail::format_cell(row[i], precision);
        out << '\n';
    }
}

inline nlohmann::json to_json(const Table& t) {
    nlohmann::json j;
    j["report"] = t.kind;
    j["config"] = nlohmann::json::object();
    for (const auto& [k, v] : t.config) j["config"][k] = v;
    j["columns"] = t.columns;
    j["rows"] = nlohmann::json::array();
    for (const auto& row : t.rows) {
        nlohmann::json r = nlohmann::json::object();
        for (std::size_t i = 0; i < row.size(); ++i) r[t.columns[i]] = row[i];
        j["rows"].push_back(std::move(r));
    }
    return j;
}

inline void write_json(const Table& t, std::ostream& out) { out << to_json(t).dump(2) << '\n'; }

// ---------------------------------------------------------------------------
// Report -> Table
// ---------------------------------------------------------------------------

inline Table to_table(const DiscrepancyReport& r, ConfigEcho config) {
    Table t{"discrepancy", std::move(config), {"N"}, {}};
    for (unsigned k = 0; k < r.base; ++k) t.columns.push_back("eps_" + std::to_string(k));
    for (const char* c : {"eps_max", "E_N", "envelope", "ratio"}) t.columns.emplace_back(c);
    for (const auto& row : r.rows) {
        std::vector<nlohmann::json> cells{row.n};
        for (double e : row.eps) cells.emplace_back(e);
        cells.emplace_back(row.eps_max);
        cells.emplace_back(row.e_n);
        cells.emplace_back(row.envelope);
        cells.emplace_back(row.ratio);
        t.rows.push_back(std::move(cells));
    }
    return t;
}

inline Table to_table(const ExpSumSeries& s, ConfigEcho config) {
    Table t{"expsum", std::move(config), {"N", "S_re", "S_im", "abs_S_over_N", "E_N", "bound"}, {}};
    for (const auto& c : s.checkpoints) {
        t.rows.push_back({c.n, c.s.real(), c.s.imag(), std::abs(c.s) / static_cast<double>(c.n), c.e_n, c.bound});
    }
    return t;
}

inline Table sigma_table(const std::vector<std::pair<std::uint64_t, SigmaResult>>& rows, ConfigEcho config) {
    Table t{"sigma",
            std::move(config),
            {"N", "sigma_re", "sigma_im", "sigma_over_logN_re", "sigma_over_logN_im", "truncated"},
            {}};
    for (const auto& [n, r] : rows) {
        t.rows.push_back({n, r.value.real(), r.value.imag(), r.over_log_n.real(), r.over_log_n.imag(), r.truncated});
    }
    return t;
}

inline Table eta_table(const std::vector<std::pair<std::uint64_t, EtaResult>>& rows, ConfigEcho config) {
    Table t{"eta",
            std::move(config),
            {"N", "eta", "z_star", "lower_bound", "tail_limit", "sum_logp_over_p", "eta_logN"},
            {}};
    for (const auto& [n, r] : rows) {
        t.rows.push_back({n, r.value, r.z_star, r.truncated, r.tail_limit, r.log_weighted_sum, r.value * r.log_n});
    }
    return t;
}

// Frequencies print with six decimals, one column per digit.
inline void write_frequencies_csv(const std::vector<double>& freq, const ConfigEcho& config, std::ostream& out) {
    out << config_comment("freq-limit", config) << '\n';
    for (std::size_t k = 0; k < freq.size(); ++k) out << (k ? "," : "") << "freq_" << k;
    out << '\n';
    std::ostringstream os;
    os << std::fixed << std::setprecision(6);
    for (std::size_t k = 0; k < freq.size(); ++k) os << (k ? "," : "") << freq[k];
    out << os.str() << '\n';
}

inline Table frequency_table(const std::vector<double>& freq, ConfigEcho config) {
    Table t{"freq-limit", std::move(config), {}, {}};
    std::vector<nlohmann::json> row;
    for (std::size_t k = 0; k < freq.size(); ++k) {
        t.columns.push_back("freq_" + std::to_string(k));
        row.emplace_back(freq[k]);
    }
    t.rows.push_back(std::move(row));
    return t;
}

}  // namespace toeplitz
