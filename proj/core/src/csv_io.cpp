#include "taraarch/csv_io.hpp"

#include "taraarch/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <string_view>

namespace taraarch {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    for (;;) {
        const auto comma = line.find(',');
        out.push_back(trim(line.substr(0, comma)));
        if (comma == std::string_view::npos) return out;
        line.remove_prefix(comma + 1);
    }
}

bool parse_double(std::string_view s, double& v) {
    if (s == "nan" || s == "NaN") {
        v = std::numeric_limits<double>::quiet_NaN();
        return true;
    }
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc() && ptr == s.data() + s.size() && !s.empty();
}

template <class T>
bool parse_integer(std::string_view s, T& v) {
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc() && ptr == s.data() + s.size() && !s.empty();
}

[[noreturn]] void bad_line(const std::string& source, std::size_t line, std::string_view text, const char* why) {
    throw DataError(fmt::format("{}:{}: {} ('{}')", source, line, why, text));
}

}  // namespace

std::string format_number(double value) { return fmt::format("{:.17g}", value); }

std::vector<double> read_column(std::istream& in, const std::string& source) {
    std::vector<double> values;
    std::string line;
    std::size_t number = 0;
    bool seen_data = false;
    while (std::getline(in, line)) {
        ++number;
        const auto text = trim(line);
        if (text.empty()) continue;
        const auto fields = split(text);
        if (fields.size() != 1) bad_line(source, number, text, "expected a single column");
        double v = 0.0;
        if (!parse_double(fields[0], v) || !std::isfinite(v)) {
            if (number == 1 && !seen_data) continue;  // header
            bad_line(source, number, text, "not a finite number");
        }
        seen_data = true;
        values.push_back(v);
    }
    if (values.empty()) throw DataError(source + ": no numeric rows");
    return values;
}

std::vector<double> read_named_column(std::istream& in, const std::string& name, const std::string& source) {
    std::string line;
    std::size_t number = 0;
    std::size_t column = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++number;
        if (trim(line).empty()) continue;
        const auto header = split(trim(line));
        const auto it = std::find(header.begin(), header.end(), std::string_view(name));
        if (it == header.end()) throw DataError(fmt::format("{}:{}: no column named '{}'", source, number, name));
        column = static_cast<std::size_t>(it - header.begin());
        width = header.size();
        break;
    }
    if (width == 0) throw DataError(source + ": empty file");
    std::vector<double> values;
    while (std::getline(in, line)) {
        ++number;
        const auto text = trim(line);
        if (text.empty()) continue;
        const auto fields = split(text);
        if (fields.size() != width) bad_line(source, number, text, "wrong field count");
        double v = 0.0;
        if (!parse_double(fields[column], v) || !std::isfinite(v)) bad_line(source, number, text, "not a finite number");
        values.push_back(v);
    }
    if (values.empty()) throw DataError(source + ": no numeric rows");
    return values;
}

void write_column(std::ostream& out, std::span<const double> values, const std::string& header) {
    out << header << '\n';
    for (double v : values) out << format_number(v) << '\n';
}

void write_path(std::ostream& out, const SimulatedPath& path) {
    out << "index,x,h,z\n";
    const auto x = path.series.values();
    for (std::size_t t = 0; t < x.size(); ++t)
        out << t << ',' << format_number(x[t]) << ',' << format_number(path.variances[t]) << ','
            << format_number(path.innovations[t]) << '\n';
}

void write_rows(std::ostream& out, const ExperimentResult& result) {
    const auto& names = result.param_names;
    const std::size_t k = names.size();
    out << "n,r,seed,converged";
    for (const auto& name : names) out << ',' << name;
    for (const auto& name : names) out << ",se_" << name;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i; j < k; ++j) out << ",cov_" << i << '_' << j;
    out << ",selected_delay,selected_thresholds\n";

    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& row : result.rows) {
        out << row.n << ',' << row.r << ',' << row.seed << ',' << (row.converged ? 1 : 0);
        const auto at = [&](const Eigen::VectorXd& v, std::size_t i) {
            return static_cast<Eigen::Index>(i) < v.size() ? v(static_cast<Eigen::Index>(i)) : nan;
        };
        for (std::size_t i = 0; i < k; ++i) out << ',' << format_number(at(row.estimates, i));
        for (std::size_t i = 0; i < k; ++i) out << ',' << format_number(at(row.std_errors, i));
        const bool has_cov = static_cast<std::size_t>(row.covariance.rows()) == k;
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = i; j < k; ++j)
                out << ','
                    << format_number(has_cov ? row.covariance(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))
                                             : nan);
        out << ',' << row.selected_delay << ',';
        for (std::size_t i = 0; i < row.selected_thresholds.size(); ++i)
            out << (i ? ";" : "") << format_number(row.selected_thresholds[i]);
        out << '\n';
    }
}

std::vector<ExperimentRow> read_rows(std::istream& in, std::size_t k) {
    const std::string source = "rows";
    const std::size_t cov = k * (k + 1) / 2;
    const std::size_t width = 4 + 2 * k + cov + 2;
    std::vector<ExperimentRow> rows;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto text = trim(line);
        if (text.empty() || number == 1) continue;
        const auto f = split(text);
        if (f.size() != width) bad_line(source, number, text, "wrong field count");
        ExperimentRow row;
        int converged = 0;
        if (!parse_integer(f[0], row.n) || !parse_integer(f[1], row.r) || !parse_integer(f[2], row.seed) ||
            !parse_integer(f[3], converged))
            bad_line(source, number, text, "bad index fields");
        row.converged = converged != 0;
        const auto read_vec = [&](std::size_t offset) {
            Eigen::VectorXd v(static_cast<Eigen::Index>(k));
            for (std::size_t i = 0; i < k; ++i)
                if (!parse_double(f[offset + i], v(static_cast<Eigen::Index>(i))))
                    bad_line(source, number, text, "bad number");
            return v;
        };
        row.estimates = read_vec(4);
        row.std_errors = read_vec(4 + k);
        row.covariance.resize(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
        std::size_t at = 4 + 2 * k;
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = i; j < k; ++j) {
                double v = 0.0;
                if (!parse_double(f[at++], v)) bad_line(source, number, text, "bad number");
                row.covariance(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
                row.covariance(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
            }
        if (!parse_integer(f[at++], row.selected_delay)) bad_line(source, number, text, "bad delay");
        std::string_view ts = f[at];
        while (!ts.empty()) {
            const auto semi = ts.find(';');
            double v = 0.0;
            if (!parse_double(ts.substr(0, semi), v)) bad_line(source, number, text, "bad threshold");
            row.selected_thresholds.push_back(v);
            if (semi == std::string_view::npos) break;
            ts.remove_prefix(semi + 1);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace taraarch
