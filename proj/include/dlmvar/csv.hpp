#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "dlmvar/adjust.hpp"
#include "dlmvar/errors.hpp"
#include "dlmvar/forecast.hpp"
#include "dlmvar/model.hpp"

namespace dlmvar {

/// Locale-independent shortest round-trip formatting.
inline std::string format_double(double x) {
    std::array<char, 32> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    if (ec != std::errc())
        throw numeric_error("failed to format floating-point value");
    return std::string(buf.data(), ptr);
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        // trim whitespace and a trailing CR
        const auto first = field.find_first_not_of(" \t\r");
        const auto last = field.find_last_not_of(" \t\r");
        fields.push_back(first == std::string::npos ? ""
                                                    : field.substr(first, last - first + 1));
    }
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

inline double parse_value(const std::string& s, int line_no) {
    if (s.empty())
        throw data_error("missing value at line " + std::to_string(line_no) +
                         " (missing values are not supported)");
    double x = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw data_error("non-numeric value '" + s + "' at line " + std::to_string(line_no));
    if (!std::isfinite(x))
        throw data_error("non-finite value at line " + std::to_string(line_no));
    return x;
}

}  // namespace detail

/// Reads a series CSV: header `value`, or `t,value` with the leading index
/// column ignored for computation. Missing or non-numeric entries are
/// rejected.
inline ObservedSeries read_series_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open data file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw data_error("empty data file: " + path);

    auto header = detail::split_csv_line(line);
    int value_col = -1;
    if (header.size() == 1 && header[0] == "value") value_col = 0;
    else if (header.size() == 2 && header[0] == "t" && header[1] == "value") value_col = 1;
    else
        throw data_error("unsupported data header in " + path +
                         " (expected 'value' or 't,value')");

    ObservedSeries series;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto fields = detail::split_csv_line(line);
        if (static_cast<int>(fields.size()) != static_cast<int>(header.size()))
            throw data_error("wrong field count at line " + std::to_string(line_no));
        series.values.push_back(detail::parse_value(fields[static_cast<std::size_t>(value_col)],
                                                    line_no));
    }
    if (series.values.empty()) throw data_error("no observations in " + path);
    return series;
}

namespace detail {

inline std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // binary: no platform newline translation
    if (!out) throw data_error("cannot open output file: " + path);
    return out;
}

}  // namespace detail

inline void write_series_csv(const std::string& path, const ObservedSeries& series) {
    auto out = detail::open_out(path);
    out << "t,value\n";
    for (int t = 1; t <= series.length(); ++t)
        out << t << "," << format_double(series.at(t)) << "\n";
}

/// Differenced series, one row per t = 3..T; cells before a series starts
/// are empty.
inline void write_linear_combinations_csv(const std::string& path,
                                          const DifferencedSeries& diff, bool squared) {
    auto out = detail::open_out(path);
    out << (squared ? "t,x1_sq,x2_sq,x3_sq\n" : "t,x1,x2,x3\n");
    auto cell = [&](int series, int t) -> std::string {
        if (t < kFirstTime[static_cast<std::size_t>(series - 1)]) return "";
        const double x = diff.at(series, t);
        return format_double(squared ? x * x : x);
    };
    for (int t = 3; t <= diff.T; ++t)
        out << t << "," << cell(1, t) << "," << cell(2, t) << "," << cell(3, t) << "\n";
}

inline void write_trajectory_csv(const std::string& path,
                                 const std::vector<AdjustmentResult>& trajectory) {
    auto out = detail::open_out(path);
    out << "N";
    for (int i = 1; i <= 3; ++i)
        out << ",mean_" << i << ",lower_" << i << ",upper_" << i << ",resolution_" << i
            << ",diagnostic_" << i;
    out << "\n";
    for (const auto& a : trajectory) {
        out << a.N;
        for (int i = 0; i < 3; ++i) {
            const double half_width = 2.0 * std::sqrt(std::max(0.0, a.adjusted_var(i, i)));
            out << "," << format_double(a.adjusted_mean(i)) << ","
                << format_double(a.adjusted_mean(i) - half_width) << ","
                << format_double(a.adjusted_mean(i) + half_width) << ","
                << format_double(a.resolution(i)) << "," << format_double(a.diagnostics(i));
        }
        out << "\n";
    }
}

inline void write_unbiased_csv(const std::string& path, const UnbiasedEstimates& estimates) {
    auto out = detail::open_out(path);
    out << "t,v1_hat,v2_hat,v3_hat\n";
    for (const auto& row : estimates.running)
        out << static_cast<int>(row[0]) << "," << format_double(row[1]) << ","
            << format_double(row[2]) << "," << format_double(row[3]) << "\n";
}

inline void write_forecast_csv(const std::string& path, const ForecastResult& forecast) {
    auto out = detail::open_out(path);
    out << "t,forecast_mean,forecast_var,lower,upper,observed,inside\n";
    for (const auto& s : forecast.steps)
        out << s.t << "," << format_double(s.forecast_mean) << ","
            << format_double(s.forecast_var) << "," << format_double(s.lower) << ","
            << format_double(s.upper) << "," << format_double(s.observed) << ","
            << (s.inside ? 1 : 0) << "\n";
}

inline void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m) {
    auto out = detail::open_out(path);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            out << (j ? "," : "") << format_double(m(i, j));
        out << "\n";
    }
}

}  // namespace dlmvar
