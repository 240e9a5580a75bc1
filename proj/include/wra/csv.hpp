#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "wra/errors.hpp"
#include "wra/montecarlo.hpp"
#include "wra/sample.hpp"

namespace wra {

/// Shortest decimal representation that round-trips the double.
inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace detail {

inline std::string strip(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return s.substr(b, e - b);
}

inline double parse_double(const std::string& field, std::size_t line_no) {
    const std::string f = strip(field);
    double v = 0.0;
    const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
    if (res.ec != std::errc{} || res.ptr != f.data() + f.size()) {
        throw DataError("csv: cannot parse \"" + f + "\" as a number (line " +
                        std::to_string(line_no) + ")");
    }
    return v;
}

}  // namespace detail

/// Reads a paired sample from CSV with header `x,y`; a single-column `x` file
/// yields the self-pairing (y = x) used by the premium estimator.
inline PairedSample read_sample_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("csv: cannot open \"" + path + "\"");
    std::string line;
    if (!std::getline(in, line)) throw DataError("csv: empty sample in \"" + path + "\"");
    const std::string header = detail::strip(line);
    bool paired;
    if (header == "x,y" || header == "x, y") {
        paired = true;
    } else if (header == "x") {
        paired = false;
    } else {
        throw DataError("csv: expected header \"x,y\" or \"x\", got \"" + header + "\"");
    }
    std::vector<double> xs, ys;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string row = detail::strip(line);
        if (row.empty()) continue;
        const auto comma = row.find(',');
        if (paired) {
            if (comma == std::string::npos) {
                throw DataError("csv: expected two columns (line " + std::to_string(line_no) + ")");
            }
            xs.push_back(detail::parse_double(row.substr(0, comma), line_no));
            ys.push_back(detail::parse_double(row.substr(comma + 1), line_no));
        } else {
            if (comma != std::string::npos) {
                throw DataError("csv: expected one column (line " + std::to_string(line_no) + ")");
            }
            xs.push_back(detail::parse_double(row, line_no));
        }
    }
    if (xs.empty()) throw DataError("csv: empty sample in \"" + path + "\"");
    if (!paired) ys = xs;
    return PairedSample(std::move(xs), std::move(ys));
}

/// Plot-ready flat CSV for an experiment result: one row per sample size.
inline std::string experiment_result_csv(const ExperimentResult& r) {
    std::ostringstream out;
    out << "n,mean,bias,rmse,scaled_var,ks,coverage\n";
    for (const auto& row : r.rows) {
        out << row.n << ',' << format_double(row.mean_estimate) << ','
            << format_double(row.bias) << ',' << format_double(row.rmse) << ','
            << format_double(row.scaled_variance) << ','
            << (row.ks_statistic ? format_double(*row.ks_statistic) : "nan") << ','
            << (row.coverage ? format_double(*row.coverage) : "nan") << '\n';
    }
    return out.str();
}

}  // namespace wra
