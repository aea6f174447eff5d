#pragma once

#include <Eigen/Dense>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cegof/errors.hpp"

namespace cegof {

namespace detail {

inline bool parse_double(const std::string& token, double& out) {
    const char* begin = token.data();
    const char* end = begin + token.size();
    while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end > begin && (*(end - 1) == ' ' || *(end - 1) == '\t' || *(end - 1) == '\r')) --end;
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc{} && ptr == end && begin != end;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> tokens;
    std::stringstream ss(line);
    std::string token;
    while (std::getline(ss, token, ',')) tokens.push_back(token);
    if (!line.empty() && line.back() == ',') tokens.emplace_back();
    return tokens;
}

}  // namespace detail

/// Read a numeric CSV into a matrix. A first row with any non-numeric token
/// is treated as a header and skipped; ragged or non-numeric data rows fail
/// with their line number.
inline Eigen::MatrixXd read_csv_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open input file: " + path);

    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    std::size_t n_cols = 0;
    bool first_data_line = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r" || line[0] == '#') continue;
        auto tokens = detail::split_csv_line(line);
        std::vector<double> values(tokens.size());
        bool numeric = true;
        for (std::size_t j = 0; j < tokens.size(); ++j) {
            if (!detail::parse_double(tokens[j], values[j])) {
                numeric = false;
                break;
            }
        }
        if (!numeric) {
            if (first_data_line) {
                first_data_line = false;  // header row
                continue;
            }
            throw input_error("non-numeric value at line " + std::to_string(line_no) + " of " +
                              path);
        }
        first_data_line = false;
        if (n_cols == 0) {
            n_cols = values.size();
        } else if (values.size() != n_cols) {
            throw input_error("ragged CSV: line " + std::to_string(line_no) + " has " +
                              std::to_string(values.size()) + " columns, expected " +
                              std::to_string(n_cols));
        }
        rows.push_back(std::move(values));
    }
    if (rows.empty()) throw input_error("no numeric data rows in " + path);

    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(n_cols));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < n_cols; ++j) {
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return out;
}

}  // namespace cegof
