#pragma once

// CSV ingestion and output helpers.

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "classo/matrix.hpp"

namespace classo {

struct CsvTable {
    std::vector<std::string> header;  // empty when the file has none
    Matrix values;                    // rows × columns, all finite
};

/// Parses comma-separated numeric text. A header is assumed when any cell of
/// the first non-empty line fails to parse as a number. Blank lines are
/// skipped; surrounding whitespace and double quotes are trimmed. Throws
/// ParseError (1-based line/field) for malformed or ragged rows and
/// NonFiniteValue for NaN/Inf cells.
CsvTable parse_csv(std::string_view text);

/// parse_csv on a file. Throws ConfigError if it cannot be read.
CsvTable read_csv(const std::filesystem::path& path);

struct RegressionTable {
    Vector y;
    Matrix predictors;
    std::string response_name;
    std::vector<std::string> predictor_names;
};

/// Splits a table into the response column (0-based `response_col`) and
/// the remaining predictor columns, in order. Missing header names become
/// "y" and "x1", "x2", ... (1-based predictor positions).
RegressionTable to_regression(const CsvTable& table, std::size_t response_col = 0);

/// Shortest decimal form that reads back to the same double (≤ 17 digits).
std::string format_double(double v);

/// CSV text for a matrix with an optional header.
std::string format_csv(const Matrix& values, const std::vector<std::string>& header = {});

/// Writes `content` to a sibling temporary file and renames it over `path`,
/// so readers never see a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Subtracts column means in place; returns the means.
Vector center_columns(Matrix& m);
/// Subtracts the mean in place; returns it.
double center_vector(Vector& v);
/// Divides columns by their sample standard deviation (columns with zero
/// spread are left untouched); returns the scales used.
Vector scale_columns(Matrix& m);

}  // namespace classo
