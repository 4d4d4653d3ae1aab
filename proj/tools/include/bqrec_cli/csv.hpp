#pragma once

#include "bqrec/types.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace bqrec::cli {

/// Numeric CSV with an optional one-line header.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    /// Index of a named column; throws IoError when absent.
    std::size_t column(const std::string& name) const;
};

/// 17 significant digits, which round-trips every finite double.
std::string format_double(double x);

/// Throws IoError on unreadable files, ragged rows or non-numeric fields. A
/// first line containing any non-numeric field is taken as the header.
Table read_table(const std::filesystem::path& path);

/// Row-major matrix; the header line is optional on input.
Matrix read_matrix(const std::filesystem::path& path);

std::string matrix_to_csv(const Matrix& M, const std::vector<std::string>& header = {});

/// Writes through a temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

void write_matrix(const std::filesystem::path& path, const Matrix& M,
                  const std::vector<std::string>& header = {});

}  // namespace bqrec::cli
