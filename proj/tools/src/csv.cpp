#include "bqrec_cli/csv.hpp"

#include "bqrec_cli/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace bqrec::cli {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(trim(field));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

bool parse_number(const std::string& s, double& x) {
    if (s.empty()) return false;
    const char* first = s.data();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), x);
    return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

std::size_t Table::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw IoError("CSV column '" + name + "' not found");
}

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

Table read_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    Table table;
    std::string line;
    std::size_t lineno = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty() || trim(line)[0] == '#') continue;
        auto fields = split(line);
        std::vector<double> row(fields.size());
        bool numeric = true;
        for (std::size_t i = 0; i < fields.size(); ++i)
            if (!parse_number(fields[i], row[i])) numeric = false;
        if (!numeric) {
            if (table.header.empty() && table.rows.empty()) {
                table.header = std::move(fields);
                width = table.header.size();
                continue;
            }
            throw IoError(path.string() + ":" + std::to_string(lineno) + ": non-numeric field");
        }
        if (width == 0) width = row.size();
        if (row.size() != width)
            throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                          std::to_string(width) + " fields, got " + std::to_string(row.size()));
        table.rows.push_back(std::move(row));
    }
    return table;
}

Matrix read_matrix(const std::filesystem::path& path) {
    const Table t = read_table(path);
    if (t.rows.empty()) throw IoError(path.string() + ": no data rows");
    Matrix M(static_cast<Eigen::Index>(t.rows.size()), static_cast<Eigen::Index>(t.rows[0].size()));
    for (std::size_t r = 0; r < t.rows.size(); ++r)
        for (std::size_t c = 0; c < t.rows[r].size(); ++c)
            M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = t.rows[r][c];
    return M;
}

std::string matrix_to_csv(const Matrix& M, const std::vector<std::string>& header) {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
    if (!header.empty()) out += '\n';
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
        for (Eigen::Index c = 0; c < M.cols(); ++c) {
            if (c) out += ',';
            out += format_double(M(r, c));
        }
        out += '\n';
    }
    return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
    }
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out << contents;
        if (!out.flush()) throw IoError("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot move output into " + path.string());
    }
}

void write_matrix(const std::filesystem::path& path, const Matrix& M,
                  const std::vector<std::string>& header) {
    write_file_atomic(path, matrix_to_csv(M, header));
}

}  // namespace bqrec::cli
