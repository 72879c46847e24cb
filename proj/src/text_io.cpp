#include "lowrank/text_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

#include "lowrank/errors.hpp"

namespace lowrank {

namespace {

std::vector<std::vector<double>> read_rows(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::vector<double> row;
        std::size_t i = 0;
        while (i < line.size()) {
            const char c = line[i];
            if (c == ',' || c == ' ' || c == '\t' || c == '\r') {
                ++i;
                continue;
            }
            std::size_t j = i;
            while (j < line.size() && line[j] != ',' && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
            const char* first = line.data() + i;
            const char* last = line.data() + j;
            if (*first == '+') ++first;
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(first, last, v);
            if (ec != std::errc() || ptr != last) {
                throw IoError("line " + std::to_string(lineno) + ": cannot parse '" + line.substr(i, j - i) + "'");
            }
            row.push_back(v);
            i = j;
        }
        if (!row.empty()) rows.push_back(std::move(row));
    }
    if (in.bad()) throw IoError("read error");
    return rows;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open '" + path + "'");
    return f;
}

}  // namespace

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Matrix read_matrix(std::istream& in) {
    const auto rows = read_rows(in);
    if (rows.empty()) throw IoError("matrix file has no entries");
    Matrix M(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows.front().size()) {
            throw IoError("matrix rows have different lengths (" + std::to_string(rows.front().size()) + " vs " +
                          std::to_string(rows[i].size()) + ")");
        }
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            M(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
        }
    }
    return M;
}

Matrix read_matrix_file(const std::string& path) {
    auto f = open_in(path);
    return read_matrix(f);
}

Sequence read_sequence(std::istream& in) {
    std::vector<double> all;
    for (const auto& row : read_rows(in)) all.insert(all.end(), row.begin(), row.end());
    if (all.empty()) throw IoError("sequence file has no entries");
    return Eigen::Map<const Sequence>(all.data(), static_cast<Index>(all.size()));
}

Sequence read_sequence_file(const std::string& path) {
    auto f = open_in(path);
    return read_sequence(f);
}

void write_matrix(std::ostream& out, const Matrix& M) {
    for (Index i = 0; i < M.rows(); ++i) {
        for (Index j = 0; j < M.cols(); ++j) {
            if (j) out << ',';
            out << format_double(M(i, j));
        }
        out << '\n';
    }
}

void write_sequence(std::ostream& out, const Sequence& s) {
    for (Index i = 0; i < s.size(); ++i) out << format_double(s(i)) << '\n';
}

}  // namespace lowrank
