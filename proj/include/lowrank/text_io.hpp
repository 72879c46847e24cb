#pragma once

#include <iosfwd>
#include <string>

#include "lowrank/matrix_core.hpp"

namespace lowrank {

/// One row per line, entries separated by whitespace and/or commas; text after
/// '#' is ignored and blank lines are skipped. Rows must have equal lengths.
Matrix read_matrix(std::istream& in);
Matrix read_matrix_file(const std::string& path);

/// All entries of the file in reading order (a column, a row or several rows).
Sequence read_sequence(std::istream& in);
Sequence read_sequence_file(const std::string& path);

/// Round-trip precision (%.17g), comma separated.
void write_matrix(std::ostream& out, const Matrix& M);
/// One value per line.
void write_sequence(std::ostream& out, const Sequence& s);

std::string format_double(double v);

}  // namespace lowrank
