#pragma once

#include <string>
#include <vector>

#include "mspde/core.hpp"

namespace mspde {

// All numeric artifacts are written with %.17g so a round trip through text
// reproduces the double exactly.
std::string g17(double v);

// Plain rectangular CSV, no header. Readers reject ragged or non-numeric
// input instead of guessing.
void write_matrix_csv(const std::string& path, const DenseMatrix& m);
void write_vector_csv(const std::string& path, const Vector& v);
DenseMatrix read_matrix_csv(const std::string& path);
Vector read_vector_csv(const std::string& path);

// Labeled table: one header line, then %.17g rows.
void write_table_csv(const std::string& path,
                     const std::vector<std::string>& header,
                     const DenseMatrix& rows);
DenseMatrix read_table_csv(const std::string& path,
                           std::vector<std::string>* header = nullptr);

}  // namespace mspde
