#include "mspde/io/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mspde {

std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

void write_rows(std::ofstream& out, const DenseMatrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << g17(m(i, j));
    }
    out << '\n';
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

}  // namespace

void write_matrix_csv(const std::string& path, const DenseMatrix& m) {
  auto out = open_out(path);
  write_rows(out, m);
}

void write_vector_csv(const std::string& path, const Vector& v) {
  auto out = open_out(path);
  for (Eigen::Index i = 0; i < v.size(); ++i) out << g17(v(i)) << '\n';
}

void write_table_csv(const std::string& path,
                     const std::vector<std::string>& header,
                     const DenseMatrix& rows) {
  auto out = open_out(path);
  for (size_t j = 0; j < header.size(); ++j) {
    if (j) out << ',';
    out << header[j];
  }
  out << '\n';
  write_rows(out, rows);
}

DenseMatrix read_table_csv(const std::string& path,
                           std::vector<std::string>* header) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::string line;
  if (!std::getline(in, line) || line.empty())
    throw std::runtime_error("missing csv header in " + path);
  std::vector<std::string> labels;
  {
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) labels.push_back(field);
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
      char* end = nullptr;
      const double v = std::strtod(field.c_str(), &end);
      if (end == field.c_str() || *end != '\0')
        throw std::runtime_error("non-numeric csv field in " + path + ": " +
                                 field);
      row.push_back(v);
    }
    if (row.size() != labels.size())
      throw std::runtime_error("ragged csv rows in " + path);
    rows.push_back(std::move(row));
  }
  if (header) *header = labels;
  DenseMatrix m((Eigen::Index)rows.size(), (Eigen::Index)labels.size());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  return m;
}

DenseMatrix read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
      char* end = nullptr;
      const double v = std::strtod(field.c_str(), &end);
      if (end == field.c_str() || *end != '\0')
        throw std::runtime_error("non-numeric csv field in " + path + ": " +
                                 field);
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::runtime_error("ragged csv rows in " + path);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("empty csv: " + path);
  DenseMatrix m((Eigen::Index)rows.size(), (Eigen::Index)rows.front().size());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  return m;
}

Vector read_vector_csv(const std::string& path) {
  const DenseMatrix m = read_matrix_csv(path);
  if (m.cols() != 1)
    throw std::runtime_error("expected single-column csv: " + path);
  return m.col(0);
}

}  // namespace mspde
