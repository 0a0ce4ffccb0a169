#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "groupmix/errors.hpp"

namespace groupmix {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

/// Dense matrix with arbitrary-precision integer entries, row-major.
struct IntMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<BigInt> entries;

  IntMatrix() = default;
  IntMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), entries(r * c) {}

  BigInt& at(std::size_t r, std::size_t c) { return entries[r * cols + c]; }
  const BigInt& at(std::size_t r, std::size_t c) const {
    return entries[r * cols + c];
  }

  static IntMatrix identity(std::size_t n) {
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
  }

  static IntMatrix from_rows(
      const std::vector<std::vector<long long>>& rows_in) {
    IntMatrix m(rows_in.size(), rows_in.empty() ? 0 : rows_in[0].size());
    for (std::size_t r = 0; r < m.rows; ++r) {
      if (rows_in[r].size() != m.cols)
        throw IoError("ragged rows in matrix literal");
      for (std::size_t c = 0; c < m.cols; ++c) m.at(r, c) = rows_in[r][c];
    }
    return m;
  }

  bool operator==(const IntMatrix& o) const {
    return rows == o.rows && cols == o.cols && entries == o.entries;
  }
};

inline IntMatrix multiply(const IntMatrix& a, const IntMatrix& b) {
  if (a.cols != b.rows) throw DimensionCapError("matrix product shape mismatch");
  IntMatrix out(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t k = 0; k < a.cols; ++k) {
      const BigInt& aik = a.at(i, k);
      if (aik == 0) continue;
      for (std::size_t j = 0; j < b.cols; ++j)
        out.at(i, j) += aik * b.at(k, j);
    }
  return out;
}

/// Determinant by fraction-free (Bareiss) elimination; exact.
inline BigInt determinant(const IntMatrix& a) {
  if (a.rows != a.cols) throw DimensionCapError("determinant of non-square");
  const std::size_t n = a.rows;
  if (n == 0) return 1;
  std::vector<BigInt> m = a.entries;
  auto at = [&m, n](std::size_t r, std::size_t c) -> BigInt& {
    return m[r * n + c];
  };
  BigInt prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (at(k, k) == 0) {
      std::size_t p = k + 1;
      while (p < n && at(p, k) == 0) ++p;
      if (p == n) return 0;
      for (std::size_t c = k; c < n; ++c) std::swap(at(k, c), at(p, c));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j)
        at(i, j) = (at(i, j) * at(k, k) - at(i, k) * at(k, j)) / prev;
    prev = at(k, k);
  }
  return sign * at(n - 1, n - 1);
}

/// Plain-text I/O: one row per line, whitespace-separated integers.
inline std::string to_text(const IntMatrix& m) {
  std::ostringstream os;
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t c = 0; c < m.cols; ++c) {
      if (c) os << ' ';
      os << m.at(r, c);
    }
    os << '\n';
  }
  return os.str();
}

inline IntMatrix matrix_from_text(std::istream& in) {
  std::vector<std::vector<BigInt>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::vector<BigInt> row;
    std::string tok;
    while (ls >> tok) row.emplace_back(tok);
    if (!row.empty()) rows.push_back(std::move(row));
  }
  IntMatrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t r = 0; r < m.rows; ++r) {
    if (rows[r].size() != m.cols) throw IoError("ragged matrix text");
    for (std::size_t c = 0; c < m.cols; ++c) m.at(r, c) = rows[r][c];
  }
  return m;
}

}  // namespace groupmix
