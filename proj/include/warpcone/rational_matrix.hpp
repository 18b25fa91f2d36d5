#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "warpcone/rational5.hpp"

namespace warpcone {

// Square matrix over Z[1/5], row-major. Acts on column vectors.
class RationalMatrix {
 public:
  RationalMatrix() = default;
  explicit RationalMatrix(std::size_t dim);  // zero matrix
  RationalMatrix(std::size_t dim, std::vector<Rational5> entries);

  static RationalMatrix identity(std::size_t dim);
  static RationalMatrix parse(const std::vector<std::vector<std::string>>& rows);

  std::size_t dim() const noexcept { return dim_; }
  const Rational5& operator()(std::size_t i, std::size_t j) const { return entries_[i * dim_ + j]; }
  Rational5& operator()(std::size_t i, std::size_t j) { return entries_[i * dim_ + j]; }
  const std::vector<Rational5>& entries() const noexcept { return entries_; }

  RationalMatrix transpose() const;
  Rational5 determinant() const;
  bool is_identity() const;

  // Row-major doubles, dim*dim values.
  std::vector<double> to_double() const;
  std::vector<std::vector<std::string>> to_strings() const;

  friend RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b);
  friend bool operator==(const RationalMatrix& a, const RationalMatrix& b) {
    return a.dim_ == b.dim_ && a.entries_ == b.entries_;
  }

  std::size_t hash() const noexcept;

 private:
  std::size_t dim_ = 0;
  std::vector<Rational5> entries_;
};

struct RationalMatrixHash {
  std::size_t operator()(const RationalMatrix& m) const noexcept { return m.hash(); }
};

// M^T M = I and det M = 1, both exact.
bool verify_special_orthogonal(const RationalMatrix& m);

}  // namespace warpcone
