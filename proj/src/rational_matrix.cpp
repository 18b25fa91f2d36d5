#include "warpcone/rational_matrix.hpp"

#include <algorithm>
#include <utility>

#include "warpcone/errors.hpp"

namespace warpcone {

RationalMatrix::RationalMatrix(std::size_t dim) : dim_(dim), entries_(dim * dim) {}

RationalMatrix::RationalMatrix(std::size_t dim, std::vector<Rational5> entries)
    : dim_(dim), entries_(std::move(entries)) {
  if (entries_.size() != dim_ * dim_) {
    throw InputError("matrix of dimension " + std::to_string(dim_) + " needs " +
                     std::to_string(dim_ * dim_) + " entries, got " + std::to_string(entries_.size()));
  }
}

RationalMatrix RationalMatrix::identity(std::size_t dim) {
  RationalMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = Rational5(1);
  return m;
}

RationalMatrix RationalMatrix::parse(const std::vector<std::vector<std::string>>& rows) {
  const std::size_t dim = rows.size();
  if (dim == 0) throw InputError("empty matrix");
  std::vector<Rational5> entries;
  entries.reserve(dim * dim);
  for (const auto& row : rows) {
    if (row.size() != dim) throw InputError("matrix is not square");
    for (const auto& cell : row) entries.push_back(Rational5::parse(cell));
  }
  return RationalMatrix(dim, std::move(entries));
}

RationalMatrix RationalMatrix::transpose() const {
  RationalMatrix t(dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Rational5 RationalMatrix::determinant() const {
  // Exact Laplace expansion over permutations is fine for the small dims used here;
  // fraction-free elimination would need division, which Z[1/5] lacks in general.
  if (dim_ == 0) return Rational5(1);
  if (dim_ == 1) return entries_[0];
  if (dim_ == 2) return (*this)(0, 0) * (*this)(1, 1) - (*this)(0, 1) * (*this)(1, 0);
  Rational5 det;
  for (std::size_t col = 0; col < dim_; ++col) {
    const Rational5& pivot = (*this)(0, col);
    if (pivot.is_zero()) continue;
    RationalMatrix minor(dim_ - 1);
    for (std::size_t i = 1; i < dim_; ++i) {
      std::size_t mj = 0;
      for (std::size_t j = 0; j < dim_; ++j) {
        if (j == col) continue;
        minor(i - 1, mj++) = (*this)(i, j);
      }
    }
    Rational5 term = pivot * minor.determinant();
    det = (col % 2 == 0) ? det + term : det - term;
  }
  return det;
}

bool RationalMatrix::is_identity() const {
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) {
      const Rational5& e = (*this)(i, j);
      if (i == j ? !(e == Rational5(1)) : !e.is_zero()) return false;
    }
  return true;
}

std::vector<double> RationalMatrix::to_double() const {
  std::vector<double> out(entries_.size());
  std::transform(entries_.begin(), entries_.end(), out.begin(),
                 [](const Rational5& r) { return r.to_double(); });
  return out;
}

std::vector<std::vector<std::string>> RationalMatrix::to_strings() const {
  std::vector<std::vector<std::string>> rows(dim_, std::vector<std::string>(dim_));
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) rows[i][j] = (*this)(i, j).str();
  return rows;
}

RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b) {
  if (a.dim_ != b.dim_) throw InputError("matrix dimension mismatch in product");
  const std::size_t n = a.dim_;
  RationalMatrix c(n);
  mpz_class acc;
  mpz_class term;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      // Bring every term to the largest exponent, sum numerators once, normalize once.
      unsigned top = 0;
      for (std::size_t k = 0; k < n; ++k) {
        const Rational5& x = a(i, k);
        const Rational5& y = b(k, j);
        if (!x.is_zero() && !y.is_zero()) top = std::max(top, x.exponent() + y.exponent());
      }
      acc = 0;
      for (std::size_t k = 0; k < n; ++k) {
        const Rational5& x = a(i, k);
        const Rational5& y = b(k, j);
        if (x.is_zero() || y.is_zero()) continue;
        term = x.numerator() * y.numerator();
        const unsigned shift = top - x.exponent() - y.exponent();
        if (shift > 0) term *= pow5(shift);
        acc += term;
      }
      c(i, j) = Rational5(acc, top);
    }
  }
  return c;
}

std::size_t RationalMatrix::hash() const noexcept {
  std::size_t h = dim_;
  for (const auto& e : entries_) h ^= e.hash() + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

bool verify_special_orthogonal(const RationalMatrix& m) {
  if (m.dim() == 0) return false;
  if (!(m.transpose() * m).is_identity()) return false;
  return m.determinant() == Rational5(1);
}

}  // namespace warpcone
