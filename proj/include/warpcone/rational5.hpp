#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <string>
#include <string_view>

namespace warpcone {

// Exact element of Z[1/5], stored as numerator / 5^exponent.
// Normal form: exponent == 0 or the numerator is not divisible by 5; zero is 0/5^0.
class Rational5 {
 public:
  Rational5() = default;
  Rational5(long value) : num_(value) {}  // NOLINT(google-explicit-constructor)
  Rational5(mpz_class numerator, unsigned exponent);

  // Accepts "n", "n/5^k" and "n/m" where m is a power of five written out (e.g. "-4/25").
  static Rational5 parse(std::string_view text);

  const mpz_class& numerator() const noexcept { return num_; }
  unsigned exponent() const noexcept { return exp_; }

  bool is_zero() const noexcept { return sgn(num_) == 0; }
  double to_double() const;
  std::string str() const;  // round-trips through parse()

  Rational5 operator-() const;
  friend Rational5 operator+(const Rational5& a, const Rational5& b);
  friend Rational5 operator-(const Rational5& a, const Rational5& b);
  friend Rational5 operator*(const Rational5& a, const Rational5& b);
  Rational5& operator+=(const Rational5& other);
  Rational5& operator*=(const Rational5& other);

  friend bool operator==(const Rational5& a, const Rational5& b) {
    return a.exp_ == b.exp_ && a.num_ == b.num_;
  }

  std::size_t hash() const noexcept;

 private:
  void normalize();

  mpz_class num_{0};
  unsigned exp_ = 0;
};

// 5^k as an arbitrary-precision integer (cached for small k).
const mpz_class& pow5(unsigned k);

}  // namespace warpcone
