#include "warpcone/rational5.hpp"

#include <cmath>
#include <memory>
#include <mutex>
#include <vector>

#include "warpcone/errors.hpp"

namespace warpcone {

namespace {

constexpr unsigned kCachedPowers = 128;

const std::vector<mpz_class>& power_table() {
  static const std::vector<mpz_class> table = [] {
    std::vector<mpz_class> t(kCachedPowers);
    t[0] = 1;
    for (unsigned k = 1; k < kCachedPowers; ++k) t[k] = t[k - 1] * 5;
    return t;
  }();
  return table;
}

bool parse_integer(std::string_view text, mpz_class& out) {
  if (text.empty()) return false;
  std::size_t start = (text[0] == '-' || text[0] == '+') ? 1 : 0;
  if (start == text.size()) return false;
  for (std::size_t i = start; i < text.size(); ++i) {
    if (text[i] < '0' || text[i] > '9') return false;
  }
  std::string digits(text[0] == '+' ? text.substr(1) : text);
  return out.set_str(digits, 10) == 0;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

const mpz_class& pow5(unsigned k) {
  if (k < kCachedPowers) return power_table()[k];
  // Rare path; results are kept alive for the process lifetime.
  static std::mutex mu;
  static std::vector<std::unique_ptr<mpz_class>> extra;
  std::lock_guard<std::mutex> lock(mu);
  auto value = std::make_unique<mpz_class>();
  mpz_ui_pow_ui(value->get_mpz_t(), 5, k);
  extra.push_back(std::move(value));
  return *extra.back();
}

Rational5::Rational5(mpz_class numerator, unsigned exponent)
    : num_(std::move(numerator)), exp_(exponent) {
  normalize();
}

void Rational5::normalize() {
  if (sgn(num_) == 0) {
    exp_ = 0;
    return;
  }
  while (exp_ > 0 && mpz_divisible_ui_p(num_.get_mpz_t(), 5)) {
    mpz_divexact_ui(num_.get_mpz_t(), num_.get_mpz_t(), 5);
    --exp_;
  }
}

Rational5 Rational5::parse(std::string_view text) {
  text = trim(text);
  const auto slash = text.find('/');
  mpz_class num;
  if (slash == std::string_view::npos) {
    if (!parse_integer(text, num)) throw InputError("not a Z[1/5] value: '" + std::string(text) + "'");
    return Rational5(num, 0);
  }
  if (!parse_integer(trim(text.substr(0, slash)), num)) {
    throw InputError("bad numerator in '" + std::string(text) + "'");
  }
  std::string_view den = trim(text.substr(slash + 1));
  unsigned exponent = 0;
  if (den.rfind("5^", 0) == 0) {
    mpz_class k;
    if (!parse_integer(den.substr(2), k) || sgn(k) < 0 || k > 100000) {
      throw InputError("bad exponent in '" + std::string(text) + "'");
    }
    exponent = static_cast<unsigned>(k.get_ui());
  } else {
    mpz_class d;
    if (!parse_integer(den, d) || sgn(d) <= 0) {
      throw InputError("bad denominator in '" + std::string(text) + "'");
    }
    while (d > 1 && mpz_divisible_ui_p(d.get_mpz_t(), 5)) {
      d /= 5;
      ++exponent;
    }
    if (d != 1) throw InputError("denominator is not a power of 5 in '" + std::string(text) + "'");
  }
  return Rational5(num, exponent);
}

double Rational5::to_double() const {
  if (exp_ == 0) return num_.get_d();
  // mpq keeps full precision for large exponents.
  mpq_class q(num_, pow5(exp_));
  return q.get_d();
}

std::string Rational5::str() const {
  if (exp_ == 0) return num_.get_str();
  return num_.get_str() + "/5^" + std::to_string(exp_);
}

Rational5 Rational5::operator-() const {
  Rational5 r = *this;
  r.num_ = -r.num_;
  return r;
}

Rational5 operator+(const Rational5& a, const Rational5& b) {
  Rational5 r;
  if (a.exp_ == b.exp_) {
    r.num_ = a.num_ + b.num_;
    r.exp_ = a.exp_;
  } else if (a.exp_ > b.exp_) {
    r.num_ = a.num_ + b.num_ * pow5(a.exp_ - b.exp_);
    r.exp_ = a.exp_;
  } else {
    r.num_ = a.num_ * pow5(b.exp_ - a.exp_) + b.num_;
    r.exp_ = b.exp_;
  }
  r.normalize();
  return r;
}

Rational5 operator-(const Rational5& a, const Rational5& b) { return a + (-b); }

Rational5 operator*(const Rational5& a, const Rational5& b) {
  Rational5 r;
  if (a.is_zero() || b.is_zero()) return r;
  r.num_ = a.num_ * b.num_;
  r.exp_ = a.exp_ + b.exp_;
  // Product of two normalized numerators is not divisible by 5 unless an exponent was 0.
  r.normalize();
  return r;
}

Rational5& Rational5::operator+=(const Rational5& other) { return *this = *this + other; }
Rational5& Rational5::operator*=(const Rational5& other) { return *this = *this * other; }

std::size_t Rational5::hash() const noexcept {
  const mpz_srcptr z = num_.get_mpz_t();
  std::size_t h = static_cast<std::size_t>(z->_mp_size) * 0x9e3779b97f4a7c15ULL;
  if (z->_mp_size != 0) h ^= static_cast<std::size_t>(mpz_getlimbn(z, 0)) + (h << 6) + (h >> 2);
  h ^= static_cast<std::size_t>(exp_) + 0x7f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

}  // namespace warpcone
