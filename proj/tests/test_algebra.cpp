#include <map>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"

#include "warpcone/errors.hpp"
#include "warpcone/group.hpp"
#include "warpcone/rational5.hpp"
#include "warpcone/rational_matrix.hpp"

using namespace warpcone;

namespace {

RationalMatrix A_z() { return RationalMatrix::parse({{"3/5", "-4/5", "0"}, {"4/5", "3/5", "0"}, {"0", "0", "1"}}); }

std::string key(const RationalMatrix& m) {
  std::string s;
  for (const auto& e : m.entries()) s += e.str() + ",";
  return s;
}

}  // namespace

TEST_CASE("Rational5 normal form") {
  const auto a = Rational5::parse("10/25");
  CHECK(a.numerator() == 2);
  CHECK(a.exponent() == 1);
  const auto z = Rational5::parse("0/125");
  CHECK(z.is_zero());
  CHECK(z.exponent() == 0);
  CHECK(Rational5::parse("25/5") == Rational5(5));
  CHECK(Rational5::parse("-4/5^2") == Rational5::parse("-4/25"));
  CHECK(Rational5::parse("3/5") * Rational5::parse("4/5") == Rational5::parse("12/25"));
  CHECK(Rational5::parse("3/5") + Rational5::parse("2/5") == Rational5(1));
  CHECK((Rational5::parse("1/5") - Rational5::parse("1/5")).is_zero());
  CHECK(Rational5::parse("-7/25").to_double() == doctest::Approx(-0.28));
  CHECK_THROWS_AS(Rational5::parse("1/3"), InputError);
  CHECK_THROWS_AS(Rational5::parse("x"), InputError);
}

TEST_CASE("Rational5 string round trip") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const Rational5 v(mpz_class(static_cast<long>(rng() % 20001) - 10000), static_cast<unsigned>(rng() % 7));
    CHECK(Rational5::parse(v.str()) == v);
    if (!v.is_zero() && v.exponent() > 0) CHECK(mpz_divisible_ui_p(v.numerator().get_mpz_t(), 5) == 0);
  }
}

TEST_CASE("word_eval examples") {
  const auto gens = presets::lps_sphere2();
  CHECK(word_eval(Word{}, gens).is_identity());
  for (std::size_t s = 0; s < gens.size(); ++s) {
    CHECK(word_eval(Word{static_cast<std::uint16_t>(s), static_cast<std::uint16_t>(gens.inverse(s))}, gens).is_identity());
  }
  std::size_t z = gens.size();
  for (std::size_t s = 0; s < gens.size(); ++s) {
    if (gens.matrix(s) == A_z()) z = s;
  }
  REQUIRE(z < gens.size());
  const auto sq = word_eval(Word{static_cast<std::uint16_t>(z), static_cast<std::uint16_t>(z)}, gens);
  CHECK(sq == RationalMatrix::parse({{"-7/25", "-24/25", "0"}, {"24/25", "-7/25", "0"}, {"0", "0", "1"}}));
  const std::vector<std::string> bad{"a", "x"};
  CHECK_THROWS_AS(word_eval(bad, gens), InputError);
}

TEST_CASE("word times its reversed inverse is the identity") {
  const auto gens = presets::lps_sphere2();
  std::mt19937_64 rng(11);
  for (int i = 0; i < 50; ++i) {
    Word w(rng() % 12);
    for (auto& c : w) c = static_cast<std::uint16_t>(rng() % gens.size());
    const auto m = word_eval(w, gens) * word_eval(gens.inverse_word(w), gens);
    CHECK(m.is_identity());
    const auto value = word_eval(w, gens);
    for (const auto& e : value.entries()) {
      if (!e.is_zero() && e.exponent() > 0) CHECK(mpz_divisible_ui_p(e.numerator().get_mpz_t(), 5) == 0);
    }
  }
}

TEST_CASE("special orthogonal check") {
  CHECK(verify_special_orthogonal(RationalMatrix::identity(3)));
  CHECK(verify_special_orthogonal(A_z()));
  CHECK_FALSE(verify_special_orthogonal(RationalMatrix::parse({{"1", "0", "0"}, {"0", "1", "0"}, {"0", "0", "-1"}})));
  CHECK_FALSE(verify_special_orthogonal(RationalMatrix::parse({{"1", "1"}, {"0", "1"}})));
  CHECK(A_z().determinant() == Rational5(1));
}

TEST_CASE("group ball sizes") {
  CHECK(group_ball(presets::lps_sphere2(), 0).size() == 1);
  CHECK(group_ball(presets::lps_sphere2(), 0)[0].matrix.is_identity());
  CHECK(group_ball(presets::lps_sphere2(), 2).size() == 17);
  CHECK(group_ball(presets::cyclic5(), 10).size() == 5);
  long expected = 1;
  for (std::uint32_t r = 0; r <= 6; ++r) {
    CHECK(group_ball(presets::lps_sphere2(), r).size() == static_cast<std::size_t>(2 * expected - 1));
    expected *= 3;
  }
  CHECK(group_ball(presets::trivial(3), 4).size() == 1);
}

TEST_CASE("group ball lengths are minimal and elements distinct") {
  const auto gens = presets::lps_sphere2();
  const std::uint32_t r = 4;
  // Independent oracle: every word of length <= r, evaluated exactly.
  std::map<std::string, std::uint32_t> shortest;
  std::vector<Word> frontier{Word{}};
  for (std::uint32_t len = 0; len <= r; ++len) {
    std::vector<Word> next;
    for (const auto& w : frontier) {
      shortest.emplace(key(word_eval(w, gens)), len);
      if (len < r) {
        for (std::uint16_t s = 0; s < gens.size(); ++s) {
          auto v = w;
          v.push_back(s);
          next.push_back(std::move(v));
        }
      }
    }
    frontier = std::move(next);
  }
  const auto ball = group_ball(gens, r);
  CHECK(ball.size() == shortest.size());
  std::map<std::string, std::size_t> seen;
  for (std::size_t i = 0; i < ball.size(); ++i) {
    const auto& e = ball[i];
    CHECK(seen.emplace(key(e.matrix), i).second);
    CHECK(word_eval(e.witness, gens) == e.matrix);
    CHECK(e.witness.size() == e.length);
    CHECK(shortest.at(key(e.matrix)) == e.length);
    CHECK(ball.find(e.matrix) == i);
  }
}

TEST_CASE("group balls are nested") {
  const auto gens = presets::lps_sphere2();
  const auto small = group_ball(gens, 3);
  const auto big = group_ball(gens, 4);
  for (const auto& e : small.elements()) {
    const auto j = big.find(e.matrix);
    REQUIRE(j.has_value());
    CHECK(big[*j].length == e.length);
  }
  auto grown = group_ball(gens, 3);
  grown.extend(gens);
  CHECK(grown.size() == big.size());
  for (std::size_t i = 0; i < big.size(); ++i) CHECK(grown[i].matrix == big[i].matrix);
}

TEST_CASE("group ball cap") {
  try {
    group_ball(presets::lps_sphere2(), 8, 1000);
    FAIL("expected a resource error");
  } catch (const ResourceError& e) {
    CHECK(e.partial_count() > 0);
    CHECK(e.partial_count() <= 1000);
  }
}

TEST_CASE("finite order relator") {
  const auto ball = group_ball(presets::cyclic5(), 5);
  REQUIRE(ball.shortest_relator().has_value());
  CHECK(ball.shortest_relator()->size() == 5);
  CHECK(word_eval(*ball.shortest_relator(), presets::cyclic5()).is_identity());
  CHECK_FALSE(group_ball(presets::lps_sphere2(), 6).shortest_relator().has_value());
}

TEST_CASE("generator set diagnostics") {
  const auto m = A_z();
  std::vector<GeneratorSpec> asym{{"a", m, "A"}, {"A", m, "a"}};
  auto issues = GeneratorSet::diagnose(3, asym);
  bool found = false;
  for (const auto& i : issues) found |= i.find("not closed under inverse") != std::string::npos;
  CHECK(found);
  std::vector<GeneratorSpec> missing{{"a", m, "A"}};
  CHECK_FALSE(GeneratorSet::diagnose(3, missing).empty());
  std::vector<GeneratorSpec> ident{{"e", RationalMatrix::identity(3), "e"}};
  CHECK_FALSE(GeneratorSet::diagnose(3, ident).empty());
  CHECK_THROWS_AS(GeneratorSet(3, asym), InputError);
  CHECK(GeneratorSet::diagnose(3, presets::lps_sphere2().specs()).empty());
  CHECK_THROWS_AS(presets::by_name("nope"), InputError);
  CHECK(presets::by_name("trivial:4").dim() == 4);
}

TEST_CASE("words parse and spell") {
  const auto gens = presets::lps_sphere2();
  const std::vector<std::string> labels{"a", "B", "A"};
  const auto w = gens.parse_word(labels);
  CHECK(gens.spell(w) == labels);
  CHECK(gens.freely_reduce(gens.parse_word(std::vector<std::string>{"a", "A", "b"})).size() == 1);
}
