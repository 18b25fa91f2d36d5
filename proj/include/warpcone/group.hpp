#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "warpcone/rational_matrix.hpp"

namespace warpcone {

// Sequence of generator indices, evaluated left to right.
using Word = std::vector<std::uint16_t>;

struct GeneratorSpec {
  std::string label;
  RationalMatrix matrix;
  std::string inverse_label;
};

// Finite symmetric generating set with an explicit involution s -> s^-1.
// An empty set describes the trivial group acting on R^dim.
class GeneratorSet {
 public:
  GeneratorSet() = default;
  GeneratorSet(std::size_t dim, const std::vector<GeneratorSpec>& specs);

  // Human-readable problems with a candidate set; empty when the set is valid.
  static std::vector<std::string> diagnose(std::size_t dim, const std::vector<GeneratorSpec>& specs);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return labels_.size(); }
  bool empty() const noexcept { return labels_.empty(); }

  const std::string& label(std::size_t i) const { return labels_[i]; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const RationalMatrix& matrix(std::size_t i) const { return matrices_[i]; }
  std::span<const double> numeric(std::size_t i) const {
    return {numeric_.data() + i * dim_ * dim_, dim_ * dim_};
  }
  std::size_t inverse(std::size_t i) const { return inverse_[i]; }
  std::size_t index_of(const std::string& label) const;  // throws InputError

  Word parse_word(std::span<const std::string> labels) const;
  std::vector<std::string> spell(const Word& word) const;
  Word inverse_word(const Word& word) const;
  Word freely_reduce(Word word) const;

  std::vector<GeneratorSpec> specs() const;

 private:
  std::size_t dim_ = 0;
  std::vector<std::string> labels_;
  std::vector<RationalMatrix> matrices_;
  std::vector<std::size_t> inverse_;
  std::vector<double> numeric_;
};

// Shipped generator library.
namespace presets {
// Rotations by arccos(3/5) about the x- and z-axes of R^3, with inverses (labels a, A, b, B).
GeneratorSet lps_sphere2();
// Rotation of R^2 by arccos(3/5), an irrational multiple of pi (labels r, R).
GeneratorSet rational_rotation_s1();
// Rotation of R^2 by pi/2 (labels q, Q).
GeneratorSet quarter_turn_s1();
// Cyclic coordinate shift of R^5, an order-5 element of SO(5) (labels c, C).
GeneratorSet cyclic5();
GeneratorSet trivial(std::size_t dim);
// "lps", "s1-rational", "s1-quarter", "cyclic5", "trivial:<dim>".
GeneratorSet by_name(const std::string& name);
}  // namespace presets

// Exact product of the word's matrices, left to right; the empty word is the identity.
RationalMatrix word_eval(const Word& word, const GeneratorSet& gens);
RationalMatrix word_eval(std::span<const std::string> labels, const GeneratorSet& gens);

struct BallElement {
  RationalMatrix matrix;
  std::uint32_t length = 0;
  Word witness;
};

inline constexpr std::size_t kDefaultBallCap = 2'000'000;

// Word-metric ball B_Gamma(r) with exact deduplication, in BFS order:
// layer k occupies [layer_begin(k), layer_end(k)).
class GroupBall {
 public:
  GroupBall() = default;
  explicit GroupBall(const GeneratorSet& gens);  // radius 0

  std::uint32_t radius() const noexcept { return radius_; }
  std::size_t size() const noexcept { return elements_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  const BallElement& operator[](std::size_t i) const { return elements_[i]; }
  const std::vector<BallElement>& elements() const noexcept { return elements_; }
  std::span<const double> numeric(std::size_t i) const {
    return {numeric_.data() + i * dim_ * dim_, dim_ * dim_};
  }
  std::size_t layer_begin(std::uint32_t k) const { return layer_begin_.at(k); }
  std::size_t layer_end(std::uint32_t k) const {
    return k + 1 < layer_begin_.size() ? layer_begin_[k + 1] : elements_.size();
  }

  std::optional<std::size_t> find(const RationalMatrix& m) const;

  // Shortest nontrivial freely reduced word seen to evaluate to the identity (a relation).
  const std::optional<Word>& shortest_relator() const noexcept { return relator_; }

  // Adds layer radius()+1; throws ResourceError (partial count = current size) past cap.
  void extend(const GeneratorSet& gens, std::size_t cap = kDefaultBallCap);

 private:
  std::size_t dim_ = 0;
  std::uint32_t radius_ = 0;
  std::vector<BallElement> elements_;
  std::vector<double> numeric_;
  std::vector<std::size_t> layer_begin_;
  std::unordered_multimap<std::size_t, std::size_t> index_;
  std::optional<Word> relator_;
};

GroupBall group_ball(const GeneratorSet& gens, std::uint32_t r, std::size_t cap = kDefaultBallCap);

}  // namespace warpcone
