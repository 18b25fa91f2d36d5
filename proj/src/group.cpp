#include "warpcone/group.hpp"

#include <algorithm>
#include <set>
#include <utility>

#include "warpcone/errors.hpp"

namespace warpcone {

std::vector<std::string> GeneratorSet::diagnose(std::size_t dim,
                                                const std::vector<GeneratorSpec>& specs) {
  std::vector<std::string> issues;
  if (dim == 0) issues.emplace_back("dimension must be positive");
  std::unordered_map<std::string, std::size_t> by_label;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (specs[i].label.empty()) issues.emplace_back("generator " + std::to_string(i) + " has an empty label");
    if (!by_label.emplace(specs[i].label, i).second) {
      issues.push_back("duplicate label '" + specs[i].label + "'");
    }
    if (specs[i].matrix.dim() != dim) {
      issues.push_back("generator '" + specs[i].label + "' has dimension " +
                       std::to_string(specs[i].matrix.dim()) + ", expected " + std::to_string(dim));
    }
  }
  if (!issues.empty()) return issues;

  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& s = specs[i];
    if (s.matrix.is_identity()) issues.push_back("generator '" + s.label + "' is the identity");
    for (std::size_t j = 0; j < i; ++j) {
      if (specs[j].matrix == s.matrix) {
        issues.push_back("generators '" + specs[j].label + "' and '" + s.label + "' are the same matrix");
      }
    }
    auto it = by_label.find(s.inverse_label);
    if (it == by_label.end()) {
      issues.push_back("not closed under inverse: '" + s.label + "' declares missing inverse '" +
                       s.inverse_label + "'");
      continue;
    }
    const auto& inv = specs[it->second];
    if (inv.inverse_label != s.label) {
      issues.push_back("inverse map is not an involution at '" + s.label + "'");
    }
    if (!(s.matrix * inv.matrix).is_identity()) {
      issues.push_back("not closed under inverse: '" + s.label + "' * '" + inv.label + "' is not the identity");
    }
  }
  return issues;
}

GeneratorSet::GeneratorSet(std::size_t dim, const std::vector<GeneratorSpec>& specs) : dim_(dim) {
  auto issues = diagnose(dim, specs);
  if (!issues.empty()) {
    std::string msg = "invalid generator set:";
    for (const auto& issue : issues) msg += " " + issue + ";";
    throw InputError(msg);
  }
  if (specs.size() > 65535) throw InputError("too many generators");
  for (const auto& s : specs) {
    labels_.push_back(s.label);
    matrices_.push_back(s.matrix);
    auto values = s.matrix.to_double();
    numeric_.insert(numeric_.end(), values.begin(), values.end());
  }
  inverse_.resize(specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i) inverse_[i] = index_of(specs[i].inverse_label);
}

std::size_t GeneratorSet::index_of(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw InputError("unknown generator label '" + label + "'");
  return static_cast<std::size_t>(it - labels_.begin());
}

Word GeneratorSet::parse_word(std::span<const std::string> labels) const {
  Word w;
  w.reserve(labels.size());
  for (const auto& l : labels) w.push_back(static_cast<std::uint16_t>(index_of(l)));
  return w;
}

std::vector<std::string> GeneratorSet::spell(const Word& word) const {
  std::vector<std::string> out;
  out.reserve(word.size());
  for (auto g : word) out.push_back(labels_.at(g));
  return out;
}

Word GeneratorSet::inverse_word(const Word& word) const {
  Word inv(word.rbegin(), word.rend());
  for (auto& g : inv) g = static_cast<std::uint16_t>(inverse_[g]);
  return inv;
}

Word GeneratorSet::freely_reduce(Word word) const {
  Word out;
  out.reserve(word.size());
  for (auto g : word) {
    if (!out.empty() && inverse_[out.back()] == g) {
      out.pop_back();
    } else {
      out.push_back(g);
    }
  }
  return out;
}

std::vector<GeneratorSpec> GeneratorSet::specs() const {
  std::vector<GeneratorSpec> out;
  for (std::size_t i = 0; i < size(); ++i) out.push_back({labels_[i], matrices_[i], labels_[inverse_[i]]});
  return out;
}

namespace presets {

namespace {

RationalMatrix mat(const std::vector<std::vector<std::string>>& rows) { return RationalMatrix::parse(rows); }

}  // namespace

GeneratorSet lps_sphere2() {
  auto a = mat({{"1", "0", "0"}, {"0", "3/5", "-4/5"}, {"0", "4/5", "3/5"}});
  auto b = mat({{"3/5", "-4/5", "0"}, {"4/5", "3/5", "0"}, {"0", "0", "1"}});
  return GeneratorSet(3, {{"a", a, "A"}, {"A", a.transpose(), "a"}, {"b", b, "B"}, {"B", b.transpose(), "b"}});
}

GeneratorSet rational_rotation_s1() {
  auto r = mat({{"3/5", "-4/5"}, {"4/5", "3/5"}});
  return GeneratorSet(2, {{"r", r, "R"}, {"R", r.transpose(), "r"}});
}

GeneratorSet quarter_turn_s1() {
  auto q = mat({{"0", "-1"}, {"1", "0"}});
  return GeneratorSet(2, {{"q", q, "Q"}, {"Q", q.transpose(), "q"}});
}

GeneratorSet cyclic5() {
  RationalMatrix c(5);
  for (std::size_t i = 0; i < 5; ++i) c((i + 1) % 5, i) = Rational5(1);
  return GeneratorSet(5, {{"c", c, "C"}, {"C", c.transpose(), "c"}});
}

GeneratorSet trivial(std::size_t dim) { return GeneratorSet(dim, {}); }

GeneratorSet by_name(const std::string& name) {
  if (name == "lps") return lps_sphere2();
  if (name == "s1-rational") return rational_rotation_s1();
  if (name == "s1-quarter") return quarter_turn_s1();
  if (name == "cyclic5") return cyclic5();
  if (name.rfind("trivial:", 0) == 0) {
    try {
      return trivial(static_cast<std::size_t>(std::stoul(name.substr(8))));
    } catch (const std::logic_error&) {
      throw InputError("bad trivial preset '" + name + "'");
    }
  }
  throw InputError("unknown generator preset '" + name + "'");
}

}  // namespace presets

RationalMatrix word_eval(const Word& word, const GeneratorSet& gens) {
  RationalMatrix m = RationalMatrix::identity(gens.dim());
  for (auto g : word) {
    if (g >= gens.size()) throw InputError("generator index out of range");
    m = m * gens.matrix(g);
  }
  return m;
}

RationalMatrix word_eval(std::span<const std::string> labels, const GeneratorSet& gens) {
  return word_eval(gens.parse_word(labels), gens);
}

GroupBall::GroupBall(const GeneratorSet& gens) : dim_(gens.dim()) {
  BallElement e{RationalMatrix::identity(dim_), 0, {}};
  auto values = e.matrix.to_double();
  numeric_.insert(numeric_.end(), values.begin(), values.end());
  index_.emplace(e.matrix.hash(), 0);
  elements_.push_back(std::move(e));
  layer_begin_.push_back(0);
}

std::optional<std::size_t> GroupBall::find(const RationalMatrix& m) const {
  auto [lo, hi] = index_.equal_range(m.hash());
  for (auto it = lo; it != hi; ++it) {
    if (elements_[it->second].matrix == m) return it->second;
  }
  return std::nullopt;
}

void GroupBall::extend(const GeneratorSet& gens, std::size_t cap) {
  if (gens.dim() != dim_) throw InputError("generator set does not match ball dimension");
  const std::size_t begin = layer_begin(radius_);
  const std::size_t end = elements_.size();
  layer_begin_.push_back(end);
  const std::uint32_t next = radius_ + 1;
  for (std::size_t g = begin; g < end; ++g) {
    for (std::size_t s = 0; s < gens.size(); ++s) {
      // Undoing the last letter walks back along the BFS tree.
      if (!elements_[g].witness.empty() && gens.inverse(elements_[g].witness.back()) == s) continue;
      RationalMatrix h = elements_[g].matrix * gens.matrix(s);
      if (auto found = find(h)) {
        Word cycle = elements_[g].witness;
        cycle.push_back(static_cast<std::uint16_t>(s));
        const Word back = gens.inverse_word(elements_[*found].witness);
        cycle.insert(cycle.end(), back.begin(), back.end());
        Word reduced = gens.freely_reduce(std::move(cycle));
        if (!reduced.empty() && (!relator_ || reduced.size() < relator_->size())) relator_ = std::move(reduced);
        continue;
      }
      if (elements_.size() >= cap) {
        const std::size_t partial = elements_.size();
        for (std::size_t i = end; i < elements_.size(); ++i) {
          auto [lo, hi] = index_.equal_range(elements_[i].matrix.hash());
          for (auto it = lo; it != hi; ++it) {
            if (it->second == i) {
              index_.erase(it);
              break;
            }
          }
        }
        elements_.resize(end);
        numeric_.resize(end * dim_ * dim_);
        layer_begin_.pop_back();
        throw ResourceError("group ball exceeds cap of " + std::to_string(cap) + " elements at radius " +
                                std::to_string(next),
                            partial);
      }
      Word w = elements_[g].witness;
      w.push_back(static_cast<std::uint16_t>(s));
      auto values = h.to_double();
      numeric_.insert(numeric_.end(), values.begin(), values.end());
      index_.emplace(h.hash(), elements_.size());
      elements_.push_back({std::move(h), next, std::move(w)});
    }
  }
  radius_ = next;
}

GroupBall group_ball(const GeneratorSet& gens, std::uint32_t r, std::size_t cap) {
  GroupBall ball(gens);
  while (ball.radius() < r) ball.extend(gens, cap);
  return ball;
}

}  // namespace warpcone
