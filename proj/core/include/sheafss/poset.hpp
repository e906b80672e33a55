#pragma once

// Finite posets viewed as finite topological spaces. Opens are up-sets, so the
// minimal open neighbourhood of x is U_x = {y : y >= x}.

#include <cstddef>
#include <memory>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sheafss/errors.hpp"

namespace sheafss {

class Poset;
using PosetPtr = std::shared_ptr<const Poset>;
/// A set of elements as sorted, duplicate-free positions.
using ElementSet = std::vector<std::size_t>;

class Poset {
 public:
  /// Builds from explicit cover pairs (x, y) meaning x is covered by y.
  /// Rejects cycles, duplicate names and covers that are not in the
  /// transitive reduction.
  static PosetPtr from_covers(std::vector<std::string> elements,
                              const std::vector<std::pair<std::string, std::string>>& covers);
  /// Builds from arbitrary order relations x <= y; covers are derived.
  static PosetPtr from_relations(std::vector<std::string> elements,
                                 const std::vector<std::pair<std::size_t, std::size_t>>& relations);
  static PosetPtr point();
  /// Chain 0 < 1 < ... < n-1 with names "0", "1", ...
  static PosetPtr chain(std::size_t n);

  [[nodiscard]] std::size_t size() const { return names_.size(); }
  [[nodiscard]] const std::string& name(std::size_t i) const { return names_.at(i); }
  [[nodiscard]] const std::vector<std::string>& names() const { return names_; }
  /// Throws UnknownElement.
  [[nodiscard]] std::size_t index(const std::string& name) const;
  [[nodiscard]] bool contains(const std::string& name) const { return index_.count(name) > 0; }

  [[nodiscard]] bool leq(std::size_t x, std::size_t y) const { return leq_[x * size() + y]; }
  [[nodiscard]] bool less(std::size_t x, std::size_t y) const { return x != y && leq(x, y); }
  [[nodiscard]] const std::vector<std::pair<std::size_t, std::size_t>>& covers() const {
    return covers_;
  }
  [[nodiscard]] const std::vector<std::size_t>& upper_covers(std::size_t x) const { return up_[x]; }
  [[nodiscard]] const std::vector<std::size_t>& lower_covers(std::size_t x) const {
    return down_[x];
  }
  /// Every element appears after all elements below it.
  [[nodiscard]] const std::vector<std::size_t>& linear_extension() const { return linear_; }

  [[nodiscard]] ElementSet up_set(std::size_t x) const;
  [[nodiscard]] ElementSet down_set(std::size_t x) const;
  [[nodiscard]] ElementSet all() const;
  [[nodiscard]] bool is_open(const ElementSet& s) const;
  /// Edge count of a longest chain.
  [[nodiscard]] std::size_t longest_chain_length() const { return height_; }
  /// Induced subposet on the given elements, names preserved.
  [[nodiscard]] PosetPtr induced(const ElementSet& s) const;

  [[nodiscard]] std::string describe(const ElementSet& s) const;

 private:
  Poset() = default;
  static PosetPtr build(std::vector<std::string> elements, std::vector<bool> leq);

  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<bool> leq_;
  std::vector<std::pair<std::size_t, std::size_t>> covers_;
  std::vector<std::vector<std::size_t>> up_;
  std::vector<std::vector<std::size_t>> down_;
  std::vector<std::size_t> linear_;
  std::size_t height_ = 0;
};

/// Product order; element (x, y) is named "(x,y)" and sits at x * |q| + y.
PosetPtr product(const Poset& p, const Poset& q);

/// Every up-set of p, in a deterministic order, or an empty vector if there
/// are more than `limit` of them.
std::vector<ElementSet> all_open_sets(const Poset& p, std::size_t limit = 1u << 14);

struct MonotoneMap {
  PosetPtr source;
  PosetPtr target;
  std::vector<std::size_t> values;

  /// Throws NotMonotone naming the first violating pair.
  static MonotoneMap create(PosetPtr source, PosetPtr target, std::vector<std::size_t> values);
  static MonotoneMap identity(PosetPtr p);
  static MonotoneMap to_point(PosetPtr p);
  /// Projection of product(p, q) onto its first (which = 0) or second factor.
  static MonotoneMap projection(PosetPtr product_poset, PosetPtr p, PosetPtr q, int which);

  [[nodiscard]] std::size_t operator()(std::size_t x) const { return values[x]; }
};

/// Pairs (x, y) with x <= y but f(x) not <= f(y).
std::vector<std::pair<std::size_t, std::size_t>> monotonicity_violations(
    const Poset& source, const Poset& target, const std::vector<std::size_t>& values);

ElementSet preimage(const MonotoneMap& f, const ElementSet& s);

}  // namespace sheafss
