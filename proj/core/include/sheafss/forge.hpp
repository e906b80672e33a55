#pragma once

// Seeded generators for posets, sheaves, monotone maps and short exact
// sequences. Outputs depend only on the configuration.

#include <cstdint>
#include <random>

#include "sheafss/homalg.hpp"

namespace sheafss {

struct GenConfig {
  std::uint64_t seed = 0;
  std::size_t max_elements = 6;
  std::size_t max_stalk_dim = 3;
  std::size_t max_degree_span = 3;
  Field field{};

  /// Throws PreconditionFailed when a bound is zero.
  void validate() const;
  /// Configuration for the i-th item of a batch.
  [[nodiscard]] GenConfig derived(std::uint64_t index) const;
};

/// Source of randomness shared by the generators. Only the raw engine output
/// is used, so sequences agree across standard libraries.
class Forge {
 public:
  explicit Forge(GenConfig cfg);

  [[nodiscard]] const GenConfig& config() const { return cfg_; }
  /// Uniform in [0, n), n > 0.
  std::size_t below(std::size_t n);
  /// Uniform in [lo, hi].
  std::int64_t between(std::int64_t lo, std::int64_t hi);
  bool coin(unsigned percent);
  Matrix matrix(std::size_t rows, std::size_t cols);

  /// Random DAG on at most max_elements elements, with at least one cover
  /// when more than one element is allowed.
  PosetPtr poset();
  /// Coinduced sum whose stalks stay within max_stalk_dim.
  SheafPtr coinduced(const PosetPtr& p);
  /// Morphism from any sheaf into a coinduced sheaf.
  SheafMorphism into_coinduced(const SheafPtr& source, const SheafPtr& target);
  /// Kernel of a random morphism between random coinduced sums.
  SheafPtr sheaf(const PosetPtr& p);
  /// Monotone map out of p into a generated or derived target.
  MonotoneMap monotone_map(const PosetPtr& p);
  /// 0 -> A -> B -> C -> 0 with A a random subsheaf of B.
  std::pair<SheafMorphism, SheafMorphism> ses_sheaves(const PosetPtr& p);
  /// A short exact sequence of complexes within the bounds of the
  /// configuration: a sequence in one degree, a horseshoe of truncated
  /// resolutions, or the cone sequence of a complex with nonzero differential.
  SESOfComplexes ses_complexes(const PosetPtr& p);
  /// Two-term complex S -> I with S generated and I coinduced.
  ComplexPtr two_term_complex(const PosetPtr& p, int lo);

 private:
  SESOfComplexes draw_ses_complexes(const PosetPtr& p);

  GenConfig cfg_;
  std::mt19937_64 rng_;
};

PosetPtr gen_poset(const GenConfig& cfg);
SheafPtr gen_sheaf(const GenConfig& cfg, const PosetPtr& p);
std::pair<SheafMorphism, SheafMorphism> gen_ses_sheaves(const GenConfig& cfg, const PosetPtr& p);
SESOfComplexes gen_ses_complexes(const GenConfig& cfg, const PosetPtr& p);

bool stalks_within(const Sheaf& s, std::size_t bound);
/// Every object of the three complexes has stalks of dimension at most
/// max_stalk_dim and at most max_degree_span nonzero-indexed terms.
bool within_bounds(const SESOfComplexes& s, const GenConfig& cfg);

/// 0 -> Y -> Cone(f) -> X[1] -> 0 for a chain map f: X -> Y.
SESOfComplexes cone_sequence(const ChainMap& f);
/// X[k]: degree q holds X^{q+k}, differential (-1)^k d.
ComplexPtr shifted(const ComplexPtr& x, int k);

/// A full instance: poset, sheaf, map and sequence of sheaves on the same poset.
struct GeneratedInstance {
  PosetPtr poset;
  SheafPtr sheaf;
  MonotoneMap map;
  SheafMorphism iota, pi;
};
GeneratedInstance gen_instance(const GenConfig& cfg);

}  // namespace sheafss
