#pragma once

// Sheaves of finite-dimensional vector spaces on a finite poset, i.e. functors
// from (P, <=) to vector spaces. Vector spaces themselves are sheaves on the
// one-point poset, so a single category implementation serves both.

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "sheafss/exactla.hpp"
#include "sheafss/poset.hpp"

namespace sheafss {

/// [x]_V with dim V = multiplicity: stalk V at every y <= x, zero elsewhere,
/// identity restrictions.
struct CoinducedSummand {
  std::size_t point = 0;
  std::size_t multiplicity = 1;
  friend bool operator==(const CoinducedSummand&, const CoinducedSummand&) = default;
};

class Sheaf;
using SheafPtr = std::shared_ptr<const Sheaf>;

class Sheaf {
 public:
  /// Restrictions are given on covers; a missing cover map is the zero map.
  /// Throws InvalidSheaf if two cover chains between the same pair disagree.
  static SheafPtr create(PosetPtr poset, Field field, std::vector<std::size_t> dims,
                         const std::map<std::pair<std::size_t, std::size_t>, Matrix>& cover_maps);
  static SheafPtr zero(PosetPtr poset, Field field = {});
  static SheafPtr constant(PosetPtr poset, Field field, std::size_t dim);
  /// Direct sum of coinduced sheaves in the given order.
  static SheafPtr coinduced(PosetPtr poset, Field field, std::vector<CoinducedSummand> summands);
  /// A vector space as a sheaf on the one-point poset.
  static SheafPtr vector_space(std::size_t dim, Field field = {});

  [[nodiscard]] const PosetPtr& poset() const { return poset_; }
  [[nodiscard]] Field field() const { return field_; }
  [[nodiscard]] std::size_t dim(std::size_t x) const { return dims_.at(x); }
  [[nodiscard]] const std::vector<std::size_t>& dims() const { return dims_; }
  [[nodiscard]] std::size_t total_dim() const;
  [[nodiscard]] bool is_zero() const { return total_dim() == 0; }

  /// rho_{x <= y}: F_x -> F_y. Requires x <= y.
  [[nodiscard]] const Matrix& rho(std::size_t x, std::size_t y) const;

  [[nodiscard]] bool is_coinduced() const { return coinduced_.has_value(); }
  /// Throws NotCoinduced.
  [[nodiscard]] const std::vector<CoinducedSummand>& summands() const;
  /// Offset of summand i inside the stalk at y, for y <= point of summand i.
  [[nodiscard]] std::size_t summand_offset(std::size_t i, std::size_t y) const;

 private:
  Sheaf() = default;
  void build_rho(const std::map<std::pair<std::size_t, std::size_t>, Matrix>& cover_maps);

  PosetPtr poset_;
  Field field_{};
  std::vector<std::size_t> dims_;
  std::vector<Matrix> rho_;  // n*n table, filled for x <= y
  std::optional<std::vector<CoinducedSummand>> coinduced_;
};

/// Structural equality: same poset object, dims and restrictions.
bool same_sheaf(const Sheaf& a, const Sheaf& b);

struct SheafMorphism {
  SheafPtr source;
  SheafPtr target;
  std::vector<Matrix> comps;  // comps[x]: F_x -> G_x

  /// Throws IllFormedMorphism on shape errors or a non-commuting cover square.
  static SheafMorphism create(SheafPtr source, SheafPtr target, std::vector<Matrix> comps);
  static SheafMorphism zero(SheafPtr source, SheafPtr target);
  static SheafMorphism identity(SheafPtr f);

  [[nodiscard]] const Matrix& at(std::size_t x) const { return comps.at(x); }
  [[nodiscard]] bool is_zero() const;
};

/// First cover (x, y) whose square fails to commute, if any.
std::optional<std::pair<std::size_t, std::size_t>> noncommuting_cover(const SheafMorphism& f);

SheafMorphism compose(const SheafMorphism& g, const SheafMorphism& f);  // g after f
SheafMorphism operator+(const SheafMorphism& a, const SheafMorphism& b);
SheafMorphism operator-(const SheafMorphism& a, const SheafMorphism& b);
SheafMorphism operator-(const SheafMorphism& a);
SheafMorphism scaled(const SheafMorphism& a, const Scalar& s);
bool equal(const SheafMorphism& a, const SheafMorphism& b);

bool is_mono(const SheafMorphism& f);
bool is_epi(const SheafMorphism& f);
bool is_iso(const SheafMorphism& f);
/// g after f is zero and image(f) = kernel(g) at every stalk.
bool is_exact(const SheafMorphism& f, const SheafMorphism& g);

struct SubobjectData {
  SheafPtr object;
  SheafMorphism mono;
};
struct QuotientData {
  SheafPtr object;
  SheafMorphism epi;
};
struct ImageData {
  SheafPtr object;
  SheafMorphism mono;  // image -> target
  SheafMorphism epi;   // source -> image
};

SubobjectData kernel(const SheafMorphism& f);
QuotientData cokernel(const SheafMorphism& f);
ImageData image(const SheafMorphism& f);

/// Ordered direct sum with its structure maps.
struct DirectSum {
  SheafPtr object;
  std::vector<SheafPtr> parts;

  [[nodiscard]] std::size_t offset(std::size_t part, std::size_t x) const;
  [[nodiscard]] SheafMorphism inclusion(std::size_t part) const;
  [[nodiscard]] SheafMorphism projection(std::size_t part) const;
};
/// Sum of coinduced sheaves is again tagged coinduced, summands concatenated.
DirectSum direct_sum(std::vector<SheafPtr> parts);
/// X -> (+) parts from one map per part.
SheafMorphism into_sum(const DirectSum& sum, const std::vector<SheafMorphism>& maps);
/// (+) parts -> Y from one map per part.
SheafMorphism out_of_sum(const DirectSum& sum, const std::vector<SheafMorphism>& maps);

/// Solves m after h == f for h, with m a mono. Throws ExtensionFailure if f
/// does not factor.
SheafMorphism factor_through_mono(const SheafMorphism& m, const SheafMorphism& f);
/// Solves h after e == f for h, with e an epi. Throws ExtensionFailure if f
/// does not vanish on the kernel of e.
SheafMorphism factor_through_epi(const SheafMorphism& e, const SheafMorphism& f);

/// Sections over an open set, as columns inside (+)_{x in U} F_x.
struct Sections {
  ElementSet elements;
  std::vector<std::size_t> offsets;  // offset of F_x for each listed x
  Matrix basis;
  [[nodiscard]] std::size_t dim() const { return basis.cols(); }
};

/// For coinduced sheaves the basis is the summand order: one vector per
/// coordinate of each summand whose point lies in U. Throws NotOpen.
Sections sections(const Sheaf& f, const ElementSet& open);
/// Matrix of the induced map on sections over U, in section bases.
Matrix section_map(const SheafMorphism& f, const ElementSet& open, const Sections& src,
                   const Sections& dst);
Matrix section_map(const SheafMorphism& f, const ElementSet& open);
/// Coordinates of vectors of (+)_{x in U} F_x in the given section basis.
Matrix section_coords(const Sections& s, const Matrix& vectors);

/// Global sections as a vector space on the point.
SheafPtr gamma(const Sheaf& f);
SheafMorphism gamma(const SheafMorphism& f);

SheafPtr pushforward(const MonotoneMap& f, const SheafPtr& sheaf);
SheafMorphism pushforward(const MonotoneMap& f, const SheafMorphism& phi);

/// Sources of choice for the non-canonical steps. Without a policy every
/// choice is the canonical one; with perturb set, complements in extensions
/// get random values and embeddings get random extra summands.
struct ChoicePolicy {
  std::mt19937_64 rng;
  bool perturb = false;
  bool extra_summands = true;
  explicit ChoicePolicy(std::uint64_t seed = 0, bool perturb_choices = false)
      : rng(seed), perturb(perturb_choices) {}
};

/// F -> (+)_{x : F_x != 0} [x]_{F_x}; component at y into [x] is rho_{y<=x}.
SubobjectData injective_embed(const SheafPtr& f, ChoicePolicy* policy = nullptr);

/// Hom(F, [x]_V) = Hom(F_x, V): the morphism with the given maps F_{x_i} -> V_i
/// at the summand points of the coinduced target.
SheafMorphism morphism_to_coinduced(const SheafPtr& source, const SheafPtr& target,
                                    const std::vector<Matrix>& at_points);

/// g: B -> I with g after m == f, for m: A -> B mono and I coinduced.
/// Throws NotMono, NotCoinduced.
SheafMorphism extend_along_mono(const SheafMorphism& m, const SheafMorphism& f,
                                ChoicePolicy* policy = nullptr);

struct Resolution {
  SheafPtr object;
  SheafMorphism augmentation;  // object -> terms[0]
  std::vector<SheafPtr> terms;
  std::vector<SheafMorphism> differentials;  // terms[q] -> terms[q+1]

  [[nodiscard]] std::size_t length() const { return terms.size(); }
  [[nodiscard]] SheafPtr term(std::size_t q) const;
  [[nodiscard]] SheafMorphism differential(std::size_t q) const;
};

/// Canonical injective resolution. Stops as soon as a cokernel vanishes;
/// throws TruncationInsufficient if that does not happen within max_len terms.
Resolution injective_resolution(const SheafPtr& f, std::size_t max_len,
                                ChoicePolicy* policy = nullptr);
std::size_t default_resolution_length(const Poset& p);

/// dim H^q(P, F) for q = 0 .. longest_chain_length + 1; the last entry is always zero.
std::vector<std::size_t> cohomology_dims(const SheafPtr& f);

SheafPtr restrict_to_open(const SheafPtr& f, const ElementSet& open);

struct AcyclicityReport {
  bool acyclic = true;
  bool exhaustive = true;
  std::size_t opens_checked = 0;
  ElementSet failing_open;
  std::size_t failing_degree = 0;
  std::size_t failing_dim = 0;
};
/// Checks H^q(U, F|_U) = 0 for q >= 1 on every open U (or on all unions of
/// pairs of minimal opens when there are too many opens to enumerate).
AcyclicityReport check_acyclic_on_all_opens(const SheafPtr& f);
inline bool is_acyclic_on_all_opens(const SheafPtr& f) {
  return check_acyclic_on_all_opens(f).acyclic;
}

/// Basis of Hom(F, G).
std::vector<SheafMorphism> hom_space(const SheafPtr& f, const SheafPtr& g);

}  // namespace sheafss
