#pragma once

// Bounded cochain complexes of sheaves, their cohomology, long exact
// sequences and the standard resolution lemmas.

#include <memory>
#include <string>
#include <vector>

#include "sheafss/sheaf.hpp"

namespace sheafss {

struct Complex;
using ComplexPtr = std::shared_ptr<const Complex>;

/// Objects in degrees lo .. lo + size - 1, zero elsewhere.
struct Complex {
  PosetPtr poset;
  Field field{};
  int lo = 0;
  std::vector<SheafPtr> objects;
  std::vector<SheafMorphism> diffs;  // objects[i] -> objects[i+1]

  /// Throws InvalidComplex when shapes do not chain or d after d is nonzero.
  static ComplexPtr create(PosetPtr poset, Field field, int lo, std::vector<SheafPtr> objects,
                           std::vector<SheafMorphism> diffs);
  static ComplexPtr zero(PosetPtr poset, Field field);
  static ComplexPtr single(const SheafPtr& object, int degree = 0);
  static ComplexPtr from_resolution(const Resolution& res);

  [[nodiscard]] int hi() const { return lo + static_cast<int>(objects.size()) - 1; }
  [[nodiscard]] bool in_range(int q) const { return q >= lo && q <= hi(); }
  [[nodiscard]] SheafPtr obj(int q) const;
  /// d^q: X^q -> X^{q+1}.
  [[nodiscard]] SheafMorphism d(int q) const;
  [[nodiscard]] SheafPtr zero_object() const { return Sheaf::zero(poset, field); }
};

/// Degree-wise morphisms; components outside [lo, hi] of the source are zero.
struct ChainMap {
  ComplexPtr source;
  ComplexPtr target;
  std::vector<SheafMorphism> comps;  // indexed like source->objects

  /// Throws InvalidComplex naming the first non-commuting degree.
  static ChainMap create(ComplexPtr source, ComplexPtr target, std::vector<SheafMorphism> comps);
  [[nodiscard]] SheafMorphism at(int q) const;
};

ChainMap compose(const ChainMap& g, const ChainMap& f);

/// 0 -> A -> B -> C -> 0 with degree-wise exactness. Throws InvalidComplex.
struct SESOfComplexes {
  ComplexPtr a, b, c;
  ChainMap iota, pi;

  static SESOfComplexes create(ChainMap iota, ChainMap pi);
  [[nodiscard]] int lo() const;
  [[nodiscard]] int hi() const;
};

struct CohomologyData {
  SheafPtr z;
  SheafMorphism z_mono;  // Z^q -> X^q
  SheafPtr b;
  SheafMorphism b_mono;  // B^q -> X^q
  SheafMorphism b_to_z;  // B^q -> Z^q
  SheafMorphism d_to_b;  // X^{q-1} -> B^q, epi
  SheafPtr h;
  SheafMorphism h_epi;   // Z^q -> H^q
};

CohomologyData cohomology(const Complex& c, int q);

struct InducedMaps {
  SheafMorphism z, b, h;
};
InducedMaps induced_maps(const ChainMap& f, int q, const CohomologyData& src,
                         const CohomologyData& dst);
InducedMaps induced_maps(const ChainMap& f, int q);

/// Zigzag H^q(C) -> H^{q+1}(A): lift through pi, apply d_B, pull back along
/// iota. Throws ZigzagFailure when a step fails or the result depends on a choice.
SheafMorphism connecting(const SESOfComplexes& s, int q);
/// Same, reusing cohomology data of C in degree q and of A in degree q + 1.
SheafMorphism connecting(const SESOfComplexes& s, int q, const CohomologyData& hc,
                         const CohomologyData& ha);

struct ExactnessReport {
  bool ok = true;
  std::vector<std::string> failures;
  std::size_t nodes_checked = 0;
};
/// Exactness of ... -> H^q(A) -> H^q(B) -> H^q(C) -> H^{q+1}(A) -> ... over
/// degrees lo-1 .. hi+1.
ExactnessReport les_exactness(const SESOfComplexes& s);

struct HorseshoeResult {
  Resolution middle;
  std::vector<SheafMorphism> iota;  // M^q -> N^q
  std::vector<SheafMorphism> pi;    // N^q -> P^q
};
/// Resolution N^q = M^q (+) P^q of the middle of 0 -> A -> B -> C -> 0.
HorseshoeResult horseshoe(const SheafMorphism& iota, const SheafMorphism& pi,
                          const Resolution& res_a, const Resolution& res_c,
                          ChoicePolicy* policy = nullptr);

/// Degree-wise lift M^q -> M'^q of phi: A -> A'. The result has one
/// component per term of res_a.
std::vector<SheafMorphism> comparison_lift(const SheafMorphism& phi, const Resolution& res_a,
                                           const Resolution& res_a2,
                                           ChoicePolicy* policy = nullptr);

}  // namespace sheafss
