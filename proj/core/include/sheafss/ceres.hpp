#pragma once

// Compatible injective resolutions of a short exact sequence of complexes,
// built from the kernels W (of the maps on cohomology) and X (of cocycles
// mapping to such kernels), then iterated into three Cartan-Eilenberg
// resolutions with exact rows.

#include <array>
#include <compare>
#include <map>
#include <string>
#include <vector>

#include "sheafss/homalg.hpp"

namespace sheafss {

/// Index into per-complex arrays.
enum Slot { kA = 0, kB = 1, kC = 2 };

/// A short exact sequence of objects given by its two maps.
struct WitnessedSES {
  std::string label;
  SheafMorphism f;  // mono
  SheafMorphism g;  // epi
};

/// Names of the nineteen derived short exact sequences, in construction order.
const std::vector<std::string>& invariant_sequence_labels();

struct DegreeInvariants {
  std::array<CohomologyData, 3> coh;
  std::array<SheafPtr, 3> w;            // W^q
  std::array<SheafMorphism, 3> w_mono;  // W^q -> H^q
  std::array<SheafPtr, 3> x;            // X^q
  std::array<SheafMorphism, 3> x_mono;  // X^q -> Z^q
  SheafMorphism h_iota, h_pi;           // on H^q
  SheafMorphism conn;                   // H^q(C) -> H^{q+1}(A)
  SheafMorphism z_iota, z_pi, b_pi;
  std::array<SheafMorphism, 3> b_to_x;  // B^q -> X^q
  std::array<SheafMorphism, 3> x_to_w;  // X^q -> W^q
  SheafMorphism ha_to_wb, hb_to_wc, hc_to_wa_next;
  SheafMorphism xa_to_bb, zb_to_xc, za_to_xb, xb_to_bc;
  std::vector<WitnessedSES> sequences;  // nineteen, see invariant_sequence_labels
};

struct SESInvariants {
  SESOfComplexes ses;
  int lo = 0;
  int hi = -1;
  std::vector<DegreeInvariants> degrees;  // q = lo .. hi + 1
  /// label -> every degree exact
  std::map<std::string, bool> label_ok;

  [[nodiscard]] const DegreeInvariants& at(int q) const {
    return degrees.at(static_cast<std::size_t>(q - lo));
  }
  [[nodiscard]] bool all_exact() const;
};

/// Throws InternalExactnessFailure naming the first failing sequence when
/// strict; otherwise records failures in label_ok.
SESInvariants compute_invariants(const SESOfComplexes& s, bool strict = true);

/// The five families of chosen injectives, one per degree.
enum class Family { WI, WJ, WK, BI, BK };
std::string family_name(Family f);

struct Atom {
  Family family;
  int degree;
  auto operator<=>(const Atom&) const = default;
};

/// Position of an atom inside a resolution object: boundary atoms span B,
/// boundary and cohomology atoms span Z, the rest maps isomorphically onto
/// the next boundaries.
enum class Role { Boundary, Cohomology, Cochain };

struct TaggedObject {
  std::vector<Atom> atoms;
  std::vector<Role> roles;
  DirectSum sum;
  [[nodiscard]] const SheafPtr& object() const { return sum.object; }
  [[nodiscard]] std::ptrdiff_t find(const Atom& a) const;
};

struct TagRange {
  std::size_t first_summand = 0;
  std::size_t count = 0;
  Role role = Role::Cochain;
};

struct InjectiveTriple {
  int lo = 0;
  int hi = -1;
  std::map<Atom, SubobjectData> atoms;           // chosen embedding per atom
  std::array<std::vector<TaggedObject>, 3> objs;  // I, J, K by degree
  std::array<ComplexPtr, 3> complexes;
  std::array<ChainMap, 3> augmentation;  // A -> I, B -> J, C -> K
  ChainMap row_ij, row_jk;
};

InjectiveTriple build_injective_triple(const SESInvariants& inv, ChoicePolicy* policy = nullptr);

/// Double complex with augmentation: columns[p] is the complex I^{p,*},
/// horizontal[p]: columns[p] -> columns[p+1].
struct CEResolution {
  ComplexPtr input;
  int lo = 0;
  int hi = -1;
  std::vector<ComplexPtr> columns;
  std::vector<ChainMap> horizontal;
  ChainMap augmentation;
  /// tags[p][q - lo]: summand ranges of the coinduced object I^{p,q}.
  std::vector<std::vector<std::vector<TagRange>>> tags;

  [[nodiscard]] std::size_t width() const { return columns.size(); }
  [[nodiscard]] SheafPtr entry(std::size_t p, int q) const { return columns[p]->obj(q); }
  [[nodiscard]] SheafMorphism dh(std::size_t p, int q) const;
  [[nodiscard]] SheafMorphism dv(std::size_t p, int q) const { return columns[p]->d(q); }
};

struct CETriple {
  std::array<CEResolution, 3> res;
  std::vector<ChainMap> row_ij, row_jk;  // per column p
  std::vector<SESInvariants> invariants;  // one per column
};

std::size_t default_ce_depth(const Poset& p);

/// Iterates build_injective_triple on successive cokernel sequences. Throws
/// TruncationInsufficient if the cokernels have not vanished after depth steps.
CETriple build_ce_triple(const SESOfComplexes& s, std::size_t depth,
                         ChoicePolicy* policy = nullptr);
/// CE resolution of a single complex via 0 -> A -> A -> 0 -> 0.
CEResolution build_ce_resolution(const ComplexPtr& a, std::size_t depth,
                                 ChoicePolicy* policy = nullptr);

struct CEReport {
  bool injective = true;
  bool rows_exact = true;
  bool cocycles = true;
  bool coboundaries = true;
  bool cohomology = true;
  bool squares_commute = true;
  std::vector<std::string> failures;
  [[nodiscard]] bool ok() const {
    return injective && rows_exact && cocycles && coboundaries && cohomology && squares_commute;
  }
};

CEReport verify_ce(const CEResolution& r);
/// verify_ce on all three plus exactness of every row sequence I -> J -> K.
CEReport verify_ce_triple(const CETriple& t);

}  // namespace sheafss
