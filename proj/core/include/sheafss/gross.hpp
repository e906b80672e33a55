#pragma once

// The Grothendieck spectral sequence of G after F, the coboundary maps
// between the spectral sequences of a short exact sequence, and their Leray
// specialisation with F = f_* and G = global sections.

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sheafss/ceres.hpp"
#include "sheafss/specseq.hpp"

namespace sheafss {

/// F is f_* (or the identity), G is global sections.
struct FunctorPair {
  MonotoneMap f;
  bool identity = false;

  static FunctorPair pushforward(MonotoneMap f);
  static FunctorPair identity_on(PosetPtr p);

  [[nodiscard]] const PosetPtr& source() const { return f.source; }
  [[nodiscard]] const PosetPtr& target() const { return f.target; }
  [[nodiscard]] SheafPtr apply(const SheafPtr& a) const;
  [[nodiscard]] SheafMorphism apply(const SheafMorphism& m) const;
  /// F applied to an injective resolution, as a complex starting in degree 0.
  [[nodiscard]] ComplexPtr apply(const Resolution& r) const;
};

struct PipelineOptions {
  std::optional<std::size_t> resolution_length;  // default: longest chain of the source + 2
  std::optional<std::size_t> ce_depth;           // default: longest chain of the target + 2
  ChoicePolicy* policy = nullptr;                // used for the CE construction only
  bool check_acyclicity = true;
};

/// R^q F(A) as a sheaf on the target.
SheafPtr derived_functor(const FunctorPair& pair, const SheafPtr& a, int q,
                         const PipelineOptions& opt = {});
/// R^q F(phi) computed through a comparison lift.
SheafMorphism derived_functor_map(const FunctorPair& pair, const SheafMorphism& phi, int q,
                                  const PipelineOptions& opt = {});
/// R^q F(C) -> R^{q+1} F(A) for 0 -> A -> B -> C -> 0.
SheafMorphism connecting_derived(const FunctorPair& pair, const SheafMorphism& iota,
                                 const SheafMorphism& pi, int q, const PipelineOptions& opt = {});

/// G applied to a CE resolution: R^{p,q} = G(I^{p,q}) with p the column.
DoubleComplex apply_sections(const CEResolution& ce);

/// The spectral sequence of one object together with the E_2 comparison.
struct GrothendieckData {
  FunctorPair pair;
  SheafPtr object;
  Resolution resolution;    // M*
  ComplexPtr f_resolution;  // F(M*)
  CEResolution ce;
  DoubleComplex r;
  SpectralSequence by_p, by_q;
  /// E_1^{p,q} -> G(H^q(I^{p,*})), keyed by (p, q).
  std::map<Bidegree, Matrix> e1_identification;
  /// E_2^{p,q} -> H^p(G(H^q(I^{*,*}))), keyed by (p, q).
  std::map<Bidegree, Matrix> e2_identification;
  /// dim R^p G(R^q F(A)) from an independent resolution of R^q F(A).
  std::map<Bidegree, std::size_t> expected_e2;
  std::vector<std::string> failures;
  [[nodiscard]] bool ok() const { return failures.empty() && by_p.ok(); }
};

/// Throws AcyclicityViolation if some F(M^q) has higher G-cohomology.
GrothendieckData grothendieck_ss(const FunctorPair& pair, const SheafPtr& a,
                                 const PipelineOptions& opt = {});

struct FirstSSReport {
  bool vanishing = true;     // second-filtration E_1^{p,q} = 0 for p > 0
  bool edge_iso = true;      // E_1^{0,q} = G(F(M^q))
  bool quasi_iso = true;     // G(F(M*)) -> Tot(R) on all H^n
  std::vector<std::string> failures;
  [[nodiscard]] bool ok() const { return vanishing && edge_iso && quasi_iso; }
};
FirstSSReport first_ss_check(const GrothendieckData& data);

/// Coboundary data between the spectral sequences of C and A.
struct DeltaFamily {
  FunctorPair pair;
  SheafMorphism iota, pi;
  SESOfComplexes f_ses;  // 0 -> F(M*) -> F(N*) -> F(P*) -> 0
  CETriple ce;
  DoubleComplex r, s, t;  // G applied to the CE resolutions of A, B, C
  SpectralSequence ss_a, ss_c;
  CoupleMorphism delta;
  IntertwiningSigns couple_signs;
  std::vector<PageMap> pages;  // delta_r for r = 1 .. r_inf
  /// Total-degree connecting map H^n(Tot T) -> H^{n+1}(Tot R).
  std::map<int, Matrix> total_connecting;
  /// R^q F(C) -> R^{q+1} F(A).
  std::map<int, SheafMorphism> derived_connecting;
  std::vector<std::string> failures;
};

DeltaFamily delta_morphism(const FunctorPair& pair, const SheafMorphism& iota,
                           const SheafMorphism& pi, const PipelineOptions& opt = {});

struct MainTheoremReport {
  bool commutes_with_differentials = true;  // first bullet
  bool expected_form = true;                // second bullet
  bool respects_filtration = true;          // third bullet
  std::vector<std::optional<int>> page_signs;  // index r - 1
  std::optional<int> e2_sign;
  std::optional<int> graded_sign;
  std::size_t certificates = 0;
  std::size_t certificates_verified = 0;
  std::vector<std::string> failures;
  [[nodiscard]] bool ok() const {
    return commutes_with_differentials && expected_form && respects_filtration;
  }
};
MainTheoremReport verify_main_theorem(const DeltaFamily& family);

GrothendieckData leray_ss(const MonotoneMap& f, const SheafPtr& sheaf,
                          const PipelineOptions& opt = {});

struct LerayDelta {
  DeltaFamily family;
  MainTheoremReport report;
};
LerayDelta leray_delta(const MonotoneMap& f, const SheafMorphism& iota, const SheafMorphism& pi,
                       const PipelineOptions& opt = {});

struct AcyclicMiddleReport {
  bool total_iso = true;        // H^n(C) -> H^{n+1}(A): iso for n >= 1, onto for n = 0
  bool filtration_iso = true;   // on F^p H^{p+q}
  bool e_inf_iso = true;        // E_inf^{p,q}(C) -> E_inf^{p,q+1}(A)
  std::vector<std::string> failures;
  [[nodiscard]] bool ok() const { return total_iso && filtration_iso && e_inf_iso; }
};
/// Throws PreconditionFailed naming an open set on which the middle term has
/// higher cohomology.
AcyclicMiddleReport acyclic_middle_analysis(const MonotoneMap& f, const SheafMorphism& iota,
                                            const SheafMorphism& pi, const PipelineOptions& opt = {});
AcyclicMiddleReport acyclic_middle_analysis(const DeltaFamily& family);

/// Nonzero dim E_r^{p,q} for r = 2 .. r_inf.
std::vector<std::map<Bidegree, std::size_t>> page_dimensions(const SpectralSequence& ss);

nlohmann::json to_json(const SpectralSequence& ss);
nlohmann::json to_json(const GrothendieckData& d);
nlohmann::json to_json(const FirstSSReport& r);
nlohmann::json to_json(const MainTheoremReport& r);
nlohmann::json to_json(const AcyclicMiddleReport& r);
std::string page_table(const SpectralSequence& ss, int r);

}  // namespace sheafss
