#pragma once

// Double complexes of vector spaces, filtered total complexes, exact couples
// and spectral sequence pages stored as subquotients of the first page.

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sheafss/exactla.hpp"

namespace sheafss {

using Bidegree = std::pair<int, int>;

/// Entries R^{p,q} for p in [p_lo, p_hi], q in [q_lo, q_hi]; squares commute.
struct DoubleComplex {
  Field field{};
  int p_lo = 0, p_hi = -1, q_lo = 0, q_hi = -1;
  std::map<Bidegree, std::size_t> dims;
  std::map<Bidegree, Matrix> dh;  // (p,q) -> (p+1,q)
  std::map<Bidegree, Matrix> dv;  // (p,q) -> (p,q+1)

  /// Missing maps are zero. Throws InvalidComplex or SquareNotCommuting.
  static DoubleComplex create(Field field, int p_lo, int p_hi, int q_lo, int q_hi,
                              std::map<Bidegree, std::size_t> dims,
                              std::map<Bidegree, Matrix> dh, std::map<Bidegree, Matrix> dv);

  [[nodiscard]] std::size_t dim(int p, int q) const;
  [[nodiscard]] Matrix h(int p, int q) const;
  [[nodiscard]] Matrix v(int p, int q) const;
};

/// Cochain complex of vector spaces whose coordinates carry filtration levels:
/// coordinate i of degree n lies in F^k exactly when level(n)[i] >= k.
struct FilteredComplex {
  Field field{};
  int lo = 0;
  std::vector<std::size_t> dims;
  std::vector<Matrix> d;                 // d[i]: degree lo+i -> lo+i+1
  std::vector<std::vector<int>> levels;  // per degree
  int f_lo = 0, f_hi = -1;

  [[nodiscard]] int hi() const { return lo + static_cast<int>(dims.size()) - 1; }
  [[nodiscard]] std::size_t dim(int n) const;
  [[nodiscard]] Matrix diff(int n) const;
  [[nodiscard]] std::vector<int> level(int n) const;
  /// Coordinates of degree n whose level lies in [k_lo, k_hi].
  [[nodiscard]] std::vector<std::size_t> coords(int n, int k_lo, int k_hi) const;
  /// d^2 = 0 and d preserves every F^k. Throws InvalidComplex.
  void validate() const;
};

/// Tot^n = (+)_{p+q=n} R^{p,q}, blocks ordered by p, d = dh + (-1)^p dv.
struct TotalComplex {
  FilteredComplex by_p;
  FilteredComplex by_q;  // same complex, filtered by q
  std::map<Bidegree, std::size_t> offset;  // (p,q) -> offset inside Tot^{p+q}
};

TotalComplex total(const DoubleComplex& dc);

/// H = Z / B with representatives and a projection onto class coordinates.
struct CohomologySpace {
  Subspace z, b;
  Matrix reps;  // ambient x dim
  Matrix proj;  // dim x ambient, valid on Z
  [[nodiscard]] std::size_t dim() const { return reps.cols(); }
};

/// Cohomology at C^n of C^{n-1} -d_in-> C^n -d_out-> C^{n+1}.
CohomologySpace vector_cohomology(const Matrix& d_in, const Matrix& d_out);
CohomologySpace cohomology_of_total(const FilteredComplex& c, int n);

/// Bigraded by (p, n) with n the total degree:
///   i: A^{p+1,n} -> A^{p,n},  j: A^{p,n} -> E^{p+s,n},  k: E^{p,n} -> A^{p+1,n+1}
/// where s = stage - 1.
struct ExactCouple {
  Field field{};
  int stage = 1;
  int p_lo = 0, p_hi = -1, n_lo = 0, n_hi = -1;
  std::map<Bidegree, std::size_t> a_dim, e_dim;
  std::map<Bidegree, Matrix> i, j, k;  // keyed by source bidegree

  [[nodiscard]] std::size_t a(int p, int n) const;
  [[nodiscard]] std::size_t e(int p, int n) const;
  [[nodiscard]] Matrix i_at(int p, int n) const;  // from A^{p+1,n}
  [[nodiscard]] Matrix j_at(int p, int n) const;  // from A^{p,n}
  [[nodiscard]] Matrix k_at(int p, int n) const;  // from E^{p,n}
  /// d = j after k: E^{p,n} -> E^{p+stage,n+1}.
  [[nodiscard]] Matrix d_at(int p, int n) const;
  /// Failing exactness nodes, empty when exact.
  [[nodiscard]] std::vector<std::string> exactness_failures() const;
};

/// Couple of a filtered complex with A^{p,n} = H^n(F^p), E^{p,n} = H^n(F^p/F^{p+1}).
/// A is kept for p in [f_lo - extra_p, f_hi + 1].
ExactCouple exact_couple(const FilteredComplex& c, int extra_p);

/// Derived couple together with the coordinate change back to the old one.
struct DerivedCouple {
  ExactCouple couple;
  std::map<Bidegree, Matrix> a_incl;  // A' -> A
  std::map<Bidegree, Matrix> e_reps;  // E' -> ker d, representatives
  std::map<Bidegree, Matrix> e_proj;  // ker d -> E'
};
/// Throws ExactnessLost if the derived couple fails to be exact.
DerivedCouple derive(const ExactCouple& c);

struct PageEntry {
  std::size_t dim = 0;
  Matrix reps;   // E_1 coordinates, one column per basis vector of E_r
  Subspace z;    // cycles surviving to page r, inside E_1
  Subspace bnd;  // boundaries killed before page r, inside E_1
};

struct Page {
  int r = 1;
  std::map<Bidegree, PageEntry> entries;  // keyed by (p, n)
  std::map<Bidegree, Matrix> d;           // d_r from (p, n)
  [[nodiscard]] std::size_t dim(int p, int n) const;
};

struct SpectralSequence {
  FilteredComplex complex;
  std::vector<ExactCouple> couples;  // couples[r-1] is the r-th derived
  std::vector<Page> pages;           // pages[r-1] is E_r
  int r_inf = 2;
  std::map<int, CohomologySpace> total;          // H^n(Tot)
  std::map<Bidegree, Subspace> filtration;       // (p, n) -> F^p H^n in class coords
  std::map<Bidegree, Matrix> graded_iso;         // F^p/F^{p+1} -> E_inf^{p,n}
  /// Representatives and projections of A_1 and E_1 in Tot^n coordinates.
  std::map<Bidegree, Matrix> a_reps, a_proj, e_reps, e_proj;
  std::vector<std::string> failures;

  [[nodiscard]] const Page& page(int r) const { return pages.at(static_cast<std::size_t>(r - 1)); }
  [[nodiscard]] const Page& e_inf() const { return page(r_inf); }
  /// Coordinates in page r of E_1 vectors lying in the surviving cycles.
  [[nodiscard]] Matrix page_coords(int r, int p, int n, const Matrix& e1_vectors) const;
  /// dim E_r indexed by (p, q).
  [[nodiscard]] std::map<Bidegree, std::size_t> dims_pq(int r) const;
  [[nodiscard]] bool ok() const { return failures.empty(); }
};

/// Pages E_1 .. E_{r_inf} with r_inf = (f_hi - f_lo) + 2 unless given.
SpectralSequence spectral_sequence(const FilteredComplex& c, std::optional<int> r_inf = {});
enum class FiltrationMode { ByP, ByQ };
SpectralSequence pages_from_filtration(const DoubleComplex& dc, FiltrationMode mode);

/// Morphism of exact couples of bidegree (0, shift) in (p, n).
struct CoupleMorphism {
  int shift = 1;
  std::map<Bidegree, Matrix> on_a;  // A^{p,n} -> A'^{p,n+shift}
  std::map<Bidegree, Matrix> on_e;  // E^{p,n} -> E'^{p,n+shift}
};

/// One sign per relation, or nullopt when no single sign fits.
struct IntertwiningSigns {
  std::optional<int> i, j, k;
  std::vector<std::string> failures;
};
IntertwiningSigns check_couple_morphism(const ExactCouple& src, const ExactCouple& dst,
                                        const CoupleMorphism& m);

struct PageMap {
  int r = 1;
  std::map<Bidegree, Matrix> maps;     // (p, n) of source
  std::optional<int> sign;             // delta d = sign d delta
  std::vector<std::string> failures;
};

/// Maps induced on pages 1 .. min(r_inf) by the E-part of m; checks that each
/// is well defined, that it commutes with d_r up to one sign per page, and
/// that the map on page r+1 is induced by the map on page r.
std::vector<PageMap> map_of_spectral_sequences(const SpectralSequence& src,
                                               const SpectralSequence& dst,
                                               const CoupleMorphism& m);

/// The value of s in {+1, -1} with a == s * b, if any; zero matrices give +1.
std::optional<int> sign_relating(const Matrix& a, const Matrix& b);

}  // namespace sheafss
