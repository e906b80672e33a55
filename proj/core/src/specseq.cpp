#include "sheafss/specseq.hpp"

#include <climits>

#include "sheafss/errors.hpp"

namespace sheafss {

namespace {

std::string bideg(int p, int n) { return "(" + std::to_string(p) + "," + std::to_string(n) + ")"; }

template <class M>
Matrix lookup(const M& m, const Bidegree& key, std::size_t rows, std::size_t cols, Field f) {
  auto it = m.find(key);
  if (it == m.end()) return Matrix(rows, cols, f);
  return it->second;
}

template <class M>
std::size_t lookup_dim(const M& m, const Bidegree& key) {
  auto it = m.find(key);
  return it == m.end() ? 0 : it->second;
}

bool exact_pair(const Matrix& f, const Matrix& g) {
  return (g * f).is_zero() && rank(f) + rank(g) == f.rows();
}

// Selection matrix: full coordinates x subset.
Matrix selector(std::size_t full, const std::vector<std::size_t>& coords, Field f) {
  Matrix s(full, coords.size(), f);
  for (std::size_t i = 0; i < coords.size(); ++i) s.set(coords[i], i, f.from_int(1));
  return s;
}

// Tracks one sign across many (a == s b) comparisons.
struct SignTracker {
  std::optional<int> sign;
  bool broken = false;
  void add(const Matrix& a, const Matrix& b) {
    if (broken || (a.is_zero() && b.is_zero())) return;
    auto s = sign_relating(a, b);
    if (!s || (sign && *sign != *s)) {
      broken = true;
      return;
    }
    sign = s;
  }
  [[nodiscard]] std::optional<int> result() const {
    if (broken) return std::nullopt;
    return sign.value_or(1);
  }
};

}  // namespace

std::optional<int> sign_relating(const Matrix& a, const Matrix& b) {
  if (a == b) return 1;
  if (a == -b) return -1;
  return std::nullopt;
}

// ---------------------------------------------------------------- double complexes

DoubleComplex DoubleComplex::create(Field field, int p_lo, int p_hi, int q_lo, int q_hi,
                                    std::map<Bidegree, std::size_t> dims,
                                    std::map<Bidegree, Matrix> dh,
                                    std::map<Bidegree, Matrix> dv) {
  DoubleComplex dc{field, p_lo, p_hi, q_lo, q_hi, {}, {}, {}};
  for (auto& [k, v] : dims) {
    if (k.first < p_lo || k.first > p_hi || k.second < q_lo || k.second > q_hi)
      throw InvalidComplex("entry " + bideg(k.first, k.second) + " outside the grid");
    if (v > 0) dc.dims[k] = v;
  }
  auto check_shape = [&](const std::map<Bidegree, Matrix>& maps, int dp, int dq, const char* what) {
    for (const auto& [k, m] : maps) {
      if (m.rows() != dc.dim(k.first + dp, k.second + dq) || m.cols() != dc.dim(k.first, k.second))
        throw InvalidComplex(std::string(what) + " at " + bideg(k.first, k.second) +
                             " has the wrong shape");
    }
  };
  check_shape(dh, 1, 0, "horizontal map");
  check_shape(dv, 0, 1, "vertical map");
  dc.dh = std::move(dh);
  dc.dv = std::move(dv);
  for (int p = p_lo; p <= p_hi; ++p) {
    for (int q = q_lo; q <= q_hi; ++q) {
      if (!(dc.h(p + 1, q) * dc.h(p, q)).is_zero())
        throw InvalidComplex("horizontal maps do not square to zero at " + bideg(p, q));
      if (!(dc.v(p, q + 1) * dc.v(p, q)).is_zero())
        throw InvalidComplex("vertical maps do not square to zero at " + bideg(p, q));
      if (!(dc.h(p, q + 1) * dc.v(p, q) == dc.v(p + 1, q) * dc.h(p, q)))
        throw SquareNotCommuting("square at " + bideg(p, q) + " does not commute");
    }
  }
  return dc;
}

std::size_t DoubleComplex::dim(int p, int q) const { return lookup_dim(dims, {p, q}); }

Matrix DoubleComplex::h(int p, int q) const {
  return lookup(dh, {p, q}, dim(p + 1, q), dim(p, q), field);
}

Matrix DoubleComplex::v(int p, int q) const {
  return lookup(dv, {p, q}, dim(p, q + 1), dim(p, q), field);
}

// ---------------------------------------------------------------- filtered complexes

std::size_t FilteredComplex::dim(int n) const {
  if (n < lo || n > hi()) return 0;
  return dims[static_cast<std::size_t>(n - lo)];
}

Matrix FilteredComplex::diff(int n) const {
  if (n < lo || n >= hi()) return Matrix(dim(n + 1), dim(n), field);
  return d[static_cast<std::size_t>(n - lo)];
}

std::vector<int> FilteredComplex::level(int n) const {
  if (n < lo || n > hi()) return {};
  return levels[static_cast<std::size_t>(n - lo)];
}

std::vector<std::size_t> FilteredComplex::coords(int n, int k_lo, int k_hi) const {
  std::vector<std::size_t> out;
  auto lv = level(n);
  for (std::size_t i = 0; i < lv.size(); ++i)
    if (lv[i] >= k_lo && lv[i] <= k_hi) out.push_back(i);
  return out;
}

void FilteredComplex::validate() const {
  if (d.size() + 1 != std::max<std::size_t>(dims.size(), 1) || levels.size() != dims.size())
    throw InvalidComplex("filtered complex has inconsistent sizes");
  for (int n = lo; n <= hi(); ++n) {
    if (level(n).size() != dim(n)) throw InvalidComplex("levels do not match degree " + std::to_string(n));
    Matrix dn = diff(n);
    if (dn.rows() != dim(n + 1) || dn.cols() != dim(n))
      throw InvalidComplex("differential in degree " + std::to_string(n) + " has the wrong shape");
    if (!(diff(n + 1) * dn).is_zero())
      throw InvalidComplex("d^2 != 0 in degree " + std::to_string(n));
    auto src = level(n), dst = level(n + 1);
    for (std::size_t c = 0; c < dn.cols(); ++c)
      for (std::size_t r = 0; r < dn.rows(); ++r)
        if (!dn(r, c).is_zero() && dst[r] < src[c])
          throw InvalidComplex("differential lowers the filtration in degree " + std::to_string(n));
  }
}

TotalComplex total(const DoubleComplex& dc) {
  TotalComplex t;
  FilteredComplex& c = t.by_p;
  c.field = dc.field;
  c.f_lo = dc.p_lo;
  c.f_hi = dc.p_hi;
  const int n_lo = dc.p_lo + dc.q_lo, n_hi = dc.p_hi + dc.q_hi;
  c.lo = n_lo;
  std::vector<std::vector<int>> qlevels;
  for (int n = n_lo; n <= n_hi; ++n) {
    std::size_t off = 0;
    std::vector<int> lp, lq;
    for (int p = dc.p_lo; p <= dc.p_hi; ++p) {
      int q = n - p;
      if (q < dc.q_lo || q > dc.q_hi) continue;
      t.offset[{p, q}] = off;
      std::size_t k = dc.dim(p, q);
      off += k;
      lp.insert(lp.end(), k, p);
      lq.insert(lq.end(), k, q);
    }
    c.dims.push_back(off);
    c.levels.push_back(std::move(lp));
    qlevels.push_back(std::move(lq));
  }
  for (int n = n_lo; n < n_hi; ++n) {
    Matrix d(c.dim(n + 1), c.dim(n), dc.field);
    for (int p = dc.p_lo; p <= dc.p_hi; ++p) {
      int q = n - p;
      if (q < dc.q_lo || q > dc.q_hi) continue;
      std::size_t col = t.offset.at({p, q});
      if (p + 1 <= dc.p_hi) d.paste(t.offset.at({p + 1, q}), col, dc.h(p, q));
      if (q + 1 <= dc.q_hi) {
        Matrix v = dc.v(p, q);
        d.paste(t.offset.at({p, q + 1}), col, (p & 1) ? -v : v);
      }
    }
    c.d.push_back(std::move(d));
  }
  if (c.dims.empty()) c.lo = 0;
  t.by_q = c;
  t.by_q.levels = std::move(qlevels);
  t.by_q.f_lo = dc.q_lo;
  t.by_q.f_hi = dc.q_hi;
  return t;
}

CohomologySpace vector_cohomology(const Matrix& d_in, const Matrix& d_out) {
  CohomologySpace h;
  h.z = kernel_basis(d_out);
  h.b = image_basis(d_in);
  auto qb = quotient_basis(h.z, h.b);
  h.reps = std::move(qb.representatives);
  h.proj = std::move(qb.projection);
  return h;
}

CohomologySpace cohomology_of_total(const FilteredComplex& c, int n) {
  return vector_cohomology(c.diff(n - 1), c.diff(n));
}

namespace {

// Cohomology of the subquotient F^{k_lo} / F^{k_hi + 1} in degree n, with
// representatives scattered into full coordinates.
struct SubCohomology {
  std::vector<std::size_t> coords;
  CohomologySpace h;
  Matrix full_reps;
};

SubCohomology sub_cohomology(const FilteredComplex& c, int n, int k_lo, int k_hi) {
  SubCohomology s;
  s.coords = c.coords(n, k_lo, k_hi);
  auto prev = c.coords(n - 1, k_lo, k_hi);
  auto next = c.coords(n + 1, k_lo, k_hi);
  Matrix d_in = c.diff(n - 1).select_rows(s.coords).select_cols(prev);
  Matrix d_out = c.diff(n).select_rows(next).select_cols(s.coords);
  s.h = vector_cohomology(d_in, d_out);
  s.full_reps = selector(c.dim(n), s.coords, c.field) * s.h.reps;
  return s;
}

Matrix gather(const Matrix& full, const std::vector<std::size_t>& coords) {
  return full.select_rows(coords);
}

}  // namespace

// ---------------------------------------------------------------- exact couples

std::size_t ExactCouple::a(int p, int n) const { return lookup_dim(a_dim, {p, n}); }
std::size_t ExactCouple::e(int p, int n) const { return lookup_dim(e_dim, {p, n}); }

Matrix ExactCouple::i_at(int p, int n) const { return lookup(i, {p, n}, a(p, n), a(p + 1, n), field); }
Matrix ExactCouple::j_at(int p, int n) const {
  return lookup(j, {p, n}, e(p + stage - 1, n), a(p, n), field);
}
Matrix ExactCouple::k_at(int p, int n) const {
  return lookup(k, {p, n}, a(p + 1, n + 1), e(p, n), field);
}
Matrix ExactCouple::d_at(int p, int n) const { return j_at(p + 1, n + 1) * k_at(p, n); }

std::vector<std::string> ExactCouple::exactness_failures() const {
  std::vector<std::string> out;
  const int s = stage - 1;
  for (int p = p_lo; p < p_hi; ++p) {
    for (int n = n_lo - 1; n <= n_hi; ++n) {
      if (!exact_pair(i_at(p, n), j_at(p, n)))
        out.push_back("stage " + std::to_string(stage) + ": not exact at A" + bideg(p, n));
      if (!exact_pair(j_at(p, n), k_at(p + s, n)))
        out.push_back("stage " + std::to_string(stage) + ": not exact at E" + bideg(p + s, n));
      if (!exact_pair(k_at(p + s, n), i_at(p + s, n + 1)))
        out.push_back("stage " + std::to_string(stage) + ": not exact at A" +
                      bideg(p + s + 1, n + 1));
    }
  }
  return out;
}

namespace {

ExactCouple build_couple(const FilteredComplex& c, int extra_p, SpectralSequence* store) {
  ExactCouple ec;
  ec.field = c.field;
  ec.stage = 1;
  ec.p_lo = c.f_lo - extra_p;
  ec.p_hi = c.f_hi + 1;
  ec.n_lo = c.lo;
  ec.n_hi = c.hi();
  std::map<Bidegree, SubCohomology> ha, he;
  for (int n = ec.n_lo; n <= ec.n_hi + 1; ++n) {
    for (int p = ec.p_lo; p <= ec.p_hi; ++p) {
      ha[{p, n}] = sub_cohomology(c, n, p, INT_MAX);
      if (p <= c.f_hi && p >= c.f_lo) he[{p, n}] = sub_cohomology(c, n, p, p);
    }
  }
  for (const auto& [key, s] : ha)
    if (s.h.dim() > 0) ec.a_dim[key] = s.h.dim();
  for (const auto& [key, s] : he)
    if (s.h.dim() > 0) ec.e_dim[key] = s.h.dim();
  if (store) {
    auto keep = [&](const std::map<Bidegree, SubCohomology>& from, std::map<Bidegree, Matrix>& reps,
                    std::map<Bidegree, Matrix>& proj) {
      for (const auto& [key, s] : from) {
        reps[key] = s.full_reps;
        proj[key] = s.h.proj * selector(c.dim(key.second), s.coords, c.field).transposed();
      }
    };
    keep(ha, store->a_reps, store->a_proj);
    keep(he, store->e_reps, store->e_proj);
  }
  for (int n = ec.n_lo; n <= ec.n_hi; ++n) {
    for (int p = ec.p_lo; p <= ec.p_hi; ++p) {
      const auto& ap = ha.at({p, n});
      if (p < ec.p_hi) {
        const auto& ap1 = ha.at({p + 1, n});
        ec.i[{p, n}] = ap.h.proj * gather(ap1.full_reps, ap.coords);
      }
      auto it = he.find({p, n});
      if (it == he.end()) continue;
      const auto& ep = it->second;
      ec.j[{p, n}] = ep.h.proj * gather(ap.full_reps, ep.coords);
      const auto& target = ha.at({p + 1, n + 1});
      Matrix image = c.diff(n) * ep.full_reps;
      if (!gather(image, c.coords(n + 1, INT_MIN, p)).is_zero())
        throw InvalidComplex("differential lowers the filtration in degree " + std::to_string(n));
      ec.k[{p, n}] = target.h.proj * gather(image, target.coords);
    }
  }
  return ec;
}

}  // namespace

ExactCouple exact_couple(const FilteredComplex& c, int extra_p) { return build_couple(c, extra_p, nullptr); }

DerivedCouple derive(const ExactCouple& c) {
  DerivedCouple out;
  ExactCouple& d = out.couple;
  d.field = c.field;
  d.stage = c.stage + 1;
  d.p_lo = c.p_lo;
  d.p_hi = c.p_hi;
  d.n_lo = c.n_lo;
  d.n_hi = c.n_hi;
  const int s = c.stage - 1;
  for (int n = c.n_lo; n <= c.n_hi + 1; ++n) {
    for (int p = c.p_lo; p <= c.p_hi; ++p) {
      Matrix basis = image_basis(c.i_at(p, n)).basis();
      if (basis.cols() > 0) d.a_dim[{p, n}] = basis.cols();
      out.a_incl[{p, n}] = std::move(basis);
      if (c.e(p, n) == 0) continue;
      auto h = vector_cohomology(c.d_at(p - c.stage, n - 1), c.d_at(p, n));
      if (h.dim() > 0) d.e_dim[{p, n}] = h.dim();
      out.e_reps[{p, n}] = std::move(h.reps);
      out.e_proj[{p, n}] = std::move(h.proj);
    }
  }
  auto a_incl = [&](int p, int n) {
    return lookup(out.a_incl, {p, n}, c.a(p, n), 0, c.field);
  };
  for (int n = c.n_lo; n <= c.n_hi; ++n) {
    for (int p = c.p_lo; p <= c.p_hi; ++p) {
      if (p < c.p_hi) d.i[{p, n}] = solve(a_incl(p, n), c.i_at(p, n) * a_incl(p + 1, n));
      Matrix incl = a_incl(p, n);
      if (incl.cols() > 0 && p < c.p_hi) {
        Matrix b = solve(c.i_at(p, n), incl);
        Matrix jb = c.j_at(p + 1, n) * b;
        d.j[{p, n}] = lookup(out.e_proj, {p + 1 + s, n}, d.e(p + 1 + s, n), c.e(p + 1 + s, n),
                             c.field) * jb;
      }
      auto it = out.e_reps.find({p, n});
      if (it != out.e_reps.end() && it->second.cols() > 0)
        d.k[{p, n}] = solve(a_incl(p + 1, n + 1), c.k_at(p, n) * it->second);
    }
  }
  auto failures = d.exactness_failures();
  if (!failures.empty()) throw ExactnessLost(failures.front());
  return out;
}

// ---------------------------------------------------------------- pages

std::size_t Page::dim(int p, int n) const {
  auto it = entries.find({p, n});
  return it == entries.end() ? 0 : it->second.dim;
}

Matrix SpectralSequence::page_coords(int r, int p, int n, const Matrix& e1_vectors) const {
  const Page& pg = page(r);
  auto it = pg.entries.find({p, n});
  if (it == pg.entries.end()) {
    if (!e1_vectors.is_zero() && e1_vectors.rows() > 0)
      throw NoSolution("vector outside the page at " + bideg(p, n));
    return Matrix(0, e1_vectors.cols(), complex.field);
  }
  const PageEntry& e = it->second;
  Matrix sol = solve(Matrix::hstack(e.reps, e.bnd.basis()), e1_vectors);
  return sol.rows_range(0, e.dim);
}

std::map<Bidegree, std::size_t> SpectralSequence::dims_pq(int r) const {
  std::map<Bidegree, std::size_t> out;
  for (const auto& [key, e] : page(r).entries)
    if (e.dim > 0) out[{key.first, key.second - key.first}] = e.dim;
  return out;
}

SpectralSequence spectral_sequence(const FilteredComplex& c, std::optional<int> r_inf) {
  c.validate();
  SpectralSequence ss;
  ss.complex = c;
  ss.r_inf = r_inf.value_or(std::max(c.f_hi - c.f_lo, 0) + 2);
  ss.couples.push_back(build_couple(c, ss.r_inf + 1, &ss));
  if (auto f = ss.couples.front().exactness_failures(); !f.empty())
    throw ExactnessLost(f.front());

  Page first;
  first.r = 1;
  const ExactCouple& c1 = ss.couples.front();
  for (const auto& [key, dim] : c1.e_dim) {
    first.entries[key] = PageEntry{dim, Matrix::identity(dim, c.field), Subspace::full(dim, c.field),
                                   Subspace::zero(dim, c.field)};
    first.d[key] = c1.d_at(key.first, key.second);
  }
  ss.pages.push_back(std::move(first));

  std::map<Bidegree, std::size_t> e1_dim = c1.e_dim;
  for (int r = 2; r <= ss.r_inf; ++r) {
    DerivedCouple dc = derive(ss.couples.back());
    const Page& prev = ss.pages.back();
    Page pg;
    pg.r = r;
    for (const auto& [key, dim1] : e1_dim) {
      const auto& pe = prev.entries.at(key);
      Subspace bnd = pe.bnd;
      auto src = prev.entries.find({key.first - (r - 1), key.second - 1});
      if (src != prev.entries.end() && pe.dim > 0) {
        Matrix dprev = prev.d.at(src->first);
        bnd = sum(bnd, image_basis(pe.reps * dprev));
      }
      Matrix reps = pe.dim > 0 ? pe.reps * dc.e_reps.at(key) : Matrix(dim1, 0, c.field);
      Subspace z = sum(Subspace::span(reps), bnd);
      pg.entries[key] = PageEntry{reps.cols(), std::move(reps), std::move(z), std::move(bnd)};
    }
    for (const auto& [key, e] : pg.entries) pg.d[key] = dc.couple.d_at(key.first, key.second);
    ss.couples.push_back(std::move(dc.couple));
    ss.pages.push_back(std::move(pg));
  }

  // Total cohomology, its filtration and the graded comparison with E_inf.
  for (int n = c.lo; n <= c.hi(); ++n) {
    const CohomologySpace& tot = ss.total[n] = cohomology_of_total(c, n);
    std::size_t inf_sum = 0;
    for (int p = c.f_lo; p <= c.f_hi + 1; ++p) {
      auto a = sub_cohomology(c, n, p, INT_MAX);
      Matrix to_tot = tot.proj * a.full_reps;
      ss.filtration[{p, n}] = image_basis(to_tot);
      if (p > c.f_hi) continue;
      inf_sum += ss.e_inf().dim(p, n);
      // Lift F^p/F^{p+1} representatives to H^n(F^p), then project to E_1.
      auto fp = ss.filtration[{p, n}];
      auto fp1 = p + 1 <= c.f_hi + 1 ? image_basis(tot.proj * sub_cohomology(c, n, p + 1, INT_MAX).full_reps)
                                     : Subspace::zero(tot.dim(), c.field);
      auto qb = quotient_basis(fp, fp1);
      try {
        Matrix lifted = a.full_reps * solve(to_tot, qb.representatives);
        auto e = sub_cohomology(c, n, p, p);
        Matrix e1 = e.h.proj * gather(lifted, e.coords);
        Matrix iso = ss.page_coords(ss.r_inf, p, n, e1);
        if (iso.rows() != iso.cols() || rank(iso) != iso.rows())
          ss.failures.push_back("graded piece " + bideg(p, n) + " is not isomorphic to E_inf");
        ss.graded_iso[{p, n}] = std::move(iso);
      } catch (const Error& err) {
        ss.failures.push_back("graded piece " + bideg(p, n) + ": " + err.what());
      }
    }
    if (inf_sum != tot.dim())
      ss.failures.push_back("degree " + std::to_string(n) + ": E_inf has total dimension " +
                            std::to_string(inf_sum) + " but H^n has dimension " +
                            std::to_string(tot.dim()));
  }
  return ss;
}

SpectralSequence pages_from_filtration(const DoubleComplex& dc, FiltrationMode mode) {
  TotalComplex t = total(dc);
  return spectral_sequence(mode == FiltrationMode::ByP ? t.by_p : t.by_q);
}

// ---------------------------------------------------------------- morphisms

IntertwiningSigns check_couple_morphism(const ExactCouple& src, const ExactCouple& dst,
                                        const CoupleMorphism& m) {
  IntertwiningSigns out;
  const int s = m.shift;
  const Field f = src.field;
  auto on_a = [&](int p, int n) { return lookup(m.on_a, {p, n}, dst.a(p, n + s), src.a(p, n), f); };
  auto on_e = [&](int p, int n) { return lookup(m.on_e, {p, n}, dst.e(p, n + s), src.e(p, n), f); };
  SignTracker ti, tj, tk;
  for (int p = std::max(src.p_lo, dst.p_lo); p < std::min(src.p_hi, dst.p_hi); ++p) {
    for (int n = src.n_lo - 1; n <= src.n_hi + 1; ++n) {
      ti.add(dst.i_at(p, n + s) * on_a(p + 1, n), on_a(p, n) * src.i_at(p, n));
      tj.add(dst.j_at(p, n + s) * on_a(p, n), on_e(p, n) * src.j_at(p, n));
      tk.add(dst.k_at(p, n + s) * on_e(p, n), on_a(p + 1, n + 1) * src.k_at(p, n));
    }
  }
  out.i = ti.result();
  out.j = tj.result();
  out.k = tk.result();
  if (!out.i) out.failures.push_back("relation with i holds with no single sign");
  if (!out.j) out.failures.push_back("relation with j holds with no single sign");
  if (!out.k) out.failures.push_back("relation with k holds with no single sign");
  return out;
}

std::vector<PageMap> map_of_spectral_sequences(const SpectralSequence& src,
                                               const SpectralSequence& dst,
                                               const CoupleMorphism& m) {
  std::vector<PageMap> out;
  const int s = m.shift;
  const Field f = src.complex.field;
  const int r_max = std::min(src.r_inf, dst.r_inf);
  for (int r = 1; r <= r_max; ++r) {
    PageMap pm;
    pm.r = r;
    const Page& sp = src.page(r);
    const Page& dp = dst.page(r);
    for (const auto& [key, e] : sp.entries) {
      const int p = key.first, n = key.second;
      Matrix on_e = lookup(m.on_e, key, dst.page(1).dim(p, n + s), src.page(1).dim(p, n), f);
      auto dst_entry = dp.entries.find({p, n + s});
      Matrix img = on_e * e.bnd.basis();
      if (!img.is_zero() && (dst_entry == dp.entries.end() || !dst_entry->second.bnd.contains(img)))
        pm.failures.push_back("page " + std::to_string(r) + ": boundaries at " + bideg(p, n) +
                              " are not sent to boundaries");
      try {
        pm.maps[key] = dst.page_coords(r, p, n + s, on_e * e.reps);
      } catch (const NoSolution&) {
        pm.failures.push_back("page " + std::to_string(r) + ": cycles at " + bideg(p, n) +
                              " leave the surviving cycles");
        pm.maps[key] = Matrix(dp.dim(p, n + s), e.dim, f);
      }
    }
    auto map_at = [&](int p, int n) {
      return lookup(pm.maps, {p, n}, dp.dim(p, n + s), sp.dim(p, n), f);
    };
    SignTracker t;
    for (const auto& [key, e] : sp.entries) {
      const int p = key.first, n = key.second;
      Matrix d_src = lookup(sp.d, key, sp.dim(p + r, n + 1), e.dim, f);
      Matrix d_dst = lookup(dp.d, {p, n + s}, dp.dim(p + r, n + s + 1), dp.dim(p, n + s), f);
      t.add(map_at(p + r, n + 1) * d_src, d_dst * map_at(p, n));
    }
    pm.sign = t.result();
    if (!pm.sign)
      pm.failures.push_back("page " + std::to_string(r) + ": map commutes with d_r with no single sign");
    if (r >= 2) {
      const PageMap& prev = out.back();
      for (const auto& [key, e] : sp.entries) {
        const int p = key.first, n = key.second;
        if (e.dim == 0) continue;
        try {
          Matrix in_prev = src.page_coords(r - 1, p, n, e.reps);
          auto pit = prev.maps.find(key);
          if (pit == prev.maps.end()) continue;
          auto dit = dst.page(r - 1).entries.find({p, n + s});
          if (dit == dst.page(r - 1).entries.end()) continue;
          Matrix image_prev = dit->second.reps * (pit->second * in_prev);
          Matrix induced = dst.page_coords(r, p, n + s, image_prev);
          if (!(induced == map_at(p, n)))
            pm.failures.push_back("page " + std::to_string(r) + ": map at " + bideg(p, n) +
                                  " is not induced by the previous page");
        } catch (const Error& err) {
          pm.failures.push_back("page " + std::to_string(r) + ": " + err.what());
        }
      }
    }
    out.push_back(std::move(pm));
  }
  return out;
}

}  // namespace sheafss
