#include "sheafss/gross.hpp"

#include <climits>
#include <sstream>

#include "sheafss/errors.hpp"

namespace sheafss {

// ---------------------------------------------------------------- functors

FunctorPair FunctorPair::pushforward(MonotoneMap f) { return FunctorPair{std::move(f), false}; }

FunctorPair FunctorPair::identity_on(PosetPtr p) {
  return FunctorPair{MonotoneMap::identity(std::move(p)), true};
}

SheafPtr FunctorPair::apply(const SheafPtr& a) const {
  return identity ? a : sheafss::pushforward(f, a);
}

SheafMorphism FunctorPair::apply(const SheafMorphism& m) const {
  return identity ? m : sheafss::pushforward(f, m);
}

ComplexPtr FunctorPair::apply(const Resolution& r) const {
  const Field field = r.object->field();
  if (r.terms.empty()) return Complex::create(target(), field, 0, {Sheaf::zero(target(), field)}, {});
  std::vector<SheafPtr> objects;
  std::vector<SheafMorphism> diffs;
  for (const auto& t : r.terms) objects.push_back(apply(t));
  for (std::size_t q = 0; q + 1 < r.terms.size(); ++q) diffs.push_back(apply(r.differential(q)));
  return Complex::create(target(), field, 0, std::move(objects), std::move(diffs));
}

namespace {

std::size_t resolution_length(const FunctorPair& pair, const PipelineOptions& opt) {
  return opt.resolution_length.value_or(default_resolution_length(*pair.source()));
}

std::size_t ce_depth(const FunctorPair& pair, const PipelineOptions& opt) {
  return opt.ce_depth.value_or(default_ce_depth(*pair.target()));
}

std::string pq(int p, int q) { return "(" + std::to_string(p) + "," + std::to_string(q) + ")"; }

Matrix sections_matrix(const SheafMorphism& m) { return gamma(m).at(0); }

std::size_t sections_dim(const SheafPtr& s) { return sections(*s, s->poset()->all()).dim(); }

void check_acyclic(const FunctorPair& pair, const Resolution& m) {
  for (std::size_t q = 0; q < m.terms.size(); ++q) {
    auto h = cohomology_dims(pair.apply(m.terms[q]));
    for (std::size_t k = 1; k < h.size(); ++k)
      if (h[k] != 0)
        throw AcyclicityViolation("F(M^" + std::to_string(q) + ") has H^" + std::to_string(k) +
                                  " of dimension " + std::to_string(h[k]));
  }
}

// Complex of length len built from F applied to terms(q) and maps(q).
template <class Term, class Diff>
ComplexPtr padded_complex(const FunctorPair& pair, Field field, std::size_t len, Term term, Diff diff) {
  std::vector<SheafPtr> objects;
  std::vector<SheafMorphism> diffs;
  for (std::size_t q = 0; q < len; ++q) objects.push_back(pair.apply(term(q)));
  for (std::size_t q = 0; q + 1 < len; ++q) diffs.push_back(pair.apply(diff(q)));
  return Complex::create(pair.target(), field, 0, std::move(objects), std::move(diffs));
}

SESOfComplexes f_image_of_horseshoe(const FunctorPair& pair, const SheafMorphism& iota,
                                    const SheafMorphism& pi, const PipelineOptions& opt) {
  std::size_t len = resolution_length(pair, opt);
  Resolution ra = injective_resolution(iota.source, len);
  Resolution rc = injective_resolution(pi.target, len);
  if (opt.check_acyclicity) {
    check_acyclic(pair, ra);
    check_acyclic(pair, rc);
  }
  HorseshoeResult hs = horseshoe(iota, pi, ra, rc);
  const Field field = iota.source->field();
  std::size_t n = std::max<std::size_t>(hs.middle.length(), 1);
  auto m = padded_complex(pair, field, n, [&](std::size_t q) { return ra.term(q); },
                          [&](std::size_t q) { return ra.differential(q); });
  auto b = padded_complex(pair, field, n, [&](std::size_t q) { return hs.middle.term(q); },
                          [&](std::size_t q) { return hs.middle.differential(q); });
  auto p = padded_complex(pair, field, n, [&](std::size_t q) { return rc.term(q); },
                          [&](std::size_t q) { return rc.differential(q); });
  std::vector<SheafMorphism> ic, pc;
  for (std::size_t q = 0; q < n; ++q) {
    auto qi = static_cast<int>(q);
    ic.push_back(q < hs.iota.size() ? pair.apply(hs.iota[q]) : SheafMorphism::zero(m->obj(qi), b->obj(qi)));
    pc.push_back(q < hs.pi.size() ? pair.apply(hs.pi[q]) : SheafMorphism::zero(b->obj(qi), p->obj(qi)));
  }
  return SESOfComplexes::create(ChainMap::create(m, b, std::move(ic)),
                                ChainMap::create(b, p, std::move(pc)));
}

// Offsets of the blocks of Tot^{p+q}.
std::map<Bidegree, std::size_t> block_offsets(const DoubleComplex& dc) { return total(dc).offset; }

struct ColumnData {
  std::map<Bidegree, CohomologyData> coh;  // (p, q)
  CohomologyData input(int q) const;
};

std::map<Bidegree, CohomologyData> column_cohomology(const CEResolution& ce) {
  std::map<Bidegree, CohomologyData> out;
  for (std::size_t p = 0; p < ce.width(); ++p)
    for (int q = ce.lo; q <= ce.hi + 1; ++q)
      out[{static_cast<int>(p), q}] = cohomology(*ce.columns[p], q);
  return out;
}

// The cohomology-role summands of I^{p,q} as a coinduced object, with the
// isomorphism H^q(I^{p,*}) -> that object.
struct TaggedCohomology {
  SheafPtr object;
  SheafMorphism from_h;
};

TaggedCohomology tagged_cohomology(const CEResolution& ce, std::size_t p, int q, const CohomologyData& cd) {
  const SheafPtr& entry = ce.entry(p, q);
  const auto& all = entry->summands();
  std::vector<std::size_t> chosen;
  for (const auto& tr : ce.tags[p][static_cast<std::size_t>(q - ce.lo)])
    if (tr.role == Role::Cohomology)
      for (std::size_t i = 0; i < tr.count; ++i) chosen.push_back(tr.first_summand + i);
  std::vector<CoinducedSummand> parts;
  for (auto i : chosen) parts.push_back(all[i]);
  SheafPtr obj = Sheaf::coinduced(entry->poset(), entry->field(), parts);
  const std::size_t np = entry->poset()->size();
  std::vector<Matrix> comps;
  for (std::size_t y = 0; y < np; ++y) {
    Matrix m(entry->dim(y), obj->dim(y), entry->field());
    for (std::size_t k = 0; k < chosen.size(); ++k) {
      if (!entry->poset()->leq(y, parts[k].point)) continue;
      std::size_t r0 = entry->summand_offset(chosen[k], y), c0 = obj->summand_offset(k, y);
      for (std::size_t t = 0; t < parts[k].multiplicity; ++t) m.set(r0 + t, c0 + t, Scalar(1));
    }
    comps.push_back(std::move(m));
  }
  SheafMorphism incl = SheafMorphism::create(obj, entry, std::move(comps));
  SheafMorphism to_h = compose(cd.h_epi, factor_through_mono(cd.z_mono, incl));
  if (!is_iso(to_h))
    throw InternalExactnessFailure("cohomology summands of I^{" + std::to_string(p) + "," +
                                   std::to_string(q) + "} do not map onto H^" + std::to_string(q));
  std::vector<Matrix> inv;
  for (const auto& c : to_h.comps) inv.push_back(inverse(c));
  return {obj, SheafMorphism::create(cd.h, obj, std::move(inv))};
}

struct CohomologyResolution {
  Resolution res;
  std::vector<SheafMorphism> from_h;  // H^q(I^{p,*}) -> res.terms[p]
};

// Resolution of H^q(input) by the vertical cohomology of the CE columns, with
// terms replaced by the isomorphic coinduced cohomology summands.
CohomologyResolution cohomology_resolution(const CEResolution& ce,
                                           const std::map<Bidegree, CohomologyData>& coh, int q) {
  CohomologyResolution out;
  Resolution& r = out.res;
  CohomologyData in = cohomology(*ce.input, q);
  r.object = in.h;
  const int w = static_cast<int>(ce.width());
  if (w == 0) return out;
  std::vector<SheafMorphism> to_h;
  for (int p = 0; p < w; ++p) {
    auto t = tagged_cohomology(ce, static_cast<std::size_t>(p), q, coh.at({p, q}));
    r.terms.push_back(t.object);
    to_h.push_back(SheafMorphism::create(t.object, coh.at({p, q}).h, [&] {
      std::vector<Matrix> m;
      for (const auto& c : t.from_h.comps) m.push_back(inverse(c));
      return m;
    }()));
    out.from_h.push_back(std::move(t.from_h));
  }
  r.augmentation = compose(out.from_h[0], induced_maps(ce.augmentation, q, in, coh.at({0, q})).h);
  for (int p = 0; p + 1 < w; ++p) {
    auto pu = static_cast<std::size_t>(p);
    auto h = induced_maps(ce.horizontal[pu], q, coh.at({p, q}), coh.at({p + 1, q})).h;
    r.differentials.push_back(compose(out.from_h[pu + 1], compose(h, to_h[pu])));
  }
  return out;
}

struct E2Comparison {
  std::map<Bidegree, Matrix> e1, e2;  // keyed by (p, q)
  std::vector<std::string> failures;
};

// E_1^{p,q} -> G(H^q(I^{p,*})) and the induced E_2 comparison with the
// horizontal cohomology of G applied to the vertical cohomology.
E2Comparison compare_e2(const CEResolution& ce, const DoubleComplex& r, const SpectralSequence& ss) {
  E2Comparison out;
  if (ce.width() == 0 || ss.pages.size() < 2) return out;
  auto coh = column_cohomology(ce);
  auto offsets = block_offsets(r);
  const Field field = r.field;
  const int w = static_cast<int>(ce.width());
  for (int q = ce.lo; q <= ce.hi; ++q) {
    CohomologyResolution hr = cohomology_resolution(ce, coh, q);
    const Resolution& hres = hr.res;
    std::vector<Matrix> xd;  // G of the horizontal maps between vertical cohomologies
    for (int p = 0; p + 1 < w; ++p) xd.push_back(sections_matrix(hres.differentials[static_cast<std::size_t>(p)]));
    auto x_dim = [&](int p) { return p >= 0 && p < w ? sections_dim(hres.terms[static_cast<std::size_t>(p)]) : 0; };
    auto x_d = [&](int p) {
      if (p >= 0 && p + 1 < w) return xd[static_cast<std::size_t>(p)];
      return Matrix(x_dim(p + 1), x_dim(p), field);
    };
    for (int p = 0; p < w; ++p) {
      const int n = p + q;
      const CohomologyData& cd = coh.at({p, q});
      Matrix reps = ss.e_reps.count({p, n}) ? ss.e_reps.at({p, n}) : Matrix(0, 0, field);
      Matrix block = reps.rows() == 0 ? Matrix(r.dim(p, q), 0, field)
                                      : reps.rows_range(offsets.at({p, q}), r.dim(p, q));
      Matrix u = solve(sections_matrix(cd.z_mono), block);
      Matrix e1 = sections_matrix(hr.from_h[static_cast<std::size_t>(p)]) * (sections_matrix(cd.h_epi) * u);
      if (e1.rows() != e1.cols() || rank(e1) != e1.rows())
        out.failures.push_back("E_1 comparison at " + pq(p, q) + " is not invertible");
      out.e1[{p, q}] = std::move(e1);
    }
    for (int p = 0; p < w; ++p) {
      const int n = p + q;
      const Matrix& e1 = out.e1.at({p, q});
      if (p + 1 < w) {
        Matrix d1 = ss.page(1).d.count({p, n}) ? ss.page(1).d.at({p, n})
                                               : Matrix(ss.page(1).dim(p + 1, n + 1), ss.page(1).dim(p, n), field);
        if (!(out.e1.at({p + 1, q}) * d1 == x_d(p) * e1))
          out.failures.push_back("E_1 comparison does not intertwine d_1 at " + pq(p, q));
      }
      CohomologySpace h = vector_cohomology(x_d(p - 1), x_d(p));
      const auto& entries = ss.page(2).entries;
      Matrix reps2 = entries.count({p, n}) ? entries.at({p, n}).reps : Matrix(e1.cols(), 0, field);
      Matrix e2 = h.proj * (e1 * reps2);
      if (e2.rows() != e2.cols() || rank(e2) != e2.rows())
        out.failures.push_back("E_2 comparison at " + pq(p, q) + " is not invertible");
      out.e2[{p, q}] = std::move(e2);
    }
  }
  return out;
}

Matrix lookup_or_zero(const std::map<Bidegree, Matrix>& m, const Bidegree& k, std::size_t rows,
                      std::size_t cols, Field f) {
  auto it = m.find(k);
  return it == m.end() ? Matrix(rows, cols, f) : it->second;
}

// Block-diagonal map Tot(src)^n -> Tot(dst)^n from entrywise maps.
Matrix total_map(const DoubleComplex& src, const DoubleComplex& dst, const TotalComplex& ts,
                 const TotalComplex& td, const std::map<Bidegree, Matrix>& entry, int n) {
  Matrix m(td.by_p.dim(n), ts.by_p.dim(n), src.field);
  for (int p = src.p_lo; p <= src.p_hi; ++p) {
    int q = n - p;
    if (q < src.q_lo || q > src.q_hi) continue;
    m.paste(td.offset.at({p, q}), ts.offset.at({p, q}), entry.at({p, q}));
  }
  (void)dst;
  return m;
}

}  // namespace

SheafPtr derived_functor(const FunctorPair& pair, const SheafPtr& a, int q, const PipelineOptions& opt) {
  Resolution m = injective_resolution(a, resolution_length(pair, opt));
  ComplexPtr fm = pair.apply(m);
  if (q == 0 && !m.terms.empty()) {
    auto h0 = cohomology(*fm, 0).h;
    if (h0->dims() != pair.apply(a)->dims())
      throw InternalExactnessFailure("R^0 F(A) differs from F(A)");
  }
  return cohomology(*fm, q).h;
}

SheafMorphism derived_functor_map(const FunctorPair& pair, const SheafMorphism& phi, int q,
                                  const PipelineOptions& opt) {
  std::size_t len = resolution_length(pair, opt);
  Resolution ra = injective_resolution(phi.source, len);
  Resolution rb = injective_resolution(phi.target, len);
  ComplexPtr fa = pair.apply(ra), fb = pair.apply(rb);
  auto lift = comparison_lift(phi, ra, rb);
  std::vector<SheafMorphism> comps;
  for (int k = fa->lo; k <= fa->hi(); ++k) {
    auto ku = static_cast<std::size_t>(k);
    comps.push_back(ku < lift.size() ? pair.apply(lift[ku]) : SheafMorphism::zero(fa->obj(k), fb->obj(k)));
  }
  return induced_maps(ChainMap::create(fa, fb, std::move(comps)), q).h;
}

SheafMorphism connecting_derived(const FunctorPair& pair, const SheafMorphism& iota,
                                 const SheafMorphism& pi, int q, const PipelineOptions& opt) {
  SESOfComplexes s = f_image_of_horseshoe(pair, iota, pi, opt);
  return connecting(s, q);
}

DoubleComplex apply_sections(const CEResolution& ce) {
  const Field field = ce.input->field;
  const int w = static_cast<int>(ce.width());
  std::map<Bidegree, std::size_t> dims;
  std::map<Bidegree, Matrix> dh, dv;
  for (int p = 0; p < w; ++p) {
    auto pu = static_cast<std::size_t>(p);
    for (int q = ce.lo; q <= ce.hi; ++q) {
      dims[{p, q}] = sections_dim(ce.entry(pu, q));
      if (p + 1 < w) dh[{p, q}] = sections_matrix(ce.dh(pu, q));
      if (q < ce.hi) dv[{p, q}] = sections_matrix(ce.dv(pu, q));
    }
  }
  return DoubleComplex::create(field, 0, w - 1, ce.lo, ce.hi, std::move(dims), std::move(dh), std::move(dv));
}

// ---------------------------------------------------------------- single object

GrothendieckData grothendieck_ss(const FunctorPair& pair, const SheafPtr& a, const PipelineOptions& opt) {
  GrothendieckData d;
  d.pair = pair;
  d.object = a;
  d.resolution = injective_resolution(a, resolution_length(pair, opt));
  if (opt.check_acyclicity) check_acyclic(pair, d.resolution);
  d.f_resolution = pair.apply(d.resolution);
  d.ce = build_ce_resolution(d.f_resolution, ce_depth(pair, opt), opt.policy);
  d.r = apply_sections(d.ce);
  d.by_p = pages_from_filtration(d.r, FiltrationMode::ByP);
  d.by_q = pages_from_filtration(d.r, FiltrationMode::ByQ);
  for (auto& f : d.by_p.failures) d.failures.push_back("first filtration: " + f);
  for (auto& f : d.by_q.failures) d.failures.push_back("second filtration: " + f);

  E2Comparison cmp = compare_e2(d.ce, d.r, d.by_p);
  d.e1_identification = std::move(cmp.e1);
  d.e2_identification = std::move(cmp.e2);
  for (auto& f : cmp.failures) d.failures.push_back(f);

  for (int q = d.f_resolution->lo; q <= d.f_resolution->hi(); ++q) {
    auto h = cohomology(*d.f_resolution, q).h;
    auto dims = cohomology_dims(h);
    for (std::size_t p = 0; p < dims.size(); ++p)
      if (dims[p] > 0) d.expected_e2[{static_cast<int>(p), q}] = dims[p];
  }
  auto e2 = d.by_p.dims_pq(2);
  for (const auto& [key, dim] : d.expected_e2) {
    auto it = e2.find(key);
    if (it == e2.end() || it->second != dim)
      d.failures.push_back("E_2" + pq(key.first, key.second) + " has dimension " +
                           std::to_string(it == e2.end() ? 0 : it->second) + ", expected " +
                           std::to_string(dim));
  }
  for (const auto& [key, dim] : e2)
    if (!d.expected_e2.count(key))
      d.failures.push_back("E_2" + pq(key.first, key.second) + " should vanish");
  return d;
}

FirstSSReport first_ss_check(const GrothendieckData& data) {
  FirstSSReport rep;
  const SpectralSequence& ss = data.by_q;
  const Field field = data.r.field;
  for (const auto& [key, e] : ss.page(1).entries) {
    const int q = key.first, p = key.second - key.first;
    if (p != 0 && e.dim != 0) {
      rep.vanishing = false;
      rep.failures.push_back("second filtration E_1 survives at " + pq(p, q));
    }
  }
  if (data.ce.width() == 0) return rep;
  TotalComplex tot = total(data.r);
  const ComplexPtr& a = data.f_resolution;
  std::map<int, Matrix> ga_d;
  for (int n = a->lo - 1; n <= a->hi(); ++n) ga_d[n] = sections_matrix(a->d(n));
  for (int n = a->lo; n <= a->hi(); ++n) {
    // G(A^n) -> R^{0,n} inside Tot^n.
    Matrix aug(tot.by_p.dim(n), sections_dim(a->obj(n)), field);
    if (n >= data.r.q_lo && n <= data.r.q_hi)
      aug.paste(tot.offset.at({0, n}), 0, sections_matrix(data.ce.augmentation.at(n)));
    const int q = n;
    Matrix e1 = lookup_or_zero(ss.e_proj, {q, n}, ss.page(1).dim(q, n), tot.by_p.dim(n), field) * aug;
    if (e1.rows() != e1.cols() || rank(e1) != e1.rows()) {
      rep.edge_iso = false;
      rep.failures.push_back("E_1^{0," + std::to_string(q) + "} is not G(A^" + std::to_string(q) + ")");
    }
    CohomologySpace src = vector_cohomology(ga_d.at(n - 1), ga_d.at(n));
    const CohomologySpace& dst = ss.total.at(n);
    Matrix induced = dst.proj * (aug * src.reps);
    if (induced.rows() != induced.cols() || rank(induced) != induced.rows()) {
      rep.quasi_iso = false;
      rep.failures.push_back("augmentation is not an isomorphism on H^" + std::to_string(n));
    }
  }
  for (int n = ss.complex.lo; n <= ss.complex.hi(); ++n) {
    if (n >= a->lo && n <= a->hi()) continue;
    if (ss.total.at(n).dim() != 0) {
      rep.quasi_iso = false;
      rep.failures.push_back("H^" + std::to_string(n) + " of the total complex should vanish");
    }
  }
  return rep;
}

// ---------------------------------------------------------------- coboundary maps

namespace {

struct TotalSES {
  TotalComplex tr, ts, tt;
  std::map<int, Matrix> iota, pi;  // Tot^n maps
};

// Connecting map of 0 -> R|_sel -> S|_sel -> T|_sel -> 0 applied to vectors of
// Tot(T)^n, where sel(n) picks the coordinates of the sub- or quotient complex.
template <class Sel>
Matrix zigzag(const TotalSES& t, int n, const Matrix& vectors, Sel sel) {
  auto cT = sel(t.tt.by_p, n), cS = sel(t.ts.by_p, n), cS1 = sel(t.ts.by_p, n + 1),
       cR1 = sel(t.tr.by_p, n + 1);
  const Field field = t.ts.by_p.field;
  Matrix pi_n = t.pi.count(n) ? t.pi.at(n) : Matrix(t.tt.by_p.dim(n), t.ts.by_p.dim(n), field);
  Matrix iota_n1 = t.iota.count(n + 1) ? t.iota.at(n + 1)
                                       : Matrix(t.ts.by_p.dim(n + 1), t.tr.by_p.dim(n + 1), field);
  Matrix lift = solve(pi_n.select_rows(cT).select_cols(cS), vectors.select_rows(cT));
  Matrix full(t.ts.by_p.dim(n), lift.cols(), field);
  for (std::size_t i = 0; i < cS.size(); ++i)
    for (std::size_t c = 0; c < lift.cols(); ++c) full.set(cS[i], c, lift(i, c));
  Matrix ds = (t.ts.by_p.diff(n) * full).select_rows(cS1);
  Matrix back = solve(iota_n1.select_rows(cS1).select_cols(cR1), ds);
  Matrix out(t.tr.by_p.dim(n + 1), back.cols(), field);
  for (std::size_t i = 0; i < cR1.size(); ++i)
    for (std::size_t c = 0; c < back.cols(); ++c) out.set(cR1[i], c, back(i, c));
  return out;
}

}  // namespace

DeltaFamily delta_morphism(const FunctorPair& pair, const SheafMorphism& iota, const SheafMorphism& pi,
                           const PipelineOptions& opt) {
  DeltaFamily fam;
  fam.pair = pair;
  fam.iota = iota;
  fam.pi = pi;
  fam.f_ses = f_image_of_horseshoe(pair, iota, pi, opt);
  fam.ce = build_ce_triple(fam.f_ses, ce_depth(pair, opt), opt.policy);
  fam.r = apply_sections(fam.ce.res[kA]);
  fam.s = apply_sections(fam.ce.res[kB]);
  fam.t = apply_sections(fam.ce.res[kC]);
  fam.ss_a = pages_from_filtration(fam.r, FiltrationMode::ByP);
  fam.ss_c = pages_from_filtration(fam.t, FiltrationMode::ByP);
  for (auto& f : fam.ss_a.failures) fam.failures.push_back("A: " + f);
  for (auto& f : fam.ss_c.failures) fam.failures.push_back("C: " + f);

  TotalSES t{total(fam.r), total(fam.s), total(fam.t), {}, {}};
  std::map<Bidegree, Matrix> ei, ep;
  for (std::size_t p = 0; p < fam.ce.row_ij.size(); ++p) {
    for (int q = fam.r.q_lo; q <= fam.r.q_hi; ++q) {
      ei[{static_cast<int>(p), q}] = sections_matrix(fam.ce.row_ij[p].at(q));
      ep[{static_cast<int>(p), q}] = sections_matrix(fam.ce.row_jk[p].at(q));
    }
  }
  const auto& fc = t.ts.by_p;
  for (int n = fc.lo; n <= fc.hi(); ++n) {
    t.iota[n] = total_map(fam.r, fam.s, t.tr, t.ts, ei, n);
    t.pi[n] = total_map(fam.s, fam.t, t.ts, t.tt, ep, n);
  }

  const Field field = fam.r.field;
  try {
    for (const auto& [key, reps] : fam.ss_c.a_reps) {
      const int p = key.first, n = key.second;
      if (n > fc.hi()) continue;
      auto sel = [p](const FilteredComplex& c, int m) { return c.coords(m, p, INT_MAX); };
      Matrix image = zigzag(t, n, reps, sel);
      fam.delta.on_a[key] = lookup_or_zero(fam.ss_a.a_proj, {p, n + 1}, 0, image.rows(), field) * image;
    }
    for (const auto& [key, reps] : fam.ss_c.e_reps) {
      const int p = key.first, n = key.second;
      if (n > fc.hi()) continue;
      auto sel = [p](const FilteredComplex& c, int m) { return c.coords(m, p, p); };
      Matrix image = zigzag(t, n, reps, sel);
      fam.delta.on_e[key] = lookup_or_zero(fam.ss_a.e_proj, {p, n + 1}, 0, image.rows(), field) * image;
    }
  } catch (const NoSolution& e) {
    throw ZigzagFailure(std::string("coboundary on the total complexes: ") + e.what());
  }

  fam.couple_signs = check_couple_morphism(fam.ss_c.couples.front(), fam.ss_a.couples.front(), fam.delta);
  if (!fam.couple_signs.failures.empty())
    throw NotACoupleMorphism(fam.couple_signs.failures.front());
  fam.pages = map_of_spectral_sequences(fam.ss_c, fam.ss_a, fam.delta);

  // Total connecting map in the class coordinates of H^n(Tot).
  const int f_lo = fam.t.p_lo;
  for (int n = fc.lo; n <= fc.hi(); ++n) {
    const auto& src = fam.ss_c.total.at(n);
    std::size_t rows = fam.ss_a.total.count(n + 1) ? fam.ss_a.total.at(n + 1).dim() : 0;
    if (src.dim() == 0 || rows == 0) {
      fam.total_connecting[n] = Matrix(rows, src.dim(), field);
      continue;
    }
    Matrix to_a = solve(src.proj * fam.ss_c.a_reps.at({f_lo, n}), Matrix::identity(src.dim(), field));
    Matrix from_a = fam.ss_a.total.at(n + 1).proj * fam.ss_a.a_reps.at({f_lo, n + 1});
    fam.total_connecting[n] = from_a * fam.delta.on_a.at({f_lo, n}) * to_a;
  }
  for (int q = fam.f_ses.lo(); q <= fam.f_ses.hi(); ++q) fam.derived_connecting.emplace(q, connecting(fam.f_ses, q));
  return fam;
}

MainTheoremReport verify_main_theorem(const DeltaFamily& fam) {
  MainTheoremReport rep;
  const Field field = fam.r.field;

  // Commutation with the differentials and passage between pages.
  for (const auto& pm : fam.pages) {
    rep.page_signs.push_back(pm.sign);
    if (!pm.sign || !pm.failures.empty()) {
      rep.commutes_with_differentials = false;
      for (const auto& f : pm.failures) rep.failures.push_back(f);
    }
  }

  // delta_2 against the derived-functor connecting map, through both E_2 comparisons.
  const CEResolution& ra = fam.ce.res[kA];
  const CEResolution& rc = fam.ce.res[kC];
  if (fam.pages.size() >= 2 && rc.width() > 0) {
    E2Comparison cmp_a = compare_e2(ra, fam.r, fam.ss_a);
    E2Comparison cmp_c = compare_e2(rc, fam.t, fam.ss_c);
    for (auto& f : cmp_a.failures) rep.failures.push_back("A: " + f);
    for (auto& f : cmp_c.failures) rep.failures.push_back("C: " + f);
    if (!cmp_a.failures.empty() || !cmp_c.failures.empty()) rep.expected_form = false;
    auto coh_a = column_cohomology(ra);
    auto coh_c = column_cohomology(rc);
    const PageMap& d2 = fam.pages[1];
    std::optional<int> sign;
    bool broken = false;
    for (int q = rc.lo; q < std::min(rc.hi, ra.hi); ++q) {
      const SheafMorphism& conn = fam.derived_connecting.at(q);
      Resolution res_c = cohomology_resolution(rc, coh_c, q).res;
      Resolution res_a = cohomology_resolution(ra, coh_a, q + 1).res;
      auto lift = comparison_lift(conn, res_c, res_a);
      const int w = static_cast<int>(rc.width());
      auto gd = [&](const Resolution& r, int p) {
        std::size_t rows = p + 1 < w ? sections_dim(r.term(static_cast<std::size_t>(p + 1))) : 0;
        std::size_t cols = p >= 0 && p < w ? sections_dim(r.term(static_cast<std::size_t>(p))) : 0;
        if (p >= 0 && p + 1 < w && static_cast<std::size_t>(p) < r.differentials.size())
          return sections_matrix(r.differentials[static_cast<std::size_t>(p)]);
        return Matrix(rows, cols, field);
      };
      for (int p = 0; p < w; ++p) {
        auto hc = vector_cohomology(gd(res_c, p - 1), gd(res_c, p));
        auto ha = vector_cohomology(gd(res_a, p - 1), gd(res_a, p));
        Matrix rpg = ha.proj * (sections_matrix(lift[static_cast<std::size_t>(p)]) * hc.reps);
        const int n = p + q;
        Matrix dl = lookup_or_zero(d2.maps, {p, n}, fam.ss_a.page(2).dim(p, n + 1), fam.ss_c.page(2).dim(p, n), field);
        Matrix e2a = lookup_or_zero(cmp_a.e2, {p, q + 1}, 0, dl.rows(), field);
        Matrix e2c = lookup_or_zero(cmp_c.e2, {p, q}, dl.cols(), 0, field);
        Matrix lhs = e2a * dl;
        Matrix rhs = rpg * e2c;
        if (p & 1) rhs = -rhs;  // totalization sign on the vertical differential
        if (lhs.is_zero() && rhs.is_zero()) continue;
        auto s = sign_relating(lhs, rhs);
        if (!s || (sign && *sign != *s)) {
          broken = true;
          rep.failures.push_back("delta_2 differs from the derived connecting map at " + pq(p, q));
        } else {
          sign = s;
        }
      }
    }
    rep.e2_sign = broken ? std::nullopt : std::optional<int>(sign.value_or(1));
    if (broken) rep.expected_form = false;
  }

  // Filtrations on total cohomology and the graded pieces against delta_inf.
  const SpectralSequence& sc = fam.ss_c;
  const SpectralSequence& sa = fam.ss_a;
  const auto& fc = sc.complex;
  std::optional<int> gsign;
  bool gbroken = false;
  for (int n = fc.lo; n <= fc.hi(); ++n) {
    const Matrix& conn = fam.total_connecting.at(n);
    const CohomologySpace& ht = sc.total.at(n);
    for (int p = fc.f_lo; p <= fc.f_hi; ++p) {
      const Subspace& fp = sc.filtration.at({p, n});
      if (fp.dim() == 0) continue;
      Matrix to_tot_c = ht.proj * sc.a_reps.at({p, n});
      Matrix lift = solve(to_tot_c, fp.basis());
      Matrix witness = fam.delta.on_a.at({p, n}) * lift;
      Matrix image = conn * fp.basis();
      Matrix via_witness = sa.total.count(n + 1)
                               ? sa.total.at(n + 1).proj * (sa.a_reps.at({p, n + 1}) * witness)
                               : Matrix(0, witness.cols(), field);
      for (std::size_t c = 0; c < image.cols(); ++c) {
        ++rep.certificates;
        if (via_witness.cols_range(c, 1) == image.cols_range(c, 1)) ++rep.certificates_verified;
      }
      if (p > fc.f_hi || !sa.total.count(n + 1)) continue;
      Subspace fp1 = sc.filtration.at({p + 1, n});
      Subspace ap = sa.filtration.at({p, n + 1}), ap1 = sa.filtration.at({p + 1, n + 1});
      if (!ap.contains(image)) continue;
      auto qt = quotient_basis(fp, fp1);
      auto qa = quotient_basis(ap, ap1);
      Matrix graded = qa.projection * (conn * qt.representatives);
      Matrix lhs = lookup_or_zero(sa.graded_iso, {p, n + 1}, 0, graded.rows(), field) * graded;
      Matrix dinf = lookup_or_zero(fam.pages.back().maps, {p, n}, lhs.rows(), 0, field);
      Matrix rhs = dinf * lookup_or_zero(sc.graded_iso, {p, n}, dinf.cols(), graded.cols(), field);
      if (lhs.is_zero() && rhs.is_zero()) continue;
      auto s = sign_relating(lhs, rhs);
      if (!s || (gsign && *gsign != *s)) {
        gbroken = true;
        rep.failures.push_back("graded piece of the connecting map differs from delta_inf at " + pq(p, n - p));
      } else {
        gsign = s;
      }
    }
  }
  rep.graded_sign = gbroken ? std::nullopt : std::optional<int>(gsign.value_or(1));
  if (gbroken || rep.certificates_verified != rep.certificates) rep.respects_filtration = false;
  if (rep.certificates_verified != rep.certificates)
    rep.failures.push_back(std::to_string(rep.certificates - rep.certificates_verified) +
                           " filtration certificates failed");
  return rep;
}

GrothendieckData leray_ss(const MonotoneMap& f, const SheafPtr& sheaf, const PipelineOptions& opt) {
  return grothendieck_ss(FunctorPair::pushforward(f), sheaf, opt);
}

LerayDelta leray_delta(const MonotoneMap& f, const SheafMorphism& iota, const SheafMorphism& pi,
                       const PipelineOptions& opt) {
  LerayDelta out;
  out.family = delta_morphism(FunctorPair::pushforward(f), iota, pi, opt);
  out.report = verify_main_theorem(out.family);
  return out;
}

AcyclicMiddleReport acyclic_middle_analysis(const MonotoneMap& f, const SheafMorphism& iota,
                                            const SheafMorphism& pi, const PipelineOptions& opt) {
  auto acyc = check_acyclic_on_all_opens(iota.target);
  if (!acyc.acyclic)
    throw PreconditionFailed("middle term has H^" + std::to_string(acyc.failing_degree) +
                             " of dimension " + std::to_string(acyc.failing_dim) + " on the open " +
                             iota.target->poset()->describe(acyc.failing_open));
  return acyclic_middle_analysis(delta_morphism(FunctorPair::pushforward(f), iota, pi, opt));
}

AcyclicMiddleReport acyclic_middle_analysis(const DeltaFamily& fam) {
  AcyclicMiddleReport rep;
  const SpectralSequence& sc = fam.ss_c;
  const SpectralSequence& sa = fam.ss_a;
  const auto& fc = sc.complex;
  for (const auto& [n, m] : fam.total_connecting) {
    bool onto = rank(m) == m.rows();
    bool iso = onto && rank(m) == m.cols();
    if (n >= 1 ? !iso : !onto) {
      rep.total_iso = false;
      rep.failures.push_back("H^" + std::to_string(n) + "(C) -> H^" + std::to_string(n + 1) +
                             "(A) is not " + (n >= 1 ? "an isomorphism" : "onto"));
    }
  }
  for (int n = fc.lo; n <= fc.hi(); ++n) {
    const Matrix& conn = fam.total_connecting.at(n);
    for (int p = fc.f_lo; p <= fc.f_hi; ++p) {
      const int q = n - p;
      if (q < 0) continue;
      const Subspace& fp = sc.filtration.at({p, n});
      Subspace target = sa.filtration.count({p, n + 1}) ? sa.filtration.at({p, n + 1})
                                                         : Subspace::zero(conn.rows(), conn.field());
      Subspace img = image_basis(conn * fp.basis());
      bool onto = img.dim() == target.dim() && img.contains(target);
      bool injective = img.dim() == fp.dim();
      if (n >= 1 ? !(onto && injective) : !onto) {
        rep.filtration_iso = false;
        rep.failures.push_back("F^" + std::to_string(p) + "H^" + std::to_string(n) +
                               "(C) -> F^" + std::to_string(p) + "H^" + std::to_string(n + 1) +
                               "(A) is not " + (n >= 1 ? "an isomorphism" : "onto"));
      }
      const Page& ec = sc.e_inf();
      const Page& ea = sa.e_inf();
      Matrix d = lookup_or_zero(fam.pages.back().maps, {p, n}, ea.dim(p, n + 1), ec.dim(p, n), conn.field());
      bool e_onto = rank(d) == d.rows();
      bool e_iso = e_onto && rank(d) == d.cols();
      if (q >= 1 ? !e_iso : !e_onto) {
        rep.e_inf_iso = false;
        rep.failures.push_back("E_inf" + pq(p, q) + "(C) -> E_inf" + pq(p, q + 1) + "(A) is not " +
                               (q >= 1 ? "an isomorphism" : "onto"));
      }
    }
  }
  return rep;
}

std::vector<std::map<Bidegree, std::size_t>> page_dimensions(const SpectralSequence& ss) {
  std::vector<std::map<Bidegree, std::size_t>> out;
  for (int r = 2; r <= ss.r_inf; ++r) {
    std::map<Bidegree, std::size_t> dims;
    for (const auto& [k, d] : ss.dims_pq(r))
      if (d != 0) dims[k] = d;
    out.push_back(std::move(dims));
  }
  return out;
}

// ---------------------------------------------------------------- reports

namespace {

nlohmann::json sign_json(const std::optional<int>& s) {
  return s ? nlohmann::json(*s) : nlohmann::json(nullptr);
}

nlohmann::json dims_json(const std::map<Bidegree, std::size_t>& dims) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& [k, d] : dims) out.push_back({{"p", k.first}, {"q", k.second}, {"dim", d}});
  return out;
}

}  // namespace

nlohmann::json to_json(const SpectralSequence& ss) {
  nlohmann::json pages = nlohmann::json::array();
  for (int r = 1; r <= ss.r_inf; ++r) {
    nlohmann::json diffs = nlohmann::json::array();
    for (const auto& [k, m] : ss.page(r).d) {
      if (m.is_zero()) continue;
      diffs.push_back({{"p", k.first}, {"q", k.second - k.first}, {"matrix", m.to_strings()}});
    }
    pages.push_back({{"r", r}, {"dims", dims_json(ss.dims_pq(r))}, {"differentials", diffs}});
  }
  nlohmann::json total = nlohmann::json::object();
  for (const auto& [n, h] : ss.total) total[std::to_string(n)] = h.dim();
  return {{"pages", pages}, {"r_inf", ss.r_inf}, {"total_dims", total}, {"failures", ss.failures}};
}

nlohmann::json to_json(const GrothendieckData& d) {
  return {{"spectral_sequence", to_json(d.by_p)},
          {"expected_e2", dims_json(d.expected_e2)},
          {"ce_width", d.ce.width()},
          {"failures", d.failures},
          {"ok", d.ok()}};
}

nlohmann::json to_json(const FirstSSReport& r) {
  return {{"vanishing", r.vanishing}, {"edge_iso", r.edge_iso}, {"quasi_iso", r.quasi_iso},
          {"failures", r.failures}, {"ok", r.ok()}};
}

nlohmann::json to_json(const MainTheoremReport& r) {
  nlohmann::json signs = nlohmann::json::array();
  for (const auto& s : r.page_signs) signs.push_back(sign_json(s));
  return {{"commutes_with_differentials", r.commutes_with_differentials},
          {"expected_form", r.expected_form},
          {"respects_filtration", r.respects_filtration},
          {"page_signs", signs},
          {"e2_sign", sign_json(r.e2_sign)},
          {"graded_sign", sign_json(r.graded_sign)},
          {"certificates", r.certificates},
          {"certificates_verified", r.certificates_verified},
          {"failures", r.failures},
          {"ok", r.ok()}};
}

nlohmann::json to_json(const AcyclicMiddleReport& r) {
  return {{"total_iso", r.total_iso}, {"filtration_iso", r.filtration_iso}, {"e_inf_iso", r.e_inf_iso},
          {"failures", r.failures}, {"ok", r.ok()}};
}

std::string page_table(const SpectralSequence& ss, int r) {
  auto dims = ss.dims_pq(r);
  const auto& c = ss.complex;
  int p_lo = c.f_lo, p_hi = c.f_hi, q_lo = 0, q_hi = 0;
  for (const auto& [k, d] : dims) {
    q_lo = std::min(q_lo, k.second);
    q_hi = std::max(q_hi, k.second);
  }
  std::ostringstream os;
  os << "E_" << r << "\n";
  for (int q = q_hi; q >= q_lo; --q) {
    os << "q=" << q << " |";
    for (int p = p_lo; p <= p_hi; ++p) {
      auto it = dims.find({p, q});
      os << ' ' << (it == dims.end() ? std::size_t{0} : it->second);
    }
    os << "\n";
  }
  os << "     +";
  for (int p = p_lo; p <= p_hi; ++p) os << "--";
  os << "\n      ";
  for (int p = p_lo; p <= p_hi; ++p) os << ' ' << p;
  os << "  (p)\n";
  return os.str();
}

}  // namespace sheafss
