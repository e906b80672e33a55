#include "sheafss/ceres.hpp"

#include <functional>

namespace sheafss {

const std::vector<std::string>& invariant_sequence_labels() {
  static const std::vector<std::string> labels = {
      "W(A)-H(A)-W(B)", "W(B)-H(B)-W(C)", "W(C)-H(C)-W+(A)", "X(A)-Z(A)-W(B)",
      "X(B)-Z(B)-W(C)", "X(C)-Z(C)-W+(A)", "B(A)-Z(A)-H(A)", "B(B)-Z(B)-H(B)",
      "B(C)-Z(C)-H(C)", "B(A)-X(A)-W(A)", "B(B)-X(B)-W(B)", "B(C)-X(C)-W(C)",
      "Z(A)-A-B+(A)",   "Z(B)-B-B+(B)",   "Z(C)-C-B+(C)",   "X(A)-B(B)-B(C)",
      "Z(A)-Z(B)-X(C)", "Z(A)-X(B)-B(C)", "A-B-C"};
  return labels;
}

bool SESInvariants::all_exact() const {
  for (const auto& [label, ok] : label_ok)
    if (!ok) return false;
  return true;
}

namespace {

template <class Fn>
auto guarded(const std::string& what, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const InternalExactnessFailure&) {
    throw;
  } catch (const Error& e) {
    throw InternalExactnessFailure(what + ": " + e.what());
  }
}

}  // namespace

SESInvariants compute_invariants(const SESOfComplexes& s, bool strict) {
  SESInvariants inv{s, s.lo(), s.hi(), {}, {}};
  const Complex* cx[3] = {s.a.get(), s.b.get(), s.c.get()};
  const int lo = inv.lo, top = inv.hi + 2;

  std::vector<std::array<CohomologyData, 3>> coh;
  for (int q = lo; q <= top + 1; ++q) {
    std::array<CohomologyData, 3> c;
    for (int k = 0; k < 3; ++k) c[static_cast<std::size_t>(k)] = cohomology(*cx[k], q);
    coh.push_back(std::move(c));
  }
  auto idx = [&](int q) { return static_cast<std::size_t>(q - lo); };

  for (int q = lo; q <= top; ++q) {
    DegreeInvariants d;
    d.coh = coh[idx(q)];
    auto& c = d.coh;
    guarded("induced maps in degree " + std::to_string(q), [&] {
      auto mi = induced_maps(s.iota, q, c[kA], c[kB]);
      auto mp = induced_maps(s.pi, q, c[kB], c[kC]);
      d.h_iota = mi.h;
      d.z_iota = mi.z;
      d.h_pi = mp.h;
      d.z_pi = mp.z;
      d.b_pi = mp.b;
      d.conn = connecting(s, q, c[kC], coh[idx(q + 1)][kA]);
      return 0;
    });
    auto set_kernel = [&](int k, const SheafMorphism& m, bool w) {
      auto ker = kernel(m);
      if (w) {
        d.w[static_cast<std::size_t>(k)] = ker.object;
        d.w_mono[static_cast<std::size_t>(k)] = ker.mono;
      } else {
        d.x[static_cast<std::size_t>(k)] = ker.object;
        d.x_mono[static_cast<std::size_t>(k)] = ker.mono;
      }
    };
    set_kernel(kA, d.h_iota, true);
    set_kernel(kB, d.h_pi, true);
    set_kernel(kC, d.conn, true);
    set_kernel(kA, compose(d.h_iota, c[kA].h_epi), false);
    set_kernel(kB, compose(d.h_pi, c[kB].h_epi), false);
    set_kernel(kC, compose(d.conn, c[kC].h_epi), false);
    guarded("derived maps in degree " + std::to_string(q), [&] {
      for (std::size_t k = 0; k < 3; ++k) {
        d.b_to_x[k] = factor_through_mono(d.x_mono[k], c[k].b_to_z);
        d.x_to_w[k] = factor_through_mono(d.w_mono[k], compose(c[k].h_epi, d.x_mono[k]));
      }
      d.ha_to_wb = factor_through_mono(d.w_mono[kB], d.h_iota);
      d.hb_to_wc = factor_through_mono(d.w_mono[kC], d.h_pi);
      d.xa_to_bb = factor_through_mono(
          c[kB].b_mono, compose(s.iota.at(q), compose(c[kA].z_mono, d.x_mono[kA])));
      d.zb_to_xc = factor_through_mono(d.x_mono[kC], d.z_pi);
      d.za_to_xb = factor_through_mono(d.x_mono[kB], d.z_iota);
      d.xb_to_bc = factor_through_mono(
          c[kC].b_mono, compose(s.pi.at(q), compose(c[kB].z_mono, d.x_mono[kB])));
      return 0;
    });
    inv.degrees.push_back(std::move(d));
  }

  const auto& labels = invariant_sequence_labels();
  for (const auto& l : labels) inv.label_ok[l] = true;
  for (int q = lo; q < top; ++q) {
    auto& d = inv.degrees[idx(q)];
    const auto& next = inv.degrees[idx(q + 1)];
    d.hc_to_wa_next = guarded("degree " + std::to_string(q), [&] {
      return factor_through_mono(next.w_mono[kA], d.conn);
    });
    const auto& c = d.coh;
    std::vector<std::pair<SheafMorphism, SheafMorphism>> seq = {
        {d.w_mono[kA], d.ha_to_wb},
        {d.w_mono[kB], d.hb_to_wc},
        {d.w_mono[kC], d.hc_to_wa_next},
        {d.x_mono[kA], compose(d.ha_to_wb, c[kA].h_epi)},
        {d.x_mono[kB], compose(d.hb_to_wc, c[kB].h_epi)},
        {d.x_mono[kC], compose(d.hc_to_wa_next, c[kC].h_epi)},
        {c[kA].b_to_z, c[kA].h_epi},
        {c[kB].b_to_z, c[kB].h_epi},
        {c[kC].b_to_z, c[kC].h_epi},
        {d.b_to_x[kA], d.x_to_w[kA]},
        {d.b_to_x[kB], d.x_to_w[kB]},
        {d.b_to_x[kC], d.x_to_w[kC]},
        {c[kA].z_mono, next.coh[kA].d_to_b},
        {c[kB].z_mono, next.coh[kB].d_to_b},
        {c[kC].z_mono, next.coh[kC].d_to_b},
        {d.xa_to_bb, d.b_pi},
        {d.z_iota, d.zb_to_xc},
        {d.za_to_xb, d.xb_to_bc},
        {s.iota.at(q), s.pi.at(q)},
    };
    for (std::size_t i = 0; i < seq.size(); ++i) {
      const auto& [f, g] = seq[i];
      bool ok = f.target->dims() == g.source->dims() && is_mono(f) && is_epi(g) && is_exact(f, g);
      if (!ok) {
        inv.label_ok[labels[i]] = false;
        if (strict)
          throw InternalExactnessFailure(labels[i] + " is not exact in degree " + std::to_string(q));
      }
      d.sequences.push_back({labels[i], f, g});
    }
  }
  return inv;
}

std::string family_name(Family f) {
  switch (f) {
    case Family::WI: return "WI";
    case Family::WJ: return "WJ";
    case Family::WK: return "WK";
    case Family::BI: return "BI";
    case Family::BK: return "BK";
  }
  return "?";
}

std::ptrdiff_t TaggedObject::find(const Atom& a) const {
  for (std::size_t i = 0; i < atoms.size(); ++i)
    if (atoms[i] == a) return static_cast<std::ptrdiff_t>(i);
  return -1;
}

namespace {

using AtomMap = std::map<Atom, SheafMorphism>;

class TripleBuilder {
 public:
  TripleBuilder(const SESInvariants& inv, ChoicePolicy* policy)
      : inv_(inv), policy_(policy), poset_(inv.ses.b->poset), field_(inv.ses.b->field) {}

  InjectiveTriple build();

 private:
  const SESInvariants& inv_;
  ChoicePolicy* policy_;
  PosetPtr poset_;
  Field field_;
  std::map<Atom, SubobjectData> atoms_;

  const SheafMorphism& emb(Family f, int q) { return atom(f, q).mono; }
  const SheafPtr& inj(const Atom& a) { return atom(a.family, a.degree).object; }

  SubobjectData& atom(Family f, int q) {
    Atom a{f, q};
    auto it = atoms_.find(a);
    if (it != atoms_.end()) return it->second;
    SheafPtr source;
    if (q < inv_.lo || q > inv_.hi + 2) {
      source = Sheaf::zero(poset_, field_);
    } else {
      const auto& d = inv_.at(q);
      switch (f) {
        case Family::WI: source = d.w[kA]; break;
        case Family::WJ: source = d.w[kB]; break;
        case Family::WK: source = d.w[kC]; break;
        case Family::BI: source = d.coh[kA].b; break;
        case Family::BK: source = d.coh[kC].b; break;
      }
    }
    // Extra summands only where the atom sits in two adjacent built degrees.
    bool interior = q >= inv_.lo && q <= inv_.hi &&
                    !(q == inv_.lo && f != Family::WJ && f != Family::WK);
    bool saved = policy_ ? policy_->extra_summands : false;
    if (policy_ && !interior) policy_->extra_summands = false;
    auto emb = injective_embed(source, policy_);
    if (policy_) policy_->extra_summands = saved;
    return atoms_.emplace(a, std::move(emb)).first->second;
  }

  SheafMorphism extend(const SheafMorphism& m, const SheafMorphism& f) {
    return extend_along_mono(m, f, policy_);
  }

  TaggedObject tagged(std::vector<Atom> atoms, std::vector<Role> roles) {
    std::vector<SheafPtr> parts;
    for (const auto& a : atoms) parts.push_back(inj(a));
    return TaggedObject{std::move(atoms), std::move(roles), direct_sum(std::move(parts))};
  }

  SheafMorphism assemble(const TaggedObject& t, const SheafPtr& source, const AtomMap& m) {
    std::vector<SheafMorphism> maps;
    for (const auto& a : t.atoms) {
      auto it = m.find(a);
      maps.push_back(it != m.end() ? it->second : SheafMorphism::zero(source, inj(a)));
    }
    auto out = into_sum(t.sum, maps);
    out.source = source;
    return out;
  }
};

SheafMorphism atom_matching(const TaggedObject& src, const TaggedObject& dst) {
  const Poset& p = *src.object()->poset();
  Field fld = src.object()->field();
  std::vector<Matrix> comps;
  for (std::size_t x = 0; x < p.size(); ++x) {
    Matrix m(dst.object()->dim(x), src.object()->dim(x), fld);
    for (std::size_t i = 0; i < dst.atoms.size(); ++i) {
      auto j = src.find(dst.atoms[i]);
      if (j < 0) continue;
      auto ju = static_cast<std::size_t>(j);
      m.paste(dst.sum.offset(i, x), src.sum.offset(ju, x),
              Matrix::identity(dst.sum.parts[i]->dim(x), fld));
    }
    comps.push_back(std::move(m));
  }
  return SheafMorphism{src.object(), dst.object(), std::move(comps)};
}

InjectiveTriple TripleBuilder::build() {
  const SESOfComplexes& s = inv_.ses;
  const int lo = inv_.lo, hi = inv_.hi;
  using F = Family;
  // All degree-wise maps below are recorded atom by atom.
  std::map<int, AtomMap> hA, hB, hC, xA, xC, bB, zA, zC, xB, zB, alpha, beta, gamma;

  for (int q = lo; q <= hi + 1; ++q) {
    const auto& d = inv_.at(q);
    const auto& c = d.coh;
    std::string where = " in degree " + std::to_string(q);
    guarded("cohomology-level maps" + where, [&] {
      hA[q][{F::WI, q}] = extend(d.w_mono[kA], emb(F::WI, q));
      hA[q][{F::WJ, q}] = compose(emb(F::WJ, q), d.ha_to_wb);
      hB[q][{F::WJ, q}] = extend(d.w_mono[kB], emb(F::WJ, q));
      hB[q][{F::WK, q}] = compose(emb(F::WK, q), d.hb_to_wc);
      hC[q][{F::WK, q}] = extend(d.w_mono[kC], emb(F::WK, q));
      hC[q][{F::WI, q + 1}] = compose(emb(F::WI, q + 1), d.hc_to_wa_next);
      return 0;
    });
    guarded("X-level maps" + where, [&] {
      xA[q][{F::WI, q}] = compose(emb(F::WI, q), d.x_to_w[kA]);
      xA[q][{F::BI, q}] = extend(d.b_to_x[kA], emb(F::BI, q));
      xC[q][{F::WK, q}] = compose(emb(F::WK, q), d.x_to_w[kC]);
      xC[q][{F::BK, q}] = extend(d.b_to_x[kC], emb(F::BK, q));
      return 0;
    });
    guarded("coboundary map for B" + where, [&] {
      for (Family f : {F::WI, F::BI}) bB[q][{f, q}] = extend(d.xa_to_bb, xA[q][{f, q}]);
      bB[q][{F::BK, q}] = compose(emb(F::BK, q), d.b_pi);
      return 0;
    });
    guarded("cocycle maps for A and C" + where, [&] {
      for (Family f : {F::WI, F::WJ}) zA[q][{f, q}] = compose(hA[q][{f, q}], c[kA].h_epi);
      zA[q][{F::BI, q}] = extend(d.x_mono[kA], xA[q][{F::BI, q}]);
      zC[q][{F::WK, q}] = compose(hC[q][{F::WK, q}], c[kC].h_epi);
      zC[q][{F::WI, q + 1}] = compose(hC[q][{F::WI, q + 1}], c[kC].h_epi);
      zC[q][{F::BK, q}] = extend(d.x_mono[kC], xC[q][{F::BK, q}]);
      return 0;
    });
    guarded("X-level map for B through the cokernel Q" + where, [&] {
      xB[q][{F::WJ, q}] = compose(emb(F::WJ, q), d.x_to_w[kB]);
      xB[q][{F::BK, q}] = compose(emb(F::BK, q), d.xb_to_bc);
      const SheafMorphism& j1 = d.x_mono[kA];
      const SheafMorphism& j2 = d.xa_to_bb;
      DirectSum zb = direct_sum({c[kA].z, c[kB].b});
      auto q_data = cokernel(into_sum(zb, {j1, -j2}));
      SheafMorphism sigma = out_of_sum(zb, {d.za_to_xb, d.b_to_x[kB]});
      SheafMorphism q_to_xb = factor_through_epi(q_data.epi, sigma);
      if (!is_mono(q_to_xb)) throw InternalExactnessFailure("Q does not embed in X(B)");
      for (Family f : {F::WI, F::BI}) {
        SheafMorphism t = out_of_sum(zb, {zA[q][{f, q}], bB[q][{f, q}]});
        xB[q][{f, q}] = extend(q_to_xb, factor_through_epi(q_data.epi, t));
      }
      return 0;
    });
    guarded("cocycle map for B" + where, [&] {
      for (Family f : {F::WJ, F::WK}) zB[q][{f, q}] = compose(hB[q][{f, q}], c[kB].h_epi);
      zB[q][{F::BK, q}] = compose(xC[q][{F::BK, q}], d.zb_to_xc);
      for (Family f : {F::WI, F::BI}) zB[q][{f, q}] = extend(d.x_mono[kB], xB[q][{f, q}]);
      return 0;
    });
    guarded("augmentation for A" + where, [&] {
      for (Family f : {F::WI, F::WJ, F::BI}) alpha[q][{f, q}] = extend(c[kA].z_mono, zA[q][{f, q}]);
      alpha[q][{F::BI, q + 1}] = compose(emb(F::BI, q + 1), inv_.at(q + 1).coh[kA].d_to_b);
      return 0;
    });
  }

  for (int q = lo; q <= hi; ++q) {
    const auto& d = inv_.at(q);
    const auto& c = d.coh;
    const auto& nb = inv_.at(q + 1).coh;
    std::string where = " in degree " + std::to_string(q);
    SheafMorphism pi = s.pi.at(q), iota = s.iota.at(q);
    guarded("augmentation for C" + where, [&] {
      for (Family f : {F::WK, F::BK}) gamma[q][{f, q}] = extend(c[kC].z_mono, zC[q][{f, q}]);
      gamma[q][{F::WI, q + 1}] =
          factor_through_epi(pi, compose(bB[q + 1][{F::WI, q + 1}], nb[kB].d_to_b));
      gamma[q][{F::BK, q + 1}] = compose(emb(F::BK, q + 1), nb[kC].d_to_b);
      return 0;
    });
    guarded("augmentation for B" + where, [&] {
      for (const auto& [a, m] : gamma[q]) beta[q][a] = compose(m, pi);
      beta[q][{F::BI, q + 1}] = compose(bB[q + 1][{F::BI, q + 1}], nb[kB].d_to_b);
      DirectSum t = direct_sum({s.a->obj(q), c[kB].z});
      auto im = image(out_of_sum(t, {iota, c[kB].z_mono}));
      for (Family f : {F::WI, F::WJ, F::BI}) {
        SheafMorphism m = out_of_sum(t, {alpha[q][{f, q}], zB[q][{f, q}]});
        beta[q][{f, q}] = extend(im.mono, factor_through_epi(im.epi, m));
      }
      return 0;
    });
  }

  InjectiveTriple out;
  out.lo = lo;
  out.hi = hi;
  using R = Role;
  for (int q = lo; q <= hi; ++q) {
    out.objs[kA].push_back(tagged({{F::WI, q}, {F::WJ, q}, {F::BI, q}, {F::BI, q + 1}},
                                  {R::Cohomology, R::Cohomology, R::Boundary, R::Cochain}));
    out.objs[kB].push_back(tagged({{F::WI, q}, {F::WJ, q}, {F::WK, q}, {F::BI, q}, {F::BK, q},
                                   {F::WI, q + 1}, {F::BI, q + 1}, {F::BK, q + 1}},
                                  {R::Boundary, R::Cohomology, R::Cohomology, R::Boundary,
                                   R::Boundary, R::Cochain, R::Cochain, R::Cochain}));
    out.objs[kC].push_back(tagged({{F::WK, q}, {F::WI, q + 1}, {F::BK, q}, {F::BK, q + 1}},
                                  {R::Cohomology, R::Cohomology, R::Boundary, R::Cochain}));
  }
  auto idx = [&](int q) { return static_cast<std::size_t>(q - lo); };
  const ComplexPtr inputs[3] = {s.a, s.b, s.c};
  std::map<int, AtomMap>* aug[3] = {&alpha, &beta, &gamma};
  const char* names[3] = {"A -> I", "B -> J", "C -> K"};
  for (int k = 0; k < 3; ++k) {
    auto ku = static_cast<std::size_t>(k);
    std::vector<SheafPtr> objects;
    std::vector<SheafMorphism> diffs;
    for (int q = lo; q <= hi; ++q) {
      objects.push_back(out.objs[ku][idx(q)].object());
      if (q < hi) diffs.push_back(atom_matching(out.objs[ku][idx(q)], out.objs[ku][idx(q + 1)]));
    }
    out.complexes[ku] = Complex::create(poset_, field_, lo, std::move(objects), std::move(diffs));
    std::vector<SheafMorphism> comps;
    const ComplexPtr& in = inputs[k];
    for (int q = in->lo; q <= in->hi(); ++q)
      comps.push_back(assemble(out.objs[ku][idx(q)], in->obj(q), (*aug[k])[q]));
    try {
      out.augmentation[ku] = ChainMap::create(in, out.complexes[ku], std::move(comps));
    } catch (const InvalidComplex& e) {
      throw InternalCommutativityFailure(std::string(names[k]) + ": " + e.what());
    }
  }
  std::vector<SheafMorphism> ij, jk;
  for (int q = lo; q <= hi; ++q) {
    ij.push_back(atom_matching(out.objs[kA][idx(q)], out.objs[kB][idx(q)]));
    jk.push_back(atom_matching(out.objs[kB][idx(q)], out.objs[kC][idx(q)]));
  }
  try {
    out.row_ij = ChainMap::create(out.complexes[kA], out.complexes[kB], std::move(ij));
    out.row_jk = ChainMap::create(out.complexes[kB], out.complexes[kC], std::move(jk));
  } catch (const InvalidComplex& e) {
    throw InternalCommutativityFailure(std::string("row maps: ") + e.what());
  }
  for (int q = s.lo(); q <= s.hi(); ++q) {
    std::string where = " in degree " + std::to_string(q);
    if (!equal(compose(out.row_ij.at(q), out.augmentation[kA].at(q)),
               compose(out.augmentation[kB].at(q), s.iota.at(q))))
      throw InternalCommutativityFailure("square A -> B -> J vs A -> I -> J fails" + where);
    if (!equal(compose(out.row_jk.at(q), out.augmentation[kB].at(q)),
               compose(out.augmentation[kC].at(q), s.pi.at(q))))
      throw InternalCommutativityFailure("square B -> C -> K vs B -> J -> K fails" + where);
  }
  out.atoms = atoms_;
  return out;
}

std::vector<TagRange> tag_ranges(const TaggedObject& t) {
  std::vector<TagRange> out;
  std::size_t first = 0;
  for (std::size_t i = 0; i < t.atoms.size(); ++i) {
    std::size_t n = t.sum.parts[i]->summands().size();
    out.push_back({first, n, t.roles[i]});
    first += n;
  }
  return out;
}

}  // namespace

InjectiveTriple build_injective_triple(const SESInvariants& inv, ChoicePolicy* policy) {
  return TripleBuilder(inv, policy).build();
}

SheafMorphism CEResolution::dh(std::size_t p, int q) const {
  if (p < horizontal.size()) return horizontal[p].at(q);
  return SheafMorphism::zero(entry(p, q), Sheaf::zero(input->poset, input->field));
}

std::size_t default_ce_depth(const Poset& p) { return p.longest_chain_length() + 2; }

CETriple build_ce_triple(const SESOfComplexes& s, std::size_t depth, ChoicePolicy* policy) {
  if (depth < 1) throw PreconditionFailed("CE depth must be at least 1");
  CETriple t;
  const int lo = s.lo(), hi = s.hi();
  const ComplexPtr inputs[3] = {s.a, s.b, s.c};
  for (int k = 0; k < 3; ++k) {
    auto& r = t.res[static_cast<std::size_t>(k)];
    r.input = inputs[k];
    r.lo = lo;
    r.hi = hi;
  }
  SESOfComplexes cur = s;
  std::array<std::vector<SheafMorphism>, 3> prev_epi;
  bool restore_extra = policy ? policy->extra_summands : true;
  for (std::size_t p = 0;; ++p) {
    t.invariants.push_back(compute_invariants(cur));
    InjectiveTriple tri = build_injective_triple(t.invariants.back(), policy);
    if (policy) policy->extra_summands = false;
    for (std::size_t k = 0; k < 3; ++k) {
      auto& r = t.res[k];
      r.columns.push_back(tri.complexes[k]);
      std::vector<std::vector<TagRange>> tags;
      for (const auto& obj : tri.objs[k]) tags.push_back(tag_ranges(obj));
      r.tags.push_back(std::move(tags));
      if (p == 0) {
        r.augmentation = tri.augmentation[k];
      } else {
        std::vector<SheafMorphism> comps;
        for (int q = lo; q <= hi; ++q)
          comps.push_back(compose(tri.augmentation[k].at(q), prev_epi[k][static_cast<std::size_t>(q - lo)]));
        r.horizontal.push_back(ChainMap::create(r.columns[p - 1], r.columns[p], std::move(comps)));
      }
    }
    t.row_ij.push_back(tri.row_ij);
    t.row_jk.push_back(tri.row_jk);

    std::array<ComplexPtr, 3> next;
    bool all_zero = true;
    for (std::size_t k = 0; k < 3; ++k) {
      std::vector<SheafPtr> objects;
      std::vector<SheafMorphism> epis, diffs;
      for (int q = lo; q <= hi; ++q) {
        auto ck = cokernel(tri.augmentation[k].at(q));
        all_zero = all_zero && ck.object->is_zero();
        objects.push_back(ck.object);
        epis.push_back(ck.epi);
      }
      for (int q = lo; q < hi; ++q) {
        auto i = static_cast<std::size_t>(q - lo);
        diffs.push_back(factor_through_epi(epis[i], compose(epis[i + 1], tri.complexes[k]->d(q))));
      }
      next[k] = Complex::create(cur.b->poset, cur.b->field, lo, std::move(objects), std::move(diffs));
      prev_epi[k] = std::move(epis);
    }
    if (all_zero) break;
    if (p + 1 >= depth) {
      if (policy) policy->extra_summands = restore_extra;
      throw TruncationInsufficient("CE resolution needs more than " + std::to_string(depth) +
                                   " columns");
    }
    std::vector<SheafMorphism> ic, pc;
    for (int q = lo; q <= hi; ++q) {
      auto i = static_cast<std::size_t>(q - lo);
      ic.push_back(factor_through_epi(prev_epi[kA][i], compose(prev_epi[kB][i], tri.row_ij.at(q))));
      pc.push_back(factor_through_epi(prev_epi[kB][i], compose(prev_epi[kC][i], tri.row_jk.at(q))));
    }
    cur = SESOfComplexes::create(ChainMap::create(next[kA], next[kB], std::move(ic)),
                                 ChainMap::create(next[kB], next[kC], std::move(pc)));
  }
  if (policy) policy->extra_summands = restore_extra;
  return t;
}

CEResolution build_ce_resolution(const ComplexPtr& a, std::size_t depth, ChoicePolicy* policy) {
  std::vector<SheafMorphism> id, zero;
  std::vector<SheafPtr> zeros;
  for (int q = a->lo; q <= a->hi(); ++q) {
    id.push_back(SheafMorphism::identity(a->obj(q)));
    zeros.push_back(a->zero_object());
  }
  std::vector<SheafMorphism> zd;
  for (std::size_t i = 0; i + 1 < zeros.size(); ++i) zd.push_back(SheafMorphism::zero(zeros[i], zeros[i + 1]));
  auto zc = Complex::create(a->poset, a->field, a->lo, zeros, zd);
  for (int q = a->lo; q <= a->hi(); ++q) zero.push_back(SheafMorphism::zero(a->obj(q), zc->obj(q)));
  auto s = SESOfComplexes::create(ChainMap::create(a, a, std::move(id)),
                                  ChainMap::create(a, zc, std::move(zero)));
  return build_ce_triple(s, depth, policy).res[kB];
}

// ---------------------------------------------------------------- verification

namespace {

Subspace tagged_span(const Sheaf& obj, const std::vector<TagRange>& tags, std::size_t x,
                     bool include_cohomology) {
  const auto& sums = obj.summands();
  std::vector<Matrix> parts;
  for (const auto& t : tags) {
    if (t.role == Role::Cochain || (t.role == Role::Cohomology && !include_cohomology)) continue;
    for (std::size_t i = t.first_summand; i < t.first_summand + t.count; ++i) {
      if (!obj.poset()->leq(x, sums[i].point)) continue;
      std::size_t off = obj.summand_offset(i, x);
      for (std::size_t k = 0; k < sums[i].multiplicity; ++k)
        parts.push_back(Matrix::unit_column(obj.dim(x), off + k, obj.field()));
    }
  }
  return Subspace::span(Matrix::hstack(parts, obj.dim(x), obj.field()));
}

bool same_subspace(const Subspace& a, const Subspace& b) {
  return a.dim() == b.dim() && a.contains(b);
}

// 0 -> X0 -> X1 -> ... -> Xn -> 0 given by maps[0..n-1].
std::string augmented_failure(const std::vector<SheafMorphism>& maps) {
  if (maps.empty()) return {};
  if (!is_mono(maps.front())) return "not injective at the augmentation";
  for (std::size_t i = 0; i + 1 < maps.size(); ++i)
    if (!is_exact(maps[i], maps[i + 1])) return "not exact at column " + std::to_string(i);
  if (!is_epi(maps.back())) return "last column not reached";
  return {};
}

std::string where(std::size_t p, int q) {
  return "(" + std::to_string(p) + "," + std::to_string(q) + ")";
}

}  // namespace

CEReport verify_ce(const CEResolution& r) {
  CEReport rep;
  for (std::size_t p = 0; p < r.width(); ++p) {
    for (int q = r.lo; q <= r.hi; ++q) {
      const SheafPtr& e = r.entry(p, q);
      if (!e->is_coinduced()) {
        rep.injective = false;
        rep.failures.push_back("entry " + where(p, q) + " is not a sum of coinduced sheaves");
        continue;
      }
      const auto& tags = r.tags.at(p).at(static_cast<std::size_t>(q - r.lo));
      SheafMorphism dv = r.dv(p, q), dv_in = r.dv(p, q - 1);
      for (std::size_t x = 0; x < e->poset()->size(); ++x) {
        if (!same_subspace(kernel_basis(dv.at(x)), tagged_span(*e, tags, x, true))) {
          rep.cocycles = false;
          rep.failures.push_back("cocycles of " + where(p, q) + " differ from tagged span at " +
                                 e->poset()->name(x));
          break;
        }
        if (!same_subspace(image_basis(dv_in.at(x)), tagged_span(*e, tags, x, false))) {
          rep.coboundaries = false;
          rep.failures.push_back("coboundaries of " + where(p, q) +
                                 " differ from tagged span at " + e->poset()->name(x));
          break;
        }
      }
    }
  }

  for (int q = r.lo; q <= r.hi; ++q) {
    for (std::size_t p = 0; p < r.width(); ++p) {
      const ComplexPtr& src = p == 0 ? r.input : r.columns[p - 1];
      const SheafMorphism h = p == 0 ? r.augmentation.at(q) : r.dh(p - 1, q);
      const SheafMorphism h_next = p == 0 ? r.augmentation.at(q + 1) : r.dh(p - 1, q + 1);
      if (!equal(compose(r.dv(p, q), h), compose(h_next, src->d(q)))) {
        rep.squares_commute = false;
        rep.failures.push_back("square at " + where(p, q) + " does not commute");
      }
    }
  }

  for (int q = r.lo; q <= r.hi; ++q) {
    std::vector<SheafMorphism> row{r.augmentation.at(q)};
    for (std::size_t p = 0; p + 1 < r.width(); ++p) row.push_back(r.dh(p, q));
    if (auto f = augmented_failure(row); !f.empty()) {
      rep.rows_exact = false;
      rep.failures.push_back("row " + std::to_string(q) + ": " + f);
    }

    if (!rep.squares_commute) continue;
    std::vector<CohomologyData> coh{cohomology(*r.input, q)};
    for (std::size_t p = 0; p < r.width(); ++p) coh.push_back(cohomology(*r.columns[p], q));
    std::vector<SheafMorphism> zs, bs, hs;
    for (std::size_t p = 0; p < r.width(); ++p) {
      const ChainMap& m = p == 0 ? r.augmentation : r.horizontal[p - 1];
      auto ind = induced_maps(m, q, coh[p], coh[p + 1]);
      zs.push_back(ind.z);
      bs.push_back(ind.b);
      hs.push_back(ind.h);
    }
    for (auto [name, seq] : {std::pair{"cocycle", &zs}, {"coboundary", &bs}, {"cohomology", &hs}}) {
      if (auto f = augmented_failure(*seq); !f.empty()) {
        rep.cohomology = false;
        rep.failures.push_back(std::string(name) + " row " + std::to_string(q) + ": " + f);
      }
    }
  }
  return rep;
}

CEReport verify_ce_triple(const CETriple& t) {
  CEReport rep;
  const char* names[3] = {"A", "B", "C"};
  for (std::size_t k = 0; k < 3; ++k) {
    CEReport r = verify_ce(t.res[k]);
    rep.injective = rep.injective && r.injective;
    rep.rows_exact = rep.rows_exact && r.rows_exact;
    rep.cocycles = rep.cocycles && r.cocycles;
    rep.coboundaries = rep.coboundaries && r.coboundaries;
    rep.cohomology = rep.cohomology && r.cohomology;
    rep.squares_commute = rep.squares_commute && r.squares_commute;
    for (auto& f : r.failures) rep.failures.push_back(std::string(names[k]) + ": " + f);
  }
  const auto& ra = t.res[kA];
  const auto& rb = t.res[kB];
  const auto& rc = t.res[kC];
  for (std::size_t p = 0; p < t.row_ij.size(); ++p) {
    for (int q = ra.lo; q <= ra.hi; ++q) {
      SheafMorphism f = t.row_ij[p].at(q), g = t.row_jk[p].at(q);
      if (!is_mono(f) || !is_epi(g) || !is_exact(f, g)) {
        rep.rows_exact = false;
        rep.failures.push_back("I -> J -> K not exact at " + where(p, q));
      }
      if (p + 1 < t.row_ij.size()) {
        bool c1 = equal(compose(t.row_ij[p + 1].at(q), ra.dh(p, q)),
                        compose(rb.dh(p, q), f));
        bool c2 = equal(compose(t.row_jk[p + 1].at(q), rb.dh(p, q)),
                        compose(rc.dh(p, q), g));
        if (!c1 || !c2) {
          rep.rows_exact = false;
          rep.failures.push_back("row maps do not commute with horizontal maps at " + where(p, q));
        }
      }
    }
  }
  return rep;
}

}  // namespace sheafss
