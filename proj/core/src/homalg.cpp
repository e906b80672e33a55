#include "sheafss/homalg.hpp"

#include <algorithm>

namespace sheafss {

// ---------------------------------------------------------------- complexes

ComplexPtr Complex::create(PosetPtr poset, Field field, int lo, std::vector<SheafPtr> objects,
                           std::vector<SheafMorphism> diffs) {
  if (objects.empty() ? !diffs.empty() : diffs.size() + 1 != objects.size())
    throw InvalidComplex("a complex with " + std::to_string(objects.size()) + " objects needs " +
                         std::to_string(objects.empty() ? 0 : objects.size() - 1) + " differentials");
  for (std::size_t i = 0; i < diffs.size(); ++i) {
    if (diffs[i].source->dims() != objects[i]->dims() ||
        diffs[i].target->dims() != objects[i + 1]->dims())
      throw InvalidComplex("differential in degree " + std::to_string(lo + static_cast<int>(i)) +
                           " does not match its objects");
    if (i > 0 && !compose(diffs[i], diffs[i - 1]).is_zero())
      throw InvalidComplex("d after d is nonzero in degree " +
                           std::to_string(lo + static_cast<int>(i) - 1));
  }
  auto c = std::make_shared<Complex>();
  c->poset = std::move(poset);
  c->field = field;
  c->lo = lo;
  c->objects = std::move(objects);
  c->diffs = std::move(diffs);
  // Differentials must start and end at the stored objects.
  for (std::size_t i = 0; i < c->diffs.size(); ++i) {
    c->diffs[i].source = c->objects[i];
    c->diffs[i].target = c->objects[i + 1];
  }
  return c;
}

ComplexPtr Complex::zero(PosetPtr poset, Field field) {
  return create(std::move(poset), field, 0, {}, {});
}

ComplexPtr Complex::single(const SheafPtr& object, int degree) {
  return create(object->poset(), object->field(), degree, {object}, {});
}

ComplexPtr Complex::from_resolution(const Resolution& res) {
  return create(res.object->poset(), res.object->field(), 0, res.terms, res.differentials);
}

SheafPtr Complex::obj(int q) const {
  if (!in_range(q)) return zero_object();
  return objects[static_cast<std::size_t>(q - lo)];
}

SheafMorphism Complex::d(int q) const {
  if (in_range(q) && in_range(q + 1)) return diffs[static_cast<std::size_t>(q - lo)];
  return SheafMorphism::zero(obj(q), obj(q + 1));
}

ChainMap ChainMap::create(ComplexPtr source, ComplexPtr target, std::vector<SheafMorphism> comps) {
  if (comps.size() != source->objects.size())
    throw InvalidComplex("chain map needs one component per source object");
  ChainMap f{std::move(source), std::move(target), std::move(comps)};
  for (int q = f.source->lo; q <= f.source->hi(); ++q) {
    auto& c = f.comps[static_cast<std::size_t>(q - f.source->lo)];
    if (c.source->dims() != f.source->obj(q)->dims() || c.target->dims() != f.target->obj(q)->dims())
      throw InvalidComplex("chain map component in degree " + std::to_string(q) + " has the wrong shape");
    c.source = f.source->obj(q);
    c.target = f.target->obj(q);
  }
  for (int q = f.source->lo; q <= f.source->hi(); ++q)
    if (!equal(compose(f.target->d(q), f.at(q)), compose(f.at(q + 1), f.source->d(q))))
      throw InvalidComplex("chain map does not commute with d in degree " + std::to_string(q));
  return f;
}

SheafMorphism ChainMap::at(int q) const {
  if (source->in_range(q)) return comps[static_cast<std::size_t>(q - source->lo)];
  return SheafMorphism::zero(source->obj(q), target->obj(q));
}

ChainMap compose(const ChainMap& g, const ChainMap& f) {
  std::vector<SheafMorphism> c;
  for (int q = f.source->lo; q <= f.source->hi(); ++q) c.push_back(compose(g.at(q), f.at(q)));
  return ChainMap{f.source, g.target, std::move(c)};
}

SESOfComplexes SESOfComplexes::create(ChainMap iota, ChainMap pi) {
  if (iota.target != pi.source) throw InvalidComplex("SES maps do not compose");
  SESOfComplexes s{iota.source, iota.target, pi.target, std::move(iota), std::move(pi)};
  for (int q = s.lo(); q <= s.hi(); ++q) {
    auto i = s.iota.at(q), p = s.pi.at(q);
    if (!is_mono(i)) throw InvalidComplex("A -> B is not a mono in degree " + std::to_string(q));
    if (!is_epi(p)) throw InvalidComplex("B -> C is not an epi in degree " + std::to_string(q));
    if (!is_exact(i, p)) throw InvalidComplex("SES is not exact at B in degree " + std::to_string(q));
  }
  return s;
}

int SESOfComplexes::lo() const {
  int l = b->lo;
  if (!a->objects.empty()) l = std::min(l, a->lo);
  if (!c->objects.empty()) l = std::min(l, c->lo);
  return l;
}

int SESOfComplexes::hi() const {
  int h = b->hi();
  if (!a->objects.empty()) h = std::max(h, a->hi());
  if (!c->objects.empty()) h = std::max(h, c->hi());
  return h;
}

// ---------------------------------------------------------------- cohomology

CohomologyData cohomology(const Complex& c, int q) {
  CohomologyData h;
  auto k = kernel(c.d(q));
  h.z = k.object;
  h.z_mono = k.mono;
  auto im = image(c.d(q - 1));
  h.b = im.object;
  h.b_mono = im.mono;
  h.d_to_b = im.epi;
  h.b_to_z = factor_through_mono(h.z_mono, h.b_mono);
  auto ck = cokernel(h.b_to_z);
  h.h = ck.object;
  h.h_epi = ck.epi;
  return h;
}

InducedMaps induced_maps(const ChainMap& f, int q, const CohomologyData& src,
                         const CohomologyData& dst) {
  InducedMaps m;
  m.z = factor_through_mono(dst.z_mono, compose(f.at(q), src.z_mono));
  m.b = factor_through_mono(dst.b_mono, compose(f.at(q), src.b_mono));
  m.h = factor_through_epi(src.h_epi, compose(dst.h_epi, m.z));
  return m;
}

InducedMaps induced_maps(const ChainMap& f, int q) {
  return induced_maps(f, q, cohomology(*f.source, q), cohomology(*f.target, q));
}

SheafMorphism connecting(const SESOfComplexes& s, int q, const CohomologyData& hc,
                         const CohomologyData& ha) {
  const Poset& p = *s.b->poset;
  Field fld = s.b->field;
  auto pi = s.pi.at(q);
  auto iota = s.iota.at(q + 1);
  auto db = s.b->d(q);
  std::vector<Matrix> comps;
  for (std::size_t x = 0; x < p.size(); ++x) {
    auto zigzag = [&](const Matrix& cvec) {
      Matrix lift = solve(pi.at(x), cvec);
      Matrix a = solve(iota.at(x), db.at(x) * lift);
      return ha.h_epi.at(x) * solve(ha.z_mono.at(x), a);
    };
    try {
      Matrix reps = solve(hc.h_epi.at(x), Matrix::identity(hc.h->dim(x), fld));
      comps.push_back(zigzag(hc.z_mono.at(x) * reps));
      // Changing the lift by iota(a) or the cocycle by a coboundary must not matter.
      Matrix ker_pi = kernel_basis(pi.at(x)).basis();
      Matrix shift = ha.h_epi.at(x) * solve(ha.z_mono.at(x), solve(iota.at(x), db.at(x) * ker_pi));
      if (!shift.is_zero())
        throw ZigzagFailure("connecting map depends on the lift at '" + p.name(x) + "'");
      Matrix bnd = hc.b_mono.at(x);
      if (!zigzag(bnd).is_zero())
        throw ZigzagFailure("connecting map is nonzero on coboundaries at '" + p.name(x) + "'");
    } catch (const NoSolution& e) {
      throw ZigzagFailure("zigzag step failed at '" + p.name(x) + "' in degree " +
                          std::to_string(q) + ": " + e.what());
    }
  }
  try {
    return SheafMorphism::create(hc.h, ha.h, std::move(comps));
  } catch (const IllFormedMorphism& e) {
    throw ZigzagFailure(std::string("connecting map is not a sheaf morphism: ") + e.what());
  }
}

SheafMorphism connecting(const SESOfComplexes& s, int q) {
  return connecting(s, q, cohomology(*s.c, q), cohomology(*s.a, q + 1));
}

ExactnessReport les_exactness(const SESOfComplexes& s) {
  ExactnessReport rep;
  std::vector<std::pair<std::string, SheafMorphism>> chain;
  int lo = s.lo() - 1, hi = s.hi() + 1;
  std::vector<CohomologyData> ha, hb, hc;
  for (int q = lo; q <= hi + 1; ++q) {
    ha.push_back(cohomology(*s.a, q));
    hb.push_back(cohomology(*s.b, q));
    hc.push_back(cohomology(*s.c, q));
  }
  for (int q = lo; q <= hi; ++q) {
    auto i = static_cast<std::size_t>(q - lo);
    chain.emplace_back("H" + std::to_string(q) + "(A)", induced_maps(s.iota, q, ha[i], hb[i]).h);
    chain.emplace_back("H" + std::to_string(q) + "(B)", induced_maps(s.pi, q, hb[i], hc[i]).h);
    chain.emplace_back("H" + std::to_string(q) + "(C)", connecting(s, q, hc[i], ha[i + 1]));
  }
  for (std::size_t k = 0; k + 1 < chain.size(); ++k) {
    ++rep.nodes_checked;
    if (!is_exact(chain[k].second, chain[k + 1].second)) {
      rep.ok = false;
      rep.failures.push_back("not exact at " + chain[k + 1].first);
    }
  }
  return rep;
}

// ---------------------------------------------------------------- resolutions

HorseshoeResult horseshoe(const SheafMorphism& iota, const SheafMorphism& pi,
                          const Resolution& res_a, const Resolution& res_c, ChoicePolicy* policy) {
  HorseshoeResult out;
  out.middle.object = iota.target;
  std::size_t len = std::max(res_a.length(), res_c.length());
  SheafMorphism u = iota, v = pi;
  SheafMorphism ea = res_a.augmentation, ec = res_c.augmentation;
  if (res_a.terms.empty()) ea = SheafMorphism::zero(iota.source, res_a.term(0));
  if (res_c.terms.empty()) ec = SheafMorphism::zero(pi.target, res_c.term(0));
  std::optional<SheafMorphism> prev_epi;
  SheafPtr last_cokernel;
  if (len == 0) {
    if (!iota.target->is_zero()) throw ExtensionFailure("horseshoe: outer terms vanish but middle does not");
    out.middle.augmentation = SheafMorphism::zero(iota.target, Sheaf::zero(iota.target->poset(), iota.target->field()));
    return out;
  }
  for (std::size_t q = 0; q < len; ++q) {
    DirectSum sum = direct_sum({res_a.term(q), res_c.term(q)});
    SheafMorphism lambda = extend_along_mono(u, ea, policy);
    SheafMorphism eb = into_sum(sum, {lambda, compose(ec, v)});
    if (!is_mono(eb)) throw ExtensionFailure("horseshoe: middle map is not a mono in degree " + std::to_string(q));
    out.middle.terms.push_back(sum.object);
    out.iota.push_back(sum.inclusion(0));
    out.pi.push_back(sum.projection(1));
    if (prev_epi)
      out.middle.differentials.push_back(compose(eb, *prev_epi));
    else
      out.middle.augmentation = eb;
    auto ca = cokernel(ea), cb = cokernel(eb), cc = cokernel(ec);
    u = factor_through_epi(ca.epi, compose(cb.epi, sum.inclusion(0)));
    v = factor_through_epi(cb.epi, compose(cc.epi, sum.projection(1)));
    ea = factor_through_epi(ca.epi, res_a.differential(q));
    ec = factor_through_epi(cc.epi, res_c.differential(q));
    prev_epi = cb.epi;
    last_cokernel = cb.object;
  }
  if (!last_cokernel->is_zero())
    throw ExtensionFailure("horseshoe: middle resolution does not terminate with the outer ones");
  return out;
}

std::vector<SheafMorphism> comparison_lift(const SheafMorphism& phi, const Resolution& res_a,
                                           const Resolution& res_a2, ChoicePolicy* policy) {
  std::vector<SheafMorphism> f;
  if (res_a.terms.empty()) return f;
  SheafMorphism aug2 = res_a2.terms.empty() ? SheafMorphism::zero(phi.target, res_a2.term(0))
                                            : res_a2.augmentation;
  f.push_back(extend_along_mono(res_a.augmentation, compose(aug2, phi), policy));
  for (std::size_t q = 0; q + 1 < res_a.length(); ++q) {
    const SheafMorphism& prev = q == 0 ? res_a.augmentation : res_a.differentials[q - 1];
    auto ck = cokernel(prev);
    SheafMorphism mono = factor_through_epi(ck.epi, res_a.differential(q));
    SheafMorphism u = factor_through_epi(ck.epi, compose(res_a2.differential(q), f[q]));
    f.push_back(extend_along_mono(mono, u, policy));
  }
  return f;
}

}  // namespace sheafss
