#include "sheafss/forge.hpp"

#include <algorithm>
#include <string>

#include "sheafss/errors.hpp"

namespace sheafss {

void GenConfig::validate() const {
  if (max_elements == 0 || max_stalk_dim == 0 || max_degree_span == 0)
    throw PreconditionFailed("generator bounds must be positive");
}

GenConfig GenConfig::derived(std::uint64_t index) const {
  GenConfig c = *this;
  // splitmix64 step keeps neighbouring indices far apart
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  c.seed = z ^ (z >> 31);
  return c;
}

Forge::Forge(GenConfig cfg) : cfg_(cfg), rng_(cfg.seed) { cfg_.validate(); }

std::size_t Forge::below(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }

std::int64_t Forge::between(std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(below(static_cast<std::size_t>(hi - lo + 1)));
}

bool Forge::coin(unsigned percent) { return below(100) < percent; }

Matrix Forge::matrix(std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols, cfg_.field);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) m.set(r, c, cfg_.field.from_int(between(-2, 2)));
  return m;
}

PosetPtr Forge::poset() {
  // sizes are skewed towards the upper bound
  const std::size_t first = 1 + below(cfg_.max_elements);
  const std::size_t n = std::max(first, 1 + below(cfg_.max_elements));
  if (n == 1 && cfg_.max_elements == 1) return Poset::point();
  const std::size_t size = std::max<std::size_t>(n, 2);
  std::vector<std::string> names;
  for (std::size_t i = 0; i < size; ++i) names.push_back(std::string(1, static_cast<char>('a' + i)));
  std::vector<std::pair<std::size_t, std::size_t>> rel;
  if (size >= 4 && coin(65)) {
    // layered: covers only between consecutive levels, which often leaves cycles
    std::vector<std::size_t> level(size);
    const std::size_t levels = size >= 6 ? 2 + below(2) : 2;
    for (std::size_t i = 0; i < size; ++i) level[i] = i * levels / size;
    for (std::size_t i = 0; i < size; ++i)
      for (std::size_t j = i + 1; j < size; ++j)
        if (level[j] == level[i] + 1 && coin(80)) rel.emplace_back(i, j);
  } else {
    for (std::size_t i = 0; i < size; ++i)
      for (std::size_t j = i + 1; j < size; ++j)
        if (coin(35)) rel.emplace_back(i, j);
  }
  if (rel.empty()) {
    std::size_t i = below(size - 1);
    rel.emplace_back(i, i + 1 + below(size - 1 - i));
  }
  return Poset::from_relations(std::move(names), rel);
}

SheafPtr Forge::coinduced(const PosetPtr& p) {
  std::vector<CoinducedSummand> parts;
  std::vector<std::size_t> dims(p->size(), 0);
  const std::size_t attempts = 1 + below(2 * p->size());
  for (std::size_t t = 0; t < attempts; ++t) {
    std::size_t x = below(p->size());
    std::size_t m = 1 + below(2);
    bool fits = true;
    for (std::size_t y = 0; y < p->size(); ++y)
      if (p->leq(y, x) && dims[y] + m > cfg_.max_stalk_dim) fits = false;
    if (!fits) continue;
    for (std::size_t y = 0; y < p->size(); ++y)
      if (p->leq(y, x)) dims[y] += m;
    parts.push_back({x, m});
  }
  return Sheaf::coinduced(p, cfg_.field, std::move(parts));
}

SheafMorphism Forge::into_coinduced(const SheafPtr& source, const SheafPtr& target) {
  std::vector<Matrix> at_points;
  for (const auto& s : target->summands()) at_points.push_back(matrix(s.multiplicity, source->dim(s.point)));
  return morphism_to_coinduced(source, target, at_points);
}

SheafPtr Forge::sheaf(const PosetPtr& p) {
  if (coin(45)) return Sheaf::constant(p, cfg_.field, 1 + below(std::min<std::size_t>(cfg_.max_stalk_dim, 2)));
  SheafPtr i0 = coinduced(p);
  SheafPtr i1 = coinduced(p);
  return kernel(into_coinduced(i0, i1)).object;
}

MonotoneMap Forge::monotone_map(const PosetPtr& p) {
  switch (below(3)) {
    case 0:
      return MonotoneMap::to_point(p);
    case 1: {
      // height of each element, capped, onto a chain
      std::size_t len = 1 + below(3);
      PosetPtr chain = Poset::chain(len);
      std::vector<std::size_t> h(p->size(), 0);
      for (auto x : p->linear_extension())
        for (auto y : p->lower_covers(x)) h[x] = std::max(h[x], h[y] + 1);
      for (auto& v : h) v = std::min(v, len - 1);
      return MonotoneMap::create(p, chain, std::move(h));
    }
    default: {
      PosetPtr q = poset();
      for (int attempt = 0; attempt < 8; ++attempt) {
        std::vector<std::size_t> values(p->size(), 0);
        bool ok = true;
        for (auto x : p->linear_extension()) {
          std::vector<std::size_t> allowed;
          for (std::size_t y = 0; y < q->size(); ++y) {
            bool above = true;
            for (auto z : p->lower_covers(x))
              if (!q->leq(values[z], y)) above = false;
            if (above) allowed.push_back(y);
          }
          if (allowed.empty()) {
            ok = false;
            break;
          }
          values[x] = allowed[below(allowed.size())];
        }
        if (ok) return MonotoneMap::create(p, q, std::move(values));
      }
      return MonotoneMap::to_point(p);
    }
  }
}

std::pair<SheafMorphism, SheafMorphism> Forge::ses_sheaves(const PosetPtr& p) {
  if (coin(50)) {
    // injective middle term, when it stays within the stalk bound
    SheafPtr a = sheaf(p);
    SubobjectData e = injective_embed(a);
    if (stalks_within(*e.object, cfg_.max_stalk_dim)) return {e.mono, cokernel(e.mono).epi};
  }
  SheafPtr i0 = coinduced(p);
  SheafMorphism psi = into_coinduced(i0, coinduced(p));
  SubobjectData b = kernel(psi);
  SubobjectData a;
  switch (below(4)) {
    case 0:
      a = kernel(SheafMorphism::identity(b.object));
      break;
    case 1:
      a = {b.object, SheafMorphism::identity(b.object)};
      break;
    default: {
      SheafMorphism chi = into_coinduced(i0, coinduced(p));
      SubobjectData both = kernel(compose(chi, b.mono));
      a = both;
    }
  }
  QuotientData c = cokernel(a.mono);
  return {a.mono, c.epi};
}

ComplexPtr Forge::two_term_complex(const PosetPtr& p, int lo) {
  SheafPtr s = sheaf(p);
  SheafPtr i = coinduced(p);
  return Complex::create(p, cfg_.field, lo, {s, i}, {into_coinduced(s, i)});
}

SESOfComplexes Forge::ses_complexes(const PosetPtr& p) {
  for (int attempt = 0; attempt < 16; ++attempt) {
    SESOfComplexes s = draw_ses_complexes(p);
    if (within_bounds(s, cfg_)) return s;
  }
  auto [iota, pi] = ses_sheaves(p);
  auto a = Complex::single(iota.source), b = Complex::single(iota.target), c = Complex::single(pi.target);
  return SESOfComplexes::create(ChainMap::create(a, b, {iota}), ChainMap::create(b, c, {pi}));
}

SESOfComplexes Forge::draw_ses_complexes(const PosetPtr& p) {
  const std::size_t span = cfg_.max_degree_span;
  const std::size_t kind = span >= 3 ? below(3) : below(2);
  const int lo = static_cast<int>(below(2));
  if (kind == 0) {
    auto [iota, pi] = ses_sheaves(p);
    auto a = Complex::single(iota.source, lo), b = Complex::single(iota.target, lo),
         c = Complex::single(pi.target, lo);
    return SESOfComplexes::create(ChainMap::create(a, b, {iota}), ChainMap::create(b, c, {pi}));
  }
  if (kind == 1) {
    auto [iota, pi] = ses_sheaves(p);
    std::size_t len = 1 + below(span);
    const std::size_t full = default_resolution_length(*p);
    Resolution ra = injective_resolution(iota.source, full);
    Resolution rc = injective_resolution(pi.target, full);
    HorseshoeResult hs = horseshoe(iota, pi, ra, rc);
    auto trim = [&](const Resolution& r, int at) {
      std::vector<SheafPtr> obj;
      std::vector<SheafMorphism> d;
      for (std::size_t q = 0; q < len; ++q) obj.push_back(q < r.terms.size() ? r.terms[q] : Sheaf::zero(p, cfg_.field));
      for (std::size_t q = 0; q + 1 < len; ++q)
        d.push_back(q + 1 < r.terms.size() ? r.differential(q) : SheafMorphism::zero(obj[q], obj[q + 1]));
      return Complex::create(p, cfg_.field, at, std::move(obj), std::move(d));
    };
    auto m = trim(ra, lo), n = trim(hs.middle, lo), pc = trim(rc, lo);
    std::vector<SheafMorphism> ic, pcmp;
    for (std::size_t q = 0; q < len; ++q) {
      int d = lo + static_cast<int>(q);
      ic.push_back(q < hs.iota.size() ? hs.iota[q] : SheafMorphism::zero(m->obj(d), n->obj(d)));
      pcmp.push_back(q < hs.pi.size() ? hs.pi[q] : SheafMorphism::zero(n->obj(d), pc->obj(d)));
    }
    return SESOfComplexes::create(ChainMap::create(m, n, std::move(ic)),
                                  ChainMap::create(n, pc, std::move(pcmp)));
  }
  ComplexPtr x = two_term_complex(p, 1);
  std::vector<SheafMorphism> ids;
  const Scalar lambda = cfg_.field.from_int(coin(50) ? 1 : -1);
  for (const auto& o : x->objects) ids.push_back(scaled(SheafMorphism::identity(o), lambda));
  return cone_sequence(ChainMap::create(x, x, std::move(ids)));
}

bool stalks_within(const Sheaf& s, std::size_t bound) {
  for (auto d : s.dims())
    if (d > bound) return false;
  return true;
}

bool within_bounds(const SESOfComplexes& s, const GenConfig& cfg) {
  for (const ComplexPtr& c : {s.a, s.b, s.c}) {
    if (c->objects.size() > cfg.max_degree_span) return false;
    for (const auto& o : c->objects)
      if (!stalks_within(*o, cfg.max_stalk_dim)) return false;
  }
  return true;
}

ComplexPtr shifted(const ComplexPtr& x, int k) {
  std::vector<SheafMorphism> d;
  for (const auto& m : x->diffs) d.push_back((k % 2 != 0) ? -m : m);
  return Complex::create(x->poset, x->field, x->lo - k, x->objects, std::move(d));
}

SESOfComplexes cone_sequence(const ChainMap& f) {
  const ComplexPtr& x = f.source;
  const ComplexPtr& y = f.target;
  const int lo = std::min(x->lo - 1, y->lo);
  const int hi = std::max(x->hi() - 1, y->hi());
  std::vector<DirectSum> sums;
  for (int q = lo; q <= hi; ++q) sums.push_back(direct_sum({x->obj(q + 1), y->obj(q)}));
  std::vector<SheafPtr> objects;
  std::vector<SheafMorphism> diffs;
  for (const auto& s : sums) objects.push_back(s.object);
  for (int q = lo; q < hi; ++q) {
    const DirectSum& src = sums[static_cast<std::size_t>(q - lo)];
    const DirectSum& dst = sums[static_cast<std::size_t>(q - lo + 1)];
    SheafMorphism from_x = into_sum(dst, {-x->d(q + 1), f.at(q + 1)});
    SheafMorphism from_y = into_sum(dst, {SheafMorphism::zero(y->obj(q), x->obj(q + 2)), y->d(q)});
    diffs.push_back(out_of_sum(src, {from_x, from_y}));
  }
  ComplexPtr cone = Complex::create(x->poset, x->field, lo, std::move(objects), std::move(diffs));
  ComplexPtr xs = shifted(x, 1);
  // Y and X[1] padded to the cone's degree range
  auto pad = [&](const ComplexPtr& c) {
    std::vector<SheafPtr> obj;
    std::vector<SheafMorphism> d;
    for (int q = lo; q <= hi; ++q) obj.push_back(c->obj(q));
    for (int q = lo; q < hi; ++q) d.push_back(c->d(q));
    return Complex::create(c->poset, c->field, lo, std::move(obj), std::move(d));
  };
  ComplexPtr yp = pad(y), xp = pad(xs);
  std::vector<SheafMorphism> inc, proj;
  for (int q = lo; q <= hi; ++q) {
    const DirectSum& s = sums[static_cast<std::size_t>(q - lo)];
    inc.push_back(s.inclusion(1));
    proj.push_back(s.projection(0));
  }
  return SESOfComplexes::create(ChainMap::create(yp, cone, std::move(inc)),
                                ChainMap::create(cone, xp, std::move(proj)));
}

PosetPtr gen_poset(const GenConfig& cfg) { return Forge(cfg).poset(); }

SheafPtr gen_sheaf(const GenConfig& cfg, const PosetPtr& p) { return Forge(cfg).sheaf(p); }

std::pair<SheafMorphism, SheafMorphism> gen_ses_sheaves(const GenConfig& cfg, const PosetPtr& p) {
  return Forge(cfg).ses_sheaves(p);
}

SESOfComplexes gen_ses_complexes(const GenConfig& cfg, const PosetPtr& p) {
  return Forge(cfg).ses_complexes(p);
}

GeneratedInstance gen_instance(const GenConfig& cfg) {
  Forge g(cfg);
  GeneratedInstance out;
  if (cfg.max_elements >= 4 && g.coin(25)) {
    GenConfig small = cfg;
    small.max_elements = std::min<std::size_t>(3, cfg.max_elements / 2);
    Forge h(small);
    PosetPtr a = h.poset();
    small.max_elements = std::max<std::size_t>(1, cfg.max_elements / a->size());
    PosetPtr b = Forge(small.derived(1)).poset();
    out.poset = product(*a, *b);
    out.map = MonotoneMap::projection(out.poset, a, b, static_cast<int>(g.below(2)));
  } else {
    out.poset = g.poset();
    out.map = g.monotone_map(out.poset);
  }
  // constant coefficients carry the cohomology of the poset itself
  const Field f = cfg.field;
  out.sheaf = g.coin(60) ? Sheaf::constant(out.poset, f, 1) : g.sheaf(out.poset);
  if (g.coin(60)) {
    SheafPtr a = g.coin(60) ? Sheaf::constant(out.poset, f, 1) : g.sheaf(out.poset);
    SubobjectData e = injective_embed(a);
    out.iota = e.mono;
    out.pi = cokernel(e.mono).epi;
  } else {
    std::tie(out.iota, out.pi) = g.ses_sheaves(out.poset);
  }
  return out;
}

}  // namespace sheafss
