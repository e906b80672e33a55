#include "sheafss/sheaf.hpp"

#include <algorithm>
#include <climits>
#include <cstdint>
#include <iterator>
#include <numeric>
#include <set>

namespace sheafss {

namespace {

bool same_poset(const PosetPtr& a, const PosetPtr& b) {
  if (a == b) return true;
  if (a->size() != b->size() || a->names() != b->names()) return false;
  for (std::size_t x = 0; x < a->size(); ++x)
    for (std::size_t y = 0; y < a->size(); ++y)
      if (a->leq(x, y) != b->leq(x, y)) return false;
  return true;
}

void require_compatible(const SheafPtr& a, const SheafPtr& b, const char* what) {
  if (!same_poset(a->poset(), b->poset()))
    throw IllFormedMorphism(std::string(what) + ": sheaves live on different posets");
  if (!(a->field() == b->field())) throw FieldMismatch(std::string(what) + ": field mismatch");
  if (a->dims() != b->dims()) throw IllFormedMorphism(std::string(what) + ": stalk dimensions differ");
}

Matrix random_matrix(std::size_t r, std::size_t c, Field f, std::mt19937_64& rng) {
  Matrix m(r, c, f);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j)
      m.set(i, j, f.from_int(static_cast<std::int64_t>(rng() % 5) - 2));
  return m;
}

}  // namespace

// ---------------------------------------------------------------- Sheaf

void Sheaf::build_rho(const std::map<std::pair<std::size_t, std::size_t>, Matrix>& cover_maps) {
  const Poset& p = *poset_;
  std::size_t n = p.size();
  rho_.assign(n * n, Matrix());
  auto cover = [&](std::size_t z, std::size_t y) -> Matrix {
    auto it = cover_maps.find({z, y});
    if (it == cover_maps.end()) return Matrix(dims_[y], dims_[z], field_);
    return it->second;
  };
  for (std::size_t y : p.linear_extension()) {
    rho_[y * n + y] = Matrix::identity(dims_[y], field_);
    for (std::size_t x = 0; x < n; ++x) {
      if (!p.less(x, y)) continue;
      bool set = false;
      for (std::size_t z : p.lower_covers(y)) {
        if (!p.leq(x, z)) continue;
        Matrix m = cover(z, y) * rho_[x * n + z];
        if (!set) {
          rho_[x * n + y] = std::move(m);
          set = true;
        } else if (!(rho_[x * n + y] == m)) {
          throw InvalidSheaf("restrictions from '" + p.name(x) + "' to '" + p.name(y) +
                             "' depend on the chosen chain");
        }
      }
    }
  }
}

SheafPtr Sheaf::create(PosetPtr poset, Field field, std::vector<std::size_t> dims,
                       const std::map<std::pair<std::size_t, std::size_t>, Matrix>& cover_maps) {
  if (dims.size() != poset->size())
    throw InvalidSheaf("expected " + std::to_string(poset->size()) + " stalk dimensions, got " +
                       std::to_string(dims.size()));
  for (const auto& [key, m] : cover_maps) {
    auto [x, y] = key;
    const auto& up = poset->upper_covers(x);
    if (std::find(up.begin(), up.end(), y) == up.end())
      throw InvalidSheaf("restriction given on non-cover " + poset->name(x) + "<" + poset->name(y));
    if (m.rows() != dims[y] || m.cols() != dims[x])
      throw InvalidSheaf("restriction " + poset->name(x) + "<" + poset->name(y) +
                         " has shape " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()) + ", expected " + std::to_string(dims[y]) +
                         "x" + std::to_string(dims[x]));
    if (!(m.field() == field)) throw FieldMismatch("restriction matrix over the wrong field");
  }
  auto s = std::shared_ptr<Sheaf>(new Sheaf());
  s->poset_ = std::move(poset);
  s->field_ = field;
  s->dims_ = std::move(dims);
  s->build_rho(cover_maps);
  return s;
}

SheafPtr Sheaf::zero(PosetPtr poset, Field field) { return coinduced(std::move(poset), field, {}); }

SheafPtr Sheaf::constant(PosetPtr poset, Field field, std::size_t dim) {
  std::map<std::pair<std::size_t, std::size_t>, Matrix> maps;
  for (auto c : poset->covers()) maps.emplace(c, Matrix::identity(dim, field));
  std::vector<std::size_t> dims(poset->size(), dim);
  return create(std::move(poset), field, std::move(dims), maps);
}

SheafPtr Sheaf::coinduced(PosetPtr poset, Field field, std::vector<CoinducedSummand> summands) {
  const Poset& p = *poset;
  std::size_t n = p.size();
  std::vector<std::size_t> dims(n, 0);
  for (const auto& s : summands) {
    if (s.point >= n) throw UnknownElement("coinduced summand point out of range");
    if (s.multiplicity == 0) throw InvalidSheaf("coinduced summand with multiplicity 0");
    for (std::size_t y = 0; y < n; ++y)
      if (p.leq(y, s.point)) dims[y] += s.multiplicity;
  }
  std::map<std::pair<std::size_t, std::size_t>, Matrix> maps;
  for (auto [y, z] : p.covers()) {
    Matrix m(dims[z], dims[y], field);
    std::size_t oy = 0, oz = 0;
    for (const auto& s : summands) {
      bool at_y = p.leq(y, s.point), at_z = p.leq(z, s.point);
      if (at_y && at_z)
        for (std::size_t k = 0; k < s.multiplicity; ++k) m.set(oz + k, oy + k, Scalar(1));
      if (at_y) oy += s.multiplicity;
      if (at_z) oz += s.multiplicity;
    }
    maps.emplace(std::make_pair(y, z), std::move(m));
  }
  auto s = std::shared_ptr<Sheaf>(new Sheaf());
  s->poset_ = std::move(poset);
  s->field_ = field;
  s->dims_ = std::move(dims);
  s->build_rho(maps);
  s->coinduced_ = std::move(summands);
  return s;
}

SheafPtr Sheaf::vector_space(std::size_t dim, Field field) {
  std::vector<CoinducedSummand> s;
  if (dim > 0) s.push_back({0, dim});
  return coinduced(Poset::point(), field, std::move(s));
}

std::size_t Sheaf::total_dim() const { return std::accumulate(dims_.begin(), dims_.end(), std::size_t{0}); }

const Matrix& Sheaf::rho(std::size_t x, std::size_t y) const {
  if (!poset_->leq(x, y))
    throw UnknownElement("no restriction from '" + poset_->name(x) + "' to '" + poset_->name(y) + "'");
  return rho_[x * poset_->size() + y];
}

const std::vector<CoinducedSummand>& Sheaf::summands() const {
  if (!coinduced_) throw NotCoinduced("sheaf is not a tagged sum of coinduced sheaves");
  return *coinduced_;
}

std::size_t Sheaf::summand_offset(std::size_t i, std::size_t y) const {
  const auto& s = summands();
  std::size_t off = 0;
  for (std::size_t j = 0; j < i; ++j)
    if (poset_->leq(y, s[j].point)) off += s[j].multiplicity;
  return off;
}

bool same_sheaf(const Sheaf& a, const Sheaf& b) {
  if (&a == &b) return true;
  if (!same_poset(a.poset(), b.poset()) || !(a.field() == b.field()) || a.dims() != b.dims())
    return false;
  for (auto [x, y] : a.poset()->covers())
    if (!(a.rho(x, y) == b.rho(x, y))) return false;
  return true;
}

// ---------------------------------------------------------------- morphisms

SheafMorphism SheafMorphism::create(SheafPtr source, SheafPtr target, std::vector<Matrix> comps) {
  if (!same_poset(source->poset(), target->poset()))
    throw IllFormedMorphism("source and target live on different posets");
  const Poset& p = *source->poset();
  if (comps.size() != p.size())
    throw IllFormedMorphism("expected " + std::to_string(p.size()) + " components, got " +
                            std::to_string(comps.size()));
  for (std::size_t x = 0; x < p.size(); ++x)
    if (comps[x].rows() != target->dim(x) || comps[x].cols() != source->dim(x))
      throw IllFormedMorphism("component at '" + p.name(x) + "' has shape " +
                              std::to_string(comps[x].rows()) + "x" +
                              std::to_string(comps[x].cols()) + ", expected " +
                              std::to_string(target->dim(x)) + "x" +
                              std::to_string(source->dim(x)));
  SheafMorphism m{std::move(source), std::move(target), std::move(comps)};
  if (auto bad = noncommuting_cover(m))
    throw IllFormedMorphism("square at " + p.name(bad->first) + "<" + p.name(bad->second) +
                            " does not commute");
  return m;
}

SheafMorphism SheafMorphism::zero(SheafPtr source, SheafPtr target) {
  std::vector<Matrix> c;
  for (std::size_t x = 0; x < source->poset()->size(); ++x)
    c.emplace_back(target->dim(x), source->dim(x), source->field());
  return SheafMorphism{std::move(source), std::move(target), std::move(c)};
}

SheafMorphism SheafMorphism::identity(SheafPtr f) {
  std::vector<Matrix> c;
  for (std::size_t x = 0; x < f->poset()->size(); ++x) c.push_back(Matrix::identity(f->dim(x), f->field()));
  return SheafMorphism{f, f, std::move(c)};
}

bool SheafMorphism::is_zero() const {
  return std::all_of(comps.begin(), comps.end(), [](const Matrix& m) { return m.is_zero(); });
}

std::optional<std::pair<std::size_t, std::size_t>> noncommuting_cover(const SheafMorphism& f) {
  for (auto [x, y] : f.source->poset()->covers())
    if (!(f.target->rho(x, y) * f.at(x) == f.at(y) * f.source->rho(x, y))) return std::make_pair(x, y);
  return std::nullopt;
}

SheafMorphism compose(const SheafMorphism& g, const SheafMorphism& f) {
  require_compatible(f.target, g.source, "compose");
  std::vector<Matrix> c;
  c.reserve(f.comps.size());
  for (std::size_t x = 0; x < f.comps.size(); ++x) c.push_back(g.at(x) * f.at(x));
  return SheafMorphism{f.source, g.target, std::move(c)};
}

SheafMorphism operator+(const SheafMorphism& a, const SheafMorphism& b) {
  require_compatible(a.source, b.source, "sum");
  require_compatible(a.target, b.target, "sum");
  std::vector<Matrix> c;
  for (std::size_t x = 0; x < a.comps.size(); ++x) c.push_back(a.at(x) + b.at(x));
  return SheafMorphism{a.source, a.target, std::move(c)};
}

SheafMorphism operator-(const SheafMorphism& a) {
  std::vector<Matrix> c;
  for (const auto& m : a.comps) c.push_back(-m);
  return SheafMorphism{a.source, a.target, std::move(c)};
}

SheafMorphism operator-(const SheafMorphism& a, const SheafMorphism& b) { return a + (-b); }

SheafMorphism scaled(const SheafMorphism& a, const Scalar& s) {
  std::vector<Matrix> c;
  for (const auto& m : a.comps) c.push_back(m.scaled(s));
  return SheafMorphism{a.source, a.target, std::move(c)};
}

bool equal(const SheafMorphism& a, const SheafMorphism& b) {
  if (a.comps.size() != b.comps.size()) return false;
  for (std::size_t x = 0; x < a.comps.size(); ++x)
    if (!(a.at(x) == b.at(x))) return false;
  return true;
}

bool is_mono(const SheafMorphism& f) {
  for (const auto& m : f.comps)
    if (rank(m) != m.cols()) return false;
  return true;
}

bool is_epi(const SheafMorphism& f) {
  for (const auto& m : f.comps)
    if (rank(m) != m.rows()) return false;
  return true;
}

bool is_iso(const SheafMorphism& f) { return is_mono(f) && is_epi(f); }

bool is_exact(const SheafMorphism& f, const SheafMorphism& g) {
  if (f.comps.size() != g.comps.size()) return false;
  for (std::size_t x = 0; x < f.comps.size(); ++x) {
    if (f.at(x).rows() != g.at(x).cols()) return false;
    if (!(g.at(x) * f.at(x)).is_zero()) return false;
    if (rank(f.at(x)) + rank(g.at(x)) != f.at(x).rows()) return false;
  }
  return true;
}

// ---------------------------------------------------------------- kernels etc.

SubobjectData kernel(const SheafMorphism& f) {
  const Poset& p = *f.source->poset();
  Field fld = f.source->field();
  std::vector<Matrix> basis;
  std::vector<std::size_t> dims;
  for (std::size_t x = 0; x < p.size(); ++x) {
    basis.push_back(kernel_basis(f.at(x)).basis());
    dims.push_back(basis.back().cols());
  }
  std::map<std::pair<std::size_t, std::size_t>, Matrix> maps;
  for (auto [x, y] : p.covers())
    maps.emplace(std::make_pair(x, y), solve(basis[y], f.source->rho(x, y) * basis[x]));
  auto k = Sheaf::create(f.source->poset(), fld, std::move(dims), maps);
  return {k, SheafMorphism{k, f.source, std::move(basis)}};
}

QuotientData cokernel(const SheafMorphism& f) {
  const Poset& p = *f.target->poset();
  Field fld = f.target->field();
  std::vector<Matrix> proj, reps;
  std::vector<std::size_t> dims;
  for (std::size_t x = 0; x < p.size(); ++x) {
    auto q = quotient_basis(Subspace::full(f.target->dim(x), fld), image_basis(f.at(x)));
    dims.push_back(q.projection.rows());
    proj.push_back(std::move(q.projection));
    reps.push_back(std::move(q.representatives));
  }
  std::map<std::pair<std::size_t, std::size_t>, Matrix> maps;
  for (auto [x, y] : p.covers())
    maps.emplace(std::make_pair(x, y), proj[y] * f.target->rho(x, y) * reps[x]);
  auto c = Sheaf::create(f.target->poset(), fld, std::move(dims), maps);
  return {c, SheafMorphism{f.target, c, std::move(proj)}};
}

ImageData image(const SheafMorphism& f) {
  const Poset& p = *f.target->poset();
  Field fld = f.target->field();
  std::vector<Matrix> basis, coimage;
  std::vector<std::size_t> dims;
  for (std::size_t x = 0; x < p.size(); ++x) {
    basis.push_back(image_basis(f.at(x)).basis());
    dims.push_back(basis.back().cols());
    coimage.push_back(solve(basis.back(), f.at(x)));
  }
  std::map<std::pair<std::size_t, std::size_t>, Matrix> maps;
  for (auto [x, y] : p.covers())
    maps.emplace(std::make_pair(x, y), solve(basis[y], f.target->rho(x, y) * basis[x]));
  auto im = Sheaf::create(f.target->poset(), fld, std::move(dims), maps);
  return {im, SheafMorphism{im, f.target, std::move(basis)},
          SheafMorphism{f.source, im, std::move(coimage)}};
}

// ---------------------------------------------------------------- direct sums

std::size_t DirectSum::offset(std::size_t part, std::size_t x) const {
  std::size_t off = 0;
  for (std::size_t i = 0; i < part; ++i) off += parts[i]->dim(x);
  return off;
}

SheafMorphism DirectSum::inclusion(std::size_t part) const {
  std::vector<Matrix> c;
  for (std::size_t x = 0; x < object->poset()->size(); ++x) {
    Matrix m(object->dim(x), parts[part]->dim(x), object->field());
    m.paste(offset(part, x), 0, Matrix::identity(parts[part]->dim(x), object->field()));
    c.push_back(std::move(m));
  }
  return SheafMorphism{parts[part], object, std::move(c)};
}

SheafMorphism DirectSum::projection(std::size_t part) const {
  std::vector<Matrix> c;
  for (std::size_t x = 0; x < object->poset()->size(); ++x) {
    Matrix m(parts[part]->dim(x), object->dim(x), object->field());
    m.paste(0, offset(part, x), Matrix::identity(parts[part]->dim(x), object->field()));
    c.push_back(std::move(m));
  }
  return SheafMorphism{object, parts[part], std::move(c)};
}

DirectSum direct_sum(std::vector<SheafPtr> parts) {
  if (parts.empty()) throw IllFormedMorphism("direct sum of no parts needs a poset");
  PosetPtr poset = parts.front()->poset();
  Field fld = parts.front()->field();
  bool all_coinduced = true;
  for (const auto& s : parts) {
    if (!same_poset(s->poset(), poset)) throw IllFormedMorphism("direct sum across posets");
    if (!(s->field() == fld)) throw FieldMismatch("direct sum across fields");
    all_coinduced = all_coinduced && s->is_coinduced();
  }
  if (all_coinduced) {
    std::vector<CoinducedSummand> sum;
    for (const auto& s : parts) sum.insert(sum.end(), s->summands().begin(), s->summands().end());
    return DirectSum{Sheaf::coinduced(poset, fld, std::move(sum)), std::move(parts)};
  }
  std::vector<std::size_t> dims(poset->size(), 0);
  for (const auto& s : parts)
    for (std::size_t x = 0; x < poset->size(); ++x) dims[x] += s->dim(x);
  std::map<std::pair<std::size_t, std::size_t>, Matrix> maps;
  for (auto [x, y] : poset->covers()) {
    std::vector<Matrix> blocks;
    for (const auto& s : parts) blocks.push_back(s->rho(x, y));
    maps.emplace(std::make_pair(x, y), Matrix::block_diag(blocks, fld));
  }
  return DirectSum{Sheaf::create(poset, fld, std::move(dims), maps), std::move(parts)};
}

SheafMorphism into_sum(const DirectSum& sum, const std::vector<SheafMorphism>& maps) {
  if (maps.size() != sum.parts.size()) throw IllFormedMorphism("into_sum: wrong number of maps");
  const auto& src = maps.front().source;
  std::vector<Matrix> c;
  for (std::size_t x = 0; x < sum.object->poset()->size(); ++x) {
    std::vector<Matrix> rows;
    for (std::size_t i = 0; i < maps.size(); ++i) {
      if (maps[i].at(x).rows() != sum.parts[i]->dim(x) || maps[i].at(x).cols() != src->dim(x))
        throw IllFormedMorphism("into_sum: map " + std::to_string(i) + " has the wrong shape");
      rows.push_back(maps[i].at(x));
    }
    c.push_back(Matrix::vstack(rows, src->dim(x), src->field()));
  }
  return SheafMorphism{src, sum.object, std::move(c)};
}

SheafMorphism out_of_sum(const DirectSum& sum, const std::vector<SheafMorphism>& maps) {
  if (maps.size() != sum.parts.size()) throw IllFormedMorphism("out_of_sum: wrong number of maps");
  const auto& tgt = maps.front().target;
  std::vector<Matrix> c;
  for (std::size_t x = 0; x < sum.object->poset()->size(); ++x) {
    std::vector<Matrix> cols;
    for (std::size_t i = 0; i < maps.size(); ++i) {
      if (maps[i].at(x).cols() != sum.parts[i]->dim(x) || maps[i].at(x).rows() != tgt->dim(x))
        throw IllFormedMorphism("out_of_sum: map " + std::to_string(i) + " has the wrong shape");
      cols.push_back(maps[i].at(x));
    }
    c.push_back(Matrix::hstack(cols, tgt->dim(x), tgt->field()));
  }
  return SheafMorphism{sum.object, tgt, std::move(c)};
}

SheafMorphism factor_through_mono(const SheafMorphism& m, const SheafMorphism& f) {
  std::vector<Matrix> c;
  const Poset& p = *m.source->poset();
  for (std::size_t x = 0; x < p.size(); ++x) {
    try {
      c.push_back(solve(m.at(x), f.at(x)));
    } catch (const NoSolution& e) {
      throw ExtensionFailure("map does not factor through the mono at '" + p.name(x) + "': " + e.what());
    }
  }
  return SheafMorphism{f.source, m.source, std::move(c)};
}

SheafMorphism factor_through_epi(const SheafMorphism& e, const SheafMorphism& f) {
  std::vector<Matrix> c;
  const Poset& p = *e.source->poset();
  for (std::size_t x = 0; x < p.size(); ++x) {
    Matrix section = solve(e.at(x), Matrix::identity(e.at(x).rows(), e.source->field()));
    c.push_back(f.at(x) * section);
  }
  SheafMorphism h{e.target, f.target, std::move(c)};
  if (!equal(compose(h, e), f))
    throw ExtensionFailure("map does not vanish on the kernel of the epi");
  return h;
}

// ---------------------------------------------------------------- sections

namespace {

void require_open(const Poset& p, const ElementSet& u) {
  if (!p.is_open(u)) throw NotOpen(p.describe(u) + " is not open (not an up-set)");
}

std::vector<std::size_t> layout(const Sheaf& f, const ElementSet& u, std::size_t& total) {
  std::vector<std::size_t> off;
  total = 0;
  for (auto x : u) {
    off.push_back(total);
    total += f.dim(x);
  }
  return off;
}

}  // namespace

Sections sections(const Sheaf& f, const ElementSet& open) {
  const Poset& p = *f.poset();
  require_open(p, open);
  Field fld = f.field();
  Sections s;
  s.elements = open;
  std::size_t total = 0;
  s.offsets = layout(f, open, total);
  if (f.is_coinduced()) {
    std::vector<bool> in(p.size(), false);
    for (auto x : open) in[x] = true;
    const auto& sums = f.summands();
    std::size_t count = 0;
    for (const auto& sm : sums)
      if (in[sm.point]) count += sm.multiplicity;
    s.basis = Matrix(total, count, fld);
    std::size_t col = 0;
    for (std::size_t i = 0; i < sums.size(); ++i) {
      if (!in[sums[i].point]) continue;
      for (std::size_t k = 0; k < sums[i].multiplicity; ++k, ++col)
        for (std::size_t j = 0; j < open.size(); ++j)
          if (p.leq(open[j], sums[i].point))
            s.basis.set(s.offsets[j] + f.summand_offset(i, open[j]) + k, col, Scalar(1));
    }
    return s;
  }
  std::vector<std::size_t> pos(p.size(), SIZE_MAX);
  for (std::size_t j = 0; j < open.size(); ++j) pos[open[j]] = j;
  std::size_t rows = 0;
  std::vector<std::pair<std::size_t, std::size_t>> inner;
  for (auto [x, y] : p.covers())
    if (pos[x] != SIZE_MAX && pos[y] != SIZE_MAX) {
      inner.emplace_back(x, y);
      rows += f.dim(y);
    }
  Matrix diff(rows, total, fld);
  std::size_t r = 0;
  for (auto [x, y] : inner) {
    diff.paste(r, s.offsets[pos[x]], f.rho(x, y));
    diff.paste(r, s.offsets[pos[y]], -Matrix::identity(f.dim(y), fld));
    r += f.dim(y);
  }
  s.basis = kernel_basis(diff).basis();
  return s;
}

Matrix section_coords(const Sections& s, const Matrix& vectors) { return solve(s.basis, vectors); }

Matrix section_map(const SheafMorphism& f, const ElementSet& open, const Sections& src,
                   const Sections& dst) {
  Field fld = f.source->field();
  std::size_t total = 0;
  for (auto x : open) total += f.target->dim(x);
  Matrix image(total, src.dim(), fld);
  for (std::size_t j = 0; j < open.size(); ++j) {
    std::size_t x = open[j];
    image.paste(dst.offsets[j], 0, f.at(x) * src.basis.rows_range(src.offsets[j], f.source->dim(x)));
  }
  return section_coords(dst, image);
}

Matrix section_map(const SheafMorphism& f, const ElementSet& open) {
  return section_map(f, open, sections(*f.source, open), sections(*f.target, open));
}

SheafPtr gamma(const Sheaf& f) {
  return Sheaf::vector_space(sections(f, f.poset()->all()).dim(), f.field());
}

SheafMorphism gamma(const SheafMorphism& f) {
  auto all = f.source->poset()->all();
  auto src = sections(*f.source, all);
  auto dst = sections(*f.target, all);
  Matrix m = section_map(f, all, src, dst);
  return SheafMorphism{Sheaf::vector_space(src.dim(), f.source->field()),
                       Sheaf::vector_space(dst.dim(), f.source->field()), {std::move(m)}};
}

// ---------------------------------------------------------------- pushforward

namespace {

// Restriction of section vectors from open `u` to the smaller open `v`.
Matrix restrict_vectors(const Sheaf& f, const Sections& from, const ElementSet& v,
                        const Sections& to) {
  Field fld = f.field();
  std::size_t total = 0;
  for (auto x : v) total += f.dim(x);
  Matrix out(total, from.dim(), fld);
  std::size_t j = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    while (from.elements[j] != v[i]) ++j;
    out.paste(to.offsets[i], 0, from.basis.rows_range(from.offsets[j], f.dim(v[i])));
  }
  return out;
}

struct PushData {
  std::vector<ElementSet> opens;
  std::vector<Sections> secs;
  SheafPtr sheaf;
};

PushData push_data(const MonotoneMap& f, const SheafPtr& sheaf) {
  if (!same_poset(f.source, sheaf->poset()))
    throw IllFormedMorphism("pushforward: sheaf does not live on the source of the map");
  const Poset& t = *f.target;
  PushData d;
  std::vector<std::size_t> dims;
  for (std::size_t q = 0; q < t.size(); ++q) {
    d.opens.push_back(preimage(f, t.up_set(q)));
    d.secs.push_back(sections(*sheaf, d.opens.back()));
    dims.push_back(d.secs.back().dim());
  }
  std::map<std::pair<std::size_t, std::size_t>, Matrix> maps;
  for (auto [q, r] : t.covers()) {
    Matrix restricted = restrict_vectors(*sheaf, d.secs[q], d.opens[r], d.secs[r]);
    maps.emplace(std::make_pair(q, r), section_coords(d.secs[r], restricted));
  }
  SheafPtr general = Sheaf::create(f.target, sheaf->field(), dims, maps);
  if (sheaf->is_coinduced()) {
    std::vector<CoinducedSummand> pushed;
    for (const auto& s : sheaf->summands()) pushed.push_back({f(s.point), s.multiplicity});
    SheafPtr tagged = Sheaf::coinduced(f.target, sheaf->field(), std::move(pushed));
    if (!same_sheaf(*tagged, *general))
      throw InvalidSheaf("pushforward of a coinduced sheaf is not the expected coinduced sheaf");
    d.sheaf = tagged;
  } else {
    d.sheaf = general;
  }
  return d;
}

}  // namespace

SheafPtr pushforward(const MonotoneMap& f, const SheafPtr& sheaf) { return push_data(f, sheaf).sheaf; }

SheafMorphism pushforward(const MonotoneMap& f, const SheafMorphism& phi) {
  PushData s = push_data(f, phi.source);
  PushData t = push_data(f, phi.target);
  std::vector<Matrix> c;
  for (std::size_t q = 0; q < f.target->size(); ++q)
    c.push_back(section_map(phi, s.opens[q], s.secs[q], t.secs[q]));
  return SheafMorphism{s.sheaf, t.sheaf, std::move(c)};
}

// ---------------------------------------------------------------- injectives

SheafMorphism morphism_to_coinduced(const SheafPtr& source, const SheafPtr& target,
                                    const std::vector<Matrix>& at_points) {
  const auto& sums = target->summands();
  if (at_points.size() != sums.size())
    throw IllFormedMorphism("need one map per coinduced summand");
  const Poset& p = *source->poset();
  Field fld = source->field();
  std::vector<Matrix> c;
  for (std::size_t y = 0; y < p.size(); ++y) {
    Matrix m(target->dim(y), source->dim(y), fld);
    std::size_t off = 0;
    for (std::size_t i = 0; i < sums.size(); ++i) {
      if (!p.leq(y, sums[i].point)) continue;
      const Matrix& a = at_points[i];
      if (a.rows() != sums[i].multiplicity || a.cols() != source->dim(sums[i].point))
        throw IllFormedMorphism("map into summand " + std::to_string(i) + " has the wrong shape");
      m.paste(off, 0, a * source->rho(y, sums[i].point));
      off += sums[i].multiplicity;
    }
    c.push_back(std::move(m));
  }
  return SheafMorphism{source, target, std::move(c)};
}

SubobjectData injective_embed(const SheafPtr& f, ChoicePolicy* policy) {
  const Poset& p = *f->poset();
  std::vector<CoinducedSummand> sums;
  std::vector<Matrix> at;
  if (f->is_coinduced()) {
    // already injective: embed onto its own summands
    sums = f->summands();
    for (std::size_t i = 0; i < sums.size(); ++i) {
      const std::size_t x = sums[i].point;
      at.push_back(Matrix::identity(f->dim(x), f->field())
                       .rows_range(f->summand_offset(i, x), sums[i].multiplicity));
    }
  } else {
    for (std::size_t x = 0; x < p.size(); ++x)
      if (f->dim(x) > 0) {
        sums.push_back({x, f->dim(x)});
        at.push_back(Matrix::identity(f->dim(x), f->field()));
      }
  }
  if (policy && policy->perturb && policy->extra_summands && p.size() > 0) {
    std::size_t extra = policy->rng() % 3;
    for (std::size_t e = 0; e < extra; ++e) {
      std::size_t x = policy->rng() % p.size();
      sums.push_back({x, 1});
      at.push_back(random_matrix(1, f->dim(x), f->field(), policy->rng));
    }
  }
  auto target = Sheaf::coinduced(f->poset(), f->field(), std::move(sums));
  return {target, morphism_to_coinduced(f, target, at)};
}

SheafMorphism extend_along_mono(const SheafMorphism& m, const SheafMorphism& f,
                                ChoicePolicy* policy) {
  if (!is_mono(m)) throw NotMono("extend_along_mono: the given map is not a mono");
  const SheafPtr& target = f.target;
  const auto& sums = target->summands();
  const SheafPtr& b = m.target;
  Field fld = b->field();
  std::map<std::size_t, Matrix> inv_cache;
  std::map<std::size_t, std::size_t> comp_dim;
  std::vector<Matrix> at;
  for (std::size_t i = 0; i < sums.size(); ++i) {
    std::size_t x = sums[i].point;
    auto it = inv_cache.find(x);
    if (it == inv_cache.end()) {
      Matrix c = complement(image_basis(m.at(x))).basis();
      comp_dim[x] = c.cols();
      it = inv_cache.emplace(x, inverse(Matrix::hstack(m.at(x), c))).first;
    }
    Matrix fi = f.at(x).rows_range(target->summand_offset(i, x), sums[i].multiplicity);
    Matrix free = (policy && policy->perturb)
                      ? random_matrix(sums[i].multiplicity, comp_dim[x], fld, policy->rng)
                      : Matrix(sums[i].multiplicity, comp_dim[x], fld);
    at.push_back(Matrix::hstack(fi, free) * it->second);
  }
  SheafMorphism g = morphism_to_coinduced(b, target, at);
  if (!equal(compose(g, m), f))
    throw ExtensionFailure("extension does not restrict to the given map (is it a morphism?)");
  return g;
}

SheafPtr Resolution::term(std::size_t q) const {
  if (q < terms.size()) return terms[q];
  return Sheaf::zero(object->poset(), object->field());
}

SheafMorphism Resolution::differential(std::size_t q) const {
  if (q < differentials.size()) return differentials[q];
  return SheafMorphism::zero(term(q), term(q + 1));
}

std::size_t default_resolution_length(const Poset& p) { return p.longest_chain_length() + 2; }

Resolution injective_resolution(const SheafPtr& f, std::size_t max_len, ChoicePolicy* policy) {
  Resolution res;
  res.object = f;
  if (f->is_zero()) {
    res.augmentation = SheafMorphism::zero(f, Sheaf::zero(f->poset(), f->field()));
    return res;
  }
  if (policy && policy->perturb && max_len < default_resolution_length(*f->poset()))
    throw TruncationInsufficient("perturbed resolutions need at least longest chain + 2 terms");
  SheafPtr current = f;
  std::optional<SheafMorphism> prev_epi;
  for (std::size_t step = 0;; ++step) {
    // Extra summands only in the first step keep the length bound intact.
    auto emb = injective_embed(current, step == 0 ? policy : nullptr);
    res.terms.push_back(emb.object);
    if (prev_epi)
      res.differentials.push_back(compose(emb.mono, *prev_epi));
    else
      res.augmentation = emb.mono;
    auto coker = cokernel(emb.mono);
    if (coker.object->is_zero()) break;
    if (res.terms.size() >= max_len)
      throw TruncationInsufficient("resolution does not terminate within " +
                                   std::to_string(max_len) + " terms");
    current = coker.object;
    prev_epi = coker.epi;
  }
  return res;
}

std::vector<std::size_t> cohomology_dims(const SheafPtr& f) {
  std::size_t len = default_resolution_length(*f->poset());
  Resolution res = injective_resolution(f, len);
  std::vector<std::size_t> g, r;
  for (std::size_t q = 0; q < len; ++q) g.push_back(sections(*res.term(q), f->poset()->all()).dim());
  for (std::size_t q = 0; q < len; ++q)
    r.push_back(q + 1 < len && q < res.differentials.size() ? rank(gamma(res.differentials[q]).at(0)) : 0);
  std::vector<std::size_t> h(len, 0);
  for (std::size_t q = 0; q < len; ++q) h[q] = g[q] - r[q] - (q > 0 ? r[q - 1] : 0);
  return h;
}

SheafPtr restrict_to_open(const SheafPtr& f, const ElementSet& open) {
  const Poset& p = *f->poset();
  require_open(p, open);
  PosetPtr sub = p.induced(open);
  if (f->is_coinduced()) {
    std::vector<std::size_t> pos(p.size(), SIZE_MAX);
    for (std::size_t j = 0; j < open.size(); ++j) pos[open[j]] = j;
    std::vector<CoinducedSummand> kept;
    for (const auto& s : f->summands())
      if (pos[s.point] != SIZE_MAX) kept.push_back({pos[s.point], s.multiplicity});
    return Sheaf::coinduced(sub, f->field(), std::move(kept));
  }
  std::vector<std::size_t> dims;
  for (auto x : open) dims.push_back(f->dim(x));
  std::map<std::pair<std::size_t, std::size_t>, Matrix> maps;
  for (auto [i, j] : sub->covers()) maps.emplace(std::make_pair(i, j), f->rho(open[i], open[j]));
  return Sheaf::create(sub, f->field(), std::move(dims), maps);
}

AcyclicityReport check_acyclic_on_all_opens(const SheafPtr& f) {
  const Poset& p = *f->poset();
  AcyclicityReport rep;
  auto opens = all_open_sets(p, 512);
  if (opens.empty()) {
    rep.exhaustive = false;
    std::set<ElementSet> gen;
    for (std::size_t x = 0; x < p.size(); ++x)
      for (std::size_t y = x; y < p.size(); ++y) {
        ElementSet u = p.up_set(x), v = p.up_set(y), w;
        std::set_union(u.begin(), u.end(), v.begin(), v.end(), std::back_inserter(w));
        gen.insert(w);
      }
    gen.insert(p.all());
    opens.assign(gen.begin(), gen.end());
  }
  for (const auto& u : opens) {
    if (u.empty()) continue;
    ++rep.opens_checked;
    auto h = cohomology_dims(restrict_to_open(f, u));
    for (std::size_t q = 1; q < h.size(); ++q)
      if (h[q] != 0) {
        rep.acyclic = false;
        rep.failing_open = u;
        rep.failing_degree = q;
        rep.failing_dim = h[q];
        return rep;
      }
  }
  return rep;
}

std::vector<SheafMorphism> hom_space(const SheafPtr& f, const SheafPtr& g) {
  const Poset& p = *f->poset();
  Field fld = f->field();
  std::vector<std::size_t> off(p.size() + 1, 0);
  for (std::size_t x = 0; x < p.size(); ++x) off[x + 1] = off[x] + g->dim(x) * f->dim(x);
  std::size_t rows = 0;
  for (auto [x, y] : p.covers()) rows += g->dim(y) * f->dim(x);
  Matrix eq(rows, off.back(), fld);
  std::size_t r = 0;
  for (auto [x, y] : p.covers()) {
    const Matrix& rg = g->rho(x, y);
    const Matrix& rf = f->rho(x, y);
    std::size_t fx = f->dim(x), fy = f->dim(y), gx = g->dim(x), gy = g->dim(y);
    for (std::size_t i = 0; i < gy; ++i)
      for (std::size_t j = 0; j < fx; ++j, ++r) {
        for (std::size_t k = 0; k < gx; ++k)
          if (!rg(i, k).is_zero()) eq.set(r, off[x] + k * fx + j, fld.add(eq(r, off[x] + k * fx + j), rg(i, k)));
        for (std::size_t k = 0; k < fy; ++k)
          if (!rf(k, j).is_zero())
            eq.set(r, off[y] + i * fy + k, fld.sub(eq(r, off[y] + i * fy + k), rf(k, j)));
      }
  }
  Subspace sol = kernel_basis(eq);
  std::vector<SheafMorphism> out;
  for (std::size_t b = 0; b < sol.dim(); ++b) {
    std::vector<Matrix> c;
    for (std::size_t x = 0; x < p.size(); ++x) {
      Matrix m(g->dim(x), f->dim(x), fld);
      for (std::size_t i = 0; i < g->dim(x); ++i)
        for (std::size_t j = 0; j < f->dim(x); ++j) m.set(i, j, sol.basis()(off[x] + i * f->dim(x) + j, b));
      c.push_back(std::move(m));
    }
    out.push_back(SheafMorphism{f, g, std::move(c)});
  }
  return out;
}

}  // namespace sheafss
