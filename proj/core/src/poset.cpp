#include "sheafss/poset.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace sheafss {

PosetPtr Poset::build(std::vector<std::string> elements, std::vector<bool> leq) {
  std::size_t n = elements.size();
  auto p = std::shared_ptr<Poset>(new Poset());
  p->names_ = std::move(elements);
  for (std::size_t i = 0; i < n; ++i) {
    if (p->names_[i].empty()) throw InvalidPoset("empty element name");
    if (!p->index_.emplace(p->names_[i], i).second)
      throw InvalidPoset("duplicate element '" + p->names_[i] + "'");
  }
  // transitive closure
  for (std::size_t i = 0; i < n; ++i) leq[i * n + i] = true;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (leq[i * n + k])
        for (std::size_t j = 0; j < n; ++j)
          if (leq[k * n + j]) leq[i * n + j] = true;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (leq[i * n + j] && leq[j * n + i])
        throw InvalidPoset("order relation has a cycle through '" + p->names_[i] + "' and '" +
                           p->names_[j] + "'");
  p->leq_ = std::move(leq);
  p->up_.assign(n, {});
  p->down_.assign(n, {});
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) {
      if (!p->less(x, y)) continue;
      bool cover = true;
      for (std::size_t z = 0; z < n && cover; ++z)
        if (p->less(x, z) && p->less(z, y)) cover = false;
      if (cover) {
        p->covers_.emplace_back(x, y);
        p->up_[x].push_back(y);
        p->down_[y].push_back(x);
      }
    }
  // Kahn's algorithm, smallest index first for determinism.
  std::vector<std::size_t> indeg(n);
  for (std::size_t y = 0; y < n; ++y) indeg[y] = p->down_[y].size();
  std::set<std::size_t> ready;
  for (std::size_t x = 0; x < n; ++x)
    if (indeg[x] == 0) ready.insert(x);
  std::vector<std::size_t> height(n, 0);
  while (!ready.empty()) {
    std::size_t x = *ready.begin();
    ready.erase(ready.begin());
    p->linear_.push_back(x);
    for (std::size_t y : p->up_[x]) {
      height[y] = std::max(height[y], height[x] + 1);
      if (--indeg[y] == 0) ready.insert(y);
    }
  }
  for (auto h : height) p->height_ = std::max(p->height_, h);
  return p;
}

PosetPtr Poset::from_covers(std::vector<std::string> elements,
                            const std::vector<std::pair<std::string, std::string>>& covers) {
  std::size_t n = elements.size();
  std::unordered_map<std::string, std::size_t> idx;
  for (std::size_t i = 0; i < n; ++i) idx.emplace(elements[i], i);
  auto lookup = [&](const std::string& s) {
    auto it = idx.find(s);
    if (it == idx.end()) throw UnknownElement("unknown element '" + s + "' in cover list");
    return it->second;
  };
  std::vector<bool> leq(n * n, false);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (const auto& [a, b] : covers) {
    std::size_t x = lookup(a), y = lookup(b);
    if (x == y) throw InvalidPoset("self-cover on '" + a + "'");
    leq[x * n + y] = true;
    pairs.emplace_back(x, y);
  }
  PosetPtr p = build(std::move(elements), std::move(leq));
  for (auto [x, y] : pairs) {
    const auto& up = p->upper_covers(x);
    if (std::find(up.begin(), up.end(), y) == up.end())
      throw InvalidPoset("'" + p->name(x) + "<" + p->name(y) +
                         "' is implied by transitivity and is not a cover");
  }
  return p;
}

PosetPtr Poset::from_relations(std::vector<std::string> elements,
                               const std::vector<std::pair<std::size_t, std::size_t>>& relations) {
  std::size_t n = elements.size();
  std::vector<bool> leq(n * n, false);
  for (auto [x, y] : relations) {
    if (x >= n || y >= n) throw UnknownElement("relation index out of range");
    leq[x * n + y] = true;
  }
  return build(std::move(elements), std::move(leq));
}

PosetPtr Poset::point() {
  static const PosetPtr pt = from_relations({"*"}, {});
  return pt;
}

PosetPtr Poset::chain(std::size_t n) {
  std::vector<std::string> names;
  std::vector<std::pair<std::size_t, std::size_t>> rel;
  for (std::size_t i = 0; i < n; ++i) {
    names.push_back(std::to_string(i));
    if (i > 0) rel.emplace_back(i - 1, i);
  }
  return from_relations(std::move(names), rel);
}

std::size_t Poset::index(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw UnknownElement("unknown element '" + name + "'");
  return it->second;
}

ElementSet Poset::up_set(std::size_t x) const {
  if (x >= size()) throw UnknownElement("element index " + std::to_string(x) + " out of range");
  ElementSet s;
  for (std::size_t y = 0; y < size(); ++y)
    if (leq(x, y)) s.push_back(y);
  return s;
}

ElementSet Poset::down_set(std::size_t x) const {
  if (x >= size()) throw UnknownElement("element index " + std::to_string(x) + " out of range");
  ElementSet s;
  for (std::size_t y = 0; y < size(); ++y)
    if (leq(y, x)) s.push_back(y);
  return s;
}

ElementSet Poset::all() const {
  ElementSet s(size());
  for (std::size_t i = 0; i < size(); ++i) s[i] = i;
  return s;
}

bool Poset::is_open(const ElementSet& s) const {
  std::vector<bool> in(size(), false);
  for (auto x : s) {
    if (x >= size()) throw UnknownElement("element index out of range");
    in[x] = true;
  }
  for (auto [x, y] : covers_)
    if (in[x] && !in[y]) return false;
  return true;
}

PosetPtr Poset::induced(const ElementSet& s) const {
  std::vector<std::string> names;
  std::vector<std::pair<std::size_t, std::size_t>> rel;
  for (std::size_t i = 0; i < s.size(); ++i) {
    names.push_back(name(s[i]));
    for (std::size_t j = 0; j < s.size(); ++j)
      if (i != j && leq(s[i], s[j])) rel.emplace_back(i, j);
  }
  return from_relations(std::move(names), rel);
}

std::string Poset::describe(const ElementSet& s) const {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + name(s[i]);
  return out + "}";
}

PosetPtr product(const Poset& p, const Poset& q) {
  std::vector<std::string> names;
  std::vector<std::pair<std::size_t, std::size_t>> rel;
  std::size_t m = q.size();
  for (std::size_t x = 0; x < p.size(); ++x)
    for (std::size_t y = 0; y < m; ++y) names.push_back("(" + p.name(x) + "," + q.name(y) + ")");
  for (auto [x, x2] : p.covers())
    for (std::size_t y = 0; y < m; ++y) rel.emplace_back(x * m + y, x2 * m + y);
  for (std::size_t x = 0; x < p.size(); ++x)
    for (auto [y, y2] : q.covers()) rel.emplace_back(x * m + y, x * m + y2);
  return Poset::from_relations(std::move(names), rel);
}

std::vector<ElementSet> all_open_sets(const Poset& p, std::size_t limit) {
  // Decide membership along a reversed linear extension: once an element is
  // in, everything above it is already forced in.
  std::vector<std::size_t> order(p.linear_extension().rbegin(), p.linear_extension().rend());
  std::vector<ElementSet> out;
  std::vector<bool> in(p.size(), false);
  bool overflow = false;
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (overflow) return;
    if (k == order.size()) {
      ElementSet s;
      for (std::size_t i = 0; i < p.size(); ++i)
        if (in[i]) s.push_back(i);
      out.push_back(std::move(s));
      if (out.size() > limit) overflow = true;
      return;
    }
    std::size_t x = order[k];
    rec(k + 1);
    bool can = std::all_of(p.upper_covers(x).begin(), p.upper_covers(x).end(),
                           [&](std::size_t y) { return in[y]; });
    if (can) {
      in[x] = true;
      rec(k + 1);
      in[x] = false;
    }
  };
  rec(0);
  if (overflow) return {};
  std::sort(out.begin(), out.end(), [](const ElementSet& a, const ElementSet& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> monotonicity_violations(
    const Poset& source, const Poset& target, const std::vector<std::size_t>& values) {
  std::vector<std::pair<std::size_t, std::size_t>> bad;
  for (auto [x, y] : source.covers())
    if (!target.leq(values[x], values[y])) bad.emplace_back(x, y);
  return bad;
}

MonotoneMap MonotoneMap::create(PosetPtr source, PosetPtr target, std::vector<std::size_t> values) {
  if (values.size() != source->size())
    throw NotMonotone("map has " + std::to_string(values.size()) + " values for " +
                      std::to_string(source->size()) + " elements");
  for (auto v : values)
    if (v >= target->size()) throw UnknownElement("map value out of range");
  auto bad = monotonicity_violations(*source, *target, values);
  if (!bad.empty()) {
    auto [x, y] = bad.front();
    throw NotMonotone("not monotone: " + source->name(x) + " <= " + source->name(y) + " but " +
                      target->name(values[x]) + " !<= " + target->name(values[y]));
  }
  return MonotoneMap{std::move(source), std::move(target), std::move(values)};
}

MonotoneMap MonotoneMap::identity(PosetPtr p) {
  auto all = p->all();
  return MonotoneMap{p, p, all};
}

MonotoneMap MonotoneMap::to_point(PosetPtr p) {
  return MonotoneMap{p, Poset::point(), std::vector<std::size_t>(p->size(), 0)};
}

MonotoneMap MonotoneMap::projection(PosetPtr product_poset, PosetPtr p, PosetPtr q, int which) {
  std::vector<std::size_t> v(product_poset->size());
  std::size_t m = q->size();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = which == 0 ? i / m : i % m;
  return create(std::move(product_poset), which == 0 ? std::move(p) : std::move(q), std::move(v));
}

ElementSet preimage(const MonotoneMap& f, const ElementSet& s) {
  std::vector<bool> in(f.target->size(), false);
  for (auto y : s) in.at(y) = true;
  ElementSet out;
  for (std::size_t x = 0; x < f.source->size(); ++x)
    if (in[f.values[x]]) out.push_back(x);
  return out;
}

}  // namespace sheafss
