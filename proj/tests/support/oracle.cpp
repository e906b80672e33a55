#include "oracle.hpp"

#include <algorithm>
#include <memory>
#include <stdexcept>

#include "sheafss/poset.hpp"
#include "sheafss/sheaf.hpp"
#include "sheafss/specseq.hpp"

namespace oracle {

QMat QMat::identity(std::size_t n) {
  QMat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

QMat QMat::operator*(const QMat& o) const {
  if (cols != o.rows) throw std::logic_error("oracle: shape mismatch");
  QMat out(rows, o.cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t k = 0; k < cols; ++k) {
      const mpq_class& v = (*this)(i, k);
      if (v == 0) continue;
      for (std::size_t j = 0; j < o.cols; ++j) out(i, j) += v * o(k, j);
    }
  return out;
}

bool QMat::is_zero() const {
  return std::all_of(a.begin(), a.end(), [](const mpq_class& v) { return v == 0; });
}

QMat hcat(const QMat& l, const QMat& r) {
  if (l.rows != r.rows) throw std::logic_error("oracle: hcat rows");
  QMat out(l.rows, l.cols + r.cols);
  for (std::size_t i = 0; i < l.rows; ++i) {
    for (std::size_t j = 0; j < l.cols; ++j) out(i, j) = l(i, j);
    for (std::size_t j = 0; j < r.cols; ++j) out(i, l.cols + j) = r(i, j);
  }
  return out;
}

namespace {

// Row-reduces in place; returns pivot columns.
std::vector<std::size_t> eliminate(QMat& m) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t c = 0; c < m.cols && row < m.rows; ++c) {
    std::size_t p = row;
    while (p < m.rows && m(p, c) == 0) ++p;
    if (p == m.rows) continue;
    for (std::size_t j = 0; j < m.cols; ++j) std::swap(m(row, j), m(p, j));
    const mpq_class inv = 1 / m(row, c);
    for (std::size_t j = 0; j < m.cols; ++j) m(row, j) *= inv;
    for (std::size_t r = 0; r < m.rows; ++r) {
      if (r == row || m(r, c) == 0) continue;
      const mpq_class f = m(r, c);
      for (std::size_t j = 0; j < m.cols; ++j) m(r, j) -= f * m(row, j);
    }
    pivots.push_back(c);
    ++row;
  }
  return pivots;
}

QMat column(const QMat& m, std::size_t j) {
  QMat out(m.rows, 1);
  for (std::size_t i = 0; i < m.rows; ++i) out(i, 0) = m(i, j);
  return out;
}

// Some x with m x = rhs; throws if there is none.
QMat solve(const QMat& m, const QMat& rhs) {
  QMat aug = hcat(m, rhs);
  const auto pivots = eliminate(aug);
  QMat x(m.cols, rhs.cols);
  for (std::size_t r = 0; r < pivots.size(); ++r) {
    if (pivots[r] >= m.cols) throw std::logic_error("oracle: inconsistent system");
    for (std::size_t j = 0; j < rhs.cols; ++j) x(pivots[r], j) = aug(r, m.cols + j);
  }
  return x;
}

using Chain = std::vector<std::size_t>;

struct Cochains {
  std::vector<std::vector<Chain>> chains;               // by degree
  std::vector<std::map<Chain, std::size_t>> offset;     // chain -> offset in C^k
  std::vector<std::size_t> dims;
  std::vector<QMat> d;                                  // d[k]: C^k -> C^{k+1}
};

Cochains build(const Functor& f, const std::vector<std::size_t>& subset) {
  Cochains c;
  std::vector<Chain> frontier;
  for (std::size_t x : subset) frontier.push_back({x});
  while (!frontier.empty()) {
    c.chains.push_back(frontier);
    std::vector<Chain> next;
    for (const Chain& ch : frontier)
      for (std::size_t y : subset)
        if (f.less(ch.back(), y)) {
          Chain longer = ch;
          longer.push_back(y);
          next.push_back(std::move(longer));
        }
    frontier = std::move(next);
  }
  c.chains.emplace_back();  // top degree with no chains
  for (const auto& level : c.chains) {
    std::map<Chain, std::size_t> off;
    std::size_t total = 0;
    for (const Chain& ch : level) {
      off[ch] = total;
      total += f.dims[ch.back()];
    }
    c.offset.push_back(std::move(off));
    c.dims.push_back(total);
  }
  for (std::size_t k = 0; k + 1 < c.chains.size(); ++k) {
    QMat d(c.dims[k + 1], c.dims[k]);
    for (const Chain& tau : c.chains[k + 1]) {
      const std::size_t row = c.offset[k + 1].at(tau);
      const std::size_t last = tau.back();
      for (std::size_t i = 0; i < tau.size(); ++i) {
        Chain face = tau;
        face.erase(face.begin() + static_cast<std::ptrdiff_t>(i));
        const std::size_t col = c.offset[k].at(face);
        const int sign = i % 2 == 0 ? 1 : -1;
        if (i + 1 < tau.size()) {
          for (std::size_t t = 0; t < f.dims[last]; ++t) d(row + t, col + t) += sign;
        } else {
          const QMat r = f.rho(face.back(), last);
          for (std::size_t s = 0; s < r.rows; ++s)
            for (std::size_t t = 0; t < r.cols; ++t) d(row + s, col + t) += sign * r(s, t);
        }
      }
    }
    c.d.push_back(std::move(d));
  }
  return c;
}

QMat d_at(const Cochains& c, std::size_t k) { return c.d.at(k); }

QMat d_into(const Cochains& c, std::size_t k) {
  return k == 0 ? QMat(c.dims[0], 0) : c.d.at(k - 1);
}

// Representatives of H^k and a coordinate function on cocycles.
struct Classes {
  QMat boundaries;
  QMat reps;
  [[nodiscard]] QMat coords(const QMat& cocycles) const {
    const QMat x = solve(hcat(boundaries, reps), cocycles);
    QMat out(reps.cols, cocycles.cols);
    for (std::size_t i = 0; i < reps.cols; ++i)
      for (std::size_t j = 0; j < cocycles.cols; ++j) out(i, j) = x(boundaries.cols + i, j);
    return out;
  }
};

Classes classes(const Cochains& c, std::size_t k) {
  Classes h;
  h.boundaries = d_into(c, k);
  const QMat z = nullspace(d_at(c, k));
  h.reps = QMat(c.dims[k], 0);
  std::size_t r = rank(h.boundaries);
  for (std::size_t j = 0; j < z.cols; ++j) {
    const QMat candidate = hcat(h.reps, column(z, j));
    if (rank(hcat(h.boundaries, candidate)) > r) {
      h.reps = candidate;
      ++r;
    }
  }
  return h;
}

QMat to_qmat(const sheafss::Matrix& m) {
  if (!m.field().is_rational()) throw std::logic_error("oracle: rational coefficients only");
  QMat out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j).to_mpq();
  return out;
}

std::size_t longest_chain(const Functor& f) {
  std::vector<std::size_t> all(f.n);
  for (std::size_t i = 0; i < f.n; ++i) all[i] = i;
  return build(f, all).chains.size() - 2;
}

}  // namespace

std::size_t rank(QMat m) { return eliminate(m).size(); }

QMat nullspace(const QMat& m) {
  QMat r = m;
  const auto pivots = eliminate(r);
  std::vector<bool> is_pivot(m.cols, false);
  for (auto p : pivots) is_pivot[p] = true;
  std::vector<std::size_t> free;
  for (std::size_t c = 0; c < m.cols; ++c)
    if (!is_pivot[c]) free.push_back(c);
  QMat out(m.cols, free.size());
  for (std::size_t j = 0; j < free.size(); ++j) {
    out(free[j], j) = 1;
    for (std::size_t i = 0; i < pivots.size(); ++i) out(pivots[i], j) = -r(i, free[j]);
  }
  return out;
}

Functor from_sheaf(const sheafss::SheafPtr& s) {
  Functor f;
  const auto poset = s->poset();
  f.n = poset->size();
  f.less = [poset](std::size_t x, std::size_t y) { return poset->less(x, y); };
  f.dims = s->dims();
  f.rho = [s](std::size_t x, std::size_t y) { return to_qmat(s->rho(x, y)); };
  return f;
}

Functor constant(const sheafss::PosetPtr& p, std::size_t dim) {
  Functor f;
  f.n = p->size();
  f.less = [p](std::size_t x, std::size_t y) { return p->less(x, y); };
  f.dims.assign(p->size(), dim);
  f.rho = [dim](std::size_t, std::size_t) { return QMat::identity(dim); };
  return f;
}

std::vector<std::size_t> cohomology(const Functor& f) {
  std::vector<std::size_t> all(f.n);
  for (std::size_t i = 0; i < f.n; ++i) all[i] = i;
  const Cochains c = build(f, all);
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k + 1 < c.chains.size(); ++k)
    out.push_back(c.dims[k] - rank(d_at(c, k)) - rank(d_into(c, k)));
  if (out.empty()) out.push_back(0);
  return out;
}

std::vector<std::size_t> betti(const sheafss::PosetPtr& p) { return cohomology(constant(p)); }

std::vector<Functor> derived_pushforward(const Functor& f, const sheafss::MonotoneMap& m) {
  const auto target_ptr = m.target;
  const auto& target = *target_ptr;
  const std::size_t top = longest_chain(f);
  std::vector<Cochains> local(target.size());
  for (std::size_t y = 0; y < target.size(); ++y) {
    std::vector<std::size_t> pre;
    for (std::size_t x = 0; x < f.n; ++x)
      if (target.leq(y, m(x))) pre.push_back(x);
    local[y] = build(f, pre);
  }
  std::vector<Functor> out;
  for (std::size_t q = 0; q <= top; ++q) {
    std::vector<Classes> h;
    Functor g;
    g.n = target.size();
    g.less = [target_ptr](std::size_t a, std::size_t b) { return target_ptr->less(a, b); };
    for (std::size_t y = 0; y < target.size(); ++y) {
      const Cochains& c = local[y];
      if (q + 1 < c.chains.size()) {
        h.push_back(classes(c, q));
      } else {
        h.push_back(Classes{QMat(0, 0), QMat(0, 0)});
      }
      g.dims.push_back(h.back().reps.cols);
    }
    auto maps = std::make_shared<std::map<std::pair<std::size_t, std::size_t>, QMat>>();
    for (std::size_t a = 0; a < target.size(); ++a)
      for (std::size_t b = 0; b < target.size(); ++b) {
        if (!target.less(a, b)) continue;
        QMat r(g.dims[b], g.dims[a]);
        if (g.dims[a] > 0 && g.dims[b] > 0) {
          // restrict cochains from the preimage of U_a to that of U_b
          const Cochains& ca = local[a];
          const Cochains& cb = local[b];
          QMat proj(cb.dims[q], ca.dims[q]);
          for (const auto& [ch, off] : cb.offset[q]) {
            const std::size_t src = ca.offset[q].at(ch);
            for (std::size_t t = 0; t < f.dims[ch.back()]; ++t) proj(off + t, src + t) = 1;
          }
          r = h[b].coords(proj * h[a].reps);
        }
        (*maps)[{a, b}] = r;
      }
    g.rho = [maps](std::size_t a, std::size_t b) { return maps->at({a, b}); };
    out.push_back(std::move(g));
  }
  return out;
}

std::map<std::pair<int, int>, std::size_t> leray_e2(const Functor& f,
                                                    const sheafss::MonotoneMap& m) {
  std::map<std::pair<int, int>, std::size_t> out;
  const auto r = derived_pushforward(f, m);
  for (std::size_t q = 0; q < r.size(); ++q) {
    const auto h = cohomology(r[q]);
    for (std::size_t p = 0; p < h.size(); ++p)
      if (h[p] > 0) out[{static_cast<int>(p), static_cast<int>(q)}] = h[p];
  }
  return out;
}

std::map<int, std::size_t> total_cohomology(const sheafss::DoubleComplex& dc) {
  std::map<int, std::size_t> tot_dim;
  std::map<std::pair<int, int>, std::size_t> off;
  for (int n = dc.p_lo + dc.q_lo; n <= dc.p_hi + dc.q_hi; ++n)
    for (int p = dc.p_lo; p <= dc.p_hi; ++p) {
      const int q = n - p;
      if (q < dc.q_lo || q > dc.q_hi) continue;
      off[{p, q}] = tot_dim[n];
      tot_dim[n] += dc.dim(p, q);
    }
  auto diff = [&](int n) {
    QMat d(tot_dim.count(n + 1) ? tot_dim[n + 1] : 0, tot_dim.count(n) ? tot_dim[n] : 0);
    for (int p = dc.p_lo; p <= dc.p_hi; ++p) {
      const int q = n - p;
      if (q < dc.q_lo || q > dc.q_hi) continue;
      const std::size_t col = off[{p, q}];
      if (p + 1 <= dc.p_hi) {
        const QMat h = to_qmat(dc.h(p, q));
        const std::size_t row = off[{p + 1, q}];
        for (std::size_t i = 0; i < h.rows; ++i)
          for (std::size_t j = 0; j < h.cols; ++j) d(row + i, col + j) += h(i, j);
      }
      if (q + 1 <= dc.q_hi) {
        const QMat v = to_qmat(dc.v(p, q));
        const std::size_t row = off[{p, q + 1}];
        const int sign = p % 2 == 0 ? 1 : -1;
        for (std::size_t i = 0; i < v.rows; ++i)
          for (std::size_t j = 0; j < v.cols; ++j) d(row + i, col + j) += sign * v(i, j);
      }
    }
    return d;
  };
  std::map<int, std::size_t> out;
  for (const auto& [n, dim] : tot_dim) {
    const QMat d_out = diff(n);
    const QMat d_in = diff(n - 1);
    QMat d_sq = d_out.rows && d_in.cols ? d_out * d_in : QMat();
    if (!d_sq.is_zero()) throw std::logic_error("oracle: total differential does not square to zero");
    out[n] = dim - rank(d_out) - rank(d_in);
  }
  return out;
}

}  // namespace oracle
