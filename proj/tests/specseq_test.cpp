#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "oracle.hpp"
#include "sheafss/forge.hpp"
#include "sheafss/gross.hpp"
#include "sheafss/specseq.hpp"

using namespace sheafss;

namespace {

Matrix random_invertible(std::size_t n, const Field& field, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> coeff(-2, 2);
  for (;;) {
    Matrix m(n, n, field);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m.set(i, j, field.from_int(coeff(rng)));
    if (rank(m) == n) return m;
  }
}

// Direct sum of zigzags a_0 -h-> b_0 <-v- a_1 -h-> b_1 ... with a_k at
// (p0 + k, q0 - k), then a random change of basis in every entry.
DoubleComplex random_zigzags(std::uint64_t seed, const Field& field = {}) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, 3);
  const int p_hi = 3, q_hi = 3;
  struct Edge {
    Bidegree from, to;
    std::size_t i, j;
  };
  std::map<Bidegree, std::size_t> dims;
  std::vector<Edge> h_edges, v_edges;
  const int pieces = 2 + static_cast<int>(rng() % 4);
  for (int n = 0; n < pieces; ++n) {
    const int p0 = pick(rng), q0 = pick(rng);
    const int len = static_cast<int>(rng() % 4);
    std::vector<std::pair<Bidegree, std::size_t>> a, b;
    for (int k = 0; k <= len && p0 + k <= p_hi && q0 - k >= 0; ++k) {
      const Bidegree at{p0 + k, q0 - k};
      a.emplace_back(at, dims[at]++);
      if (p0 + k + 1 > p_hi || (k == len && rng() % 2 == 0)) break;
      const Bidegree bt{p0 + k + 1, q0 - k};
      b.emplace_back(bt, dims[bt]++);
    }
    for (std::size_t k = 0; k < b.size(); ++k) {
      h_edges.push_back({a[k].first, b[k].first, a[k].second, b[k].second});
      if (k + 1 < a.size()) v_edges.push_back({a[k + 1].first, b[k].first, a[k + 1].second, b[k].second});
    }
  }
  std::map<Bidegree, Matrix> dh, dv, basis, inv;
  for (const auto& [at, d] : dims) {
    basis[at] = random_invertible(d, field, rng);
    inv[at] = inverse(basis[at]);
  }
  auto fill = [&](std::map<Bidegree, Matrix>& out, const std::vector<Edge>& edges) {
    for (const Edge& e : edges) {
      auto it = out.find(e.from);
      if (it == out.end()) it = out.emplace(e.from, Matrix(dims[e.to], dims[e.from], field)).first;
      it->second.set(e.j, e.i, field.from_int(1));
    }
    for (auto& [from, m] : out) {
      const Bidegree to = &out == &dh ? Bidegree{from.first + 1, from.second}
                                      : Bidegree{from.first, from.second + 1};
      m = basis[to] * m * inv[from];
    }
  };
  fill(dh, h_edges);
  fill(dv, v_edges);
  return DoubleComplex::create(field, 0, p_hi, 0, q_hi, dims, dh, dv);
}

std::map<int, std::size_t> abutment(const SpectralSequence& ss) {
  std::map<int, std::size_t> out;
  for (const auto& [key, e] : ss.e_inf().entries)
    if (e.dim != 0) out[key.second] += e.dim;
  return out;
}

std::map<int, std::size_t> nonzero(const std::map<int, CohomologySpace>& total) {
  std::map<int, std::size_t> out;
  for (const auto& [n, h] : total)
    if (h.dim() != 0) out[n] = h.dim();
  return out;
}

std::map<int, std::size_t> nonzero(std::map<int, std::size_t> dims) {
  std::erase_if(dims, [](const auto& kv) { return kv.second == 0; });
  return dims;
}

CoupleMorphism scaling(const ExactCouple& c, const Scalar& s) {
  CoupleMorphism m;
  m.shift = 0;
  for (const auto& [key, d] : c.a_dim) m.on_a[key] = Matrix::identity(d, c.field).scaled(s);
  for (const auto& [key, d] : c.e_dim) m.on_e[key] = Matrix::identity(d, c.field).scaled(s);
  return m;
}

}  // namespace

TEST(DoubleComplex, RejectsNonCommutingSquares) {
  const Matrix one = Matrix::identity(1);
  EXPECT_THROW(DoubleComplex::create({}, 0, 1, 0, 1, {{{0, 0}, 1}, {{1, 0}, 1}, {{0, 1}, 1}, {{1, 1}, 1}},
                                     {{{0, 0}, one}, {{0, 1}, one}}, {{{0, 0}, one}, {{1, 0}, -one}}),
               SquareNotCommuting);
  EXPECT_THROW(DoubleComplex::create({}, 0, 0, 0, 2, {{{0, 0}, 1}, {{0, 1}, 1}, {{0, 2}, 1}}, {},
                                     {{{0, 0}, one}, {{0, 1}, one}}),
               InvalidComplex);
  EXPECT_NO_THROW(fixtures::staircase());
}

TEST(SpectralSequence, StaircaseHasNonzeroSecondDifferential) {
  for (const Field& field : {Field{}, Field::prime(5)}) {
    const SpectralSequence ss = pages_from_filtration(fixtures::staircase(field), FiltrationMode::ByP);
    EXPECT_TRUE(ss.ok());
    EXPECT_EQ(ss.r_inf, 4);
    const std::map<Bidegree, std::size_t> e1{{{0, 1}, 1}, {{2, 0}, 1}};
    EXPECT_EQ(page_dimensions(ss).front(), e1);
    ASSERT_TRUE(ss.page(2).d.count({0, 1}));
    EXPECT_EQ(rank(ss.page(2).d.at({0, 1})), 1u);
    EXPECT_TRUE(page_dimensions(ss).at(1).empty());
    EXPECT_TRUE(nonzero(ss.total).empty());
  }
}

TEST(SpectralSequence, SignRelating) {
  const Matrix a = Matrix::from_ints({{1, 2}, {0, 3}});
  EXPECT_EQ(sign_relating(a, a), 1);
  EXPECT_EQ(sign_relating(-a, a), -1);
  EXPECT_EQ(sign_relating(a.scaled(Scalar(2)), a), std::nullopt);
  EXPECT_EQ(sign_relating(Matrix::zero(2, 2), Matrix::zero(2, 2)), 1);
}

TEST(SpecseqProperties, ConvergesToTotalCohomology) {
  std::size_t beyond_e2 = 0;
  for (std::uint64_t i = 0; i < 60; ++i) {
    const Field field = i % 3 == 2 ? Field::prime(3) : Field{};
    const DoubleComplex dc = random_zigzags(900 + i, field);
    for (FiltrationMode mode : {FiltrationMode::ByP, FiltrationMode::ByQ}) {
      const SpectralSequence ss = pages_from_filtration(dc, mode);
      ASSERT_TRUE(ss.ok()) << "instance " << i << ": " << ss.failures.front();
      EXPECT_EQ(abutment(ss), nonzero(ss.total)) << "instance " << i;
      if (field.is_rational()) EXPECT_EQ(nonzero(ss.total), nonzero(oracle::total_cohomology(dc))) << "instance " << i;
      for (const auto& [key, iso] : ss.graded_iso) {
        EXPECT_EQ(iso.rows(), iso.cols());
        EXPECT_EQ(rank(iso), iso.rows());
      }
      const auto dims = page_dimensions(ss);
      beyond_e2 += dims.front() != dims.back();
    }
  }
  EXPECT_GT(beyond_e2, 0u);
}

TEST(SpecseqProperties, PagesStabilize) {
  for (std::uint64_t i = 0; i < 30; ++i) {
    const DoubleComplex dc = random_zigzags(1000 + i);
    const TotalComplex tot = total(dc);
    const int width = tot.by_p.f_hi - tot.by_p.f_lo;
    const SpectralSequence ss = spectral_sequence(tot.by_p, width + 5);
    ASSERT_TRUE(ss.ok());
    for (int r = width + 2; r <= width + 5; ++r) {
      for (const auto& [key, d] : ss.page(r).d) EXPECT_EQ(rank(d), 0u) << "page " << r;
      for (const auto& [key, e] : ss.page(r).entries) EXPECT_EQ(e.dim, ss.page(width + 2).dim(key.first, key.second));
    }
  }
}

TEST(SpecseqProperties, CouplesStayExactWhenDerived) {
  for (std::uint64_t i = 0; i < 30; ++i) {
    const TotalComplex tot = total(random_zigzags(1100 + i));
    ExactCouple c = exact_couple(tot.by_p, 1);
    for (int r = 1; r <= 4; ++r) {
      EXPECT_TRUE(c.exactness_failures().empty()) << "instance " << i << " stage " << r;
      for (const auto& [key, dim] : c.e_dim) {
        const Matrix d = c.d_at(key.first, key.second);
        const Matrix dd = c.d_at(key.first + r, key.second + 1) * d;
        EXPECT_EQ(rank(dd), 0u);
      }
      c = derive(c).couple;
    }
  }
}

TEST(SpecseqProperties, ScalingInducesScalingOnEveryPage) {
  for (std::uint64_t i = 0; i < 20; ++i) {
    const SpectralSequence ss = pages_from_filtration(random_zigzags(1200 + i), FiltrationMode::ByP);
    const CoupleMorphism m = scaling(ss.couples.front(), Scalar(-2));
    const std::vector<PageMap> maps = map_of_spectral_sequences(ss, ss, m);
    ASSERT_EQ(maps.size(), ss.pages.size());
    for (const PageMap& pm : maps) {
      EXPECT_TRUE(pm.failures.empty()) << "page " << pm.r;
      EXPECT_EQ(pm.sign, 1);
      for (const auto& [key, mat] : pm.maps)
        EXPECT_EQ(mat, Matrix::identity(mat.rows(), mat.field()).scaled(Scalar(-2)));
    }
    const IntertwiningSigns s = check_couple_morphism(ss.couples.front(), ss.couples.front(), m);
    EXPECT_EQ(s.i, 1);
    EXPECT_EQ(s.j, 1);
    EXPECT_EQ(s.k, 1);
  }
}

TEST(SpecseqProperties, SecondFiltrationOfResolutionVanishesOffTheEdge) {
  GenConfig base;
  base.seed = 1300;
  for (std::uint64_t i = 0; i < 15; ++i) {
    const GenConfig cfg = base.derived(i);
    const GeneratedInstance inst = gen_instance(cfg);
    const GrothendieckData d = leray_ss(inst.map, inst.sheaf);
    for (const auto& [key, e] : d.by_q.page(1).entries)
      if (key.second != key.first) EXPECT_EQ(e.dim, 0u) << "instance " << i;
    EXPECT_TRUE(first_ss_check(d).ok());
  }
}
