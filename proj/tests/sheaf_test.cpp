#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracle.hpp"
#include "sheafss/forge.hpp"
#include "sheafss/sheaf.hpp"

using namespace sheafss;

namespace {

std::vector<std::size_t> trimmed(std::vector<std::size_t> v) {
  while (!v.empty() && v.back() == 0) v.pop_back();
  return v;
}

bool stalkwise_exact(const SheafMorphism& f, const SheafMorphism& g) {
  for (std::size_t x = 0; x < f.source->poset()->size(); ++x) {
    if (!(g.at(x) * f.at(x)).is_zero()) return false;
    if (!(image_basis(f.at(x)) == kernel_basis(g.at(x)))) return false;
  }
  return true;
}

// Rebuilds a sheaf from its cover maps, which re-runs the path-independence check.
SheafPtr rebuilt(const Sheaf& s) {
  std::map<std::pair<std::size_t, std::size_t>, Matrix> covers;
  for (auto [x, y] : s.poset()->covers()) covers.emplace(std::make_pair(x, y), s.rho(x, y));
  return Sheaf::create(s.poset(), s.field(), s.dims(), covers);
}

PosetPtr diamond() {
  return Poset::from_covers({"0", "1", "2", "3"}, {{"0", "1"}, {"0", "2"}, {"1", "3"}, {"2", "3"}});
}

GenConfig config(std::uint64_t seed) {
  GenConfig c;
  c.seed = seed;
  return c;
}

}  // namespace

TEST(Sheaf, ConstantOnCircleModel) {
  const auto x = fixtures::x4();
  const auto k = Sheaf::constant(x, {}, 1);
  EXPECT_EQ(trimmed(cohomology_dims(k)), (std::vector<std::size_t>{1, 1}));
  EXPECT_EQ(gamma(*k)->total_dim(), 1u);
  const auto cd = restrict_to_open(k, {2, 3});
  EXPECT_EQ(gamma(*cd)->total_dim(), 2u);
  EXPECT_THROW((void)restrict_to_open(k, {0}), NotOpen);
  EXPECT_THROW((void)sections(*k, {0, 1}), NotOpen);
}

TEST(Sheaf, CircleModelMatchesOracle) {
  const auto x = fixtures::x4();
  EXPECT_EQ(oracle::betti(x), (std::vector<std::size_t>{1, 1}));
  EXPECT_EQ(trimmed(cohomology_dims(Sheaf::constant(x, {}, 1))), oracle::betti(x));
}

TEST(Sheaf, PathIndependenceIsEnforced) {
  const auto d = diamond();
  const Matrix one = Matrix::identity(1), minus = -Matrix::identity(1);
  std::map<std::pair<std::size_t, std::size_t>, Matrix> maps{
      {{0, 1}, one}, {{0, 2}, one}, {{1, 3}, one}, {{2, 3}, minus}};
  EXPECT_THROW(Sheaf::create(d, {}, {1, 1, 1, 1}, maps), InvalidSheaf);
  maps[{2, 3}] = one;
  EXPECT_NO_THROW(Sheaf::create(d, {}, {1, 1, 1, 1}, maps));
  maps[{0, 1}] = Matrix::identity(2);
  EXPECT_THROW(Sheaf::create(d, {}, {1, 1, 1, 1}, maps), Error);
}

TEST(Sheaf, MissingCoverMapIsZero) {
  const auto c = Poset::chain(2);
  const auto s = Sheaf::create(c, {}, {1, 1}, {});
  EXPECT_TRUE(s->rho(0, 1).is_zero());
  EXPECT_EQ(trimmed(cohomology_dims(s)), (std::vector<std::size_t>{1}));
}

TEST(Sheaf, CoinducedShape) {
  const auto x = fixtures::x4();
  const auto i = Sheaf::coinduced(x, {}, {{2, 2}, {3, 1}});
  EXPECT_EQ(i->dims(), (std::vector<std::size_t>{3, 3, 2, 1}));
  EXPECT_TRUE(i->is_coinduced());
  EXPECT_EQ(i->summand_offset(1, 0), 2u);
  EXPECT_TRUE(i->rho(0, 2).rows() == 2 && i->rho(0, 2).cols() == 3);
  EXPECT_THROW((void)Sheaf::constant(x, {}, 1)->summands(), NotCoinduced);
  EXPECT_THROW(Sheaf::coinduced(x, {}, {{2, 0}}), Error);
  EXPECT_TRUE(is_acyclic_on_all_opens(i));
}

TEST(Sheaf, MorphismSquaresAreChecked) {
  const auto c = Poset::chain(2);
  const auto k = Sheaf::constant(c, {}, 1);
  EXPECT_THROW(SheafMorphism::create(k, k, {Matrix::identity(1), Matrix::zero(1, 1)}),
               IllFormedMorphism);
  EXPECT_THROW(SheafMorphism::create(k, k, {Matrix::identity(1)}), IllFormedMorphism);
  EXPECT_NO_THROW(SheafMorphism::create(k, k, {Matrix::identity(1), Matrix::identity(1)}));
}

TEST(Sheaf, AcyclicityReportNamesTheFailingOpen) {
  const auto x = fixtures::x4();
  const AcyclicityReport r = check_acyclic_on_all_opens(Sheaf::constant(x, {}, 1));
  EXPECT_FALSE(r.acyclic);
  EXPECT_TRUE(r.exhaustive);
  EXPECT_EQ(r.failing_open, x->all());
  EXPECT_EQ(r.failing_degree, 1u);
  EXPECT_EQ(r.failing_dim, 1u);
  EXPECT_TRUE(is_acyclic_on_all_opens(Sheaf::zero(x)));
}

TEST(Resolution, CoinducedResolvesInOneStep) {
  const auto x = fixtures::x4();
  const auto i = Sheaf::coinduced(x, {}, {{2, 1}, {0, 2}});
  const Resolution r = injective_resolution(i, 4);
  ASSERT_EQ(r.length(), 1u);
  EXPECT_TRUE(is_iso(r.augmentation));
  EXPECT_TRUE(same_sheaf(*r.terms[0], *injective_embed(i).object));
  EXPECT_EQ(injective_resolution(Sheaf::zero(x), 4).length(), 0u);
}

TEST(Resolution, TruncationIsReported) {
  const auto k = Sheaf::constant(Poset::chain(4), {}, 1);
  EXPECT_THROW(injective_resolution(Sheaf::constant(product(*fixtures::x4(), *fixtures::x4()), {}, 1), 1),
               TruncationInsufficient);
  EXPECT_NO_THROW(injective_resolution(k, default_resolution_length(*k->poset())));
}

TEST(Resolution, DefaultLengthIsChainPlusTwo) {
  EXPECT_EQ(default_resolution_length(*fixtures::x4()), 3u);
  EXPECT_EQ(default_resolution_length(*Poset::point()), 2u);
}

TEST(SheafProperties, ResolutionsAreExactAndInjective) {
  for (std::uint64_t i = 0; i < 40; ++i) {
    const GenConfig cfg = config(500).derived(i);
    const auto p = gen_poset(cfg);
    const auto f = gen_sheaf(cfg, p);
    const Resolution r = injective_resolution(f, default_resolution_length(*p));
    ASSERT_TRUE(is_mono(r.augmentation));
    if (r.length() == 0) {
      EXPECT_TRUE(f->is_zero());
      continue;
    }
    EXPECT_TRUE(is_exact(r.augmentation, r.differential(0)));
    for (std::size_t q = 0; q < r.length(); ++q) {
      EXPECT_TRUE(r.terms[q]->is_coinduced());
      if (q + 1 < r.length()) EXPECT_TRUE(is_exact(r.differential(q), r.differential(q + 1)));
    }
    if (r.length() == 1) {
      EXPECT_TRUE(is_iso(r.augmentation));
    } else {
      EXPECT_TRUE(is_epi(r.differential(r.length() - 2)));
    }
  }
}

TEST(SheafProperties, CohomologyMatchesOrderComplexOracle) {
  for (std::uint64_t i = 0; i < 60; ++i) {
    const GenConfig cfg = config(501).derived(i);
    const auto p = gen_poset(cfg);
    const auto f = gen_sheaf(cfg, p);
    const auto expected = oracle::cohomology(oracle::from_sheaf(f));
    EXPECT_EQ(trimmed(cohomology_dims(f)), trimmed(expected)) << "instance " << i;
  }
}

TEST(SheafProperties, KernelCokernelImage) {
  for (std::uint64_t i = 0; i < 40; ++i) {
    Forge g(config(502).derived(i));
    const auto p = g.poset();
    const auto src = g.sheaf(p);
    const auto tgt = g.coinduced(p);
    const SheafMorphism f = g.into_coinduced(src, tgt);
    const SubobjectData k = kernel(f);
    const QuotientData c = cokernel(f);
    const ImageData im = image(f);
    EXPECT_TRUE(compose(f, k.mono).is_zero());
    EXPECT_TRUE(compose(c.epi, f).is_zero());
    EXPECT_TRUE(is_mono(k.mono));
    EXPECT_TRUE(is_epi(c.epi));
    EXPECT_TRUE(is_exact(k.mono, f));
    EXPECT_TRUE(is_exact(f, c.epi));
    EXPECT_TRUE(stalkwise_exact(k.mono, f));
    EXPECT_TRUE(stalkwise_exact(f, c.epi));
    EXPECT_TRUE(equal(compose(im.mono, im.epi), f));
    EXPECT_NO_THROW(rebuilt(*c.object));
  }
}

TEST(SheafProperties, ExactnessIsStalkwise) {
  for (std::uint64_t i = 0; i < 40; ++i) {
    Forge g(config(503).derived(i));
    const auto p = g.poset();
    const auto [iota, pi] = g.ses_sheaves(p);
    EXPECT_EQ(is_exact(iota, pi), stalkwise_exact(iota, pi));
    EXPECT_TRUE(is_exact(iota, pi));
    const SheafMorphism twisted = scaled(pi, Field{}.from_int(2));
    EXPECT_EQ(is_exact(iota, twisted), stalkwise_exact(iota, twisted));
    const SheafMorphism z = SheafMorphism::zero(iota.target, pi.target);
    EXPECT_EQ(is_exact(iota, z), stalkwise_exact(iota, z));
  }
}

TEST(SheafProperties, CanonicalEmbeddingIsMono) {
  for (std::uint64_t i = 0; i < 40; ++i) {
    const GenConfig cfg = config(504).derived(i);
    const auto p = gen_poset(cfg);
    const auto f = gen_sheaf(cfg, p);
    const SubobjectData e = injective_embed(f);
    EXPECT_TRUE(is_mono(e.mono));
    EXPECT_TRUE(e.object->is_coinduced());
    for (const auto& s : e.object->summands()) EXPECT_GT(f->dim(s.point), 0u);
    EXPECT_NO_THROW(rebuilt(*cokernel(e.mono).object));
  }
}

TEST(SheafProperties, HomIntoCoinducedIsStalkHom) {
  for (std::uint64_t i = 0; i < 40; ++i) {
    Forge g(config(505).derived(i));
    const auto p = g.poset();
    const auto f = g.sheaf(p);
    const auto target = g.coinduced(p);
    const SheafMorphism m = g.into_coinduced(f, target);
    EXPECT_FALSE(noncommuting_cover(m).has_value());
    std::size_t expected = 0;
    for (const auto& s : target->summands()) expected += s.multiplicity * f->dim(s.point);
    EXPECT_EQ(hom_space(f, target).size(), expected);
  }
}

TEST(SheafProperties, GlobalSectionsAreLeftExact) {
  for (std::uint64_t i = 0; i < 40; ++i) {
    Forge g(config(506).derived(i));
    const auto p = g.poset();
    const auto [iota, pi] = g.ses_sheaves(p);
    const SheafMorphism gi = gamma(iota), gp = gamma(pi);
    EXPECT_TRUE(is_mono(gi));
    EXPECT_TRUE((gp.at(0) * gi.at(0)).is_zero());
    EXPECT_EQ(image_basis(gi.at(0)), kernel_basis(gp.at(0)));
  }
}

TEST(SheafProperties, PushforwardIsLeftExactAndKeepsInjectives) {
  for (std::uint64_t i = 0; i < 40; ++i) {
    Forge g(config(507).derived(i));
    const auto p = g.poset();
    const MonotoneMap f = g.monotone_map(p);
    const auto [iota, pi] = g.ses_sheaves(p);
    const SheafMorphism fi = pushforward(f, iota), fp = pushforward(f, pi);
    EXPECT_TRUE(is_mono(fi));
    for (std::size_t y = 0; y < f.target->size(); ++y)
      EXPECT_EQ(image_basis(fi.at(y)), kernel_basis(fp.at(y)));

    const auto pushed = pushforward(f, g.coinduced(p));
    ASSERT_TRUE(pushed->is_coinduced());
    const auto [mono, rest] = g.ses_sheaves(f.target);
    const SheafMorphism h = g.into_coinduced(mono.source, pushed);
    const SheafMorphism ext = extend_along_mono(mono, h);
    EXPECT_TRUE(equal(compose(ext, mono), h));
  }
}

TEST(SheafProperties, ExtensionUnderPerturbedChoices) {
  for (std::uint64_t i = 0; i < 30; ++i) {
    Forge g(config(508).derived(i));
    const auto p = g.poset();
    const auto [mono, rest] = g.ses_sheaves(p);
    const auto target = g.coinduced(p);
    const SheafMorphism h = g.into_coinduced(mono.source, target);
    ChoicePolicy policy(i, true);
    const SheafMorphism a = extend_along_mono(mono, h);
    const SheafMorphism b = extend_along_mono(mono, h, &policy);
    EXPECT_TRUE(equal(compose(a, mono), h));
    EXPECT_TRUE(equal(compose(b, mono), h));
  }
}

TEST(SheafProperties, DirectSumStructureMaps) {
  for (std::uint64_t i = 0; i < 30; ++i) {
    Forge g(config(509).derived(i));
    const auto p = g.poset();
    const DirectSum s = direct_sum({g.sheaf(p), g.coinduced(p), g.sheaf(p)});
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t b = 0; b < 3; ++b) {
        const SheafMorphism pi = compose(s.projection(b), s.inclusion(a));
        if (a == b) {
          EXPECT_TRUE(equal(pi, SheafMorphism::identity(s.parts[a])));
        } else {
          EXPECT_TRUE(pi.is_zero());
        }
      }
    SheafMorphism total = compose(s.inclusion(0), s.projection(0));
    for (std::size_t a = 1; a < 3; ++a)
      total = total + compose(s.inclusion(a), s.projection(a));
    EXPECT_TRUE(equal(total, SheafMorphism::identity(s.object)));
  }
}
