#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "sheafss/forge.hpp"
#include "sheafss/instance.hpp"

using namespace sheafss;

namespace {

constexpr std::uint64_t kGoldenSeed = 2024;

GenConfig config(std::uint64_t seed) {
  GenConfig c;
  c.seed = seed;
  return c;
}

std::string poset_text(const Poset& p) {
  std::ostringstream out;
  out << "elements";
  for (const auto& n : p.names()) out << " " << n;
  out << "\n";
  for (const auto& [x, y] : p.covers()) out << p.name(x) << " < " << p.name(y) << "\n";
  return out.str();
}

std::string dims_text(const Sheaf& s) {
  std::ostringstream out;
  for (std::size_t x = 0; x < s.poset()->size(); ++x) out << s.poset()->name(x) << " " << s.dim(x) << "\n";
  return out.str();
}

// SHEAFSS_UPDATE_GOLDEN=1 rewrites the file instead of comparing.
void expect_golden(const std::string& file, const std::string& actual) {
  const std::string path = fixtures::golden_path(file);
  if (std::getenv("SHEAFSS_UPDATE_GOLDEN") != nullptr) {
    std::ofstream(path) << actual;
    return;
  }
  std::ifstream in(path);
  ASSERT_TRUE(in) << "missing golden file " << path;
  std::stringstream expected;
  expected << in.rdbuf();
  EXPECT_EQ(actual, expected.str()) << file;
}

}  // namespace

TEST(Forge, GoldenPoset) {
  const auto p = gen_poset(config(kGoldenSeed));
  EXPECT_EQ(p->size(), 5u);
  expect_golden("poset_2024.txt", poset_text(*p));
}

TEST(Forge, GoldenStalkDimensions) {
  const GenConfig cfg = config(kGoldenSeed);
  const auto s = gen_sheaf(cfg, gen_poset(cfg));
  expect_golden("sheaf_2024.txt", dims_text(*s));
}

TEST(Forge, SingleElementBoundGivesPoint) {
  for (std::uint64_t i = 0; i < 30; ++i) {
    GenConfig cfg = config(50).derived(i);
    cfg.max_elements = 1;
    const auto p = gen_poset(cfg);
    EXPECT_EQ(p->size(), 1u);
    EXPECT_TRUE(p->covers().empty());
    EXPECT_EQ(gen_instance(cfg).poset->size(), 1u);
  }
}

TEST(Forge, SameSeedSameOutput) {
  for (std::uint64_t i = 0; i < 20; ++i) {
    const GenConfig cfg = config(51).derived(i);
    const GeneratedInstance a = gen_instance(cfg), b = gen_instance(cfg);
    EXPECT_EQ(poset_text(*a.poset), poset_text(*b.poset));
    EXPECT_EQ(dims_text(*a.sheaf), dims_text(*b.sheaf));
    EXPECT_TRUE(equal(a.iota, b.iota));
    EXPECT_TRUE(equal(a.pi, b.pi));
    const SESOfComplexes s = gen_ses_complexes(cfg, a.poset), t = gen_ses_complexes(cfg, b.poset);
    ASSERT_EQ(s.lo(), t.lo());
    ASSERT_EQ(s.hi(), t.hi());
    for (int q = s.lo(); q <= s.hi(); ++q) EXPECT_TRUE(equal(s.iota.at(q), t.iota.at(q)));
  }
}

TEST(Forge, DerivedSeedsDiffer) {
  std::set<std::uint64_t> seeds;
  for (std::uint64_t i = 0; i < 1000; ++i) seeds.insert(config(52).derived(i).seed);
  EXPECT_EQ(seeds.size(), 1000u);
}

TEST(Forge, ZeroBoundsAreRejected) {
  GenConfig cfg;
  cfg.max_elements = 0;
  EXPECT_THROW(Forge{cfg}, PreconditionFailed);
  cfg = GenConfig{};
  cfg.max_stalk_dim = 0;
  EXPECT_THROW(cfg.validate(), PreconditionFailed);
  cfg = GenConfig{};
  cfg.max_degree_span = 0;
  EXPECT_THROW(cfg.validate(), PreconditionFailed);
}

TEST(Forge, ShiftAndCone) {
  const auto x = fixtures::x4();
  const auto k = Sheaf::constant(x, {}, 1);
  const SubobjectData e = injective_embed(k);
  const ComplexPtr c = fixtures::two_term(e.mono);
  const ComplexPtr s = shifted(c, 1);
  EXPECT_EQ(s->lo, -1);
  EXPECT_TRUE(equal(s->d(-1), -c->d(0)));
  const ChainMap f = ChainMap::create(Complex::single(k), Complex::single(e.mono.target), {e.mono});
  const SESOfComplexes cone = cone_sequence(f);
  EXPECT_EQ(cone.b->lo, -1);
  EXPECT_TRUE(cohomology(*cone.b, -1).h->is_zero());
}

TEST(ForgeProperties, OutputsRespectBounds) {
  for (std::uint64_t i = 0; i < 80; ++i) {
    GenConfig cfg = config(53).derived(i);
    cfg.max_elements = 2 + i % 5;
    cfg.max_stalk_dim = 1 + i % 3;
    cfg.max_degree_span = 1 + i % 3;
    if (i % 4 == 3) cfg.field = Field::prime(3);
    const auto p = gen_poset(cfg);
    EXPECT_LE(p->size(), cfg.max_elements);
    EXPECT_GE(p->size(), 1u);
    if (cfg.max_elements > 1) EXPECT_FALSE(p->covers().empty());
    const auto s = gen_sheaf(cfg, p);
    EXPECT_TRUE(stalks_within(*s, cfg.max_stalk_dim));
    EXPECT_EQ(s->field(), cfg.field);
    const GeneratedInstance inst = gen_instance(cfg);
    EXPECT_LE(inst.poset->size(), cfg.max_elements);
    EXPECT_LE(inst.map.target->size(), cfg.max_elements);
    EXPECT_TRUE(is_exact(inst.iota, inst.pi));
    EXPECT_TRUE(is_mono(inst.iota));
    EXPECT_TRUE(is_epi(inst.pi));
    EXPECT_TRUE(within_bounds(gen_ses_complexes(cfg, p), cfg)) << "instance " << i;
  }
}
