#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracle.hpp"
#include "sheafss/forge.hpp"
#include "sheafss/instance.hpp"

using namespace sheafss;

namespace {

std::string error_of(const std::string& text) {
  try {
    (void)parse_instance(text);
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

std::vector<std::size_t> trimmed(std::vector<std::size_t> v) {
  while (!v.empty() && v.back() == 0) v.pop_back();
  return v;
}

}  // namespace

TEST(Instance, ShippedFilesLoad) {
  for (const char* file : {"pseudocircle.json", "torus.json", "injective_middle.json"}) {
    const Instance inst = load_instance(fixtures::data_path(file));
    EXPECT_GT(inst.object_count(), 0u) << file;
    for (const auto& [name, seq] : inst.sequences) {
      const SESOfComplexes s = seq.as_complexes();
      for (int q = s.lo(); q <= s.hi(); ++q) EXPECT_TRUE(is_exact(s.iota.at(q), s.pi.at(q))) << name;
    }
  }
}

TEST(Instance, PseudocircleSheaves) {
  const Instance inst = load_instance(fixtures::data_path("pseudocircle.json"));
  EXPECT_EQ(inst.poset("S1")->size(), 4u);
  EXPECT_EQ(inst.sheaf("k")->total_dim(), 4u);
  EXPECT_EQ(inst.map("fold").values, (std::vector<std::size_t>{0, 0, 1, 1}));
  EXPECT_EQ(trimmed(cohomology_dims(inst.sheaf("k"))), (std::vector<std::size_t>{1, 1}));
  EXPECT_TRUE(trimmed(cohomology_dims(inst.sheaf("mobius"))).empty());
  EXPECT_EQ(trimmed(oracle::cohomology(oracle::from_sheaf(inst.sheaf("mobius")))),
            std::vector<std::size_t>{});
  EXPECT_TRUE(inst.sheaf("Ik")->is_coinduced());
  EXPECT_EQ(inst.complex("K")->objects.size(), 2u);
  EXPECT_TRUE(inst.sequence("open_closed").sheaves.has_value());
}

TEST(Instance, EmptyTextDefinesNothing) {
  EXPECT_EQ(parse_instance("").object_count(), 0u);
  EXPECT_EQ(parse_instance("  \n").object_count(), 0u);
  EXPECT_EQ(parse_instance("{}").object_count(), 0u);
}

TEST(Instance, NonMonotoneMapNamesThePair) {
  const std::string text = R"({
    "posets": {"P": {"elements": ["x", "y"], "covers": [["x", "y"]]}},
    "maps": {"swap": {"source": "P", "target": "P", "values": {"x": "y", "y": "x"}}}
  })";
  EXPECT_THROW((void)parse_instance(text), NotMonotone);
  const std::string msg = error_of(text);
  EXPECT_NE(msg.find("swap"), std::string::npos) << msg;
  EXPECT_NE(msg.find("x"), std::string::npos) << msg;
  EXPECT_NE(msg.find("y"), std::string::npos) << msg;
}

TEST(Instance, DanglingReferences) {
  EXPECT_THROW((void)parse_instance(R"({"sheaves": {"F": {"poset": "nowhere", "constant": 1}}})"),
               DanglingReference);
  const Instance inst = parse_instance("{}");
  EXPECT_THROW((void)inst.poset("P"), DanglingReference);
  EXPECT_THROW((void)inst.sheaf("F"), DanglingReference);
  EXPECT_THROW((void)inst.sequence("S"), DanglingReference);
}

TEST(Instance, SyntaxErrorsCarryPosition) {
  const std::string msg = error_of(R"({"posets": {)");
  EXPECT_NE(msg.find("byte 13"), std::string::npos) << msg;
  EXPECT_THROW((void)parse_instance("[1, 2]"), ParseError);
  EXPECT_THROW((void)parse_instance(R"({"poset": {}})"), ParseError);
}

TEST(Instance, MalformedObjectsAreNamed) {
  const std::string bad_matrix = R"({
    "posets": {"P": {"elements": ["x", "y"], "covers": [["x", "y"]]}},
    "sheaves": {"F": {"poset": "P", "stalks": {"x": 1, "y": 2}, "restrictions": {"x<y": [["1"]]}}}
  })";
  EXPECT_NE(error_of(bad_matrix).find("'F'"), std::string::npos) << error_of(bad_matrix);
  const std::string cycle = R"({"posets": {"Q": {"elements": ["x", "y"], "covers": [["x", "y"], ["y", "x"]]}}})";
  EXPECT_NE(error_of(cycle).find("'Q'"), std::string::npos) << error_of(cycle);
}

TEST(Instance, FieldOverride) {
  const std::string text = R"({"field": "q",
    "posets": {"P": {"elements": ["x"]}},
    "sheaves": {"F": {"poset": "P", "stalks": {"x": 1}}}})";
  EXPECT_TRUE(parse_instance(text).sheaf("F")->field().is_rational());
  EXPECT_EQ(parse_instance(text, Field::prime(5)).sheaf("F")->field(), Field::prime(5));
  EXPECT_THROW((void)parse_instance(R"({"field": "6"})"), InvalidField);
}

TEST(Instance, RoundTripThroughJson) {
  for (const char* file : {"pseudocircle.json", "torus.json", "injective_middle.json"}) {
    const Instance a = load_instance(fixtures::data_path(file));
    const std::string text = to_json(a).dump();
    const Instance b = parse_instance(text);
    EXPECT_EQ(a.object_count(), b.object_count()) << file;
    for (const auto& [name, s] : a.sheaves) EXPECT_EQ(s->dims(), b.sheaf(name)->dims()) << file << " " << name;
    EXPECT_EQ(to_json(b).dump(), text) << file;
  }
}

TEST(InstanceProperties, GeneratedInstancesRoundTrip) {
  GenConfig base;
  base.seed = 1500;
  for (std::uint64_t i = 0; i < 30; ++i) {
    const GeneratedInstance g = gen_instance(base.derived(i));
    Instance inst;
    inst.posets["P"] = g.poset;
    if (g.map.target != g.poset) inst.posets["Q"] = g.map.target;
    inst.maps.emplace("f", g.map);
    inst.sheaves["F"] = g.sheaf;
    inst.sheaves["A"] = g.iota.source;
    inst.sheaves["B"] = g.iota.target;
    inst.sheaves["C"] = g.pi.target;
    inst.morphisms.emplace("iota", g.iota);
    inst.morphisms.emplace("pi", g.pi);
    const std::string text = to_json(inst).dump();
    const Instance back = parse_instance(text);
    EXPECT_EQ(to_json(back).dump(), text) << "instance " << i;
    for (std::size_t x = 0; x < g.poset->size(); ++x) EXPECT_EQ(back.morphism("iota").at(x), g.iota.at(x));
    EXPECT_EQ(cohomology_dims(back.sheaf("F")), cohomology_dims(g.sheaf));
  }
}
