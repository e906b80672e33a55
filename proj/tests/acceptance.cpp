// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <string>

#include "fixtures.hpp"
#include "oracle.hpp"
#include "sheafss/forge.hpp"
#include "sheafss/gross.hpp"
#include "sheafss/instance.hpp"

using namespace sheafss;

namespace {

using Dims = std::map<Bidegree, std::size_t>;

struct Tally {
  std::size_t passed = 0, total = 0;
  std::vector<std::string> notes;
  void record(bool ok, const std::string& what) {
    ++total;
    if (ok) ++passed;
    else if (notes.size() < 5) notes.push_back(what);
  }
  [[nodiscard]] bool ok() const { return total > 0 && passed == total; }
};

GenConfig batch(std::uint64_t seed) {
  GenConfig c;
  c.seed = seed;
  return c;
}

std::map<int, std::size_t> nonzero(std::map<int, std::size_t> m) {
  std::erase_if(m, [](const auto& kv) { return kv.second == 0; });
  return m;
}

bool invertible(const Matrix& m) { return m.rows() == m.cols() && rank(m) == m.rows(); }

// E_inf summed along total degree equals the cohomology stored with the
// sequence, and, over Q, the oracle's cohomology of the total complex.
class Convergence {
 public:
  void check(const SpectralSequence& ss, const DoubleComplex* dc, const std::string& what) {
    std::map<int, std::size_t> e_inf, total;
    for (const auto& [key, e] : ss.e_inf().entries) e_inf[key.second] += e.dim;
    for (const auto& [n, h] : ss.total) total[n] = h.dim();
    bool ok = ss.ok() && nonzero(e_inf) == nonzero(total);
    if (ok && dc != nullptr && dc->field.is_rational())
      ok = nonzero(total) == nonzero(oracle::total_cohomology(*dc));
    tally.record(ok, what);
  }
  void check(const GrothendieckData& d, const std::string& what) {
    check(d.by_p, &d.r, what + " first filtration");
    check(d.by_q, &d.r, what + " second filtration");
  }
  void check(const DeltaFamily& f, const std::string& what) {
    check(f.ss_a, &f.r, what + " A");
    check(f.ss_c, &f.t, what + " C");
  }
  Tally tally;
};

template <typename T>
std::vector<T> continued(std::vector<T> pages, std::size_t n) {
  while (!pages.empty() && pages.size() < n) pages.push_back(pages.back());
  return pages;
}

bool same_tables(const SpectralSequence& a, const SpectralSequence& b) {
  const auto pa = page_dimensions(a), pb = page_dimensions(b);
  const std::size_t n = std::max(pa.size(), pb.size());
  return continued(pa, n) == continued(pb, n);
}

void guarded(Tally& t, const std::string& what, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    t.record(false, what + ": " + e.what());
  }
}

int report(int index, const std::string& title, const Tally& t, const std::string& unit) {
  std::printf("criterion %d  %-38s %s  %zu/%zu %s\n", index, title.c_str(), t.ok() ? "PASS" : "FAIL",
              t.passed, t.total, unit.c_str());
  for (const auto& n : t.notes) std::printf("    %s\n", n.c_str());
  return t.ok() ? 0 : 1;
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  Convergence conv;
  std::size_t failures = 0;

  // Criteria 1 and 2: CE triples and the nineteen derived sequences.
  Tally ce, labels;
  std::size_t nonzero_connecting = 0;
  for (std::uint64_t i = 0; i < 50; ++i) {
    const GenConfig cfg = batch(1).derived(i);
    const std::string what = "instance " + std::to_string(i);
    guarded(ce, what, [&] {
      const auto p = gen_poset(cfg);
      const SESOfComplexes s = Forge(cfg).ses_complexes(p);
      const bool bounded = p->size() <= cfg.max_elements && within_bounds(s, cfg);
      const CETriple t = build_ce_triple(s, default_ce_depth(*p));
      const CEReport r = verify_ce_triple(t);
      ce.record(bounded && r.ok(), what + (r.failures.empty() ? "" : ": " + r.failures.front()));
      const SESInvariants inv = compute_invariants(s, false);
      for (const auto& [label, ok] : inv.label_ok) labels.record(ok, what + " " + label);
      if (inv.label_ok.size() != 19) labels.record(false, what + ": label count");
      for (const auto& d : inv.degrees) nonzero_connecting += !d.conn.is_zero();
      for (std::size_t k = 0; k < 3; ++k) {
        const DoubleComplex dc = apply_sections(t.res[k]);
        conv.check(pages_from_filtration(dc, FiltrationMode::ByP), &dc, what + " CE column");
      }
    });
  }
  failures += report(1, "CE-triple validity", ce, "triples");
  failures += report(2, "nineteen-sequence exactness", labels, "labels");

  // Criteria 3 and 4: Leray instances against the oracle.
  Tally e2, first;
  std::size_t higher_rows = 0;
  for (std::uint64_t i = 0; i < 25; ++i) {
    const GenConfig cfg = batch(3).derived(i);
    const std::string what = "instance " + std::to_string(i);
    guarded(e2, what, [&] {
      const GeneratedInstance inst = gen_instance(cfg);
      const GrothendieckData d = leray_ss(inst.map, inst.sheaf);
      const Dims ours = page_dimensions(d.by_p).front();
      Dims expected;
      for (const auto& [key, n] : d.expected_e2)
        if (n != 0) expected[key] = n;
      bool ok = d.ok() && ours == oracle::leray_e2(oracle::from_sheaf(inst.sheaf), inst.map) &&
                ours == expected;
      for (const auto& [key, m] : d.e2_identification) ok = ok && invertible(m);
      for (const auto& [key, m] : d.e1_identification) ok = ok && invertible(m);
      e2.record(ok, what);
      first.record(first_ss_check(d).ok(), what);
      higher_rows += std::any_of(ours.begin(), ours.end(), [](const auto& kv) { return kv.first.second > 0; });
      conv.check(d, what + " Leray");
    });
  }
  failures += report(3, "E2 identification", e2, "instances");
  failures += report(4, "first-sequence check", first, "instances");

  // Criterion 5: the coboundary maps between the spectral sequences.
  Tally main_thm;
  std::size_t certificates = 0, negative_signs = 0;
  for (std::uint64_t i = 0; i < 25; ++i) {
    const GenConfig cfg = batch(5).derived(i);
    const std::string what = "instance " + std::to_string(i);
    guarded(main_thm, what, [&] {
      const GeneratedInstance inst = gen_instance(cfg);
      const LerayDelta ld = leray_delta(inst.map, inst.iota, inst.pi);
      const MainTheoremReport& r = ld.report;
      bool ok = r.ok() && r.certificates_verified == r.certificates && r.e2_sign.has_value();
      for (const auto& s : r.page_signs) {
        ok = ok && s.has_value();
        negative_signs += s == -1;
      }
      certificates += r.certificates;
      main_thm.record(ok, what + (r.failures.empty() ? "" : ": " + r.failures.front()));
      conv.check(ld.family, what + " coboundary");
    });
  }
  failures += report(5, "coboundary maps of spectral sequences", main_thm, "sequences");

  // Criterion 6: torus fixture.
  Tally torus;
  guarded(torus, "torus", [&] {
    const Instance inst = load_instance(fixtures::data_path("torus.json"));
    const GrothendieckData d = leray_ss(inst.map("pr1"), inst.sheaf("k"));
    const Dims expected{{{0, 0}, 1}, {{0, 1}, 1}, {{1, 0}, 1}, {{1, 1}, 1}};
    const auto pages = page_dimensions(d.by_p);
    torus.record(pages.front() == expected, "E2 table");
    torus.record(oracle::leray_e2(oracle::from_sheaf(inst.sheaf("k")), inst.map("pr1")) == expected,
                 "oracle E2 table");
    torus.record(std::all_of(pages.begin(), pages.end(), [&](const Dims& p) { return p == expected; }),
                 "degeneration at E2");
    std::vector<std::size_t> h;
    for (const auto& [n, c] : d.by_p.total) h.push_back(c.dim());
    while (!h.empty() && h.back() == 0) h.pop_back();
    auto betti = oracle::betti(inst.poset("T"));
    while (!betti.empty() && betti.back() == 0) betti.pop_back();
    torus.record(h == std::vector<std::size_t>{1, 2, 1} && h == betti, "H = 1, 2, 1");
    conv.check(d, "torus");
  });
  failures += report(6, "torus fixture", torus, "checks");

  // Criterion 7: injective middle term over the torus.
  Tally acyclic;
  guarded(acyclic, "injective middle", [&] {
    const Instance inst = load_instance(fixtures::data_path("injective_middle.json"));
    const SheafSequence& s = *inst.sequence("inj").sheaves;
    const DeltaFamily fam = delta_morphism(FunctorPair::pushforward(inst.map("pr1")), s.iota, s.pi);
    const AcyclicMiddleReport r = acyclic_middle_analysis(fam);
    acyclic.record(r.total_iso, "total degree");
    acyclic.record(r.filtration_iso, "filtration levels");
    acyclic.record(r.e_inf_iso, "E_inf");
    conv.check(fam, "injective middle");
  });
  failures += report(7, "acyclic middle term", acyclic, "checks");

  // Criterion 8: convergence everywhere above, plus the staircase.
  guarded(conv.tally, "staircase", [&] {
    const DoubleComplex dc = fixtures::staircase();
    const SpectralSequence ss = pages_from_filtration(dc, FiltrationMode::ByP);
    const auto d2 = ss.page(2).d.find({0, 1});
    const bool nonzero_d2 = d2 != ss.page(2).d.end() && rank(d2->second) == 1;
    const bool e3_zero = page_dimensions(ss).at(1).empty();
    conv.tally.record(nonzero_d2 && e3_zero, "staircase d_2 and E_3");
    conv.check(ss, &dc, "staircase");
  });
  failures += report(8, "convergence", conv.tally, "spectral sequences");

  // Criterion 9: dimension tables under two independent choices.
  Tally choices;
  for (std::uint64_t i = 0; i < 10; ++i) {
    const GenConfig cfg = batch(9).derived(i);
    const std::string what = "instance " + std::to_string(i);
    guarded(choices, what, [&] {
      const GeneratedInstance inst = gen_instance(cfg);
      ChoicePolicy policy(cfg.seed, true);
      PipelineOptions other;
      other.policy = &policy;
      const GrothendieckData a = leray_ss(inst.map, inst.sheaf);
      const GrothendieckData b = leray_ss(inst.map, inst.sheaf, other);
      const DeltaFamily fa = delta_morphism(FunctorPair::pushforward(inst.map), inst.iota, inst.pi);
      const DeltaFamily fb = delta_morphism(FunctorPair::pushforward(inst.map), inst.iota, inst.pi, other);
      choices.record(same_tables(a.by_p, b.by_p) && same_tables(fa.ss_a, fb.ss_a) &&
                         same_tables(fa.ss_c, fb.ss_c),
                     what);
    });
  }
  failures += report(9, "choice independence", choices, "instances");

  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("nontrivial: %zu nonzero connecting maps, %zu Leray tables with q > 0, "
              "%zu certificates, %zu pages with sign -1\n",
              nonzero_connecting, higher_rows, certificates, negative_signs);
  std::printf("%s in %.1f s\n", failures == 0 ? "all criteria pass" : "some criteria fail", seconds);
  return failures == 0 ? 0 : 1;
}
