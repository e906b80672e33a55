#include "cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "sheafss/errors.hpp"
#include "sheafss/forge.hpp"
#include "sheafss/gross.hpp"
#include "sheafss/instance.hpp"

namespace sheafss::cli {

namespace {

using json = nlohmann::json;

struct Globals {
  std::string field = "";
  std::optional<std::size_t> max_degree;
  std::optional<std::uint64_t> seed;  // perturbs the non-canonical choices
  std::string format = "text";
};

struct Ctx {
  const Globals& g;
  std::ostream& out;
  std::ostream& err;
  std::unique_ptr<ChoicePolicy> policy;
  bool report() const { return g.format == "report"; }
};

std::optional<Field> field_override(const Globals& g) {
  if (g.field.empty()) return std::nullopt;
  return Field::parse(g.field);
}

const char* verdict(bool ok) { return ok ? "PASS" : "FAIL"; }

std::string sign_text(const std::optional<int>& s) {
  if (!s) return "none";
  return *s > 0 ? "+1" : "-1";
}

PipelineOptions options(const Ctx& c, const Poset& source, const Poset& target) {
  PipelineOptions opt;
  opt.policy = c.policy.get();
  if (c.g.max_degree) {
    const std::size_t terms = *c.g.max_degree + 1;
    if (terms < default_resolution_length(source) || terms < default_ce_depth(target))
      c.err << "warning: --max-degree " << *c.g.max_degree << " is below the safe bound for these posets\n";
    opt.resolution_length = terms;
    opt.ce_depth = terms;
  }
  return opt;
}

FunctorPair functor_for(const Instance& inst, const std::string& map, const SheafPtr& s) {
  if (map.empty() || map == "id") return FunctorPair::identity_on(s->poset());
  return FunctorPair::pushforward(inst.map(map));
}

const SheafSequence& sheaf_sequence(const Instance& inst, const std::string& name) {
  const NamedSequence& s = inst.sequence(name);
  if (!s.sheaves) throw PreconditionFailed("sequence '" + name + "' is a sequence of complexes, not of sheaves");
  return *s.sheaves;
}

void print_dims(std::ostream& out, const std::vector<std::size_t>& dims) {
  for (std::size_t q = 0; q < dims.size(); ++q) out << "H^" << q << " = " << dims[q] << "\n";
}

// First page after which every differential vanishes.
int degeneration_page(const SpectralSequence& ss) {
  int last = 1;
  for (int r = 1; r <= ss.r_inf; ++r)
    for (const auto& [k, m] : ss.page(r).d)
      if (!m.is_zero()) last = r;
  return std::max(last + 1, 2);
}

std::vector<std::size_t> total_dims(const SpectralSequence& ss) {
  std::vector<std::size_t> out;
  int top = -1;
  for (const auto& [n, h] : ss.total)
    if (h.dim() > 0) top = std::max(top, n);
  for (int n = 0; n <= top; ++n) out.push_back(ss.total.count(n) ? ss.total.at(n).dim() : 0);
  return out;
}

// ---------------------------------------------------------------- commands

int cmd_validate(const Ctx& c, const std::string& path) {
  Instance inst = load_instance(path, field_override(c.g));
  if (c.report()) {
    c.out << json{{"file", path},
                  {"ok", true},
                  {"posets", inst.posets.size()},
                  {"maps", inst.maps.size()},
                  {"sheaves", inst.sheaves.size()},
                  {"morphisms", inst.morphisms.size()},
                  {"complexes", inst.complexes.size()},
                  {"sequences", inst.sequences.size()}}
                 .dump(2)
          << "\n";
    return 0;
  }
  c.out << "OK " << path << "\n";
  if (inst.object_count() == 0) {
    c.out << "nothing defined\n";
    return 0;
  }
  c.out << "  posets " << inst.posets.size() << ", maps " << inst.maps.size() << ", sheaves "
        << inst.sheaves.size() << ", morphisms " << inst.morphisms.size() << ", complexes "
        << inst.complexes.size() << ", sequences " << inst.sequences.size() << "\n";
  return 0;
}

int cmd_cohomology(const Ctx& c, const Instance& inst, const std::string& sheaf, const std::string& open) {
  SheafPtr s = inst.sheaf(sheaf);
  std::string where = "X";
  if (!open.empty()) {
    ElementSet u;
    std::stringstream ss(open);
    std::string item;
    while (std::getline(ss, item, ',')) u.push_back(s->poset()->index(item));
    std::sort(u.begin(), u.end());
    u.erase(std::unique(u.begin(), u.end()), u.end());
    if (!s->poset()->is_open(u)) throw NotOpen(s->poset()->describe(u) + " is not an up-set");
    where = s->poset()->describe(u);
    s = restrict_to_open(s, u);
  }
  auto dims = cohomology_dims(s);
  if (c.report()) {
    c.out << json{{"sheaf", sheaf}, {"open", where}, {"dims", dims}}.dump(2) << "\n";
    return 0;
  }
  c.out << "cohomology of " << sheaf << " on " << where << "\n";
  print_dims(c.out, dims);
  return 0;
}

int cmd_resolve(const Ctx& c, const Instance& inst, const std::string& sheaf) {
  SheafPtr s = inst.sheaf(sheaf);
  std::size_t len = c.g.max_degree ? *c.g.max_degree + 1 : default_resolution_length(*s->poset());
  Resolution r = injective_resolution(s, len);
  const Poset& p = *s->poset();
  json terms = json::array();
  for (const auto& t : r.terms) {
    json parts = json::array();
    for (const auto& m : t->summands()) parts.push_back({{"point", p.name(m.point)}, {"multiplicity", m.multiplicity}});
    terms.push_back(parts);
  }
  if (c.report()) {
    c.out << json{{"sheaf", sheaf}, {"length", r.length()}, {"terms", terms}}.dump(2) << "\n";
    return 0;
  }
  c.out << "injective resolution of " << sheaf << " (" << r.length() << " terms)\n";
  for (std::size_t q = 0; q < r.terms.size(); ++q) {
    c.out << "I^" << q << " =";
    if (r.terms[q]->summands().empty()) c.out << " 0";
    bool first = true;
    for (const auto& m : r.terms[q]->summands()) {
      c.out << (first ? " " : " + ") << "[" << p.name(m.point) << "]";
      if (m.multiplicity > 1) c.out << "^" << m.multiplicity;
      first = false;
    }
    c.out << "\n";
  }
  return 0;
}

int cmd_ce(const Ctx& c, const Instance& inst, const std::string& seq) {
  SESOfComplexes s = inst.sequence(seq).as_complexes();
  const Poset& p = *s.b->poset;
  std::size_t depth = c.g.max_degree ? *c.g.max_degree + 1 : default_ce_depth(p);
  SESInvariants inv = compute_invariants(s, false);
  CETriple t = build_ce_triple(s, depth);
  CEReport rep = verify_ce_triple(t);
  std::size_t exact = 0;
  for (const auto& [label, ok] : inv.label_ok) exact += ok ? 1 : 0;
  const bool ok = rep.ok() && inv.all_exact();
  if (c.report()) {
    json labels = json::object();
    for (const auto& [label, good] : inv.label_ok) labels[label] = good;
    c.out << json{{"sequence", seq},
                  {"width", t.res[kA].width()},
                  {"degrees", {t.res[kA].lo, t.res[kA].hi}},
                  {"derived_sequences", labels},
                  {"injective", rep.injective},
                  {"rows_exact", rep.rows_exact},
                  {"cocycles", rep.cocycles},
                  {"coboundaries", rep.coboundaries},
                  {"cohomology", rep.cohomology},
                  {"squares_commute", rep.squares_commute},
                  {"failures", rep.failures},
                  {"ok", ok}}
                 .dump(2)
          << "\n";
    return ok ? 0 : 1;
  }
  c.out << "Cartan-Eilenberg triple for " << seq << ": " << t.res[kA].width() << " columns, degrees "
        << t.res[kA].lo << ".." << t.res[kA].hi << "\n";
  c.out << "derived sequences exact  " << exact << "/" << inv.label_ok.size() << "\n";
  c.out << "injective terms          " << verdict(rep.injective) << "\n";
  c.out << "rows exact               " << verdict(rep.rows_exact) << "\n";
  c.out << "cocycles                 " << verdict(rep.cocycles) << "\n";
  c.out << "coboundaries             " << verdict(rep.coboundaries) << "\n";
  c.out << "cohomology               " << verdict(rep.cohomology) << "\n";
  c.out << "squares commute          " << verdict(rep.squares_commute) << "\n";
  for (const auto& f : rep.failures) c.out << "  " << f << "\n";
  return ok ? 0 : 1;
}

int cmd_spectral(const Ctx& c, const Instance& inst, const std::string& map, const std::string& sheaf,
                 bool all_pages) {
  SheafPtr s = inst.sheaf(sheaf);
  FunctorPair pair = functor_for(inst, map, s);
  GrothendieckData d = grothendieck_ss(pair, s, options(c, *pair.source(), *pair.target()));
  FirstSSReport first = first_ss_check(d);
  const bool ok = d.ok() && first.ok();
  const int degenerate = degeneration_page(d.by_p);
  auto dims = total_dims(d.by_p);
  if (c.report()) {
    c.out << json{{"map", map.empty() ? "id" : map},
                  {"sheaf", sheaf},
                  {"field", d.r.field.name()},
                  {"grothendieck", to_json(d)},
                  {"first_filtration", to_json(first)},
                  {"degenerates_at", degenerate},
                  {"cohomology", dims},
                  {"ok", ok}}
                 .dump(2)
          << "\n";
    return ok ? 0 : 1;
  }
  c.out << (all_pages ? "Grothendieck" : "Leray") << " spectral sequence of " << (map.empty() ? "id" : map)
        << " with coefficients in " << sheaf << " (field " << d.r.field.name() << ")\n";
  for (int r = all_pages ? 1 : 2; r <= (all_pages ? d.by_p.r_inf : 2); ++r) c.out << page_table(d.by_p, r);
  c.out << "degenerates at E" << degenerate << "\n";
  print_dims(c.out, dims);
  c.out << "E2 identification        " << verdict(d.ok()) << "\n";
  c.out << "first filtration         " << verdict(first.ok()) << "\n";
  for (const auto& f : d.failures) c.out << "  " << f << "\n";
  for (const auto& f : first.failures) c.out << "  " << f << "\n";
  return ok ? 0 : 1;
}

struct DeltaInputs {
  FunctorPair pair;
  SheafSequence seq;
  PipelineOptions opt;
};

DeltaInputs delta_inputs(const Ctx& c, const Instance& inst, const std::string& map, const std::string& seq) {
  const SheafSequence& s = sheaf_sequence(inst, seq);
  FunctorPair pair = functor_for(inst, map, s.iota.source);
  return {pair, s, options(c, *pair.source(), *pair.target())};
}

int cmd_delta(const Ctx& c, const Instance& inst, const std::string& map, const std::string& seq) {
  DeltaInputs in = delta_inputs(c, inst, map, seq);
  DeltaFamily fam = delta_morphism(in.pair, in.seq.iota, in.seq.pi, in.opt);
  bool ok = fam.failures.empty();
  for (const auto& pm : fam.pages) ok = ok && pm.sign && pm.failures.empty();
  if (c.report()) {
    json pages = json::array();
    for (const auto& pm : fam.pages) {
      json maps = json::array();
      for (const auto& [k, m] : pm.maps)
        if (!m.empty())
          maps.push_back({{"p", k.first}, {"q", k.second - k.first}, {"rank", rank(m)}, {"matrix", m.to_strings()}});
      pages.push_back({{"r", pm.r}, {"sign", pm.sign ? json(*pm.sign) : json(nullptr)}, {"maps", maps},
                       {"failures", pm.failures}});
    }
    json conn = json::object();
    for (const auto& [n, m] : fam.total_connecting) conn[std::to_string(n)] = m.to_strings();
    c.out << json{{"map", map},
                  {"sequence", seq},
                  {"couple_signs",
                   {{"i", fam.couple_signs.i.value_or(0)}, {"j", fam.couple_signs.j.value_or(0)},
                    {"k", fam.couple_signs.k.value_or(0)}}},
                  {"pages", pages},
                  {"total_connecting", conn},
                  {"ok", ok}}
                 .dump(2)
          << "\n";
    return ok ? 0 : 1;
  }
  c.out << "coboundary maps for " << seq << " along " << (map.empty() ? "id" : map) << "\n";
  c.out << "couple morphism signs: i " << sign_text(fam.couple_signs.i) << ", j " << sign_text(fam.couple_signs.j)
        << ", k " << sign_text(fam.couple_signs.k) << "\n";
  for (const auto& pm : fam.pages) {
    c.out << "delta_" << pm.r << " (sign " << sign_text(pm.sign) << "):";
    bool any = false;
    for (const auto& [k, m] : pm.maps) {
      if (m.empty()) continue;
      c.out << " (" << k.first << "," << k.second - k.first << ")->(" << k.first << "," << k.second - k.first + 1
            << ") rank " << rank(m) << ";";
      any = true;
    }
    if (!any) c.out << " all zero";
    c.out << "\n";
    for (const auto& f : pm.failures) c.out << "  " << f << "\n";
  }
  for (const auto& [n, m] : fam.total_connecting)
    c.out << "H^" << n << "(C) -> H^" << n + 1 << "(A): rank " << rank(m) << "\n";
  return ok ? 0 : 1;
}

int cmd_verify_main(const Ctx& c, const Instance& inst, const std::string& map, const std::string& seq) {
  DeltaInputs in = delta_inputs(c, inst, map, seq);
  DeltaFamily fam = delta_morphism(in.pair, in.seq.iota, in.seq.pi, in.opt);
  MainTheoremReport rep = verify_main_theorem(fam);
  if (c.report()) {
    json r = to_json(rep);
    r["map"] = map;
    r["sequence"] = seq;
    c.out << r.dump(2) << "\n";
    return rep.ok() ? 0 : 1;
  }
  c.out << "main theorem for " << seq << " along " << (map.empty() ? "id" : map) << "\n";
  c.out << "delta_r commutes with d_r, delta_{r+1} induced   " << verdict(rep.commutes_with_differentials)
        << "  signs";
  for (const auto& s : rep.page_signs) c.out << " " << sign_text(s);
  c.out << "\n";
  c.out << "delta_2 is the derived connecting map             " << verdict(rep.expected_form) << "  sign "
        << sign_text(rep.e2_sign) << "\n";
  c.out << "filtration and graded pieces                      " << verdict(rep.respects_filtration) << "  sign "
        << sign_text(rep.graded_sign) << ", certificates " << rep.certificates_verified << "/" << rep.certificates
        << "\n";
  for (const auto& f : rep.failures) c.out << "  " << f << "\n";
  return rep.ok() ? 0 : 1;
}

int cmd_verify_cz(const Ctx& c, const Instance& inst, const std::string& map, const std::string& seq) {
  DeltaInputs in = delta_inputs(c, inst, map, seq);
  if (in.pair.identity) throw PreconditionFailed("verify-cz needs a map");
  AcyclicMiddleReport rep = acyclic_middle_analysis(in.pair.f, in.seq.iota, in.seq.pi, in.opt);
  if (c.report()) {
    json r = to_json(rep);
    r["map"] = map;
    r["sequence"] = seq;
    c.out << r.dump(2) << "\n";
    return rep.ok() ? 0 : 1;
  }
  c.out << "acyclic middle term for " << seq << " along " << map << "\n";
  c.out << "H^n(C) -> H^{n+1}(A)                       " << verdict(rep.total_iso) << "\n";
  c.out << "F^p H^n(C) -> F^p H^{n+1}(A)               " << verdict(rep.filtration_iso) << "\n";
  c.out << "E_inf^{p,q}(C) -> E_inf^{p,q+1}(A)         " << verdict(rep.e_inf_iso) << "\n";
  for (const auto& f : rep.failures) c.out << "  " << f << "\n";
  return rep.ok() ? 0 : 1;
}

struct SelftestItem {
  bool ce = false, sequences = false, e2 = false, first = false, main = false, independent = false;
  std::string error;
  [[nodiscard]] bool ok() const { return ce && sequences && e2 && first && main && independent && error.empty(); }
};

SelftestItem selftest_item(const GenConfig& cfg) {
  SelftestItem item;
  try {
    Forge g(cfg);
    PosetPtr p = g.poset();
    SESOfComplexes s = g.ses_complexes(p);
    SESInvariants inv = compute_invariants(s, false);
    item.sequences = inv.all_exact();
    item.ce = verify_ce_triple(build_ce_triple(s, default_ce_depth(*p))).ok();
    GeneratedInstance gi = gen_instance(cfg.derived(1));
    GrothendieckData d = leray_ss(gi.map, gi.sheaf);
    item.e2 = d.ok();
    item.first = first_ss_check(d).ok();
    item.main = leray_delta(gi.map, gi.iota, gi.pi).report.ok();
    ChoicePolicy policy(cfg.seed, true);
    PipelineOptions opt;
    opt.policy = &policy;
    GrothendieckData other = leray_ss(gi.map, gi.sheaf, opt);
    item.independent = page_dimensions(d.by_p).back() == page_dimensions(other.by_p).back();
  } catch (const Error& e) {
    item.error = e.what();
  }
  return item;
}

int cmd_selftest(const Ctx& c, std::uint64_t seed, std::size_t count) {
  GenConfig base;
  base.seed = seed;
  if (auto f = field_override(c.g)) base.field = *f;
  std::size_t passed = 0;
  json items = json::array();
  for (std::size_t i = 0; i < count; ++i) {
    SelftestItem it = selftest_item(base.derived(i));
    passed += it.ok() ? 1 : 0;
    if (c.report()) {
      items.push_back({{"index", i},
                       {"ce", it.ce},
                       {"derived_sequences", it.sequences},
                       {"e2", it.e2},
                       {"first_filtration", it.first},
                       {"main_theorem", it.main},
                       {"choice_independence", it.independent},
                       {"error", it.error},
                       {"ok", it.ok()}});
      continue;
    }
    c.out << "instance " << std::setw(3) << i << ": " << verdict(it.ok());
    if (!it.ok()) {
      c.out << " (";
      if (!it.error.empty()) c.out << it.error;
      else
        c.out << "ce " << verdict(it.ce) << ", sequences " << verdict(it.sequences) << ", e2 " << verdict(it.e2)
              << ", first " << verdict(it.first) << ", main " << verdict(it.main) << ", independence "
              << verdict(it.independent);
      c.out << ")";
    }
    c.out << "\n";
  }
  if (c.report())
    c.out << json{{"seed", seed}, {"count", count}, {"passed", passed}, {"items", items}}.dump(2) << "\n";
  else
    c.out << passed << "/" << count << " PASS\n";
  return passed == count ? 0 : 1;
}

Instance forged_instance(const GenConfig& cfg) {
  GeneratedInstance gi = gen_instance(cfg);
  Instance inst;
  inst.field = cfg.field;
  inst.posets["P"] = gi.map.source;
  if (gi.map.target != gi.map.source) inst.posets["Q"] = gi.map.target;
  inst.maps.emplace("f", gi.map);
  inst.sheaves["F"] = gi.sheaf;
  inst.sheaves["A"] = gi.iota.source;
  inst.sheaves["B"] = gi.iota.target;
  inst.sheaves["C"] = gi.pi.target;
  inst.morphisms.emplace("iota", gi.iota);
  inst.morphisms.emplace("pi", gi.pi);
  inst.sequences.emplace("S", NamedSequence{SheafSequence{gi.iota, gi.pi}, std::nullopt});

  SESOfComplexes s = Forge(cfg.derived(2)).ses_complexes(gi.map.source);
  auto name_complex = [&](const std::string& tag, const ComplexPtr& x) {
    for (int q = x->lo; q <= x->hi(); ++q) inst.sheaves[tag + std::to_string(q - x->lo)] = x->obj(q);
    for (int q = x->lo; q < x->hi(); ++q)
      inst.morphisms.emplace("d" + tag + std::to_string(q - x->lo), x->d(q));
    inst.complexes[tag] = x;
  };
  name_complex("KA", s.a);
  name_complex("KB", s.b);
  name_complex("KC", s.c);
  for (std::size_t i = 0; i < s.iota.comps.size(); ++i) {
    inst.morphisms.emplace("kiota" + std::to_string(i), s.iota.comps[i]);
    inst.morphisms.emplace("kpi" + std::to_string(i), s.pi.comps[i]);
  }
  inst.sequences.emplace("K", NamedSequence{std::nullopt, s});
  return inst;
}

int cmd_forge(const Ctx& c, std::uint64_t seed, const std::string& output) {
  GenConfig cfg;
  cfg.seed = seed;
  if (auto f = field_override(c.g)) cfg.field = *f;
  std::string text = to_json(forged_instance(cfg)).dump(2) + "\n";
  if (output.empty() || output == "-") {
    c.out << text;
    return 0;
  }
  std::ofstream f(output);
  if (!f) throw ParseError("cannot write '" + output + "'");
  f << text;
  c.err << "wrote " << output << "\n";
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sheaf cohomology, Cartan-Eilenberg resolutions and coboundary maps of spectral sequences"};
  app.name("sheafss");
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--field", g.field, "Coefficient field: q or fp:<prime> (default: the file's field)");
  app.add_option("--max-degree", g.max_degree, "Truncation degree for resolutions (default: from the posets)");
  app.add_option("--seed", g.seed, "Seed for randomised choices in the resolutions");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"text", "report"}));

  std::string file, sheaf, open, map, seq, output;
  std::uint64_t seed = 0;
  std::size_t count = 25;

  auto with_file = [&](CLI::App* sub) { sub->add_option("file", file, "Instance file")->required(); };
  auto* validate = app.add_subcommand("validate", "Parse an instance file and check every object");
  with_file(validate);
  auto* coh = app.add_subcommand("cohomology", "Sheaf cohomology dimensions");
  with_file(coh);
  coh->add_option("--sheaf", sheaf)->required();
  coh->add_option("--open", open, "Comma-separated elements of an open set");
  auto* resolve = app.add_subcommand("resolve", "Canonical injective resolution");
  with_file(resolve);
  resolve->add_option("--sheaf", sheaf)->required();
  auto* ce = app.add_subcommand("ce", "Compatible Cartan-Eilenberg resolutions of a sequence");
  with_file(ce);
  ce->add_option("--sequence", seq)->required();
  auto* gss = app.add_subcommand("gss", "Grothendieck spectral sequence, every page");
  with_file(gss);
  gss->add_option("--map", map, "Monotone map, or id");
  gss->add_option("--sheaf", sheaf)->required();
  auto* leray = app.add_subcommand("leray", "Leray spectral sequence: E2 table and abutment");
  with_file(leray);
  leray->add_option("--map", map)->required();
  leray->add_option("--sheaf", sheaf)->required();
  auto* delta = app.add_subcommand("delta", "Coboundary maps between the spectral sequences of C and A");
  auto* vmain = app.add_subcommand("verify-main", "Check the three statements about the coboundary maps");
  auto* vcz = app.add_subcommand("verify-cz", "Acyclic middle term: isomorphisms on E_inf and filtrations");
  for (auto* sub : {delta, vmain, vcz}) {
    with_file(sub);
    sub->add_option("--map", map)->required();
    sub->add_option("--sequence", seq)->required();
  }
  auto* selftest = app.add_subcommand("selftest", "Run the checks on generated instances");
  selftest->add_option("--seed", seed);
  selftest->add_option("--count", count);
  auto* forge = app.add_subcommand("forge", "Write a generated instance file");
  forge->add_option("--seed", seed);
  forge->add_option("--output,-o", output, "Output path (default: standard output)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  Ctx c{g, out, err, nullptr};
  if (g.seed) c.policy = std::make_unique<ChoicePolicy>(*g.seed, true);
  if (g.seed && (*selftest || *forge) && seed == 0) seed = *g.seed;
  try {
    if (*validate) return cmd_validate(c, file);
    if (*selftest) return cmd_selftest(c, seed, count);
    if (*forge) return cmd_forge(c, seed, output);
    Instance inst = load_instance(file, field_override(g));
    if (*coh) return cmd_cohomology(c, inst, sheaf, open);
    if (*resolve) return cmd_resolve(c, inst, sheaf);
    if (*ce) return cmd_ce(c, inst, seq);
    if (*gss) return cmd_spectral(c, inst, map, sheaf, true);
    if (*leray) return cmd_spectral(c, inst, map, sheaf, false);
    if (*delta) return cmd_delta(c, inst, map, seq);
    if (*vmain) return cmd_verify_main(c, inst, map, seq);
    if (*vcz) return cmd_verify_cz(c, inst, map, seq);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace sheafss::cli
