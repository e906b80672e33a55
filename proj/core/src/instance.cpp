#include "sheafss/instance.hpp"

#include <fstream>
#include <sstream>

#include "sheafss/errors.hpp"

namespace sheafss {

using ojson = nlohmann::ordered_json;

namespace {

template <class T>
const T& find_named(const std::map<std::string, T>& m, const std::string& kind, const std::string& name) {
  auto it = m.find(name);
  if (it == m.end()) throw DanglingReference("unknown " + kind + " '" + name + "'");
  return it->second;
}

std::string where(const std::string& kind, const std::string& name) { return kind + " '" + name + "': "; }

Matrix read_matrix(const ojson& j, std::size_t rows, std::size_t cols, Field field) {
  if (!j.is_array()) throw ParseError("matrix must be an array of rows");
  std::vector<std::vector<std::string>> data;
  for (const auto& row : j) {
    if (!row.is_array()) throw ParseError("matrix rows must be arrays");
    std::vector<std::string> r;
    for (const auto& e : row) {
      if (e.is_string()) r.push_back(e.get<std::string>());
      else if (e.is_number_integer()) r.push_back(std::to_string(e.get<long long>()));
      else throw ParseError("matrix entries must be strings \"n\" or \"n/d\"");
    }
    data.push_back(std::move(r));
  }
  if (data.empty() && rows != 0) return Matrix(rows, cols, field);
  Matrix m = Matrix::parse(data, cols, field);
  if (m.rows() != rows || m.cols() != cols)
    throw DimensionMismatch("matrix is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                            ", expected " + std::to_string(rows) + "x" + std::to_string(cols));
  return m;
}

ojson write_matrix(const Matrix& m) {
  ojson out = ojson::array();
  for (const auto& row : m.to_strings()) out.push_back(row);
  return out;
}

std::string get_string(const ojson& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_string())
    throw ParseError(std::string("missing string field '") + key + "'");
  return j.at(key).get<std::string>();
}

struct Parser {
  Instance inst;
  std::map<std::string, std::pair<std::string, std::string>> factors;  // product posets

  void posets(const ojson& j) {
    for (const auto& [name, def] : j.items()) {
      try {
        if (def.contains("product")) {
          auto parts = def.at("product").get<std::vector<std::string>>();
          if (parts.size() != 2) throw ParseError("a product needs exactly two factors");
          inst.posets[name] = product(*inst.poset(parts[0]), *inst.poset(parts[1]));
          factors[name] = {parts[0], parts[1]};
          continue;
        }
        auto elements = def.at("elements").get<std::vector<std::string>>();
        std::vector<std::pair<std::string, std::string>> covers;
        if (def.contains("covers"))
          for (const auto& c : def.at("covers")) {
            auto pair = c.get<std::vector<std::string>>();
            if (pair.size() != 2) throw ParseError("a cover is a pair [x, y]");
            covers.emplace_back(pair[0], pair[1]);
          }
        inst.posets[name] = Poset::from_covers(std::move(elements), covers);
      } catch (const nlohmann::json::exception& e) {
        throw ParseError(where("poset", name) + e.what());
      } catch (const Error& e) {
        throw ParseError(where("poset", name) + e.what());
      }
    }
  }

  void maps(const ojson& j) {
    for (const auto& [name, def] : j.items()) {
      try {
        const PosetPtr& src = inst.poset(get_string(def, "source"));
        const PosetPtr& tgt = inst.poset(get_string(def, "target"));
        if (def.contains("projection")) {
          auto it = factors.find(get_string(def, "source"));
          if (it == factors.end()) throw ParseError("projection needs a product source");
          int which = def.at("projection").get<int>();
          const std::string& factor = which == 0 ? it->second.first : it->second.second;
          if (factor != get_string(def, "target"))
            throw ParseError("projection " + std::to_string(which) + " lands in '" + factor + "'");
          inst.maps.emplace(name, MonotoneMap::projection(src, inst.poset(it->second.first),
                                                          inst.poset(it->second.second), which));
          continue;
        }
        std::vector<std::size_t> values(src->size(), 0);
        if (def.contains("constant")) {
          std::size_t v = tgt->index(def.at("constant").get<std::string>());
          std::fill(values.begin(), values.end(), v);
        } else {
          const auto& vals = def.at("values");
          for (std::size_t x = 0; x < src->size(); ++x) {
            if (!vals.contains(src->name(x))) throw ParseError("no value for element '" + src->name(x) + "'");
            values[x] = tgt->index(vals.at(src->name(x)).get<std::string>());
          }
        }
        inst.maps.emplace(name, MonotoneMap::create(src, tgt, std::move(values)));
      } catch (const DanglingReference& e) {
        throw DanglingReference(where("map", name) + e.what());
      } catch (const NotMonotone& e) {
        throw NotMonotone(where("map", name) + e.what());
      } catch (const nlohmann::json::exception& e) {
        throw ParseError(where("map", name) + e.what());
      } catch (const Error& e) {
        throw ParseError(where("map", name) + e.what());
      }
    }
  }

  void sheaves(const ojson& j) {
    const Field f = inst.field;
    for (const auto& [name, def] : j.items()) {
      try {
        const PosetPtr& p = inst.poset(get_string(def, "poset"));
        if (def.contains("constant")) {
          inst.sheaves[name] = Sheaf::constant(p, f, def.at("constant").get<std::size_t>());
        } else if (def.contains("coinduced")) {
          std::vector<CoinducedSummand> parts;
          for (const auto& s : def.at("coinduced"))
            parts.push_back({p->index(s.at(0).get<std::string>()), s.at(1).get<std::size_t>()});
          inst.sheaves[name] = Sheaf::coinduced(p, f, std::move(parts));
        } else {
          std::vector<std::size_t> dims(p->size(), 0);
          for (const auto& [x, d] : def.at("stalks").items()) dims.at(p->index(x)) = d.get<std::size_t>();
          std::map<std::pair<std::size_t, std::size_t>, Matrix> maps;
          if (def.contains("restrictions"))
            for (const auto& [key, m] : def.at("restrictions").items()) {
              auto lt = key.find('<');
              if (lt == std::string::npos) throw ParseError("restriction key '" + key + "' is not of the form x<y");
              std::size_t x = p->index(key.substr(0, lt)), y = p->index(key.substr(lt + 1));
              maps[{x, y}] = read_matrix(m, dims[y], dims[x], f);
            }
          inst.sheaves[name] = Sheaf::create(p, f, std::move(dims), maps);
        }
      } catch (const DanglingReference& e) {
        throw DanglingReference(where("sheaf", name) + e.what());
      } catch (const InvalidSheaf& e) {
        throw InvalidSheaf(where("sheaf", name) + e.what());
      } catch (const nlohmann::json::exception& e) {
        throw ParseError(where("sheaf", name) + e.what());
      } catch (const Error& e) {
        throw ParseError(where("sheaf", name) + e.what());
      }
    }
  }

  void morphisms(const ojson& j) {
    for (const auto& [name, def] : j.items()) {
      try {
        if (def.contains("injective_embedding")) {
          SubobjectData e = injective_embed(inst.sheaf(def.at("injective_embedding").get<std::string>()));
          inst.sheaves[get_string(def, "target_name")] = e.object;
          inst.morphisms.emplace(name, e.mono);
        } else if (def.contains("cokernel")) {
          QuotientData c = cokernel(inst.morphism(def.at("cokernel").get<std::string>()));
          inst.sheaves[get_string(def, "target_name")] = c.object;
          inst.morphisms.emplace(name, c.epi);
        } else {
          const SheafPtr& src = inst.sheaf(get_string(def, "source"));
          const SheafPtr& tgt = inst.sheaf(get_string(def, "target"));
          const PosetPtr& p = src->poset();
          std::vector<Matrix> comps;
          const ojson empty = ojson::object();
          const ojson& given = def.contains("components") ? def.at("components") : empty;
          for (std::size_t x = 0; x < p->size(); ++x) {
            if (given.contains(p->name(x)))
              comps.push_back(read_matrix(given.at(p->name(x)), tgt->dim(x), src->dim(x), inst.field));
            else
              comps.push_back(Matrix(tgt->dim(x), src->dim(x), inst.field));
          }
          inst.morphisms.emplace(name, SheafMorphism::create(src, tgt, std::move(comps)));
        }
      } catch (const DanglingReference& e) {
        throw DanglingReference(where("morphism", name) + e.what());
      } catch (const IllFormedMorphism& e) {
        throw IllFormedMorphism(where("morphism", name) + e.what());
      } catch (const nlohmann::json::exception& e) {
        throw ParseError(where("morphism", name) + e.what());
      } catch (const Error& e) {
        throw ParseError(where("morphism", name) + e.what());
      }
    }
  }

  void complexes(const ojson& j) {
    for (const auto& [name, def] : j.items()) {
      try {
        int lo = def.value("lo", 0);
        std::vector<SheafPtr> terms;
        for (const auto& t : def.at("terms")) terms.push_back(inst.sheaf(t.get<std::string>()));
        if (terms.empty()) throw ParseError("a complex needs at least one term");
        std::vector<SheafMorphism> diffs;
        if (def.contains("differentials"))
          for (const auto& d : def.at("differentials")) diffs.push_back(inst.morphism(d.get<std::string>()));
        PosetPtr p = terms.front()->poset();
        inst.complexes[name] = Complex::create(p, inst.field, lo, std::move(terms), std::move(diffs));
      } catch (const DanglingReference& e) {
        throw DanglingReference(where("complex", name) + e.what());
      } catch (const InvalidComplex& e) {
        throw InvalidComplex(where("complex", name) + e.what());
      } catch (const nlohmann::json::exception& e) {
        throw ParseError(where("complex", name) + e.what());
      } catch (const Error& e) {
        throw ParseError(where("complex", name) + e.what());
      }
    }
  }

  void sequences(const ojson& j) {
    for (const auto& [name, def] : j.items()) {
      try {
        NamedSequence seq;
        if (def.at("iota").is_string()) {
          SheafSequence s{inst.morphism(def.at("iota").get<std::string>()),
                          inst.morphism(def.at("pi").get<std::string>())};
          if (s.iota.target != s.pi.source) throw InvalidComplex("iota and pi do not share the middle term");
          seq.sheaves = s;
          (void)seq.as_complexes();  // checks exactness
        } else {
          const ComplexPtr& a = inst.complex(get_string(def, "a"));
          const ComplexPtr& b = inst.complex(get_string(def, "b"));
          const ComplexPtr& c = inst.complex(get_string(def, "c"));
          std::vector<SheafMorphism> ic, pc;
          for (const auto& m : def.at("iota")) ic.push_back(inst.morphism(m.get<std::string>()));
          for (const auto& m : def.at("pi")) pc.push_back(inst.morphism(m.get<std::string>()));
          seq.complexes = SESOfComplexes::create(ChainMap::create(a, b, std::move(ic)),
                                                 ChainMap::create(b, c, std::move(pc)));
        }
        inst.sequences.emplace(name, std::move(seq));
      } catch (const DanglingReference& e) {
        throw DanglingReference(where("sequence", name) + e.what());
      } catch (const InvalidComplex& e) {
        throw InvalidComplex(where("sequence", name) + e.what());
      } catch (const nlohmann::json::exception& e) {
        throw ParseError(where("sequence", name) + e.what());
      } catch (const Error& e) {
        throw ParseError(where("sequence", name) + e.what());
      }
    }
  }
};

template <class T, class P>
std::string name_of(const std::map<std::string, T>& m, const P& ptr, const std::string& kind) {
  for (const auto& [name, v] : m)
    if (v == ptr) return name;
  throw DanglingReference("unnamed " + kind + " in output");
}

std::string morphism_name(const Instance& inst, const SheafMorphism& m) {
  for (const auto& [name, v] : inst.morphisms)
    if (v.source == m.source && v.target == m.target && equal(v, m)) return name;
  throw DanglingReference("unnamed morphism in output");
}

}  // namespace

SESOfComplexes NamedSequence::as_complexes() const {
  if (complexes) return *complexes;
  const SheafSequence& s = *sheaves;
  auto a = Complex::single(s.iota.source), b = Complex::single(s.iota.target), c = Complex::single(s.pi.target);
  return SESOfComplexes::create(ChainMap::create(a, b, {s.iota}), ChainMap::create(b, c, {s.pi}));
}

const PosetPtr& Instance::poset(const std::string& n) const { return find_named(posets, "poset", n); }
const MonotoneMap& Instance::map(const std::string& n) const { return find_named(maps, "map", n); }
const SheafPtr& Instance::sheaf(const std::string& n) const { return find_named(sheaves, "sheaf", n); }
const SheafMorphism& Instance::morphism(const std::string& n) const {
  return find_named(morphisms, "morphism", n);
}
const ComplexPtr& Instance::complex(const std::string& n) const { return find_named(complexes, "complex", n); }
const NamedSequence& Instance::sequence(const std::string& n) const {
  return find_named(sequences, "sequence", n);
}

std::size_t Instance::object_count() const {
  return posets.size() + maps.size() + sheaves.size() + morphisms.size() + complexes.size() +
         sequences.size();
}

Instance parse_instance(const std::string& text, std::optional<Field> field) {
  ojson j;
  try {
    j = text.find_first_not_of(" \t\r\n") == std::string::npos ? ojson::object() : ojson::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON at byte ") + std::to_string(e.byte) + ": " + e.what());
  }
  if (!j.is_object()) throw ParseError("an instance file is a JSON object");
  Parser p;
  p.inst.field = field ? *field : Field::parse(j.value("field", std::string("q")));
  static const char* sections[] = {"field", "posets", "maps", "sheaves", "morphisms", "complexes", "sequences"};
  for (const auto& [key, v] : j.items()) {
    bool known = false;
    for (const char* s : sections) known = known || key == s;
    if (!known) throw ParseError("unknown section '" + key + "'");
    if (key != "field" && !v.is_object()) throw ParseError("section '" + key + "' must be an object");
  }
  const ojson empty = ojson::object();
  auto section = [&](const char* k) -> const ojson& { return j.contains(k) ? j.at(k) : empty; };
  p.posets(section("posets"));
  p.maps(section("maps"));
  p.sheaves(section("sheaves"));
  p.morphisms(section("morphisms"));
  p.complexes(section("complexes"));
  p.sequences(section("sequences"));
  return std::move(p.inst);
}

Instance load_instance(const std::string& path, std::optional<Field> field) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_instance(ss.str(), field);
}

ojson to_json(const Instance& inst) {
  ojson out = ojson::object();
  out["field"] = inst.field.name();
  ojson posets = ojson::object();
  for (const auto& [name, p] : inst.posets) {
    ojson covers = ojson::array();
    for (const auto& [x, y] : p->covers()) covers.push_back({p->name(x), p->name(y)});
    posets[name] = {{"elements", p->names()}, {"covers", covers}};
  }
  out["posets"] = posets;
  ojson maps = ojson::object();
  for (const auto& [name, f] : inst.maps) {
    ojson values = ojson::object();
    for (std::size_t x = 0; x < f.source->size(); ++x) values[f.source->name(x)] = f.target->name(f(x));
    maps[name] = {{"source", name_of(inst.posets, f.source, "poset")},
                  {"target", name_of(inst.posets, f.target, "poset")},
                  {"values", values}};
  }
  out["maps"] = maps;
  ojson sheaves = ojson::object();
  for (const auto& [name, s] : inst.sheaves) {
    const PosetPtr& p = s->poset();
    ojson stalks = ojson::object(), restr = ojson::object();
    for (std::size_t x = 0; x < p->size(); ++x) stalks[p->name(x)] = s->dim(x);
    for (const auto& [x, y] : p->covers())
      if (s->dim(x) > 0 && s->dim(y) > 0) restr[p->name(x) + "<" + p->name(y)] = write_matrix(s->rho(x, y));
    sheaves[name] = {{"poset", name_of(inst.posets, p, "poset")}, {"stalks", stalks}, {"restrictions", restr}};
  }
  out["sheaves"] = sheaves;
  ojson morphisms = ojson::object();
  for (const auto& [name, m] : inst.morphisms) {
    const PosetPtr& p = m.source->poset();
    ojson comps = ojson::object();
    for (std::size_t x = 0; x < p->size(); ++x)
      if (!m.at(x).is_zero()) comps[p->name(x)] = write_matrix(m.at(x));
    morphisms[name] = {{"source", name_of(inst.sheaves, m.source, "sheaf")},
                       {"target", name_of(inst.sheaves, m.target, "sheaf")},
                       {"components", comps}};
  }
  out["morphisms"] = morphisms;
  ojson complexes = ojson::object();
  for (const auto& [name, c] : inst.complexes) {
    ojson terms = ojson::array(), diffs = ojson::array();
    for (const auto& o : c->objects) terms.push_back(name_of(inst.sheaves, o, "sheaf"));
    for (const auto& d : c->diffs) diffs.push_back(morphism_name(inst, d));
    complexes[name] = {{"lo", c->lo}, {"terms", terms}, {"differentials", diffs}};
  }
  out["complexes"] = complexes;
  ojson sequences = ojson::object();
  for (const auto& [name, s] : inst.sequences) {
    if (s.sheaves) {
      sequences[name] = {{"iota", morphism_name(inst, s.sheaves->iota)}, {"pi", morphism_name(inst, s.sheaves->pi)}};
      continue;
    }
    const SESOfComplexes& c = *s.complexes;
    ojson ic = ojson::array(), pc = ojson::array();
    for (const auto& m : c.iota.comps) ic.push_back(morphism_name(inst, m));
    for (const auto& m : c.pi.comps) pc.push_back(morphism_name(inst, m));
    sequences[name] = {{"a", name_of(inst.complexes, c.a, "complex")},
                       {"b", name_of(inst.complexes, c.b, "complex")},
                       {"c", name_of(inst.complexes, c.c, "complex")},
                       {"iota", ic},
                       {"pi", pc}};
  }
  out["sequences"] = sequences;
  return out;
}

}  // namespace sheafss
