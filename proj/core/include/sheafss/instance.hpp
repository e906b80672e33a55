#pragma once

// JSON instance files: named posets, monotone maps, sheaves, morphisms,
// complexes and short exact sequences, cross-referenced by name.
//
//   {
//     "field": "q",
//     "posets":    {"X": {"elements": ["a", "b"], "covers": [["a", "b"]]},
//                   "T": {"product": ["X", "X"]}},
//     "maps":      {"f": {"source": "T", "target": "X", "projection": 0},
//                   "g": {"source": "X", "target": "P", "values": {"a": "p", "b": "p"}}},
//     "sheaves":   {"k": {"poset": "X", "constant": 1},
//                   "F": {"poset": "X", "stalks": {"a": 1, "b": 1}, "restrictions": {"a<b": [["1"]]}},
//                   "I": {"poset": "X", "coinduced": [["b", 2]]}},
//     "morphisms": {"m": {"source": "k", "target": "F", "components": {"a": [["1"]], "b": [["1"]]}},
//                   "e": {"injective_embedding": "k", "target_name": "Ik"},
//                   "c": {"cokernel": "e", "target_name": "Ck"}},
//     "complexes": {"K": {"lo": 0, "terms": ["k", "F"], "differentials": ["m"]}},
//     "sequences": {"S": {"iota": "e", "pi": "c"},
//                   "T": {"a": "K1", "b": "K2", "c": "K3", "iota": ["m0"], "pi": ["n0"]}}
//   }
//
// Matrices are row-major arrays of strings "n" or "n/d". Sections are read in
// the order above and entries within a section in file order, so every
// reference must point to an earlier definition.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sheafss/homalg.hpp"

namespace sheafss {

struct SheafSequence {
  SheafMorphism iota, pi;
};

struct NamedSequence {
  std::optional<SheafSequence> sheaves;
  std::optional<SESOfComplexes> complexes;
  /// The sequence as one of complexes; sheaf sequences sit in degree 0.
  [[nodiscard]] SESOfComplexes as_complexes() const;
};

struct Instance {
  Field field{};
  std::map<std::string, PosetPtr> posets;
  std::map<std::string, MonotoneMap> maps;
  std::map<std::string, SheafPtr> sheaves;
  std::map<std::string, SheafMorphism> morphisms;
  std::map<std::string, ComplexPtr> complexes;
  std::map<std::string, NamedSequence> sequences;

  /// Throw DanglingReference when the name is not defined.
  [[nodiscard]] const PosetPtr& poset(const std::string& name) const;
  [[nodiscard]] const MonotoneMap& map(const std::string& name) const;
  [[nodiscard]] const SheafPtr& sheaf(const std::string& name) const;
  [[nodiscard]] const SheafMorphism& morphism(const std::string& name) const;
  [[nodiscard]] const ComplexPtr& complex(const std::string& name) const;
  [[nodiscard]] const NamedSequence& sequence(const std::string& name) const;

  [[nodiscard]] std::size_t object_count() const;
};

/// Parses and validates. Errors name the offending object; JSON syntax errors
/// carry the byte position. A field given here overrides the file's field.
Instance parse_instance(const std::string& text, std::optional<Field> field = {});
Instance load_instance(const std::string& path, std::optional<Field> field = {});

/// Serialises in explicit form (elements and covers, stalks and cover
/// restrictions, components). Objects are referenced by the name under which
/// the identical object is stored; throws DanglingReference if there is none.
nlohmann::ordered_json to_json(const Instance& inst);

}  // namespace sheafss
