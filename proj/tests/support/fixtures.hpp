#pragma once

#include <string>

#include "sheafss/homalg.hpp"
#include "sheafss/specseq.hpp"

namespace fixtures {

inline std::string data_path(const std::string& file) {
  return std::string(SHEAFSS_DATA_DIR) + "/" + file;
}

inline std::string golden_path(const std::string& file) {
  return std::string(SHEAFSS_GOLDEN_DIR) + "/" + file;
}

/// Four-point model of the circle: a, b below c, d.
inline sheafss::PosetPtr x4() {
  return sheafss::Poset::from_covers({"a", "b", "c", "d"},
                                     {{"a", "c"}, {"a", "d"}, {"b", "c"}, {"b", "d"}});
}

/// a < b < c with a second branch a < d.
inline sheafss::PosetPtr fork() {
  return sheafss::Poset::from_covers({"a", "b", "c", "d"}, {{"a", "b"}, {"b", "c"}, {"a", "d"}});
}

/// One-dimensional entries at (0,1), (1,1), (1,0), (2,0) joined by identities:
/// E_1 and E_2 have classes at (0,1) and (2,0) killed by d_2.
inline sheafss::DoubleComplex staircase(sheafss::Field field = {}) {
  using sheafss::Matrix;
  const Matrix one = Matrix::identity(1, field);
  return sheafss::DoubleComplex::create(
      field, 0, 2, 0, 1, {{{0, 1}, 1}, {{1, 1}, 1}, {{1, 0}, 1}, {{2, 0}, 1}},
      {{{0, 1}, one}, {{1, 0}, one}}, {{{1, 0}, one}});
}

inline sheafss::ComplexPtr two_term(const sheafss::SheafMorphism& d, int lo = 0) {
  return sheafss::Complex::create(d.source->poset(), d.source->field(), lo,
                                  {d.source, d.target}, {d});
}

}  // namespace fixtures
