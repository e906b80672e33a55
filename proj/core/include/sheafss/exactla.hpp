#pragma once

// Exact dense linear algebra over Q or a prime field.
//
// Scalars keep an int64 numerator/denominator pair and only fall back to GMP
// when an intermediate result leaves that range. Every arithmetic operation
// goes through a Field, which every Matrix carries, so the same code paths
// serve both coefficient choices.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

#include "sheafss/errors.hpp"

namespace sheafss {

class Field;

/// An exact field element. For Q it is a reduced fraction with positive
/// denominator; for F_p it is a residue in [0, p).
class Scalar {
 public:
  Scalar() = default;
  Scalar(std::int64_t n) : num_(n) {}  // NOLINT(google-explicit-constructor)

  /// Parses "n" or "n/d" as a rational number.
  static Scalar parse_rational(std::string_view text);
  static Scalar from_mpq(const mpq_class& q);
  /// n/d already in lowest terms with d > 0.
  static Scalar from_reduced(std::int64_t n, std::int64_t d) { return Scalar(n, d); }

  [[nodiscard]] bool is_zero() const { return !big_ && num_ == 0; }
  [[nodiscard]] bool is_one() const { return !big_ && num_ == 1 && den_ == 1; }
  [[nodiscard]] bool is_small() const { return !big_; }
  [[nodiscard]] std::int64_t small_num() const { return num_; }
  [[nodiscard]] std::int64_t small_den() const { return den_; }
  [[nodiscard]] mpq_class to_mpq() const;
  [[nodiscard]] std::string str() const;

  friend bool operator==(const Scalar& a, const Scalar& b);

 private:
  Scalar(std::int64_t n, std::int64_t d) : num_(n), den_(d) {}

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
  std::shared_ptr<const mpq_class> big_;

  friend class Field;
};

/// Coefficient field: Q (modulus 0) or F_p for a prime p < 2^31.
class Field {
 public:
  constexpr Field() = default;

  static Field rationals() { return Field{}; }
  static Field prime(std::uint32_t p);
  /// Accepts "q" or "fp:<prime>".
  static Field parse(std::string_view text);

  [[nodiscard]] bool is_rational() const { return modulus_ == 0; }
  [[nodiscard]] std::uint32_t modulus() const { return modulus_; }
  [[nodiscard]] std::string name() const;

  [[nodiscard]] Scalar from_int(std::int64_t n) const;
  [[nodiscard]] Scalar from_rational(const mpq_class& q) const;
  [[nodiscard]] Scalar parse_scalar(std::string_view text) const;

  [[nodiscard]] Scalar add(const Scalar& a, const Scalar& b) const;
  [[nodiscard]] Scalar sub(const Scalar& a, const Scalar& b) const;
  [[nodiscard]] Scalar mul(const Scalar& a, const Scalar& b) const;
  [[nodiscard]] Scalar neg(const Scalar& a) const;
  [[nodiscard]] Scalar inv(const Scalar& a) const;
  [[nodiscard]] Scalar div(const Scalar& a, const Scalar& b) const { return mul(a, inv(b)); }

  friend bool operator==(Field a, Field b) { return a.modulus_ == b.modulus_; }

 private:
  explicit constexpr Field(std::uint32_t p) : modulus_(p) {}
  std::uint32_t modulus_ = 0;
};

/// Dense row-major matrix, read as a linear map from a cols-dimensional
/// space to a rows-dimensional space.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, Field field = {});

  static Matrix zero(std::size_t rows, std::size_t cols, Field field = {}) {
    return Matrix(rows, cols, field);
  }
  static Matrix identity(std::size_t n, Field field = {});
  /// Rows of rational literals ("n" or "n/d"); `cols` is needed for empty input.
  static Matrix parse(const std::vector<std::vector<std::string>>& rows, std::size_t cols,
                      Field field = {});
  static Matrix from_ints(const std::vector<std::vector<std::int64_t>>& rows, Field field = {});
  /// Standard basis vector e_i as a column.
  static Matrix unit_column(std::size_t n, std::size_t i, Field field = {});

  [[nodiscard]] std::size_t rows() const { return rows_; }
  [[nodiscard]] std::size_t cols() const { return cols_; }
  [[nodiscard]] Field field() const { return field_; }
  [[nodiscard]] bool empty() const { return rows_ == 0 || cols_ == 0; }

  [[nodiscard]] const Scalar& operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }
  void set(std::size_t r, std::size_t c, Scalar v) { data_[r * cols_ + c] = std::move(v); }

  [[nodiscard]] Matrix operator*(const Matrix& rhs) const;
  [[nodiscard]] Matrix operator+(const Matrix& rhs) const;
  [[nodiscard]] Matrix operator-(const Matrix& rhs) const;
  [[nodiscard]] Matrix operator-() const;
  [[nodiscard]] Matrix scaled(const Scalar& s) const;
  [[nodiscard]] Matrix transposed() const;

  [[nodiscard]] Matrix rows_range(std::size_t begin, std::size_t count) const;
  [[nodiscard]] Matrix cols_range(std::size_t begin, std::size_t count) const;
  [[nodiscard]] Matrix select_cols(const std::vector<std::size_t>& idx) const;
  [[nodiscard]] Matrix select_rows(const std::vector<std::size_t>& idx) const;
  /// Copies `block` into this matrix with its top-left corner at (r, c).
  void paste(std::size_t r, std::size_t c, const Matrix& block);

  static Matrix hstack(const Matrix& a, const Matrix& b);
  static Matrix vstack(const Matrix& a, const Matrix& b);
  static Matrix hstack(const std::vector<Matrix>& parts, std::size_t rows, Field field);
  static Matrix vstack(const std::vector<Matrix>& parts, std::size_t cols, Field field);
  static Matrix block_diag(const std::vector<Matrix>& blocks, Field field);

  [[nodiscard]] bool is_zero() const;
  [[nodiscard]] bool is_identity() const;
  friend bool operator==(const Matrix& a, const Matrix& b);

  [[nodiscard]] std::vector<std::vector<std::string>> to_strings() const;
  [[nodiscard]] std::string str() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Field field_{};
  std::vector<Scalar> data_;
};

struct RrefResult {
  Matrix reduced;
  std::vector<std::size_t> pivots;
  Matrix transform;  // transform * input == reduced
};

/// Reduced row-echelon form with the (invertible) row transform.
RrefResult rref(const Matrix& m);
std::size_t rank(const Matrix& m);

/// A subspace of F^n stored by a canonical basis: the columns are the
/// transposed nonzero rows of the reduced row-echelon form of any spanning set.
class Subspace {
 public:
  Subspace() = default;
  static Subspace span(const Matrix& columns);
  static Subspace zero(std::size_t ambient, Field field = {});
  static Subspace full(std::size_t ambient, Field field = {});

  [[nodiscard]] std::size_t ambient_dim() const { return basis_.rows(); }
  [[nodiscard]] std::size_t dim() const { return basis_.cols(); }
  [[nodiscard]] const Matrix& basis() const { return basis_; }
  [[nodiscard]] Field field() const { return basis_.field(); }
  /// Leading coordinate of each basis vector, strictly increasing.
  [[nodiscard]] const std::vector<std::size_t>& pivots() const { return pivots_; }

  [[nodiscard]] bool contains(const Matrix& columns) const;
  [[nodiscard]] bool contains(const Subspace& other) const { return contains(other.basis_); }
  friend bool operator==(const Subspace& a, const Subspace& b) {
    return a.basis_ == b.basis_;
  }

 private:
  Matrix basis_;
  std::vector<std::size_t> pivots_;
};

Subspace kernel_basis(const Matrix& m);
Subspace image_basis(const Matrix& m);

/// Returns x with m * x == rhs, zero on non-pivot coordinates.
/// Throws NoSolution naming the first column of rhs outside image(m).
Matrix solve(const Matrix& m, const Matrix& rhs);
/// Inverse of a square invertible matrix; throws NoSolution otherwise.
Matrix inverse(const Matrix& m);

Subspace sum(const Subspace& a, const Subspace& b);
Subspace intersection(const Subspace& a, const Subspace& b);
/// { v : m v in s }.
Subspace preimage(const Matrix& m, const Subspace& s);

struct QuotientBasis {
  Matrix representatives;  // columns in S, one per quotient basis vector
  Matrix projection;       // ambient -> quotient, kills T, left inverse on representatives
};

/// Quotient S / T for T contained in S. Representatives are the canonical
/// basis vectors of S whose pivot is not a pivot of T.
QuotientBasis quotient_basis(const Subspace& s, const Subspace& t);
/// Coordinate complement: span of e_i over the non-pivot coordinates of S.
Subspace complement(const Subspace& s);

}  // namespace sheafss
