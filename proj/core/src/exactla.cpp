#include "sheafss/exactla.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <sstream>

namespace sheafss {

namespace {

__extension__ using i128 = __int128;
__extension__ using u128 = unsigned __int128;

u128 gcd_u128(u128 a, u128 b) {
  while (b != 0) {
    u128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

mpz_class mpz_from_i128(i128 v) {
  bool neg = v < 0;
  u128 mag = neg ? static_cast<u128>(-(v + 1)) + 1 : static_cast<u128>(v);
  mpz_class hi(static_cast<unsigned long>(static_cast<std::uint64_t>(mag >> 64)));
  mpz_class lo(static_cast<unsigned long>(static_cast<std::uint64_t>(mag)));
  mpz_class r = (hi << 64) + lo;
  return neg ? mpz_class(-r) : r;
}

constexpr i128 kSmallMax = std::numeric_limits<std::int64_t>::max();

bool is_prime(std::uint32_t p) {
  if (p < 2) return false;
  for (std::uint64_t d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

std::int64_t mod_pow(std::int64_t base, std::int64_t exp, std::int64_t mod) {
  std::int64_t result = 1 % mod;
  base %= mod;
  while (exp > 0) {
    if (exp & 1) result = static_cast<std::int64_t>(static_cast<i128>(result) * base % mod);
    base = static_cast<std::int64_t>(static_cast<i128>(base) * base % mod);
    exp >>= 1;
  }
  return result;
}

}  // namespace

// ---------------------------------------------------------------- Scalar

Scalar Scalar::from_mpq(const mpq_class& q) {
  const mpz_class& n = q.get_num();
  const mpz_class& d = q.get_den();
  if (n.fits_slong_p() && d.fits_slong_p() && n != std::numeric_limits<long>::min())
    return Scalar(n.get_si(), d.get_si());
  Scalar s;
  s.num_ = 0;
  s.den_ = 1;
  s.big_ = std::make_shared<const mpq_class>(q);
  return s;
}

Scalar Scalar::parse_rational(std::string_view text) {
  std::string s(text);
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }),
          s.end());
  if (s.empty()) throw ParseError("empty rational literal");
  for (char c : s) {
    if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '/'))
      throw ParseError("invalid rational literal '" + std::string(text) + "'");
  }
  if (s.front() == '+') s.erase(s.begin());
  mpq_class q;
  if (q.set_str(s, 10) != 0) throw ParseError("invalid rational literal '" + std::string(text) + "'");
  if (q.get_den() == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
  q.canonicalize();
  return from_mpq(q);
}

mpq_class Scalar::to_mpq() const {
  if (big_) return *big_;
  mpq_class q(mpz_class(static_cast<long>(num_)), mpz_class(static_cast<long>(den_)));
  q.canonicalize();
  return q;
}

std::string Scalar::str() const {
  if (big_) return big_->get_str();
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

bool operator==(const Scalar& a, const Scalar& b) {
  if (!a.big_ && !b.big_) return a.num_ == b.num_ && a.den_ == b.den_;
  if (a.big_ && b.big_) return *a.big_ == *b.big_;
  return false;  // canonical: a value that fits is always small
}

// ---------------------------------------------------------------- Field

namespace {

Scalar make_q(i128 n, i128 d) {
  if (d < 0) {
    n = -n;
    d = -d;
  }
  if (n == 0) return Scalar(0);
  if (d != 1) {
    u128 g = gcd_u128(n < 0 ? static_cast<u128>(-n) : static_cast<u128>(n), static_cast<u128>(d));
    if (g > 1) {
      n /= static_cast<i128>(g);
      d /= static_cast<i128>(g);
    }
  }
  if (n <= kSmallMax && n > -kSmallMax && d <= kSmallMax) {
    return Scalar::from_reduced(static_cast<std::int64_t>(n), static_cast<std::int64_t>(d));
  }
  mpq_class q(mpz_from_i128(n), mpz_from_i128(d));
  q.canonicalize();
  return Scalar::from_mpq(q);
}

}  // namespace

Field Field::prime(std::uint32_t p) {
  if (p >= (1u << 31) || !is_prime(p))
    throw InvalidField("modulus " + std::to_string(p) + " is not a prime below 2^31");
  return Field(p);
}

Field Field::parse(std::string_view text) {
  if (text == "q" || text == "Q") return rationals();
  if (text.substr(0, 3) == "fp:") {
    std::string digits(text.substr(3));
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(),
                                       [](unsigned char c) { return std::isdigit(c); }))
      throw InvalidField("invalid field '" + std::string(text) + "'");
    unsigned long long p = std::stoull(digits);
    if (p >= (1ull << 31)) throw InvalidField("modulus too large: " + digits);
    return prime(static_cast<std::uint32_t>(p));
  }
  throw InvalidField("unknown field '" + std::string(text) + "' (expected q or fp:<prime>)");
}

std::string Field::name() const {
  return is_rational() ? std::string("q") : "fp:" + std::to_string(modulus_);
}

Scalar Field::from_int(std::int64_t n) const {
  if (is_rational()) return Scalar(n);
  std::int64_t p = modulus_;
  std::int64_t r = n % p;
  if (r < 0) r += p;
  return Scalar(r);
}

Scalar Field::from_rational(const mpq_class& q) const {
  if (is_rational()) return Scalar::from_mpq(q);
  mpz_class p(static_cast<unsigned long>(modulus_));
  mpz_class n = q.get_num() % p;
  mpz_class d = q.get_den() % p;
  if (n < 0) n += p;
  if (d == 0) throw InvalidField("denominator of " + q.get_str() + " vanishes mod " + name());
  Scalar num(n.get_si());
  Scalar den(d.get_si());
  return mul(num, inv(den));
}

Scalar Field::parse_scalar(std::string_view text) const {
  return from_rational(Scalar::parse_rational(text).to_mpq());
}

Scalar Field::add(const Scalar& a, const Scalar& b) const {
  if (!is_rational()) {
    std::int64_t r = a.num_ + b.num_;
    if (r >= static_cast<std::int64_t>(modulus_)) r -= modulus_;
    return Scalar(r);
  }
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (!a.big_ && !b.big_) {
    if (a.den_ == 1 && b.den_ == 1) {
      std::int64_t r;
      if (!__builtin_add_overflow(a.num_, b.num_, &r) && r != std::numeric_limits<std::int64_t>::min())
        return Scalar(r);
    }
    i128 n = static_cast<i128>(a.num_) * b.den_ + static_cast<i128>(b.num_) * a.den_;
    i128 d = static_cast<i128>(a.den_) * b.den_;
    return make_q(n, d);
  }
  return Scalar::from_mpq(a.to_mpq() + b.to_mpq());
}

Scalar Field::neg(const Scalar& a) const {
  if (!is_rational()) return Scalar(a.num_ == 0 ? 0 : modulus_ - a.num_);
  if (a.big_) return Scalar::from_mpq(-*a.big_);
  return Scalar(-a.num_, a.den_);
}

Scalar Field::sub(const Scalar& a, const Scalar& b) const { return add(a, neg(b)); }

Scalar Field::mul(const Scalar& a, const Scalar& b) const {
  if (!is_rational())
    return Scalar(static_cast<std::int64_t>(static_cast<i128>(a.num_) * b.num_ % modulus_));
  if (a.is_zero() || b.is_zero()) return Scalar(0);
  if (!a.big_ && !b.big_) {
    if (a.den_ == 1 && b.den_ == 1) {
      std::int64_t r;
      if (!__builtin_mul_overflow(a.num_, b.num_, &r) && r != std::numeric_limits<std::int64_t>::min())
        return Scalar(r);
    }
    i128 n = static_cast<i128>(a.num_) * b.num_;
    i128 d = static_cast<i128>(a.den_) * b.den_;
    return make_q(n, d);
  }
  return Scalar::from_mpq(a.to_mpq() * b.to_mpq());
}

Scalar Field::inv(const Scalar& a) const {
  if (a.is_zero()) throw NoSolution("inverse of zero");
  if (!is_rational()) return Scalar(mod_pow(a.num_, modulus_ - 2, modulus_));
  if (a.big_) return Scalar::from_mpq(1 / *a.big_);
  if (a.num_ < 0) return Scalar(-a.den_, -a.num_);
  return Scalar(a.den_, a.num_);
}

// ---------------------------------------------------------------- Matrix

Matrix::Matrix(std::size_t rows, std::size_t cols, Field field)
    : rows_(rows), cols_(cols), field_(field), data_(rows * cols) {}

Matrix Matrix::identity(std::size_t n, Field field) {
  Matrix m(n, n, field);
  for (std::size_t i = 0; i < n; ++i) m.set(i, i, Scalar(1));
  return m;
}

Matrix Matrix::unit_column(std::size_t n, std::size_t i, Field field) {
  Matrix m(n, 1, field);
  m.set(i, 0, Scalar(1));
  return m;
}

Matrix Matrix::parse(const std::vector<std::vector<std::string>>& rows, std::size_t cols,
                     Field field) {
  Matrix m(rows.size(), cols, field);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols)
      throw ParseError("matrix row " + std::to_string(i) + " has " +
                       std::to_string(rows[i].size()) + " entries, expected " +
                       std::to_string(cols));
    for (std::size_t j = 0; j < cols; ++j) m.set(i, j, field.parse_scalar(rows[i][j]));
  }
  return m;
}

Matrix Matrix::from_ints(const std::vector<std::vector<std::int64_t>>& rows, Field field) {
  std::size_t cols = rows.empty() ? 0 : rows.front().size();
  Matrix m(rows.size(), cols, field);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) throw DimensionMismatch("ragged integer matrix");
    for (std::size_t j = 0; j < cols; ++j) m.set(i, j, field.from_int(rows[i][j]));
  }
  return m;
}

Matrix Matrix::operator*(const Matrix& rhs) const {
  if (cols_ != rhs.rows_)
    throw DimensionMismatch("product of " + std::to_string(rows_) + "x" + std::to_string(cols_) +
                            " and " + std::to_string(rhs.rows_) + "x" + std::to_string(rhs.cols_));
  if (!(field_ == rhs.field_)) throw FieldMismatch("matrix product across fields");
  Matrix out(rows_, rhs.cols_, field_);
  std::vector<std::size_t> nz;
  for (std::size_t k = 0; k < cols_; ++k) {
    nz.clear();
    for (std::size_t j = 0; j < rhs.cols_; ++j)
      if (!rhs(k, j).is_zero()) nz.push_back(j);
    if (nz.empty()) continue;
    for (std::size_t i = 0; i < rows_; ++i) {
      const Scalar& a = (*this)(i, k);
      if (a.is_zero()) continue;
      for (std::size_t j : nz) {
        Scalar& c = out.data_[i * out.cols_ + j];
        c = field_.add(c, field_.mul(a, rhs(k, j)));
      }
    }
  }
  return out;
}

Matrix Matrix::operator+(const Matrix& rhs) const {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_) throw DimensionMismatch("matrix sum shape");
  if (!(field_ == rhs.field_)) throw FieldMismatch("matrix sum across fields");
  Matrix out(rows_, cols_, field_);
  for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] = field_.add(data_[i], rhs.data_[i]);
  return out;
}

Matrix Matrix::operator-(const Matrix& rhs) const {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_) throw DimensionMismatch("matrix difference shape");
  if (!(field_ == rhs.field_)) throw FieldMismatch("matrix difference across fields");
  Matrix out(rows_, cols_, field_);
  for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] = field_.sub(data_[i], rhs.data_[i]);
  return out;
}

Matrix Matrix::operator-() const {
  Matrix out(rows_, cols_, field_);
  for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] = field_.neg(data_[i]);
  return out;
}

Matrix Matrix::scaled(const Scalar& s) const {
  Matrix out(rows_, cols_, field_);
  for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] = field_.mul(data_[i], s);
  return out;
}

Matrix Matrix::transposed() const {
  Matrix out(cols_, rows_, field_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out.data_[j * rows_ + i] = (*this)(i, j);
  return out;
}

Matrix Matrix::rows_range(std::size_t begin, std::size_t count) const {
  if (begin + count > rows_) throw DimensionMismatch("row range out of bounds");
  Matrix out(count, cols_, field_);
  std::copy(data_.begin() + static_cast<std::ptrdiff_t>(begin * cols_),
            data_.begin() + static_cast<std::ptrdiff_t>((begin + count) * cols_), out.data_.begin());
  return out;
}

Matrix Matrix::cols_range(std::size_t begin, std::size_t count) const {
  if (begin + count > cols_) throw DimensionMismatch("column range out of bounds");
  Matrix out(rows_, count, field_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < count; ++j) out.data_[i * count + j] = (*this)(i, begin + j);
  return out;
}

Matrix Matrix::select_cols(const std::vector<std::size_t>& idx) const {
  Matrix out(rows_, idx.size(), field_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < idx.size(); ++j) out.data_[i * idx.size() + j] = (*this)(i, idx[j]);
  return out;
}

Matrix Matrix::select_rows(const std::vector<std::size_t>& idx) const {
  Matrix out(idx.size(), cols_, field_);
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = 0; j < cols_; ++j) out.data_[i * cols_ + j] = (*this)(idx[i], j);
  return out;
}

void Matrix::paste(std::size_t r, std::size_t c, const Matrix& block) {
  if (r + block.rows_ > rows_ || c + block.cols_ > cols_)
    throw DimensionMismatch("paste out of bounds");
  for (std::size_t i = 0; i < block.rows_; ++i)
    for (std::size_t j = 0; j < block.cols_; ++j) data_[(r + i) * cols_ + c + j] = block(i, j);
}

Matrix Matrix::hstack(const Matrix& a, const Matrix& b) {
  if (a.rows_ != b.rows_) throw DimensionMismatch("hstack row mismatch");
  Matrix out(a.rows_, a.cols_ + b.cols_, a.field_);
  out.paste(0, 0, a);
  out.paste(0, a.cols_, b);
  return out;
}

Matrix Matrix::vstack(const Matrix& a, const Matrix& b) {
  if (a.cols_ != b.cols_) throw DimensionMismatch("vstack column mismatch");
  Matrix out(a.rows_ + b.rows_, a.cols_, a.field_);
  out.paste(0, 0, a);
  out.paste(a.rows_, 0, b);
  return out;
}

Matrix Matrix::hstack(const std::vector<Matrix>& parts, std::size_t rows, Field field) {
  std::size_t cols = 0;
  for (const auto& p : parts) {
    if (p.rows_ != rows) throw DimensionMismatch("hstack row mismatch");
    cols += p.cols_;
  }
  Matrix out(rows, cols, field);
  std::size_t c = 0;
  for (const auto& p : parts) {
    out.paste(0, c, p);
    c += p.cols_;
  }
  return out;
}

Matrix Matrix::vstack(const std::vector<Matrix>& parts, std::size_t cols, Field field) {
  std::size_t rows = 0;
  for (const auto& p : parts) {
    if (p.cols_ != cols) throw DimensionMismatch("vstack column mismatch");
    rows += p.rows_;
  }
  Matrix out(rows, cols, field);
  std::size_t r = 0;
  for (const auto& p : parts) {
    out.paste(r, 0, p);
    r += p.rows_;
  }
  return out;
}

Matrix Matrix::block_diag(const std::vector<Matrix>& blocks, Field field) {
  std::size_t rows = 0, cols = 0;
  for (const auto& b : blocks) {
    rows += b.rows_;
    cols += b.cols_;
  }
  Matrix out(rows, cols, field);
  std::size_t r = 0, c = 0;
  for (const auto& b : blocks) {
    out.paste(r, c, b);
    r += b.rows_;
    c += b.cols_;
  }
  return out;
}

bool Matrix::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](const Scalar& s) { return s.is_zero(); });
}

bool Matrix::is_identity() const {
  if (rows_ != cols_) return false;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) {
      const Scalar& s = (*this)(i, j);
      if (i == j ? !s.is_one() : !s.is_zero()) return false;
    }
  return true;
}

bool operator==(const Matrix& a, const Matrix& b) {
  return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.field_ == b.field_ && a.data_ == b.data_;
}

std::vector<std::vector<std::string>> Matrix::to_strings() const {
  std::vector<std::vector<std::string>> out(rows_, std::vector<std::string>(cols_));
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out[i][j] = (*this)(i, j).str();
  return out;
}

std::string Matrix::str() const {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < rows_; ++i) {
    os << (i ? ", [" : "[");
    for (std::size_t j = 0; j < cols_; ++j) os << (j ? ", " : "") << (*this)(i, j).str();
    os << "]";
  }
  os << "]";
  return os.str();
}

// ---------------------------------------------------------------- elimination

namespace {

// Gauss-Jordan on a row-major buffer; pivots are searched only in the first
// `pivot_cols` columns. Returns the pivot columns.
std::vector<std::size_t> gauss_jordan(std::vector<std::vector<Scalar>>& rows, std::size_t width,
                                      std::size_t pivot_cols, Field f) {
  std::vector<std::size_t> pivots;
  std::size_t rank = 0;
  std::vector<std::size_t> nz;
  for (std::size_t c = 0; c < pivot_cols && rank < rows.size(); ++c) {
    std::size_t piv = rank;
    while (piv < rows.size() && rows[piv][c].is_zero()) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[rank], rows[piv]);
    auto& prow = rows[rank];
    if (!prow[c].is_one()) {
      Scalar inv = f.inv(prow[c]);
      for (std::size_t j = c; j < width; ++j)
        if (!prow[j].is_zero()) prow[j] = f.mul(prow[j], inv);
    }
    nz.clear();
    for (std::size_t j = c; j < width; ++j)
      if (!prow[j].is_zero()) nz.push_back(j);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r == rank) continue;
      auto& row = rows[r];
      if (row[c].is_zero()) continue;
      Scalar factor = row[c];
      for (std::size_t j : nz) row[j] = f.sub(row[j], f.mul(factor, prow[j]));
    }
    pivots.push_back(c);
    ++rank;
  }
  return pivots;
}

std::vector<std::vector<Scalar>> to_rows(const Matrix& m, std::size_t extra = 0) {
  std::vector<std::vector<Scalar>> rows(m.rows(), std::vector<Scalar>(m.cols() + extra));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) rows[i][j] = m(i, j);
  return rows;
}

}  // namespace

RrefResult rref(const Matrix& m) {
  Field f = m.field();
  auto rows = to_rows(m, m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) rows[i][m.cols() + i] = Scalar(1);
  auto pivots = gauss_jordan(rows, m.cols() + m.rows(), m.cols(), f);
  RrefResult out{Matrix(m.rows(), m.cols(), f), std::move(pivots), Matrix(m.rows(), m.rows(), f)};
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) out.reduced.set(i, j, rows[i][j]);
    for (std::size_t j = 0; j < m.rows(); ++j) out.transform.set(i, j, rows[i][m.cols() + j]);
  }
  return out;
}

std::size_t rank(const Matrix& m) {
  auto rows = to_rows(m);
  return gauss_jordan(rows, m.cols(), m.cols(), m.field()).size();
}

// ---------------------------------------------------------------- Subspace

Subspace Subspace::span(const Matrix& columns) {
  Field f = columns.field();
  std::size_t n = columns.rows();
  // rows of the working buffer are the spanning vectors
  std::vector<std::vector<Scalar>> rows(columns.cols(), std::vector<Scalar>(n));
  for (std::size_t j = 0; j < columns.cols(); ++j)
    for (std::size_t i = 0; i < n; ++i) rows[j][i] = columns(i, j);
  auto pivots = gauss_jordan(rows, n, n, f);
  Subspace s;
  s.basis_ = Matrix(n, pivots.size(), f);
  for (std::size_t k = 0; k < pivots.size(); ++k)
    for (std::size_t i = 0; i < n; ++i) s.basis_.set(i, k, rows[k][i]);
  s.pivots_ = std::move(pivots);
  return s;
}

Subspace Subspace::zero(std::size_t ambient, Field field) {
  Subspace s;
  s.basis_ = Matrix(ambient, 0, field);
  return s;
}

Subspace Subspace::full(std::size_t ambient, Field field) {
  Subspace s;
  s.basis_ = Matrix::identity(ambient, field);
  s.pivots_.resize(ambient);
  for (std::size_t i = 0; i < ambient; ++i) s.pivots_[i] = i;
  return s;
}

bool Subspace::contains(const Matrix& columns) const {
  if (columns.rows() != ambient_dim()) throw DimensionMismatch("containment test ambient mismatch");
  if (columns.cols() == 0) return true;
  // Reduce each column against the canonical basis using its pivots.
  Field f = field();
  for (std::size_t j = 0; j < columns.cols(); ++j) {
    std::vector<Scalar> v(ambient_dim());
    for (std::size_t i = 0; i < ambient_dim(); ++i) v[i] = columns(i, j);
    for (std::size_t k = 0; k < pivots_.size(); ++k) {
      Scalar c = v[pivots_[k]];
      if (c.is_zero()) continue;
      for (std::size_t i = pivots_[k]; i < ambient_dim(); ++i)
        if (!basis_(i, k).is_zero()) v[i] = f.sub(v[i], f.mul(c, basis_(i, k)));
    }
    for (const auto& x : v)
      if (!x.is_zero()) return false;
  }
  return true;
}

Subspace kernel_basis(const Matrix& m) {
  Field f = m.field();
  auto rows = to_rows(m);
  auto pivots = gauss_jordan(rows, m.cols(), m.cols(), f);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto p : pivots) is_pivot[p] = true;
  std::vector<std::size_t> free;
  for (std::size_t c = 0; c < m.cols(); ++c)
    if (!is_pivot[c]) free.push_back(c);
  Matrix basis(m.cols(), free.size(), f);
  for (std::size_t k = 0; k < free.size(); ++k) {
    basis.set(free[k], k, Scalar(1));
    for (std::size_t r = 0; r < pivots.size(); ++r)
      if (!rows[r][free[k]].is_zero()) basis.set(pivots[r], k, f.neg(rows[r][free[k]]));
  }
  return Subspace::span(basis);
}

Subspace image_basis(const Matrix& m) { return Subspace::span(m); }

Matrix solve(const Matrix& m, const Matrix& rhs) {
  if (m.rows() != rhs.rows()) throw DimensionMismatch("solve: row mismatch");
  Field f = m.field();
  std::size_t n = m.cols(), k = rhs.cols();
  auto rows = to_rows(m, k);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < k; ++j) rows[i][n + j] = rhs(i, j);
  auto pivots = gauss_jordan(rows, n + k, n, f);
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t r = pivots.size(); r < rows.size(); ++r)
      if (!rows[r][n + j].is_zero())
        throw NoSolution("right-hand side column " + std::to_string(j) +
                         " is not in the image");
  Matrix x(n, k, f);
  for (std::size_t r = 0; r < pivots.size(); ++r)
    for (std::size_t j = 0; j < k; ++j) x.set(pivots[r], j, rows[r][n + j]);
  return x;
}

Matrix inverse(const Matrix& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("inverse of non-square matrix");
  if (rank(m) != m.rows()) throw NoSolution("matrix is singular");
  return solve(m, Matrix::identity(m.rows(), m.field()));
}

Subspace sum(const Subspace& a, const Subspace& b) {
  if (a.ambient_dim() != b.ambient_dim()) throw DimensionMismatch("subspace sum ambient mismatch");
  return Subspace::span(Matrix::hstack(a.basis(), b.basis()));
}

Subspace intersection(const Subspace& a, const Subspace& b) {
  if (a.ambient_dim() != b.ambient_dim())
    throw DimensionMismatch("subspace intersection ambient mismatch");
  if (a.dim() == 0 || b.dim() == 0) return Subspace::zero(a.ambient_dim(), a.field());
  Subspace k = kernel_basis(Matrix::hstack(a.basis(), -b.basis()));
  return Subspace::span(a.basis() * k.basis().rows_range(0, a.dim()));
}

Subspace preimage(const Matrix& m, const Subspace& s) {
  if (m.rows() != s.ambient_dim()) throw DimensionMismatch("preimage ambient mismatch");
  Subspace k = kernel_basis(Matrix::hstack(m, -s.basis()));
  return Subspace::span(k.basis().rows_range(0, m.cols()));
}

QuotientBasis quotient_basis(const Subspace& s, const Subspace& t) {
  if (s.ambient_dim() != t.ambient_dim()) throw DimensionMismatch("quotient ambient mismatch");
  if (!s.contains(t)) throw ContainmentViolation("quotient: T is not contained in S");
  Field f = s.field();
  std::size_t n = s.ambient_dim();
  std::vector<bool> t_pivot(n, false), s_pivot(n, false);
  for (auto p : t.pivots()) t_pivot[p] = true;
  for (auto p : s.pivots()) s_pivot[p] = true;
  std::vector<std::size_t> rep_idx;
  for (std::size_t k = 0; k < s.dim(); ++k)
    if (!t_pivot[s.pivots()[k]]) rep_idx.push_back(k);
  Matrix reps = s.basis().select_cols(rep_idx);
  std::vector<std::size_t> comp;
  for (std::size_t i = 0; i < n; ++i)
    if (!s_pivot[i]) comp.push_back(i);
  Matrix completion(n, comp.size(), f);
  for (std::size_t k = 0; k < comp.size(); ++k) completion.set(comp[k], k, Scalar(1));
  Matrix full = Matrix::hstack({t.basis(), reps, completion}, n, f);
  Matrix inv = inverse(full);
  return QuotientBasis{std::move(reps), inv.rows_range(t.dim(), rep_idx.size())};
}

Subspace complement(const Subspace& s) {
  std::size_t n = s.ambient_dim();
  std::vector<bool> piv(n, false);
  for (auto p : s.pivots()) piv[p] = true;
  std::vector<std::size_t> comp;
  for (std::size_t i = 0; i < n; ++i)
    if (!piv[i]) comp.push_back(i);
  Matrix b(n, comp.size(), s.field());
  for (std::size_t k = 0; k < comp.size(); ++k) b.set(comp[k], k, Scalar(1));
  return Subspace::span(b);
}

}  // namespace sheafss
