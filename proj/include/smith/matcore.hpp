#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace smith {

using Rng = std::mt19937_64;

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingularMatrix : std::runtime_error {
  SingularMatrix() : std::runtime_error("matrix is singular") {}
};

/// Dense row-major matrix of arbitrary-precision integers.
class IntMat {
 public:
  IntMat() = default;
  IntMat(std::size_t rows, std::size_t cols);

  static IntMat identity(std::size_t n);
  static IntMat diagonal(const std::vector<mpz_class>& d);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }
  bool square() const { return rows_ == cols_; }

  mpz_class& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const mpz_class& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }
  mpz_class* row(std::size_t i) { return a_.data() + i * cols_; }
  const mpz_class* row(std::size_t i) const { return a_.data() + i * cols_; }

  std::vector<mpz_class>& data() { return a_; }
  const std::vector<mpz_class>& data() const { return a_; }

  /// Bit length of max |a_ij| (0 for the zero matrix).
  std::size_t max_bits() const;
  mpz_class max_abs() const;
  IntMat transpose() const;
  IntMat block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
  bool is_zero() const;

  friend bool operator==(const IntMat& x, const IntMat& y) {
    return x.rows_ == y.rows_ && x.cols_ == y.cols_ && x.a_ == y.a_;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<mpz_class> a_;
};

/// Invariant factors s_1 | s_2 | ... | s_n.
struct SmithDiagonal {
  std::vector<mpz_class> factors;

  std::size_t size() const { return factors.size(); }
  bool is_chain() const;
  mpz_class product() const;
  friend bool operator==(const SmithDiagonal&, const SmithDiagonal&) = default;
};

IntMat mat_mul_exact(const IntMat& A, const IntMat& B);
IntMat mat_add(const IntMat& A, const IntMat& B);

mpz_class rem_mod(const mpz_class& a, const mpz_class& s);
IntMat rem_mod(const IntMat& A, const mpz_class& s);

/// ceil(n log2(sqrt(n) ||A||)) + 1; |det A| < 2^result.
std::size_t hadamard_bits(const IntMat& A);

/// Exact determinant via modular determinants and symmetric CRT.
mpz_class det_crt(const IntMat& A);

IntMat read_matrix(std::istream& in);
void write_matrix(std::ostream& out, const IntMat& A);
IntMat load_matrix(const std::string& path);
void save_matrix(const std::string& path, const IntMat& A);

/// Uniform integer in [0, bound), bound > 0.
mpz_class random_below(const mpz_class& bound, Rng& rng);

std::size_t bit_length(const mpz_class& x);

inline int cmp_abs(const mpz_class& a, const mpz_class& b) { return mpz_cmpabs(a.get_mpz_t(), b.get_mpz_t()); }

}  // namespace smith
