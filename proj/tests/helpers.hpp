#pragma once

// Independent reference routines used as oracles by the unit tests.

#include "smith/matcore.hpp"

#include <initializer_list>

namespace testing {

using smith::IntMat;

inline IntMat mat(std::initializer_list<std::initializer_list<long>> rows) {
  const std::size_t r = rows.size(), c = rows.begin()->size();
  IntMat A(r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    std::size_t j = 0;
    for (long v : row) A(i, j++) = v;
    ++i;
  }
  return A;
}

inline IntMat diag(std::initializer_list<long> d) {
  IntMat A(d.size(), d.size());
  std::size_t i = 0;
  for (long v : d) {
    A(i, i) = v;
    ++i;
  }
  return A;
}

// Fraction-free Gaussian elimination with row swaps.
inline mpz_class bareiss_det(IntMat M) {
  const std::size_t n = M.rows();
  if (n == 0) return 1;
  mpz_class prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (M(k, k) == 0) {
      std::size_t p = k + 1;
      while (p < n && M(p, k) == 0) ++p;
      if (p == n) return 0;
      for (std::size_t j = 0; j < n; ++j) std::swap(M(k, j), M(p, j));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) {
        mpz_class v = M(i, j) * M(k, k) - M(i, k) * M(k, j);
        mpz_divexact(M(i, j).get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
      }
    prev = M(k, k);
  }
  return sign * M(n - 1, n - 1);
}

inline IntMat schoolbook(const IntMat& A, const IntMat& B) {
  IntMat C(A.rows(), B.cols());
  for (std::size_t i = 0; i < A.rows(); ++i)
    for (std::size_t j = 0; j < B.cols(); ++j) {
      mpz_class s = 0;
      for (std::size_t k = 0; k < A.cols(); ++k) s += A(i, k) * B(k, j);
      C(i, j) = s;
    }
  return C;
}

inline IntMat random_signed(std::size_t r, std::size_t c, std::size_t bits, smith::Rng& rng) {
  IntMat A(r, c);
  const mpz_class bound = mpz_class(1) << bits;
  for (auto& x : A.data()) {
    x = smith::random_below(bound, rng);
    if (rng() & 1) x = -x;
  }
  return A;
}

}  // namespace testing
