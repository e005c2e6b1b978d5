#pragma once

// Word-size prime arithmetic on doubles holding exact integers below 2^53.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace smith::modp {

constexpr double kExactLimit = 9007199254740991.0;  // 2^53 - 1

struct Modulus {
  uint64_t u = 0;
  double p = 0, ip = 0;

  Modulus() = default;
  explicit Modulus(uint64_t prime) : u(prime), p(double(prime)), ip(1.0 / double(prime)) {}

  // x is an integer value with |x| < 2^53.
  double reduce(double x) const {
    double q = std::nearbyint(x * ip);
    double r = std::fma(-q, p, x);
    r = r < 0 ? r + p : r;
    r = r >= p ? r - p : r;
    return r;
  }
  // representative in (-p/2, p/2]
  double balance(double r) const { return r > 0.5 * p ? r - p : r; }
  double mul(double a, double b) const { return reduce(a * b); }
};

uint64_t mul_mod(uint64_t a, uint64_t b, uint64_t m);
uint64_t pow_mod(uint64_t a, uint64_t e, uint64_t m);
/// Inverse of a mod m; 0 if not invertible.
uint64_t inv_mod(uint64_t a, uint64_t m);

/// Largest k with k(p-1)^2 + (p-1) < 2^53 - 1.
std::size_t safe_inner(uint64_t p);

void reduce_array(double* x, std::size_t len, const Modulus& m);

/// C = C + A*B mod p (if accumulate) or C = A*B mod p. Entries of A, B, C satisfy |x| < p.
/// Row-major with leading dimensions; the inner dimension is chunked as needed.
void gemm_mod(std::size_t rows, std::size_t cols, std::size_t inner, const double* A, std::size_t lda,
              const double* B, std::size_t ldb, double* C, std::size_t ldc, const Modulus& m,
              bool accumulate = false);

/// "blas" or "eigen": which kernel gemm uses after the one-time exactness probe.
const char* gemm_backend();

/// Plain double gemm, C = alpha*A*B + beta*C (row-major).
void gemm(std::size_t rows, std::size_t cols, std::size_t inner, double alpha, const double* A,
          std::size_t lda, const double* B, std::size_t ldb, double beta, double* C, std::size_t ldc);

/// In-place LU with row pivoting of an n x n row-major matrix in [0,p).
/// Returns false if singular mod p. perm[k] = row swapped into position k.
bool lu_inplace(double* a, std::size_t n, const Modulus& m, std::vector<std::size_t>& perm);

uint64_t det_mod(std::vector<double> a, std::size_t n, const Modulus& m);

/// Inverse of an n x n matrix in [0,p); returns false if singular mod p.
bool inverse_mod(const double* a, std::size_t n, const Modulus& m, std::vector<double>& inv);

}  // namespace smith::modp
