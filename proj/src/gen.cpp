#include "smith/gen.hpp"

#include "smith/modp.hpp"

#include <stdexcept>

namespace smith {

bool is_prime(uint64_t n) {
  if (n < 2) return false;
  for (uint64_t p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n % p == 0) return n == p;
  }
  uint64_t d = n - 1;
  int r = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++r;
  }
  // This base set is a proof for every n < 3.3e24.
  for (uint64_t a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    uint64_t x = modp::pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < r; ++i) {
      x = modp::mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

uint64_t random_prime_upper_half(uint64_t hi, Rng& rng) {
  if (hi < 3) return 2;
  const uint64_t lo = hi / 2 + 1;
  std::uniform_int_distribution<uint64_t> dist(lo, hi);
  for (;;) {
    uint64_t c = dist(rng);
    for (uint64_t q = c; q <= hi; ++q)
      if (is_prime(q)) return q;
  }
}

IntMat vandermonde_mod(std::size_t n) {
  if (n < 2) throw std::invalid_argument("vandermonde_mod: n must be >= 2");
  IntMat A(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    uint64_t v = 1 % n;
    for (std::size_t j = 0; j < n; ++j) {
      A(i, j) = (unsigned long)(j == 0 ? 1 : v);
      v = (v * i) % n;
    }
  }
  return A;
}

IntMat random_nonsingular(std::size_t n, std::size_t bits, Rng& rng) {
  if (n < 1 || bits < 1) throw std::invalid_argument("random_nonsingular: n and bits must be >= 1");
  const mpz_class span = (mpz_class(1) << bits) * 2 - 1;  // values 0 .. 2^{bits+1}-2
  const mpz_class shift = (mpz_class(1) << bits) - 1;
  for (;;) {
    IntMat A(n, n);
    for (auto& x : A.data()) x = random_below(span, rng) - shift;
    if (det_crt(A) != 0) return A;
  }
}

}  // namespace smith
