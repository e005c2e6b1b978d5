#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "helpers.hpp"
#include "smith/gen.hpp"

using namespace smith;

namespace {

bool trial_prime(uint64_t n) {
  if (n < 2) return false;
  for (uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

}  // namespace

TEST_CASE("vandermonde_mod") {
  IntMat A = vandermonde_mod(5);
  CHECK(A(2, 3) == 3);
  for (std::size_t n : {2u, 5u, 9u})
    for (std::size_t i = 0; i < n; ++i) CHECK(vandermonde_mod(n)(i, 0) == 1);
  IntMat B = vandermonde_mod(12);
  for (std::size_t i = 0; i < 12; ++i)
    for (std::size_t j = 0; j < 12; ++j) {
      uint64_t v = 1;
      for (std::size_t t = 0; t < j; ++t) v = v * i % 12;
      CHECK(B(i, j) == v);
    }
  CHECK(det_crt(vandermonde_mod(7)) != 0);
}

TEST_CASE("random_nonsingular") {
  Rng rng(71);
  for (int t = 0; t < 10; ++t) {
    IntMat one = random_nonsingular(1, 1, rng);
    CHECK((one(0, 0) == 1 || one(0, 0) == -1));
  }
  for (int t = 0; t < 5; ++t) {
    IntMat A = random_nonsingular(4, 1, rng);
    CHECK(det_crt(A) != 0);
    for (const auto& v : A.data()) CHECK(abs(v) < 2);
  }
  Rng a(5), b(5);
  CHECK(random_nonsingular(6, 20, a) == random_nonsingular(6, 20, b));
}

TEST_CASE("is_prime") {
  CHECK(is_prime(10007));
  CHECK(is_prime(1009));
  CHECK_FALSE(is_prime(1));
  CHECK_FALSE(is_prime(0));
  for (uint64_t n = 0; n < 5000; ++n) CHECK(is_prime(n) == trial_prime(n));
  CHECK(is_prime(18446744073709551557ull));
  CHECK_FALSE(is_prime(18446744073709551555ull));
  CHECK_FALSE(is_prime(3825123056546413051ull));  // strong pseudoprime to bases 2..23
}

TEST_CASE("random_prime_upper_half") {
  Rng rng(72);
  for (int t = 0; t < 50; ++t) {
    uint64_t p = random_prime_upper_half(1 << 20, rng);
    CHECK(p > (1 << 19));
    CHECK(p <= (1 << 20));
    CHECK(trial_prime(p));
  }
}
