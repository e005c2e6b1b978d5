#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "helpers.hpp"
#include "smith/modp.hpp"
#include "smith/rns.hpp"

#include <cmath>

using namespace smith;

namespace {

bool trial_prime(uint64_t n) {
  if (n < 2) return false;
  for (uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

// Largest prime p with dim (p-1)^2 + (p-1) < 2^53 - 1, by integer square root and trial division.
uint64_t reference_prime(uint64_t dim) {
  const unsigned __int128 lim = ((unsigned __int128)1 << 53) - 1;
  uint64_t q = 0;
  for (uint64_t step = uint64_t(1) << 32; step; step >>= 1)
    if ((unsigned __int128)dim * (q + step) * (q + step) + (q + step) < lim) q += step;
  uint64_t p = q + 1;
  while (!trial_prime(p)) --p;
  return p;
}

bool bound_ok(uint64_t dim, uint64_t p) {
  const unsigned __int128 lim = ((unsigned __int128)1 << 53) - 1;
  return (unsigned __int128)dim * (p - 1) * (p - 1) + (p - 1) < lim;
}

}  // namespace

TEST_CASE("build_basis prime selection") {
  const uint64_t p1 = max_prime_for_dim(1);
  CHECK(p1 - 1 <= 94906264);
  CHECK(p1 == reference_prime(1));
  const uint64_t p2 = max_prime_for_dim(10007);
  CHECK(p2 - 1 <= 948723);
  CHECK(p2 == reference_prime(10007));
  for (std::size_t dim : {1u, 2u, 64u, 1009u}) {
    RnsBasis b = build_basis(dim, 500);
    CHECK(b.primes.front() == reference_prime(dim));
    CHECK(mpz_sizeinbase(b.product.get_mpz_t(), 2) > 500);
    mpz_class prod = 1;
    for (std::size_t i = 0; i < b.size(); ++i) {
      CHECK(bound_ok(dim, b.primes[i]));
      CHECK(trial_prime(b.primes[i]));
      if (i) CHECK(b.primes[i] < b.primes[i - 1]);
      prod *= (unsigned long)b.primes[i];
    }
    CHECK(prod == b.product);
    // consecutive: no prime skipped between neighbours
    for (std::size_t i = 1; i < b.size(); ++i)
      for (uint64_t x = b.primes[i] + 1; x < b.primes[i - 1]; ++x) CHECK_FALSE(trial_prime(x));
  }
}

TEST_CASE("to_residues and from_residues") {
  RnsBasis b = make_basis({97, 101}, 1);
  ResidueStack st = to_residues(testing::mat({{-1}}), b);
  CHECK(st.planes[0][0] == 96);
  CHECK(st.planes[1][0] == 100);
  ResidueStack z = to_residues(IntMat(3, 2), b);
  for (const auto& pl : z.planes)
    for (double v : pl) CHECK(v == 0);
  CHECK(from_residues(z, b) == IntMat(3, 2));

  RnsBasis seven = make_basis({7}, 1);
  ResidueStack s1;
  s1.basis = &seven;
  s1.rows = s1.cols = 1;
  s1.planes = {{3.0}};
  CHECK(from_residues(s1, seven)(0, 0) == 3);
  s1.planes = {{5.0}};
  CHECK(from_residues(s1, seven)(0, 0) == -2);
  s1.planes = {{6.0}};
  CHECK(from_residues(s1, seven)(0, 0) == -1);

  Rng rng(21);
  RnsBasis big = build_basis(16, 400);
  IntMat A = testing::random_signed(6, 5, 390, rng);
  CHECK(from_residues(to_residues(A, big), big) == A);
}

TEST_CASE("rns_matmul identity and exactness") {
  Rng rng(22);
  RnsBasis b = build_basis(64, 2 * 256 + 8);
  IntMat X = testing::random_signed(64, 64, 256, rng);
  CHECK(from_residues(rns_matmul(to_residues(IntMat::identity(64), b), to_residues(X, b)), b) == X);
  for (int t = 0; t < 5; ++t) {
    IntMat A = testing::random_signed(64, 64, 256, rng), B = testing::random_signed(64, 64, 256, rng);
    CHECK(from_residues(rns_matmul(to_residues(A, b), to_residues(B, b)), b) == testing::schoolbook(A, B));
  }
}

TEST_CASE("rns_matmul rejects long inner dimensions") {
  RnsBasis b = build_basis(8, 100);
  IntMat A(3, 16), B(16, 2);
  auto sa = to_residues(A, b), sb = to_residues(B, b);
  CHECK_THROWS_AS(rns_matmul(sa, sb), DimensionError);
  CHECK_NOTHROW(rns_matmul_chunked(sa, sb));
}

TEST_CASE("rns_matmul_chunked stays exact beyond the basis dimension") {
  Rng rng(23);
  RnsBasis b = build_basis(4, 2 * 64 + 12);
  IntMat A = testing::random_signed(5, 40, 64, rng), B = testing::random_signed(40, 3, 64, rng);
  CHECK(from_residues(rns_matmul_chunked(to_residues(A, b), to_residues(B, b)), b) == testing::schoolbook(A, B));
}

TEST_CASE("mat_mul_rns equals mat_mul_exact") {
  Rng rng(24);
  IntMat A = testing::random_signed(9, 30, 300, rng), B = testing::random_signed(30, 7, 100, rng);
  CHECK(mat_mul_rns(A, B) == mat_mul_exact(A, B));
}

TEST_CASE("base_convert") {
  Rng rng(25);
  RnsBasis from = build_basis(32, 600);
  std::vector<uint64_t> other;
  {
    RnsBasis tmp = build_basis(1000, 700);
    other = tmp.primes;
  }
  RnsBasis to = make_basis(other, 1000);

  ResidueStack zero = to_residues(IntMat(4, 4), from);
  ResidueStack zc = base_convert(zero, from, to);
  for (const auto& pl : zc.planes)
    for (double v : pl) CHECK(v == 0);

  IntMat A = testing::random_signed(6, 6, 590, rng);
  ResidueStack sa = to_residues(A, from);
  ResidueStack same = base_convert(sa, from, from);
  CHECK(same.planes == sa.planes);

  for (int t = 0; t < 10; ++t) {
    ResidueStack st;
    st.basis = &from;
    st.rows = 5;
    st.cols = 7;
    for (uint64_t p : from.primes) {
      std::vector<double> pl(35);
      for (auto& v : pl) v = double(rng() % p);
      st.planes.push_back(std::move(pl));
    }
    ResidueStack got = base_convert(st, from, to);
    ResidueStack want = to_residues(from_residues(st, from), to);
    CHECK(got.planes == want.planes);
  }
}

TEST_CASE("crt_symmetric") {
  RnsBasis b = make_basis({97, 101, 103}, 1);
  const long vals[] = {0, 1, -1, 12345, -504000, 504000};
  for (long v : vals) {
    std::vector<uint64_t> r;
    for (uint64_t p : b.primes) r.push_back(uint64_t(((v % long(p)) + long(p)) % long(p)));
    CHECK(crt_symmetric(r, b) == v);
  }
}

TEST_CASE("modular gemm and inverse beyond one block") {
  for (std::size_t n : {97u, 193u, 257u}) {
    const modp::Modulus m(max_prime_for_dim(n));
    Rng rng(26 + n);
    std::vector<double> a(n * n), b(n * n), c(n * n);
    for (auto& x : a) x = double(rng() % m.u);
    for (auto& x : b) x = double(rng() % m.u);
    modp::gemm_mod(n, n, n, a.data(), n, b.data(), n, c.data(), n, m);
    std::size_t bad = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        unsigned __int128 s = 0;
        for (std::size_t k = 0; k < n; ++k) s += (unsigned __int128)uint64_t(a[i * n + k]) * uint64_t(b[k * n + j]);
        if (uint64_t(s % m.u) != uint64_t(c[i * n + j])) ++bad;
      }
    CHECK(bad == 0);

    std::vector<double> inv;
    REQUIRE(modp::inverse_mod(a.data(), n, m, inv));
    modp::gemm_mod(n, n, n, a.data(), n, inv.data(), n, c.data(), n, m);
    bad = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) bad += c[i * n + j] != (i == j ? 1.0 : 0.0);
    CHECK(bad == 0);
  }
}
