#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "helpers.hpp"
#include "smith/gen.hpp"
#include "smith/oracle.hpp"

using namespace smith;
using testing::mat;

namespace {

std::vector<mpz_class> z(std::initializer_list<long> v) { return {v.begin(), v.end()}; }

// gcd of all k x k minors, by expansion; tiny matrices only
mpz_class minor_gcd(const IntMat& A, std::size_t k) {
  const std::size_t n = A.rows();
  mpz_class g = 0;
  std::vector<std::size_t> rs, cs;
  auto det_of = [&](const std::vector<std::size_t>& r, const std::vector<std::size_t>& c) {
    IntMat S(k, k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) S(i, j) = A(r[i], c[j]);
    return testing::bareiss_det(S);
  };
  std::vector<std::vector<std::size_t>> subsets;
  for (unsigned mask = 0; mask < (1u << n); ++mask)
    if (std::size_t(__builtin_popcount(mask)) == k) {
      std::vector<std::size_t> s;
      for (std::size_t i = 0; i < n; ++i)
        if (mask >> i & 1) s.push_back(i);
      subsets.push_back(s);
    }
  for (const auto& r : subsets)
    for (const auto& c : subsets) {
      mpz_class d = det_of(r, c);
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), d.get_mpz_t());
    }
  return g;
}

}  // namespace

TEST_CASE("smith_bruteforce examples") {
  CHECK(smith_bruteforce(IntMat::identity(4)).factors == z({1, 1, 1, 1}));
  CHECK(smith_bruteforce(mat({{2, 4}, {6, 8}})).factors == z({2, 4}));
  CHECK(smith_bruteforce(testing::diag({4, 6})).factors == z({2, 12}));
  CHECK_THROWS_AS(smith_bruteforce(mat({{1, 2}, {2, 4}})), SingularMatrix);
}

TEST_CASE("smith_bruteforce agrees with determinantal divisors") {
  Rng rng(81);
  for (int t = 0; t < 15; ++t) {
    IntMat A = random_nonsingular(4, 4, rng);
    SmithDiagonal S = smith_bruteforce(A);
    mpz_class prev = 1;
    for (std::size_t k = 1; k <= 4; ++k) {
      mpz_class dk = minor_gcd(A, k);
      CHECK(S.factors[k - 1] * prev == dk);
      prev = dk;
    }
  }
}

TEST_CASE("smith_bruteforce invariances") {
  Rng rng(82);
  for (int t = 0; t < 10; ++t) {
    IntMat A = random_nonsingular(7, 5, rng);
    SmithDiagonal S = smith_bruteforce(A);
    CHECK(S.is_chain());
    CHECK(S.product() == abs(det_crt(A)));
    IntMat At(7, 7), Pr(7, 7);
    for (std::size_t i = 0; i < 7; ++i)
      for (std::size_t j = 0; j < 7; ++j) {
        At(i, j) = A(j, i);
        Pr(i, j) = A((i + 3) % 7, j);
      }
    CHECK(smith_bruteforce(At) == S);
    CHECK(smith_bruteforce(Pr) == S);
  }
}
