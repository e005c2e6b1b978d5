#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "helpers.hpp"
#include "smith/gen.hpp"
#include "smith/matcore.hpp"

#include <sstream>

using namespace smith;
using testing::mat;

TEST_CASE("mat_mul_exact small cases") {
  IntMat X = mat({{3, -1, 7}, {0, 5, 2}});
  CHECK(mat_mul_exact(IntMat::identity(2), X) == X);
  CHECK(mat_mul_exact(mat({{2, 4}, {6, 8}}), mat({{1}, {1}})) == mat({{6}, {14}}));
  CHECK_THROWS_AS(mat_mul_exact(X, X), DimensionError);
}

TEST_CASE("mat_mul_exact matches schoolbook on 128-bit entries") {
  Rng rng(11);
  for (int t = 0; t < 5; ++t) {
    IntMat A = testing::random_signed(8, 8, 128, rng), B = testing::random_signed(8, 8, 128, rng);
    CHECK(mat_mul_exact(A, B) == testing::schoolbook(A, B));
  }
}

TEST_CASE("mat_mul_exact is associative") {
  Rng rng(12);
  for (int t = 0; t < 10; ++t) {
    IntMat A = testing::random_signed(4, 4, 40, rng), B = testing::random_signed(4, 4, 40, rng),
           C = testing::random_signed(4, 4, 40, rng);
    CHECK(mat_mul_exact(mat_mul_exact(A, B), C) == mat_mul_exact(A, mat_mul_exact(B, C)));
  }
}

TEST_CASE("rem_mod range and idempotence") {
  CHECK(rem_mod(mpz_class(-3), mpz_class(5)) == 2);
  CHECK(rem_mod(mpz_class(7), mpz_class(7)) == 0);
  CHECK(rem_mod(mat({{10, -10}}), mpz_class(6)) == mat({{4, 2}}));
  CHECK_THROWS(rem_mod(mpz_class(3), mpz_class(0)));
  CHECK_THROWS(rem_mod(mat({{1}}), mpz_class(-2)));
  Rng rng(13);
  IntMat A = testing::random_signed(5, 7, 90, rng);
  const mpz_class s("123456789012345678901");
  IntMat R = rem_mod(A, s);
  CHECK(rem_mod(R, s) == R);
  for (std::size_t e = 0; e < A.data().size(); ++e) {
    CHECK(R.data()[e] >= 0);
    CHECK(R.data()[e] < s);
    CHECK(mpz_divisible_p(mpz_class(A.data()[e] - R.data()[e]).get_mpz_t(), s.get_mpz_t()));
  }
}

TEST_CASE("hadamard_bits") {
  CHECK(hadamard_bits(IntMat::identity(1)) == 1);
  CHECK(hadamard_bits(mat({{2, 4}, {6, 8}})) == 8);
  CHECK(hadamard_bits(IntMat(3, 3)) >= 1);
  IntMat V = vandermonde_mod(13);
  CHECK(bit_length(testing::bareiss_det(V)) < hadamard_bits(V));
}

TEST_CASE("det_crt against Bareiss") {
  CHECK(det_crt(IntMat::identity(5)) == 1);
  CHECK(det_crt(mat({{2, 4}, {6, 8}})) == -8);
  CHECK(det_crt(vandermonde_mod(11)) == testing::bareiss_det(vandermonde_mod(11)));
  CHECK(det_crt(mat({{1, 2}, {2, 4}})) == 0);
  Rng rng(14);
  for (int t = 0; t < 10; ++t) {
    IntMat A = testing::random_signed(7, 7, 60, rng);
    mpz_class d = det_crt(A);
    CHECK(d == testing::bareiss_det(A));
    CHECK(bit_length(d) < hadamard_bits(A));
  }
}

TEST_CASE("det_crt is multiplicative") {
  Rng rng(15);
  for (int t = 0; t < 10; ++t) {
    IntMat A = testing::random_signed(6, 6, 16, rng), B = testing::random_signed(6, 6, 16, rng);
    CHECK(det_crt(mat_mul_exact(A, B)) == det_crt(A) * det_crt(B));
  }
}

TEST_CASE("matrix text format") {
  std::istringstream in("2 3\n1 -2 3\n40 5 -600\n");
  IntMat A = read_matrix(in);
  CHECK(A == mat({{1, -2, 3}, {40, 5, -600}}));
  std::ostringstream out;
  write_matrix(out, A);
  CHECK(out.str() == "2 3\n1 -2 3\n40 5 -600\n");

  std::istringstream big("1 1\n-123456789012345678901234567890\n");
  CHECK(read_matrix(big)(0, 0) == mpz_class("-123456789012345678901234567890"));

  for (const char* bad : {"", "2\n1 2\n", "1 2\n1\n", "1 1\n1 2\n", "1 1\nx\n", "1 1\n1.5\n", "1 1\n--1\n",
                          "2 1\n1\n", "0 3\n", "1 1\n1\n2\n"}) {
    std::istringstream s(bad);
    CHECK_THROWS_AS(read_matrix(s), ParseError);
  }
}

TEST_CASE("random_below stays in range") {
  Rng rng(16);
  const mpz_class b("1000000000000000000000007");
  for (int t = 0; t < 200; ++t) {
    mpz_class x = random_below(b, rng);
    CHECK(x >= 0);
    CHECK(x < b);
  }
  CHECK(random_below(mpz_class(1), rng) == 0);
}
