#include "smith/oracle.hpp"

#include <utility>

namespace smith {

SmithDiagonal smith_bruteforce(const IntMat& A) {
  if (!A.square()) throw DimensionError("smith_bruteforce: matrix must be square");
  const std::size_t n = A.rows();
  IntMat W = A;
  std::vector<mpz_class> d(n);
  mpz_class q;
  for (std::size_t k = 0; k < n; ++k) {
    for (;;) {
      // pivot: smallest nonzero |entry| in the trailing block
      std::size_t pi = n, pj = n;
      for (std::size_t i = k; i < n; ++i)
        for (std::size_t j = k; j < n; ++j)
          if (W(i, j) != 0 && (pi == n || cmp_abs(W(i, j), W(pi, pj)) < 0)) {
            pi = i;
            pj = j;
          }
      if (pi == n) throw SingularMatrix();
      if (pi != k)
        for (std::size_t j = 0; j < n; ++j) std::swap(W(k, j), W(pi, j));
      if (pj != k)
        for (std::size_t i = 0; i < n; ++i) std::swap(W(i, k), W(i, pj));
      const mpz_class p = W(k, k);
      bool clean = true;
      for (std::size_t i = k + 1; i < n; ++i) {
        if (W(i, k) == 0) continue;
        mpz_tdiv_q(q.get_mpz_t(), W(i, k).get_mpz_t(), p.get_mpz_t());
        for (std::size_t j = k; j < n; ++j) mpz_submul(W(i, j).get_mpz_t(), q.get_mpz_t(), W(k, j).get_mpz_t());
        if (W(i, k) != 0) clean = false;
      }
      for (std::size_t j = k + 1; j < n; ++j) {
        if (W(k, j) == 0) continue;
        mpz_tdiv_q(q.get_mpz_t(), W(k, j).get_mpz_t(), p.get_mpz_t());
        for (std::size_t i = k; i < n; ++i) mpz_submul(W(i, j).get_mpz_t(), q.get_mpz_t(), W(i, k).get_mpz_t());
        if (W(k, j) != 0) clean = false;
      }
      if (clean) break;
    }
    d[k] = abs(W(k, k));
  }
  // (d_i, d_j) -> (gcd, lcm) until the chain holds
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        if (mpz_divisible_p(d[j].get_mpz_t(), d[i].get_mpz_t())) continue;
        mpz_class g, l;
        mpz_gcd(g.get_mpz_t(), d[i].get_mpz_t(), d[j].get_mpz_t());
        mpz_lcm(l.get_mpz_t(), d[i].get_mpz_t(), d[j].get_mpz_t());
        d[i] = g;
        d[j] = l;
        changed = true;
      }
  }
  SmithDiagonal S;
  S.factors = std::move(d);
  return S;
}

}  // namespace smith
