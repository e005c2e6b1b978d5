#pragma once

#include "smith/matcore.hpp"
#include "smith/modp.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace smith {

struct RationalSolution {
  IntMat numerator;
  mpz_class denominator;
};

/// Exact A^{-1} B in lowest common terms (Dixon lifting + rational reconstruction).
RationalSolution solve_rational(const IntMat& A, const IntMat& B, Rng& rng);
RationalSolution solve_rational(const IntMat& A, const IntMat& B);

/// Rem(s Bmat^{-1} J, s) if s Bmat^{-1} J is integral, nullopt otherwise.
std::optional<IntMat> integrality_certify(const IntMat& Bmat, const mpz_class& s, const IntMat& J, Rng& rng);
std::optional<IntMat> integrality_certify(const IntMat& Bmat, const mpz_class& s, const IntMat& J);

/// A square nonsingular matrix prepared for p-adic lifting: a random lifting prime and A^{-1} mod p.
class PadicSolver {
 public:
  PadicSolver(const IntMat& A, Rng& rng);
  PadicSolver transposed() const;

  std::size_t n() const { return n_; }
  uint64_t prime() const { return mod_.u; }
  const modp::Modulus& modulus() const { return mod_; }
  const IntMat& matrix() const { return A_; }
  std::size_t hadamard() const { return hb_; }

  /// One right-hand-side term G*Q: G is n x Q.rows() with small exact entries (null means identity).
  struct Term {
    const std::vector<double>* G = nullptr;
    const IntMat* Q = nullptr;
    double g_norm = 1;  // max |G_ij|
  };

  /// Lifts X = A^{-1} (sum of terms) one balanced p-adic digit at a time. The sink receives digit t
  /// (n x c row-major, entries in (-p/2, p/2]). With stop_when_exact, stops as soon as the residual
  /// vanishes after the right-hand side is exhausted and returns true; otherwise runs exactly `steps`
  /// digits and returns false.
  bool lift(const std::vector<Term>& terms, std::size_t c, std::size_t steps, bool stop_when_exact,
            const std::function<void(std::size_t, const double*)>& sink) const;

  /// Rem(A^{-1} R_j, s_j) for every column j when the result is integral; R is the sum of the terms
  /// and rhs_bits bounds the bit length of its entries.
  std::optional<IntMat> certify(const std::vector<Term>& terms, std::size_t c, std::size_t rhs_bits,
                                const std::vector<mpz_class>& moduli) const;

  /// Balanced digits -> integer values (one per entry), x = sum d_t p^t.
  std::vector<mpz_class> assemble(const std::vector<std::vector<double>>& digits, std::size_t entries) const;

 private:
  PadicSolver() = default;
  std::size_t n_ = 0;
  IntMat A_;
  modp::Modulus mod_;
  std::vector<double> Ainv_;
  std::vector<double> Ad_;  // A as doubles when every |A_ij| < 2^52
  std::size_t a_bits_ = 0, hb_ = 0;
  double a_norm_ = 0;
};

/// Half-extended Euclid: a/b with a == b*u mod m, |a| <= nb, 0 < b <= db; false if none.
bool rational_reconstruct(const mpz_class& u, const mpz_class& m, const mpz_class& nb, const mpz_class& db,
                          mpz_class& a, mpz_class& b);

}  // namespace smith
