#include "smith/rns.hpp"

#include "smith/gen.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace smith {

namespace {
std::atomic<std::size_t> g_fallbacks{0};

bool admissible(unsigned __int128 dim, unsigned __int128 q) {
  const unsigned __int128 lim = ((unsigned __int128)1 << 53) - 1;
  return dim * q * q + q < lim;
}
}  // namespace

uint64_t max_prime_for_dim(std::size_t dim) {
  assert(dim >= 1 && dim <= (std::size_t(1) << 50));
  double approx = std::sqrt(9007199254740991.0 / double(dim));
  uint64_t q = uint64_t(approx) + 2;
  while (q > 0 && !admissible(dim, q)) --q;
  while (admissible(dim, q + 1)) ++q;
  uint64_t p = q + 1;
  while (p >= 2 && !is_prime(p)) --p;
  if (p < 2) throw std::logic_error("no admissible prime");
  return p;
}

RnsBasis make_basis(std::vector<uint64_t> primes, std::size_t dim) {
  RnsBasis b;
  b.dim = dim;
  b.primes = std::move(primes);
  b.product = 1;
  for (uint64_t p : b.primes) {
    b.mods.emplace_back(p);
    b.product *= mpz_class((unsigned long)p);
  }
  const std::size_t l = b.primes.size();
  b.cofactor.resize(l);
  b.lagrange.resize(l);
  for (std::size_t i = 0; i < l; ++i) {
    b.cofactor[i] = b.product / mpz_class((unsigned long)b.primes[i]);
    uint64_t c = mpz_fdiv_ui(b.cofactor[i].get_mpz_t(), b.primes[i]);
    b.lagrange[i] = modp::inv_mod(c, b.primes[i]);
  }
  return b;
}

RnsBasis build_basis(std::size_t dim, std::size_t target_bits) {
  if (dim < 1 || target_bits < 1) throw std::invalid_argument("build_basis: dim and target_bits must be >= 1");
  std::vector<uint64_t> primes;
  mpz_class prod = 1;
  uint64_t p = max_prime_for_dim(dim);
  while (mpz_sizeinbase(prod.get_mpz_t(), 2) <= target_bits) {
    while (p >= 2 && !is_prime(p)) --p;
    if (p < 2) throw std::logic_error("build_basis: ran out of primes");
    primes.push_back(p);
    prod *= mpz_class((unsigned long)p);
    --p;
  }
  return make_basis(std::move(primes), dim);
}

ResidueStack to_residues(const IntMat& A, const RnsBasis& basis) {
  ResidueStack st;
  st.basis = &basis;
  st.rows = A.rows();
  st.cols = A.cols();
  const std::size_t E = st.rows * st.cols;
  st.planes.assign(basis.size(), std::vector<double>(E));
  const auto& a = A.data();
  for (std::size_t e = 0; e < E; ++e) {
    mpz_srcptr z = a[e].get_mpz_t();
    if (mpz_fits_slong_p(z)) {
      long v = mpz_get_si(z);
      for (std::size_t i = 0; i < basis.size(); ++i) {
        long p = long(basis.primes[i]);
        long r = v % p;
        st.planes[i][e] = double(r < 0 ? r + p : r);
      }
    } else {
      for (std::size_t i = 0; i < basis.size(); ++i)
        st.planes[i][e] = double(mpz_fdiv_ui(z, basis.primes[i]));
    }
  }
  return st;
}

namespace {

void check_stack(const ResidueStack& st, const RnsBasis& basis) {
  if (!st.basis || !st.basis->same_as(basis) || st.planes.size() != basis.size())
    throw std::invalid_argument("residue stack does not belong to basis");
}

void reconstruct_entry(const ResidueStack& st, const RnsBasis& basis, std::size_t e, const mpz_class& half,
                       mpz_class& out) {
  out = 0;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    uint64_t x = uint64_t(st.planes[i][e]);
    uint64_t xi = modp::mul_mod(x, basis.lagrange[i], basis.primes[i]);
    mpz_addmul_ui(out.get_mpz_t(), basis.cofactor[i].get_mpz_t(), xi);
  }
  mpz_fdiv_r(out.get_mpz_t(), out.get_mpz_t(), basis.product.get_mpz_t());
  if (out > half) out -= basis.product;
}

}  // namespace

mpz_class crt_symmetric(const std::vector<uint64_t>& residues, const RnsBasis& basis) {
  mpz_class out = 0;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    uint64_t xi = modp::mul_mod(residues[i] % basis.primes[i], basis.lagrange[i], basis.primes[i]);
    mpz_addmul_ui(out.get_mpz_t(), basis.cofactor[i].get_mpz_t(), xi);
  }
  mpz_fdiv_r(out.get_mpz_t(), out.get_mpz_t(), basis.product.get_mpz_t());
  mpz_class half = basis.product / 2;
  if (out > half) out -= basis.product;
  return out;
}

IntMat from_residues(const ResidueStack& st, const RnsBasis& basis) {
  check_stack(st, basis);
  IntMat A(st.rows, st.cols);
  mpz_class half = basis.product / 2;
  for (std::size_t e = 0; e < st.rows * st.cols; ++e) reconstruct_entry(st, basis, e, half, A.data()[e]);
  return A;
}

namespace {

ResidueStack matmul_impl(const ResidueStack& A, const ResidueStack& B, bool chunked) {
  if (!A.basis || !B.basis || !A.basis->same_as(*B.basis))
    throw std::invalid_argument("rns_matmul: operands use different bases");
  if (A.cols != B.rows) throw DimensionError("rns_matmul: inner dimensions differ");
  const RnsBasis& basis = *A.basis;
  if (!chunked && A.cols > basis.dim)
    throw DimensionError("rns_matmul: inner dimension exceeds the basis dimension bound");
  ResidueStack C;
  C.basis = A.basis;
  C.rows = A.rows;
  C.cols = B.cols;
  C.planes.resize(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    C.planes[i].assign(C.rows * C.cols, 0.0);
    modp::gemm_mod(A.rows, B.cols, A.cols, A.planes[i].data(), A.cols, B.planes[i].data(), B.cols,
                   C.planes[i].data(), C.cols, basis.mods[i]);
  }
  return C;
}

}  // namespace

ResidueStack rns_matmul(const ResidueStack& A, const ResidueStack& B) { return matmul_impl(A, B, false); }
ResidueStack rns_matmul_chunked(const ResidueStack& A, const ResidueStack& B) {
  return matmul_impl(A, B, true);
}

std::size_t base_convert_fallbacks() { return g_fallbacks.load(); }

ResidueStack base_convert(const ResidueStack& st, const RnsBasis& from, const RnsBasis& to) {
  check_stack(st, from);
  ResidueStack out;
  out.basis = &to;
  out.rows = st.rows;
  out.cols = st.cols;
  const std::size_t E = st.rows * st.cols, lf = from.size(), lt = to.size();
  if (from.same_as(to)) {
    out.planes = st.planes;
    return out;
  }
  out.planes.assign(lt, std::vector<double>(E, 0.0));
  if (E == 0 || lf == 0) return out;

  // xi_i = x_i * (P/p_i)^{-1} mod p_i, laid out entry-major for the weight product.
  std::vector<double> xi(E * lf);
  std::vector<double> frac(E, 0.0);
  for (std::size_t i = 0; i < lf; ++i) {
    const auto& m = from.mods[i];
    const double li = double(from.lagrange[i]);
    const auto& pl = st.planes[i];
    for (std::size_t e = 0; e < E; ++e) {
      double v = m.mul(pl[e], li);
      xi[e * lf + i] = v;
      frac[e] += v * m.ip;
    }
  }
  // W_iq = (P/p_i) mod q
  std::vector<double> W(lf * lt);
  std::vector<double> Pmod(lt);
  uint64_t qmax = 0, pmax = 0;
  for (std::size_t q = 0; q < lt; ++q) {
    for (std::size_t i = 0; i < lf; ++i)
      W[i * lt + q] = double(mpz_fdiv_ui(from.cofactor[i].get_mpz_t(), to.primes[q]));
    Pmod[q] = double(mpz_fdiv_ui(from.product.get_mpz_t(), to.primes[q]));
    qmax = std::max(qmax, to.primes[q]);
  }
  for (uint64_t p : from.primes) pmax = std::max(pmax, p);
  const double per = double(pmax - 1) * double(qmax - 1);
  const std::size_t chunk = std::max<std::size_t>(1, std::size_t((modp::kExactLimit - double(qmax)) / per));

  std::vector<double> Y(E * lt, 0.0);
  for (std::size_t k0 = 0; k0 < lf; k0 += chunk) {
    const std::size_t kb = std::min(chunk, lf - k0);
    modp::gemm(E, lt, kb, 1.0, xi.data() + k0, lf, W.data() + k0 * lt, lt, 1.0, Y.data(), lt);
    for (std::size_t e = 0; e < E; ++e)
      for (std::size_t q = 0; q < lt; ++q) Y[e * lt + q] = to.mods[q].reduce(Y[e * lt + q]);
  }

  // Overflow multiple k: x = P (f - k) with f - k in (-1/2, 1/2].
  const double guard = 1e-6;
  mpz_class half = from.product / 2, tmp;
  for (std::size_t e = 0; e < E; ++e) {
    const double f = frac[e];
    const double fl = std::floor(f);
    const double t = f - fl;
    if (std::fabs(t - 0.5) < guard) {
      g_fallbacks.fetch_add(1);
      reconstruct_entry(st, from, e, half, tmp);
      for (std::size_t q = 0; q < lt; ++q)
        out.planes[q][e] = double(mpz_fdiv_ui(tmp.get_mpz_t(), to.primes[q]));
      continue;
    }
    const double k = t > 0.5 ? fl + 1 : fl;
    for (std::size_t q = 0; q < lt; ++q) {
      const auto& m = to.mods[q];
      double kq = m.reduce(k);
      out.planes[q][e] = m.reduce(Y[e * lt + q] - m.mul(kq, Pmod[q]));
    }
  }
  return out;
}

IntMat mat_mul_rns(const IntMat& A, const IntMat& B) {
  if (A.cols() != B.rows()) throw DimensionError("mat_mul_rns: inner dimensions differ");
  const std::size_t inner = std::max<std::size_t>(1, A.cols());
  std::size_t bits = A.max_bits() + B.max_bits() + std::size_t(std::ceil(std::log2(double(inner)))) + 2;
  RnsBasis basis = build_basis(inner, bits);
  ResidueStack a = to_residues(A, basis), b = to_residues(B, basis);
  return from_residues(rns_matmul(a, b), basis);
}

}  // namespace smith
