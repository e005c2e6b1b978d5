#pragma once

#include "smith/matcore.hpp"
#include "smith/modp.hpp"

#include <cstdint>
#include <memory>
#include <vector>

namespace smith {

/// Largest prime p with dim*(p-1)^2 + (p-1) < 2^53 - 1.
uint64_t max_prime_for_dim(std::size_t dim);

struct RnsBasis {
  std::size_t dim = 1;
  std::vector<uint64_t> primes;
  std::vector<modp::Modulus> mods;
  mpz_class product;
  std::vector<mpz_class> cofactor;  // product / p_i
  std::vector<uint64_t> lagrange;   // (product / p_i)^{-1} mod p_i

  std::size_t size() const { return primes.size(); }
  bool same_as(const RnsBasis& o) const { return this == &o || primes == o.primes; }
};

/// Consecutive primes descending from max_prime_for_dim(dim) until the product reaches 2^target_bits.
RnsBasis build_basis(std::size_t dim, std::size_t target_bits);
/// Basis from an explicit prime list (distinct primes, each admissible for dim).
RnsBasis make_basis(std::vector<uint64_t> primes, std::size_t dim);

struct ResidueStack {
  const RnsBasis* basis = nullptr;
  std::size_t rows = 0, cols = 0;
  std::vector<std::vector<double>> planes;  // one row-major plane per prime, entries in [0, p)
};

ResidueStack to_residues(const IntMat& A, const RnsBasis& basis);
/// Symmetric-range reconstruction (-product/2, product/2].
IntMat from_residues(const ResidueStack& stack, const RnsBasis& basis);
/// Per-prime product; inner dimension must not exceed basis.dim.
ResidueStack rns_matmul(const ResidueStack& A, const ResidueStack& B);
/// Same as rns_matmul but splits long inner dimensions into exact chunks.
ResidueStack rns_matmul_chunked(const ResidueStack& A, const ResidueStack& B);
/// Residues of the symmetric-range value of each entry with respect to another basis.
ResidueStack base_convert(const ResidueStack& stack, const RnsBasis& from, const RnsBasis& to);

/// Counts entries that needed the exact CRT fallback in base_convert (diagnostics).
std::size_t base_convert_fallbacks();

/// Exact product through the RNS pipeline.
IntMat mat_mul_rns(const IntMat& A, const IntMat& B);

/// Symmetric CRT of one residue vector.
mpz_class crt_symmetric(const std::vector<uint64_t>& residues, const RnsBasis& basis);

}  // namespace smith
