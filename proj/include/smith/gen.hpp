#pragma once

#include "smith/matcore.hpp"

#include <cstdint>

namespace smith {

/// Deterministic Miller-Rabin, exact for all 64-bit inputs.
bool is_prime(uint64_t n);

/// Uniform random prime in (hi/2, hi].
uint64_t random_prime_upper_half(uint64_t hi, Rng& rng);

/// A_ij = i^j mod n for 0 <= i, j < n, with 0^0 = 1.
IntMat vandermonde_mod(std::size_t n);

/// Entries uniform in (-2^bits, 2^bits), redrawn until det_crt != 0.
IntMat random_nonsingular(std::size_t n, std::size_t bits, Rng& rng);

}  // namespace smith
