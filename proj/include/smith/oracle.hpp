#pragma once

#include "smith/matcore.hpp"

namespace smith {

/// Smith form by gcd elimination over Z with minimal-|entry| pivots. Intended for n <= 200.
SmithDiagonal smith_bruteforce(const IntMat& A);

}  // namespace smith
