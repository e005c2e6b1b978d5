#pragma once

#include "smith/massager.hpp"

#include <optional>
#include <string>

namespace smith {

bool check_divisibility(const SmithDiagonal& S);

/// Every column j of A M and of T + U M divisible by s_j; T must be unit upper triangular.
bool check_integrality(const IntMat& A, const IntMat& U, const IntMat& M, const IntMat& T, const SmithDiagonal& S);

/// |det A| == prod s_i.
bool check_unimodular(const IntMat& A, const SmithDiagonal& S);

struct Report {
  std::size_t n = 0;
  bool divisibility = false;
  bool integrality = false;
  bool unimodularity = false;
  std::optional<bool> oracle;  // set when the oracle comparison ran
  bool all_pass() const { return divisibility && integrality && unimodularity && oracle.value_or(true); }
  std::string text() const;
};

/// oracle_limit = 0 skips the oracle comparison.
Report verify_massager(const IntMat& A, const SmithMassager& massager, std::size_t oracle_limit = 0);

/// Rem((X Y)_ij, moduli[j]).
IntMat mul_mod_columns(const IntMat& X, const IntMat& Y, const std::vector<mpz_class>& moduli);

}  // namespace smith
