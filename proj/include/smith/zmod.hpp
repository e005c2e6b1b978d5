#pragma once

// Smith form over Z/(s) with row and column transforms.

#include "smith/matcore.hpp"

#include <vector>

namespace smith {

struct ZmodSmith {
  std::vector<mpz_class> e;  // e_1 | e_2 | ... with e_k = gcd(pivot, s); e_k = s marks a zero class
  IntMat L;                  // first `keep` rows of the row transform, keep x n
  IntMat Y;                  // first `keep` columns of the column transform, c x keep
  IntMat PY;                 // Rem(P Y, s), n x keep
};

/// L P Y == diag(e) (mod s) on the leading keep x keep block, zero elsewhere in those rows/columns.
/// P is n x c with entries in [0, s); keep <= c.
ZmodSmith zmod_smith(const IntMat& P, const mpz_class& s, std::size_t keep);

}  // namespace smith
