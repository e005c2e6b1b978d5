#include "smith/certify.hpp"

#include "smith/modp.hpp"
#include "smith/oracle.hpp"

#include <map>
#include <sstream>

namespace smith {

namespace {

// X * Y[:, cols] mod sigma for one modulus sigma > 1, written into out[:, cols].
void mul_group(const IntMat& X, const IntMat& Y, const std::vector<std::size_t>& cols, const mpz_class& sigma,
               IntMat& out) {
  const std::size_t rows = X.rows(), inner = X.cols(), g = cols.size();
  const std::size_t bits = bit_length(sigma);
  if (bits <= 26) {
    const uint64_t s = sigma.get_ui();
    const modp::Modulus md(s);
    std::vector<double> x(rows * inner), y(inner * g), c(rows * g);
    for (std::size_t e = 0; e < rows * inner; ++e) x[e] = double(mpz_fdiv_ui(X.data()[e].get_mpz_t(), s));
    for (std::size_t k = 0; k < inner; ++k)
      for (std::size_t j = 0; j < g; ++j) y[k * g + j] = double(mpz_fdiv_ui(Y(k, cols[j]).get_mpz_t(), s));
    modp::gemm_mod(rows, g, inner, x.data(), inner, y.data(), g, c.data(), g, md);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < g; ++j) out(i, cols[j]) = (unsigned long)c[i * g + j];
  } else if (bits <= 62) {
    const uint64_t s = sigma.get_ui();
    std::vector<uint64_t> x(rows * inner), y(inner * g);
    for (std::size_t e = 0; e < rows * inner; ++e) x[e] = mpz_fdiv_ui(X.data()[e].get_mpz_t(), s);
    for (std::size_t k = 0; k < inner; ++k)
      for (std::size_t j = 0; j < g; ++j) y[j * inner + k] = mpz_fdiv_ui(Y(k, cols[j]).get_mpz_t(), s);
    for (std::size_t i = 0; i < rows; ++i) {
      const uint64_t* xr = x.data() + i * inner;
      for (std::size_t j = 0; j < g; ++j) {
        const uint64_t* yc = y.data() + j * inner;
        unsigned __int128 acc = 0;
        for (std::size_t k = 0; k < inner; ++k) {
          acc += (unsigned __int128)xr[k] * yc[k];
          if (acc >> 125) acc %= s;
        }
        out(i, cols[j]) = (unsigned long)uint64_t(acc % s);
      }
    }
  } else {
    IntMat xr = rem_mod(X, sigma);
    mpz_class acc;
    for (std::size_t j = 0; j < g; ++j) {
      std::vector<mpz_class> yc(inner);
      for (std::size_t k = 0; k < inner; ++k) yc[k] = rem_mod(Y(k, cols[j]), sigma);
      for (std::size_t i = 0; i < rows; ++i) {
        acc = 0;
        const mpz_class* row = xr.row(i);
        for (std::size_t k = 0; k < inner; ++k)
          if (row[k] != 0 && yc[k] != 0) mpz_addmul(acc.get_mpz_t(), row[k].get_mpz_t(), yc[k].get_mpz_t());
        mpz_fdiv_r(out(i, cols[j]).get_mpz_t(), acc.get_mpz_t(), sigma.get_mpz_t());
      }
    }
  }
}

bool unit_upper(const IntMat& T) {
  for (std::size_t i = 0; i < T.rows(); ++i)
    for (std::size_t j = 0; j <= i && j < T.cols(); ++j)
      if (T(i, j) != (i == j ? 1 : 0)) return false;
  return true;
}

}  // namespace

IntMat mul_mod_columns(const IntMat& X, const IntMat& Y, const std::vector<mpz_class>& moduli) {
  if (X.cols() != Y.rows()) throw DimensionError("mul_mod_columns: inner dimensions differ");
  if (moduli.size() != Y.cols()) throw DimensionError("mul_mod_columns: one modulus per column required");
  std::map<mpz_class, std::vector<std::size_t>> groups;
  for (std::size_t j = 0; j < moduli.size(); ++j) {
    if (moduli[j] < 1) throw std::invalid_argument("mul_mod_columns: moduli must be positive");
    if (moduli[j] > 1) groups[moduli[j]].push_back(j);
  }
  IntMat out(X.rows(), Y.cols());
  for (const auto& [sigma, cols] : groups) mul_group(X, Y, cols, sigma, out);
  return out;
}

bool check_divisibility(const SmithDiagonal& S) { return S.is_chain(); }

bool check_integrality(const IntMat& A, const IntMat& U, const IntMat& M, const IntMat& T, const SmithDiagonal& S) {
  const std::size_t n = A.rows();
  if (!A.square() || S.size() != n) return false;
  for (const IntMat* X : {&U, &M, &T})
    if (X->rows() != n || X->cols() != n) return false;
  for (const auto& s : S.factors)
    if (s < 1) return false;
  if (!unit_upper(T)) return false;
  if (!mul_mod_columns(A, M, S.factors).is_zero()) return false;
  IntMat UM = mul_mod_columns(U, M, S.factors);
  mpz_class v;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      v = T(i, j) + UM(i, j);
      if (!mpz_divisible_p(v.get_mpz_t(), S.factors[j].get_mpz_t())) return false;
    }
  return true;
}

bool check_unimodular(const IntMat& A, const SmithDiagonal& S) {
  if (!A.square() || S.size() != A.rows()) return false;
  mpz_class d = det_crt(A);
  return abs(d) == S.product();
}

std::string Report::text() const {
  std::ostringstream os;
  auto word = [](bool b) { return b ? "pass" : "FAIL"; };
  os << "divisibility: " << word(divisibility) << '\n';
  if (oracle) os << "oracle: " << word(*oracle) << '\n';
  os << "integrality: " << word(integrality) << '\n';
  os << "unimodularity: " << word(unimodularity) << '\n';
  return os.str();
}

Report verify_massager(const IntMat& A, const SmithMassager& mass, std::size_t oracle_limit) {
  Report rep;
  rep.n = A.rows();
  rep.divisibility = check_divisibility(mass.S);
  rep.integrality = check_integrality(A, mass.U, mass.M, mass.T, mass.S);
  rep.unimodularity = check_unimodular(A, mass.S);
  if (A.square() && A.rows() > 0 && A.rows() <= oracle_limit) {
    try {
      rep.oracle = smith_bruteforce(A) == mass.S;
    } catch (const SingularMatrix&) {
      rep.oracle = false;
    }
  }
  return rep;
}

}  // namespace smith
