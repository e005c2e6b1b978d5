#include "smith/matcore.hpp"

#include "smith/modp.hpp"
#include "smith/rns.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace smith {

IntMat::IntMat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

IntMat IntMat::identity(std::size_t n) {
  IntMat I(n, n);
  for (std::size_t i = 0; i < n; ++i) I(i, i) = 1;
  return I;
}

IntMat IntMat::diagonal(const std::vector<mpz_class>& d) {
  IntMat D(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) D(i, i) = d[i];
  return D;
}

std::size_t bit_length(const mpz_class& x) {
  return x == 0 ? 0 : mpz_sizeinbase(x.get_mpz_t(), 2);
}

std::size_t IntMat::max_bits() const {
  std::size_t b = 0;
  for (const auto& x : a_) b = std::max(b, bit_length(x));
  return b;
}

mpz_class IntMat::max_abs() const {
  mpz_class m = 0;
  for (const auto& x : a_)
    if (cmp_abs(x, m) > 0) m = abs(x);
  return m;
}

IntMat IntMat::transpose() const {
  IntMat T(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) T(j, i) = (*this)(i, j);
  return T;
}

IntMat IntMat::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
  if (r0 + nr > rows_ || c0 + nc > cols_) throw DimensionError("block out of range");
  IntMat B(nr, nc);
  for (std::size_t i = 0; i < nr; ++i)
    for (std::size_t j = 0; j < nc; ++j) B(i, j) = (*this)(r0 + i, c0 + j);
  return B;
}

bool IntMat::is_zero() const {
  for (const auto& x : a_)
    if (x != 0) return false;
  return true;
}

bool SmithDiagonal::is_chain() const {
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (factors[i] < 1) return false;
    if (i + 1 < factors.size() && !mpz_divisible_p(factors[i + 1].get_mpz_t(), factors[i].get_mpz_t()))
      return false;
  }
  return true;
}

mpz_class SmithDiagonal::product() const {
  mpz_class p = 1;
  for (const auto& f : factors) p *= f;
  return p;
}

IntMat mat_mul_exact(const IntMat& A, const IntMat& B) {
  if (A.cols() != B.rows()) throw DimensionError("mat_mul_exact: inner dimensions differ");
  IntMat C(A.rows(), B.cols());
  for (std::size_t i = 0; i < A.rows(); ++i) {
    mpz_class* c = C.row(i);
    for (std::size_t k = 0; k < A.cols(); ++k) {
      const mpz_class& a = A(i, k);
      if (a == 0) continue;
      const mpz_class* b = B.row(k);
      for (std::size_t j = 0; j < B.cols(); ++j) mpz_addmul(c[j].get_mpz_t(), a.get_mpz_t(), b[j].get_mpz_t());
    }
  }
  return C;
}

IntMat mat_add(const IntMat& A, const IntMat& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols()) throw DimensionError("mat_add: shapes differ");
  IntMat C(A.rows(), A.cols());
  for (std::size_t e = 0; e < A.data().size(); ++e) C.data()[e] = A.data()[e] + B.data()[e];
  return C;
}

mpz_class rem_mod(const mpz_class& a, const mpz_class& s) {
  if (s <= 0) throw std::invalid_argument("rem_mod: modulus must be positive");
  mpz_class r;
  mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), s.get_mpz_t());
  return r;
}

IntMat rem_mod(const IntMat& A, const mpz_class& s) {
  if (s <= 0) throw std::invalid_argument("rem_mod: modulus must be positive");
  IntMat R(A.rows(), A.cols());
  for (std::size_t e = 0; e < A.data().size(); ++e)
    mpz_fdiv_r(R.data()[e].get_mpz_t(), A.data()[e].get_mpz_t(), s.get_mpz_t());
  return R;
}

namespace {
long double log2_abs(const mpz_class& x) {
  long e = 0;
  double m = mpz_get_d_2exp(&e, x.get_mpz_t());
  return std::log2((long double)std::fabs(m)) + (long double)e;
}
}  // namespace

std::size_t hadamard_bits(const IntMat& A) {
  if (!A.square()) throw DimensionError("hadamard_bits: matrix must be square");
  const std::size_t n = A.rows();
  mpz_class norm = A.max_abs();
  if (n == 0 || norm == 0) return 1;
  long double v = (long double)n * (0.5L * std::log2((long double)n) + log2_abs(norm));
  if (v < 0) v = 0;
  return std::size_t(std::ceil(v)) + 1;
}

mpz_class det_crt(const IntMat& A) {
  if (!A.square()) throw DimensionError("det_crt: matrix must be square");
  const std::size_t n = A.rows();
  if (n == 0) return 1;
  RnsBasis basis = build_basis(n, hadamard_bits(A) + 2);
  std::vector<uint64_t> dets(basis.size());
  std::vector<double> a(n * n), ad;
  const bool small = A.max_bits() <= 52;
  if (small) {
    ad.resize(n * n);
    for (std::size_t e = 0; e < n * n; ++e) ad[e] = A.data()[e].get_d();
  }
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (small) {
      const modp::Modulus& m = basis.mods[i];
      for (std::size_t e = 0; e < n * n; ++e) a[e] = m.reduce(ad[e]);
    } else {
      for (std::size_t e = 0; e < n * n; ++e) a[e] = double(mpz_fdiv_ui(A.data()[e].get_mpz_t(), basis.primes[i]));
    }
    dets[i] = modp::det_mod(a, n, basis.mods[i]);
  }
  return crt_symmetric(dets, basis);
}

namespace {
bool is_integer_token(const std::string& t) {
  std::size_t i = (t.size() > 1 && t[0] == '-') ? 1 : 0;
  if (i >= t.size()) return false;
  for (; i < t.size(); ++i)
    if (t[i] < '0' || t[i] > '9') return false;
  return true;
}
}  // namespace

IntMat read_matrix(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw ParseError("empty matrix input");
  if (!header.empty() && header.back() == '\r') header.pop_back();
  std::istringstream hs(header);
  long long r = -1, c = -1;
  std::string extra;
  if (!(hs >> r >> c) || (hs >> extra)) throw ParseError("bad header line: '" + header + "'");
  if (r < 1 || c < 1) throw ParseError("matrix dimensions must be positive");
  IntMat A{std::size_t(r), std::size_t(c)};
  std::string line, tok;
  for (long long i = 0; i < r; ++i) {
    if (!std::getline(in, line)) throw ParseError("missing row " + std::to_string(i + 1));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    long long j = 0;
    while (ls >> tok) {
      if (j >= c) throw ParseError("too many entries in row " + std::to_string(i + 1));
      if (!is_integer_token(tok)) throw ParseError("bad integer '" + tok + "'");
      A(std::size_t(i), std::size_t(j)).set_str(tok, 10);
      ++j;
    }
    if (j != c) throw ParseError("too few entries in row " + std::to_string(i + 1));
  }
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) throw ParseError("trailing data after matrix");
  }
  return A;
}

void write_matrix(std::ostream& out, const IntMat& A) {
  out << A.rows() << ' ' << A.cols() << '\n';
  for (std::size_t i = 0; i < A.rows(); ++i) {
    for (std::size_t j = 0; j < A.cols(); ++j) {
      if (j) out << ' ';
      out << A(i, j).get_str();
    }
    out << '\n';
  }
}

IntMat load_matrix(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open " + path);
  return read_matrix(f);
}

void save_matrix(const std::string& path, const IntMat& A) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  write_matrix(f, A);
}

mpz_class random_below(const mpz_class& bound, Rng& rng) {
  if (bound <= 0) throw std::invalid_argument("random_below: bound must be positive");
  if (bound == 1) return 0;
  const std::size_t bits = mpz_sizeinbase(mpz_class(bound - 1).get_mpz_t(), 2);
  const std::size_t words = (bits + 63) / 64;
  std::vector<uint64_t> w(words);
  mpz_class x;
  for (;;) {
    for (auto& v : w) v = rng();
    if (bits % 64) w[words - 1] &= (uint64_t(1) << (bits % 64)) - 1;
    mpz_import(x.get_mpz_t(), words, -1, sizeof(uint64_t), 0, 0, w.data());
    if (x < bound) return x;
  }
}

}  // namespace smith
