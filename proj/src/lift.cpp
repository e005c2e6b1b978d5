#include "smith/lift.hpp"

#include "smith/gen.hpp"
#include "smith/rns.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace smith {

namespace {

constexpr std::size_t kColumnChunk = 128;
constexpr double kSafe = 4503599627370496.0;  // 2^52

// Signed base-p digits of every entry of an integer matrix, produced in order t = 0, 1, ...
class DigitStream {
 public:
  DigitStream(const IntMat& Q, uint64_t p) : p_(p), entries_(Q.rows() * Q.cols()) {
    e_ = 1;
    pe_ = p;
    while (pe_ <= UINT64_MAX / p) {
      pe_ *= p;
      ++e_;
    }
    mag_.resize(entries_);
    neg_.resize(entries_);
    std::size_t bits = 0;
    for (std::size_t i = 0; i < entries_; ++i) {
      const mpz_class& x = Q.data()[i];
      neg_[i] = x < 0;
      mpz_abs(mag_[i].get_mpz_t(), x.get_mpz_t());
      bits = std::max(bits, bit_length(x));
    }
    length_ = bits == 0 ? 0 : std::size_t(std::ceil(double(bits) / std::log2(double(p)))) + 1;
    buf_.assign(entries_ * e_, 0);
  }

  std::size_t length() const { return length_; }

  void digits(std::size_t t, double* out) {
    if (t >= length_) {
      std::fill(out, out + entries_, 0.0);
      return;
    }
    const std::size_t off = t % e_;
    if (off == 0) refill();
    for (std::size_t i = 0; i < entries_; ++i) {
      double d = double(buf_[i * e_ + off]);
      out[i] = neg_[i] ? -d : d;
    }
  }

 private:
  void refill() {
    for (std::size_t i = 0; i < entries_; ++i) {
      uint64_t* b = buf_.data() + i * e_;
      if (mag_[i] == 0) {
        std::fill(b, b + e_, 0);
        continue;
      }
      unsigned long r = mpz_tdiv_q_ui(mag_[i].get_mpz_t(), mag_[i].get_mpz_t(), pe_);
      for (unsigned u = 0; u < e_; ++u) {
        b[u] = r % p_;
        r /= p_;
      }
    }
  }

  uint64_t p_, pe_ = 0;
  unsigned e_ = 1;
  std::size_t entries_, length_ = 0;
  std::vector<mpz_class> mag_;
  std::vector<char> neg_;
  std::vector<uint64_t> buf_;
};

double log2_of(uint64_t p) { return std::log2(double(p)); }

}  // namespace

PadicSolver::PadicSolver(const IntMat& A, Rng& rng) : n_(A.rows()), A_(A) {
  if (!A.square()) throw DimensionError("PadicSolver: matrix must be square");
  a_bits_ = A.max_bits();
  hb_ = hadamard_bits(A);
  a_norm_ = a_bits_ == 0 ? 0.0 : A.max_abs().get_d();
  const uint64_t hi = max_prime_for_dim(std::max<std::size_t>(n_, 1));
  std::vector<double> a(n_ * n_);
  for (int attempt = 0;; ++attempt) {
    if (attempt == 8 && det_crt(A) == 0) throw SingularMatrix();
    if (attempt > 200) throw std::runtime_error("PadicSolver: no suitable lifting prime found");
    uint64_t p = random_prime_upper_half(hi, rng);
    for (std::size_t e = 0; e < n_ * n_; ++e) a[e] = double(mpz_fdiv_ui(A.data()[e].get_mpz_t(), p));
    modp::Modulus m(p);
    if (modp::inverse_mod(a.data(), n_, m, Ainv_)) {
      mod_ = m;
      break;
    }
  }
  if (a_bits_ <= 52) {
    Ad_.resize(n_ * n_);
    for (std::size_t e = 0; e < n_ * n_; ++e) Ad_[e] = A.data()[e].get_d();
  }
}

PadicSolver PadicSolver::transposed() const {
  PadicSolver t;
  t.n_ = n_;
  t.A_ = A_.transpose();
  t.mod_ = mod_;
  t.a_bits_ = a_bits_;
  t.hb_ = hb_;
  t.a_norm_ = a_norm_;
  t.Ainv_.resize(n_ * n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) t.Ainv_[j * n_ + i] = Ainv_[i * n_ + j];
  if (!Ad_.empty()) {
    t.Ad_.resize(n_ * n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) t.Ad_[j * n_ + i] = Ad_[i * n_ + j];
  }
  return t;
}

bool PadicSolver::lift(const std::vector<Term>& terms, std::size_t c, std::size_t steps, bool stop_when_exact,
                       const std::function<void(std::size_t, const double*)>& sink) const {
  const std::size_t n = n_;
  const double p = mod_.p;
  std::vector<DigitStream> streams;
  streams.reserve(terms.size());
  std::size_t rhs_len = 0;
  double dbound = 0;
  for (const auto& term : terms) {
    if (term.Q->cols() != c) throw DimensionError("lift: right-hand side column count mismatch");
    if (!term.G && term.Q->rows() != n) throw DimensionError("lift: right-hand side row count mismatch");
    streams.emplace_back(*term.Q, mod_.u);
    rhs_len = std::max(rhs_len, streams.back().length());
    dbound += term.G ? term.g_norm * double(term.Q->rows()) * p : p;
  }
  if (dbound >= kSafe) throw std::logic_error("lift: right-hand side digits too large for exact accumulation");
  const bool fast = !Ad_.empty() && dbound * 1.01 + double(n) * a_norm_ * (0.5 * p + 4) + 4 * p < kSafe;

  std::vector<double> Dsum(n * c), Vm(n * c), X(n * c), AX, E;
  std::vector<std::vector<double>> dig(terms.size());
  for (std::size_t k = 0; k < terms.size(); ++k) dig[k].resize(terms[k].Q->rows() * c);
  std::vector<mpz_class> Ez;
  if (fast) {
    E.assign(n * c, 0.0);
    AX.resize(n * c);
  } else {
    Ez.resize(n * c);
  }
  auto residual_zero = [&]() {
    if (fast) return std::all_of(E.begin(), E.end(), [](double v) { return v == 0; });
    return std::all_of(Ez.begin(), Ez.end(), [](const mpz_class& v) { return v == 0; });
  };

  for (std::size_t t = 0;; ++t) {
    if (stop_when_exact && t >= rhs_len && residual_zero()) return true;
    if (t == steps) return false;
    std::fill(Dsum.begin(), Dsum.end(), 0.0);
    for (std::size_t k = 0; k < terms.size(); ++k) {
      streams[k].digits(t, dig[k].data());
      if (!terms[k].G) {
        for (std::size_t e = 0; e < n * c; ++e) Dsum[e] += dig[k][e];
      } else {
        modp::gemm(n, c, terms[k].Q->rows(), 1.0, terms[k].G->data(), terms[k].Q->rows(), dig[k].data(), c, 1.0,
                   Dsum.data(), c);
      }
    }
    if (fast) {
      for (std::size_t e = 0; e < n * c; ++e) Dsum[e] += E[e];  // Dsum now holds V
      for (std::size_t e = 0; e < n * c; ++e) Vm[e] = mod_.reduce(Dsum[e]);
    } else {
      for (std::size_t e = 0; e < n * c; ++e) {
        mpz_class& v = Ez[e];
        double d = Dsum[e];
        if (d >= 0)
          mpz_add_ui(v.get_mpz_t(), v.get_mpz_t(), (unsigned long)d);
        else
          mpz_sub_ui(v.get_mpz_t(), v.get_mpz_t(), (unsigned long)(-d));
        Vm[e] = double(mpz_fdiv_ui(v.get_mpz_t(), mod_.u));
      }
    }
    modp::gemm_mod(n, c, n, Ainv_.data(), n, Vm.data(), c, X.data(), c, mod_);
    for (auto& x : X) x = mod_.balance(x);
    sink(t, X.data());
    if (fast) {
      modp::gemm(n, c, n, 1.0, Ad_.data(), n, X.data(), c, 0.0, AX.data(), c);
      const double ip = mod_.ip;
      for (std::size_t e = 0; e < n * c; ++e) E[e] = std::nearbyint((Dsum[e] - AX[e]) * ip);
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        const mpz_class* arow = A_.row(i);
        for (std::size_t k = 0; k < n; ++k) {
          mpz_srcptr a = arow[k].get_mpz_t();
          if (mpz_sgn(a) == 0) continue;
          const double* xr = X.data() + k * c;
          for (std::size_t j = 0; j < c; ++j) {
            double x = xr[j];
            if (x > 0)
              mpz_submul_ui(Ez[i * c + j].get_mpz_t(), a, (unsigned long)x);
            else if (x < 0)
              mpz_addmul_ui(Ez[i * c + j].get_mpz_t(), a, (unsigned long)(-x));
          }
        }
      }
      for (auto& v : Ez) mpz_divexact_ui(v.get_mpz_t(), v.get_mpz_t(), mod_.u);
    }
  }
}

std::vector<mpz_class> PadicSolver::assemble(const std::vector<std::vector<double>>& digits,
                                             std::size_t entries) const {
  const std::size_t k = digits.size();
  std::map<std::size_t, mpz_class> pw;
  auto power = [&](std::size_t len) -> const mpz_class& {
    auto it = pw.find(len);
    if (it != pw.end()) return it->second;
    mpz_class v;
    mpz_ui_pow_ui(v.get_mpz_t(), mod_.u, len);
    return pw.emplace(len, v).first->second;
  };
  std::vector<mpz_class> out(entries);
  std::function<void(std::size_t, std::size_t, std::size_t, mpz_class&)> rec =
      [&](std::size_t e, std::size_t lo, std::size_t hi, mpz_class& r) {
        if (hi - lo <= 16) {
          r = 0;
          for (std::size_t t = hi; t-- > lo;) {
            r *= (unsigned long)mod_.u;
            double d = digits[t][e];
            if (d >= 0)
              r += (unsigned long)d;
            else
              r -= (unsigned long)(-d);
          }
          return;
        }
        std::size_t mid = lo + (hi - lo) / 2;
        mpz_class a, b;
        rec(e, lo, mid, a);
        rec(e, mid, hi, b);
        r = a + b * power(mid - lo);
      };
  for (std::size_t e = 0; e < entries; ++e) rec(e, 0, k, out[e]);
  return out;
}

std::optional<IntMat> PadicSolver::certify(const std::vector<Term>& terms, std::size_t c, std::size_t rhs_bits,
                                           const std::vector<mpz_class>& moduli) const {
  const std::size_t n = n_;
  if (moduli.size() != c) throw DimensionError("certify: one modulus per column required");
  const double lp = log2_of(mod_.u);
  const double xbits = double(rhs_bits) + std::log2(double(std::max<std::size_t>(n, 1))) + double(hb_) + 2;
  std::size_t steps = std::size_t(std::ceil(xbits / lp)) + 2;
  {
    // the right-hand side must be exhausted before the residual can vanish
    std::size_t qbits = 0;
    for (const auto& t : terms) qbits = std::max(qbits, t.Q->max_bits());
    steps = std::max(steps, std::size_t(std::ceil(double(qbits) / lp)) + 3);
  }
  IntMat out(n, c);
  bool word = true;
  for (const auto& s : moduli) {
    if (s < 1) throw std::invalid_argument("certify: moduli must be positive");
    if (bit_length(s) > 62) word = false;
  }
  for (std::size_t c0 = 0; c0 < c; c0 += kColumnChunk) {
    const std::size_t cb = std::min(kColumnChunk, c - c0);
    std::vector<IntMat> qs;
    qs.reserve(terms.size());
    std::vector<Term> sub = terms;
    for (std::size_t k = 0; k < terms.size(); ++k) {
      qs.push_back(c0 == 0 && cb == c ? *terms[k].Q : terms[k].Q->block(0, c0, terms[k].Q->rows(), cb));
    }
    for (std::size_t k = 0; k < terms.size(); ++k) sub[k].Q = &qs[k];
    bool done;
    if (word) {
      std::vector<uint64_t> s(cb), w(cb);
      for (std::size_t j = 0; j < cb; ++j) {
        s[j] = moduli[c0 + j].get_ui();
        w[j] = 1 % s[j];
      }
      std::vector<__int128> acc(n * cb, 0);
      done = lift(sub, cb, steps, true, [&](std::size_t, const double* X) {
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < cb; ++j) acc[i * cb + j] += (__int128)(long long)X[i * cb + j] * w[j];
        for (std::size_t j = 0; j < cb; ++j) w[j] = modp::mul_mod(w[j], mod_.u, s[j]);
      });
      if (!done) return std::nullopt;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < cb; ++j) {
          __int128 r = acc[i * cb + j] % (__int128)s[j];
          if (r < 0) r += s[j];
          out(i, c0 + j) = (unsigned long)uint64_t(r);
        }
    } else {
      std::vector<mpz_class> w(cb);
      for (std::size_t j = 0; j < cb; ++j) w[j] = rem_mod(mpz_class(1), moduli[c0 + j]);
      std::vector<mpz_class> acc(n * cb);
      done = lift(sub, cb, steps, true, [&](std::size_t, const double* X) {
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < cb; ++j) {
            double x = X[i * cb + j];
            if (x > 0)
              mpz_addmul_ui(acc[i * cb + j].get_mpz_t(), w[j].get_mpz_t(), (unsigned long)x);
            else if (x < 0)
              mpz_submul_ui(acc[i * cb + j].get_mpz_t(), w[j].get_mpz_t(), (unsigned long)(-x));
          }
        for (std::size_t j = 0; j < cb; ++j) {
          w[j] *= (unsigned long)mod_.u;
          mpz_fdiv_r(w[j].get_mpz_t(), w[j].get_mpz_t(), moduli[c0 + j].get_mpz_t());
        }
      });
      if (!done) return std::nullopt;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < cb; ++j)
          mpz_fdiv_r(out(i, c0 + j).get_mpz_t(), acc[i * cb + j].get_mpz_t(), moduli[c0 + j].get_mpz_t());
    }
  }
  return out;
}

bool rational_reconstruct(const mpz_class& u, const mpz_class& m, const mpz_class& nb, const mpz_class& db,
                          mpz_class& a, mpz_class& b) {
  mpz_class r0 = m, r1 = rem_mod(u, m), t0 = 0, t1 = 1, q, tmp;
  while (r1 > nb) {
    mpz_fdiv_qr(q.get_mpz_t(), tmp.get_mpz_t(), r0.get_mpz_t(), r1.get_mpz_t());
    r0 = r1;
    r1 = tmp;
    tmp = t0 - q * t1;
    t0 = t1;
    t1 = tmp;
  }
  if (t1 == 0 || abs(t1) > db) return false;
  a = t1 < 0 ? mpz_class(-r1) : r1;
  b = abs(t1);
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return g == 1;
}

RationalSolution solve_rational(const IntMat& A, const IntMat& B, Rng& rng) {
  if (!A.square()) throw DimensionError("solve_rational: A must be square");
  if (A.rows() != B.rows()) throw DimensionError("solve_rational: row counts differ");
  const std::size_t n = A.rows(), c = B.cols();
  PadicSolver solver(A, rng);
  // Cramer: numerators are minors of [A | b], denominators divide det A.
  IntMat aug(1, 1);
  aug(0, 0) = cmp_abs(A.max_abs(), B.max_abs()) >= 0 ? A.max_abs() : B.max_abs();
  const std::size_t nbits = [&] {
    IntMat probe(n, n);
    for (auto& x : probe.data()) x = aug(0, 0);
    return hadamard_bits(probe);
  }();
  const std::size_t dbits = solver.hadamard();
  const double lp = log2_of(solver.prime());
  const std::size_t steps = std::size_t(std::ceil(double(nbits + dbits + 1) / lp)) + 1;

  std::vector<std::vector<double>> digits;
  digits.reserve(steps);
  PadicSolver::Term term;
  term.Q = &B;
  solver.lift({term}, c, steps, false,
              [&](std::size_t, const double* X) { digits.emplace_back(X, X + n * c); });
  std::vector<mpz_class> xs = solver.assemble(digits, n * c);

  mpz_class M;
  mpz_ui_pow_ui(M.get_mpz_t(), solver.prime(), steps);
  const mpz_class N = (mpz_class(1) << nbits) - 1, D = (mpz_class(1) << dbits) - 1, half = M / 2;
  mpz_class d = 1, y, a, b;
  for (auto& x : xs) {
    if (x < 0) x += M;  // [0, M)
    y = d * x;
    mpz_fdiv_r(y.get_mpz_t(), y.get_mpz_t(), M.get_mpz_t());
    if (y > half) y -= M;
    if (cmp_abs(y, N) <= 0) continue;
    if (!rational_reconstruct(x, M, N, D, a, b)) throw std::logic_error("solve_rational: reconstruction failed");
    mpz_lcm(d.get_mpz_t(), d.get_mpz_t(), b.get_mpz_t());
  }
  RationalSolution sol;
  sol.denominator = d;
  sol.numerator = IntMat(n, c);
  for (std::size_t e = 0; e < n * c; ++e) {
    y = d * xs[e];
    mpz_fdiv_r(y.get_mpz_t(), y.get_mpz_t(), M.get_mpz_t());
    if (y > half) y -= M;
    sol.numerator.data()[e] = y;
  }
#ifndef NDEBUG
  IntMat lhs = mat_mul_exact(A, sol.numerator);
  for (std::size_t e = 0; e < n * c; ++e)
    if (lhs.data()[e] != d * B.data()[e]) throw std::logic_error("solve_rational: identity check failed");
#endif
  return sol;
}

RationalSolution solve_rational(const IntMat& A, const IntMat& B) {
  Rng rng(0x5eed);
  return solve_rational(A, B, rng);
}

std::optional<IntMat> integrality_certify(const IntMat& Bmat, const mpz_class& s, const IntMat& J, Rng& rng) {
  if (!Bmat.square()) throw DimensionError("integrality_certify: matrix must be square");
  if (Bmat.rows() != J.rows()) throw DimensionError("integrality_certify: row counts differ");
  if (s < 1) throw std::invalid_argument("integrality_certify: s must be positive");
  PadicSolver solver(Bmat, rng);
  IntMat R(J.rows(), J.cols());
  for (std::size_t e = 0; e < R.data().size(); ++e) R.data()[e] = s * J.data()[e];
  PadicSolver::Term term;
  term.Q = &R;
  return solver.certify({term}, J.cols(), R.max_bits(), std::vector<mpz_class>(J.cols(), s));
}

std::optional<IntMat> integrality_certify(const IntMat& Bmat, const mpz_class& s, const IntMat& J) {
  Rng rng(0x5eed);
  return integrality_certify(Bmat, s, J, rng);
}

}  // namespace smith
