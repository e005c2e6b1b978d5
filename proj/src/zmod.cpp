#include "smith/zmod.hpp"

#include "smith/modp.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace smith {

namespace {

uint64_t inv_u64(uint64_t a, uint64_t m) { return m == 1 ? 0 : modp::inv_mod(a % m, m); }

// Z/s with s < 2^26: products fit a double exactly.
struct SmallRing {
  using T = double;
  uint64_t su;
  modp::Modulus md;
  explicit SmallRing(uint64_t s) : su(s) {
    md.u = s;
    md.p = double(s);
    md.ip = 1.0 / double(s);
  }
  T from(const mpz_class& x) const { return double(x.get_ui()); }
  mpz_class to(T x) const { return mpz_class((unsigned long)x); }
  bool is_zero(T x) const { return x == 0; }
  T modulus() const { return md.p; }
  T gcd_s(T a) const { return double(std::gcd(uint64_t(a), su)); }
  T gcd_with(T g, T a) const { return double(std::gcd(uint64_t(g), uint64_t(a))); }
  T cofactor(T g) const { return double(su / uint64_t(g)); }
  T div_exact(T a, T g) const { return double(uint64_t(a) / uint64_t(g)); }
  bool divides(T g, T a) const { return uint64_t(a) % uint64_t(g) == 0; }
  bool less(T a, T b) const { return a < b; }
  bool is_one(T a) const { return a == 1; }
  T mul(T a, T b) const { return md.reduce(a * b); }
  T neg(T a) const { return a == 0 ? 0 : md.p - a; }
  T pinv(T a, T g, T sg) const {
    return uint64_t(sg) == 1 ? 0 : double(inv_u64(uint64_t(a) / uint64_t(g), uint64_t(sg)));
  }
  T solve_p(T ia, T g, T sg, T b) const {
    return uint64_t(sg) == 1 ? 0 : double(modp::mul_mod(uint64_t(b) / uint64_t(g), uint64_t(ia), uint64_t(sg)));
  }
  T unit_for(T a, T g) const {
    uint64_t sg = su / uint64_t(g);
    uint64_t u = sg == 1 ? 1 : inv_u64(uint64_t(a) / uint64_t(g), sg);
    if (u == 0) u = 1;
    while (std::gcd(u, su) != 1) u += sg;
    return double(u % su);
  }
  void xgcd(T a, T b, T& x, T& y, T& ag, T& bg) const {
    long long r0 = (long long)a, r1 = (long long)b, s0 = 1, s1 = 0, t0 = 0, t1 = 1;
    while (r1) {
      long long q = r0 / r1;
      std::tie(r0, r1) = std::make_pair(r1, r0 - q * r1);
      std::tie(s0, s1) = std::make_pair(s1, s0 - q * s1);
      std::tie(t0, t1) = std::make_pair(t1, t0 - q * t1);
    }
    long long m = (long long)su;
    x = double(((s0 % m) + m) % m);
    y = double(((t0 % m) + m) % m);
    ag = double((long long)a / r0);
    bg = double((long long)b / r0);
  }
  void axpy(T* d, const T* s, T q, std::size_t len) const {
    const double p = md.p, ip = md.ip;
    for (std::size_t j = 0; j < len; ++j) {
      double v = d[j] + q * s[j];
      double qq = std::nearbyint(v * ip);
      double r = std::fma(-qq, p, v);
      r = r < 0 ? r + p : r;
      d[j] = r >= p ? r - p : r;
    }
  }
  T add_mul(T a, T q, T b) const { return md.reduce(a + q * b); }
  void fix(T&) const {}
  void axpy_lazy(T* d, const T* s, T q, std::size_t len) const { axpy(d, s, q, len); }
  void add_mul_lazy(T& a, T q, T b) const { a = add_mul(a, q, b); }
  void comb2(T& x, T& y, T a, T b, T c, T d) const {
    T nx = md.reduce(md.reduce(a * x) + b * y);
    T ny = md.reduce(md.reduce(c * x) + d * y);
    x = nx;
    y = ny;
  }
};

// Z/s with s < 2^63.
struct WordRing {
  using T = uint64_t;
  uint64_t su;
  explicit WordRing(uint64_t s) : su(s) {}
  T from(const mpz_class& x) const { return x.get_ui(); }
  mpz_class to(T x) const { return mpz_class((unsigned long)x); }
  bool is_zero(T x) const { return x == 0; }
  T modulus() const { return su; }
  T gcd_s(T a) const { return std::gcd(a, su); }
  T gcd_with(T g, T a) const { return std::gcd(g, a); }
  T cofactor(T g) const { return su / g; }
  T div_exact(T a, T g) const { return a / g; }
  bool divides(T g, T a) const { return a % g == 0; }
  bool less(T a, T b) const { return a < b; }
  bool is_one(T a) const { return a == 1; }
  T mul(T a, T b) const { return modp::mul_mod(a, b, su); }
  T neg(T a) const { return a == 0 ? 0 : su - a; }
  T pinv(T a, T g, T sg) const { return sg == 1 ? 0 : inv_u64(a / g, sg); }
  T solve_p(T ia, T g, T sg, T b) const { return sg == 1 ? 0 : modp::mul_mod(b / g, ia, sg); }
  T unit_for(T a, T g) const {
    uint64_t sg = su / g;
    uint64_t u = sg == 1 ? 1 : inv_u64(a / g, sg);
    if (u == 0) u = 1;
    while (std::gcd(u, su) != 1) u += sg;
    return u % su;
  }
  void xgcd(T a, T b, T& x, T& y, T& ag, T& bg) const {
    __int128 r0 = a, r1 = b, s0 = 1, s1 = 0, t0 = 0, t1 = 1;
    while (r1) {
      __int128 q = r0 / r1;
      std::tie(r0, r1) = std::make_pair(r1, r0 - q * r1);
      std::tie(s0, s1) = std::make_pair(s1, s0 - q * s1);
      std::tie(t0, t1) = std::make_pair(t1, t0 - q * t1);
    }
    __int128 m = su;
    x = uint64_t(((s0 % m) + m) % m);
    y = uint64_t(((t0 % m) + m) % m);
    ag = uint64_t(a / uint64_t(r0));
    bg = uint64_t(b / uint64_t(r0));
  }
  void axpy(T* d, const T* s, T q, std::size_t len) const {
    for (std::size_t j = 0; j < len; ++j)
      if (s[j]) d[j] = uint64_t(((unsigned __int128)q * s[j] + d[j]) % su);
  }
  T add_mul(T a, T q, T b) const { return uint64_t(((unsigned __int128)q * b + a) % su); }
  void fix(T&) const {}
  void axpy_lazy(T* d, const T* s, T q, std::size_t len) const { axpy(d, s, q, len); }
  void add_mul_lazy(T& a, T q, T b) const { a = add_mul(a, q, b); }
  void comb2(T& x, T& y, T a, T b, T c, T d) const {
    unsigned __int128 nx = (unsigned __int128)a * x % su + (unsigned __int128)b * y % su;
    unsigned __int128 ny = (unsigned __int128)c * x % su + (unsigned __int128)d * y % su;
    x = uint64_t(nx % su);
    y = uint64_t(ny % su);
  }
};

struct MpzRing {
  using T = mpz_class;
  mpz_class s;
  explicit MpzRing(const mpz_class& m) : s(m) {}
  T from(const mpz_class& x) const { return x; }
  mpz_class to(const T& x) const { return x; }
  bool is_zero(const T& x) const { return x == 0; }
  T modulus() const { return s; }
  T gcd_s(const T& a) const {
    T g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), s.get_mpz_t());
    return g;
  }
  T gcd_with(const T& g, const T& a) const {
    T r;
    mpz_gcd(r.get_mpz_t(), g.get_mpz_t(), a.get_mpz_t());
    return r;
  }
  T cofactor(const T& g) const {
    T r;
    mpz_divexact(r.get_mpz_t(), s.get_mpz_t(), g.get_mpz_t());
    return r;
  }
  T div_exact(const T& a, const T& g) const {
    T r;
    mpz_divexact(r.get_mpz_t(), a.get_mpz_t(), g.get_mpz_t());
    return r;
  }
  bool divides(const T& g, const T& a) const { return mpz_divisible_p(a.get_mpz_t(), g.get_mpz_t()); }
  bool less(const T& a, const T& b) const { return a < b; }
  bool is_one(const T& a) const { return a == 1; }
  void red(T& x) const { mpz_fdiv_r(x.get_mpz_t(), x.get_mpz_t(), s.get_mpz_t()); }
  T mul(const T& a, const T& b) const {
    T r = a * b;
    red(r);
    return r;
  }
  T neg(const T& a) const { return a == 0 ? T(0) : T(s - a); }
  T inv(const T& a, const T& m) const {
    T r;
    if (m == 1) return 0;
    if (!mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t())) return 0;
    return r;
  }
  T pinv(const T& a, const T& g, const T& sg) const { return sg == 1 ? T(0) : inv(T(a / g), sg); }
  T solve_p(const T& ia, const T& g, const T& sg, const T& b) const {
    if (sg == 1) return 0;
    T r;
    mpz_divexact(r.get_mpz_t(), b.get_mpz_t(), g.get_mpz_t());
    r *= ia;
    mpz_fdiv_r(r.get_mpz_t(), r.get_mpz_t(), sg.get_mpz_t());
    return r;
  }
  T unit_for(const T& a, const T& g) const {
    T sg = s / g;
    T u = sg == 1 ? T(1) : inv(T(a / g), sg);
    if (u == 0) u = 1;
    T gg;
    for (;;) {
      mpz_gcd(gg.get_mpz_t(), u.get_mpz_t(), s.get_mpz_t());
      if (gg == 1) break;
      u += sg;
    }
    red(u);
    return u;
  }
  void xgcd(const T& a, const T& b, T& x, T& y, T& ag, T& bg) const {
    T g;
    mpz_gcdext(g.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    ag = a / g;
    bg = b / g;
    red(x);
    red(y);
  }
  void axpy(T* d, const T* src, const T& q, std::size_t len) const {
    for (std::size_t j = 0; j < len; ++j) {
      if (src[j] == 0) continue;
      mpz_addmul(d[j].get_mpz_t(), q.get_mpz_t(), src[j].get_mpz_t());
      red(d[j]);
    }
  }
  // Unreduced variants; callers reduce with fix() before an entry is used as a multiplier or tested.
  void fix(T& x) const {
    if (sgn(x) < 0 || x >= s) red(x);
  }
  void axpy_lazy(T* d, const T* src, const T& q, std::size_t len) const {
    for (std::size_t j = 0; j < len; ++j)
      if (src[j] != 0) mpz_addmul(d[j].get_mpz_t(), q.get_mpz_t(), src[j].get_mpz_t());
  }
  void add_mul_lazy(T& a, const T& q, const T& b) const { mpz_addmul(a.get_mpz_t(), q.get_mpz_t(), b.get_mpz_t()); }
  T add_mul(const T& a, const T& q, const T& b) const {
    T r = a + q * b;
    red(r);
    return r;
  }
  void comb2(T& x, T& y, const T& a, const T& b, const T& c, const T& d) const {
    T nx = a * x + b * y, ny = c * x + d * y;
    red(nx);
    red(ny);
    x = nx;
    y = ny;
  }
};

template <class Ring>
class Eliminator {
  using T = typename Ring::T;

 public:
  Eliminator(const Ring& R, const IntMat& P) : R_(R), n_(P.rows()), c_(P.cols()) {
    W_.assign(n_, std::vector<T>(c_));
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < c_; ++j) W_[i][j] = R.from(P(i, j));
    // column-major copies for column operations
    PY_.assign(c_, std::vector<T>(n_));
    for (std::size_t j = 0; j < c_; ++j)
      for (std::size_t i = 0; i < n_; ++i) PY_[j][i] = W_[i][j];
    Y_.assign(c_, std::vector<T>(c_, T(0)));
    for (std::size_t j = 0; j < c_; ++j) Y_[j][j] = T(1);
    L_.assign(n_, std::vector<T>(n_, T(0)));
    supp_.assign(n_, {});
    mark_.assign(n_, std::vector<char>(n_, 0));
    for (std::size_t i = 0; i < n_; ++i) {
      L_[i][i] = T(1);
      supp_[i].push_back(uint32_t(i));
      mark_[i][i] = 1;
    }
  }

  ZmodSmith run(std::size_t keep) {
    const std::size_t lim = std::min(n_, c_);
    std::vector<T> e(lim, R_.modulus());
    for (std::size_t k = 0; k < lim; ++k) {
      if (!pivot_step(k)) break;
      e[k] = W_[k][k];
    }
    ZmodSmith out;
    out.e.resize(lim);
    for (std::size_t k = 0; k < lim; ++k) out.e[k] = R_.to(e[k]);
    out.L = IntMat(keep, n_);
    out.Y = IntMat(c_, keep);
    out.PY = IntMat(n_, keep);
    for (std::size_t k = 0; k < keep; ++k) {
      if (k < n_) fix_row(k, 0);
      fix_col(k, 0);
      if (k < n_)
        for (std::size_t j = 0; j < n_; ++j) out.L(k, j) = R_.to(L_[k][j]);
      for (std::size_t i = 0; i < c_; ++i) out.Y(i, k) = R_.to(Y_[k][i]);
      for (std::size_t i = 0; i < n_; ++i) out.PY(i, k) = R_.to(PY_[k][i]);
    }
    return out;
  }

 private:
  // Row ops: row_i += q * row_k (W and L).
  // Row k must be reduced (fix_row); row i is left unreduced.
  void row_axpy(std::size_t i, std::size_t k, const T& q, std::size_t from) {
    R_.axpy_lazy(W_[i].data() + from, W_[k].data() + from, q, c_ - from);
    for (uint32_t idx : supp_[k]) {
      if (!mark_[i][idx]) {
        mark_[i][idx] = 1;
        supp_[i].push_back(idx);
      }
      R_.add_mul_lazy(L_[i][idx], q, L_[k][idx]);
    }
  }

  void fix_row(std::size_t k, std::size_t from) {
    for (std::size_t j = from; j < c_; ++j) R_.fix(W_[k][j]);
    for (uint32_t idx : supp_[k]) R_.fix(L_[k][idx]);
  }

  void fix_col(std::size_t k, std::size_t from) {
    for (std::size_t i = from; i < n_; ++i) R_.fix(W_[i][k]);
    for (auto& v : PY_[k]) R_.fix(v);
    for (auto& v : Y_[k]) R_.fix(v);
  }

  void row_comb2(std::size_t k, std::size_t i, const T& a, const T& b, const T& c, const T& d, std::size_t from) {
    for (std::size_t j = from; j < c_; ++j) R_.comb2(W_[k][j], W_[i][j], a, b, c, d);
    for (uint32_t idx : supp_[i])
      if (!mark_[k][idx]) {
        mark_[k][idx] = 1;
        supp_[k].push_back(idx);
      }
    for (uint32_t idx : supp_[k])
      if (!mark_[i][idx]) {
        mark_[i][idx] = 1;
        supp_[i].push_back(idx);
      }
    for (uint32_t idx : supp_[k]) R_.comb2(L_[k][idx], L_[i][idx], a, b, c, d);
  }

  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    std::swap(W_[a], W_[b]);
    std::swap(L_[a], L_[b]);
    std::swap(supp_[a], supp_[b]);
    std::swap(mark_[a], mark_[b]);
  }

  void swap_cols(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t i = 0; i < n_; ++i) std::swap(W_[i][a], W_[i][b]);
    std::swap(PY_[a], PY_[b]);
    std::swap(Y_[a], Y_[b]);
  }

  // col_j += q * col_k, on rows >= k0 of W (rows above are zero in both columns).
  // Column k must be reduced (fix_col).
  void col_axpy(std::size_t j, std::size_t k, const T& q, std::size_t k0) {
    for (std::size_t i = k0; i < n_; ++i)
      if (!R_.is_zero(W_[i][k])) R_.add_mul_lazy(W_[i][j], q, W_[i][k]);
    R_.axpy_lazy(PY_[j].data(), PY_[k].data(), q, n_);
    R_.axpy_lazy(Y_[j].data(), Y_[k].data(), q, c_);
  }

  void col_comb2(std::size_t k, std::size_t j, const T& a, const T& b, const T& c, const T& d, std::size_t k0) {
    for (std::size_t i = k0; i < n_; ++i) R_.comb2(W_[i][k], W_[i][j], a, b, c, d);
    for (std::size_t i = 0; i < n_; ++i) R_.comb2(PY_[k][i], PY_[j][i], a, b, c, d);
    for (std::size_t i = 0; i < c_; ++i) R_.comb2(Y_[k][i], Y_[j][i], a, b, c, d);
  }

  bool pivot_step(std::size_t k) {
    if (!choose_pivot(k)) return false;
    fix_row(k, k);
    fix_col(k, k);
    for (;;) {
      bool dirty = true;
      T g, sg, ia;
      auto prep = [&] {
        g = R_.gcd_s(W_[k][k]);
        sg = R_.cofactor(g);
        ia = R_.pinv(W_[k][k], g, sg);
      };
      prep();
      while (dirty) {
        dirty = false;
        // clear column k below the pivot
        for (std::size_t i = k + 1; i < n_; ++i) {
          if (R_.is_zero(W_[i][k])) continue;
          if (R_.divides(g, W_[i][k])) {
            T q = R_.solve_p(ia, g, sg, W_[i][k]);
            row_axpy(i, k, R_.neg(q), k);
            R_.fix(W_[i][k]);
          } else {
            fix_row(i, k);
            T x, y, ag, bg;
            R_.xgcd(W_[k][k], W_[i][k], x, y, ag, bg);
            row_comb2(k, i, x, y, R_.neg(bg), ag, k);
            prep();
          }
        }
        // clear row k right of the pivot
        for (std::size_t j = k + 1; j < c_; ++j) {
          if (R_.is_zero(W_[k][j])) continue;
          if (R_.divides(g, W_[k][j])) {
            T q = R_.solve_p(ia, g, sg, W_[k][j]);
            col_axpy(j, k, R_.neg(q), k);
            R_.fix(W_[k][j]);
          } else {
            fix_col(j, k);
            T x, y, ag, bg;
            R_.xgcd(W_[k][k], W_[k][j], x, y, ag, bg);
            col_comb2(k, j, x, y, R_.neg(bg), ag, k);
            prep();
            dirty = true;
          }
        }
      }
      // the pivot must divide the remaining block
      bool fixed = false;
      if (!R_.is_one(g)) {
        for (std::size_t i = k + 1; i < n_ && !fixed; ++i)
          for (std::size_t j = k + 1; j < c_; ++j)
            if (!R_.divides(g, W_[i][j])) {
              fix_row(i, k);
              row_axpy(k, i, T(1), k);
              fix_row(k, k);
              fix_col(k, k);
              fixed = true;
              break;
            }
      }
      if (fixed) continue;
      T u = R_.unit_for(W_[k][k], g);
      W_[k][k] = g;
      for (uint32_t idx : supp_[k]) L_[k][idx] = R_.mul(L_[k][idx], u);
      return true;
    }
  }

  // Folds a pseudo-random combination of the trailing columns into column k, so that column k
  // carries the gcd of the whole block with high probability, then moves the column entry with the
  // smallest gcd with s to (k, k). The fix-up pass in pivot_step catches an unlucky combination.
  bool choose_pivot(std::size_t k) {
    const T s = R_.modulus();
    const mpz_class sz = R_.to(s);
    for (std::size_t j = k + 1; j < c_; ++j) {
      mix_ ^= mix_ << 13;
      mix_ ^= mix_ >> 7;
      mix_ ^= mix_ << 17;
      const T q = R_.from(mpz_class((unsigned long)(mix_ >> 33) + 1) % sz);
      col_axpy(k, j, q, k);
    }
    fix_col(k, k);
    bool nonzero = false;
    for (std::size_t i = k; i < n_ && !nonzero; ++i) nonzero = !R_.is_zero(W_[i][k]);
    if (!nonzero) {
      // the combination vanished: use any column that is nonzero mod s
      std::size_t pj = c_;
      for (std::size_t j = k + 1; j < c_ && pj == c_; ++j)
        for (std::size_t i = k; i < n_; ++i)
          if (!R_.divides(s, W_[i][j])) {
            pj = j;
            break;
          }
      if (pj == c_) return false;  // block is zero mod s
      swap_cols(k, pj);
      fix_col(k, k);
    }
    T G = s;
    for (std::size_t i = k; i < n_ && !R_.is_one(G); ++i)
      if (!R_.is_zero(W_[i][k])) G = R_.gcd_with(G, W_[i][k]);
    std::size_t pi = n_;
    const T sG = R_.cofactor(G);
    for (std::size_t i = k; i < n_; ++i) {
      const T& v = W_[i][k];
      if (!R_.is_zero(v) && R_.is_one(R_.gcd_with(sG, R_.div_exact(v, G)))) {
        pi = i;
        break;
      }
    }
    if (pi == n_)
      for (std::size_t i = k; i < n_ && pi == n_; ++i)
        if (!R_.is_zero(W_[i][k])) pi = i;  // column clearing by xgcd reaches G
    swap_rows(k, pi);
    return true;
  }



  const Ring& R_;
  std::size_t n_, c_;
  std::vector<std::vector<T>> W_, PY_, Y_, L_;
  std::vector<std::vector<uint32_t>> supp_;
  std::vector<std::vector<char>> mark_;
  uint64_t mix_ = 0x9e3779b97f4a7c15ull;
};

template <class Ring>
ZmodSmith run_with(const Ring& R, const IntMat& P, std::size_t keep) {
  Eliminator<Ring> el(R, P);
  return el.run(keep);
}

}  // namespace

ZmodSmith zmod_smith(const IntMat& P, const mpz_class& s, std::size_t keep) {
  if (s < 1) throw std::invalid_argument("zmod_smith: modulus must be positive");
  if (keep > P.cols()) throw DimensionError("zmod_smith: keep exceeds column count");
  IntMat Pr = rem_mod(P, s);
  const std::size_t bits = bit_length(s);
  if (bits <= 26) return run_with(SmallRing(s.get_ui()), Pr, keep);
  if (bits <= 62) return run_with(WordRing(s.get_ui()), Pr, keep);
  return run_with(MpzRing(s), Pr, keep);
}

}  // namespace smith
