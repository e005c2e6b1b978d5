#include "smith/modp.hpp"

#include <cblas.h>
#include <Eigen/Core>

#include <algorithm>
#include <cassert>
#include <utility>

namespace smith::modp {

uint64_t mul_mod(uint64_t a, uint64_t b, uint64_t m) {
  return uint64_t((unsigned __int128)a * b % m);
}

uint64_t pow_mod(uint64_t a, uint64_t e, uint64_t m) {
  uint64_t r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mul_mod(r, a, m);
    a = mul_mod(a, a, m);
    e >>= 1;
  }
  return r;
}

uint64_t inv_mod(uint64_t a, uint64_t m) {
  __int128 t = 0, nt = 1, r = m, nr = a % m;
  while (nr) {
    __int128 q = r / nr;
    std::tie(t, nt) = std::pair<__int128, __int128>(nt, t - q * nt);
    std::tie(r, nr) = std::pair<__int128, __int128>(nr, r - q * nr);
  }
  if (r != 1) return 0;
  if (t < 0) t += m;
  return uint64_t(t);
}

std::size_t safe_inner(uint64_t p) {
  double q = double(p - 1);
  if (q == 0) return std::size_t(1) << 50;
  return std::size_t((kExactLimit - 1.0 - q) / (q * q));
}

void reduce_array(double* x, std::size_t len, const Modulus& m) {
  const double p = m.p, ip = m.ip;
  for (std::size_t i = 0; i < len; ++i) {
    double q = std::nearbyint(x[i] * ip);
    double r = std::fma(-q, p, x[i]);
    r = r < 0 ? r + p : r;
    x[i] = r >= p ? r - p : r;
  }
}

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Stride = Eigen::OuterStride<>;

void eigen_gemm(std::size_t rows, std::size_t cols, std::size_t inner, double alpha, const double* A,
                std::size_t lda, const double* B, std::size_t ldb, double beta, double* C, std::size_t ldc) {
  Eigen::Map<const RowMajor, 0, Stride> a(A, rows, inner, Stride(lda));
  Eigen::Map<const RowMajor, 0, Stride> b(B, inner, cols, Stride(ldb));
  Eigen::Map<RowMajor, 0, Stride> c(C, rows, cols, Stride(ldc));
  if (beta == 0)
    c.noalias() = alpha * (a * b);
  else {
    if (beta != 1) c *= beta;
    c.noalias() += alpha * (a * b);
  }
}

// Some optimized BLAS kernels do not return exact sums even when every partial sum is an integer
// below 2^53. Every modular product here depends on that, so the BLAS result is compared once
// against int64 arithmetic and Eigen is used instead when it disagrees.
bool probe_blas() {
  struct Shape {
    std::size_t r, c, k;
  };
  uint64_t x = 0x9e3779b97f4a7c15ull;
  for (Shape sh : {Shape{256, 256, 256}, Shape{300, 7, 300}, Shape{7, 300, 520}}) {
    std::vector<double> a(sh.r * sh.k), b(sh.k * sh.c), c(sh.r * sh.c);
    std::vector<int64_t> ai(a.size()), bi(b.size());
    for (std::size_t e = 0; e < a.size(); ++e) {
      x = x * 6364136223846793005ull + 1442695040888963407ull;
      ai[e] = int64_t(x >> 43) - (int64_t(1) << 20);
      a[e] = double(ai[e]);
    }
    for (std::size_t e = 0; e < b.size(); ++e) {
      x = x * 6364136223846793005ull + 1442695040888963407ull;
      bi[e] = int64_t(x >> 43) - (int64_t(1) << 20);
      b[e] = double(bi[e]);
    }
    cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans, int(sh.r), int(sh.c), int(sh.k), 1.0, a.data(),
                int(sh.k), b.data(), int(sh.c), 0.0, c.data(), int(sh.c));
    for (std::size_t i = 0; i < sh.r; ++i)
      for (std::size_t j = 0; j < sh.c; ++j) {
        int64_t s = 0;
        for (std::size_t t = 0; t < sh.k; ++t) s += ai[i * sh.k + t] * bi[t * sh.c + j];
        if (double(s) != c[i * sh.c + j]) return false;
      }
  }
  return true;
}

bool use_blas() {
  static const bool ok = probe_blas();
  return ok;
}

}  // namespace

const char* gemm_backend() { return use_blas() ? "blas" : "eigen"; }

void gemm(std::size_t rows, std::size_t cols, std::size_t inner, double alpha, const double* A,
          std::size_t lda, const double* B, std::size_t ldb, double beta, double* C, std::size_t ldc) {
  if (rows == 0 || cols == 0) return;
  if (inner == 0) {
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) C[i * ldc + j] *= beta;
    return;
  }
  if (use_blas())
    cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans, int(rows), int(cols), int(inner), alpha, A,
                int(lda), B, int(ldb), beta, C, int(ldc));
  else
    eigen_gemm(rows, cols, inner, alpha, A, lda, B, ldb, beta, C, ldc);
}

namespace {

void reduce_block(double* C, std::size_t rows, std::size_t cols, std::size_t ldc, const Modulus& m) {
  for (std::size_t i = 0; i < rows; ++i) reduce_array(C + i * ldc, cols, m);
}

// C = C + sign*A*B mod p, chunked so that every partial sum stays exact.
void gemm_acc(std::size_t rows, std::size_t cols, std::size_t inner, double sign, const double* A,
              std::size_t lda, const double* B, std::size_t ldb, double* C, std::size_t ldc,
              const Modulus& m) {
  const std::size_t chunk = std::max<std::size_t>(1, safe_inner(m.u));
  for (std::size_t k0 = 0; k0 < inner; k0 += chunk) {
    std::size_t kb = std::min(chunk, inner - k0);
    gemm(rows, cols, kb, sign, A + k0, lda, B + k0 * ldb, ldb, 1.0, C, ldc);
    reduce_block(C, rows, cols, ldc, m);
  }
}

}  // namespace

void gemm_mod(std::size_t rows, std::size_t cols, std::size_t inner, const double* A, std::size_t lda,
              const double* B, std::size_t ldb, double* C, std::size_t ldc, const Modulus& m,
              bool accumulate) {
  if (!accumulate)
    for (std::size_t i = 0; i < rows; ++i) std::fill(C + i * ldc, C + i * ldc + cols, 0.0);
  if (inner == 0) return;
  gemm_acc(rows, cols, inner, 1.0, A, lda, B, ldb, C, ldc, m);
}

namespace {

// Entries touched by at most safe_inner(p) unreduced updates x -= l*y (l, y in [0,p)) stay exact, so
// inside a block only the rows and columns about to be used are reduced.
std::size_t block_size(const Modulus& m, std::size_t want) {
  return std::min<std::size_t>(want, std::max<std::size_t>(1, safe_inner(m.u)));
}

inline void axpy_neg(double* x, const double* y, double l, std::size_t len) {
  for (std::size_t j = 0; j < len; ++j) x[j] = std::fma(-l, y[j], x[j]);
}

}  // namespace

bool lu_inplace(double* a, std::size_t n, const Modulus& m, std::vector<std::size_t>& perm) {
  const std::size_t nb = block_size(m, 64);
  perm.assign(n, 0);
  for (std::size_t k0 = 0; k0 < n; k0 += nb) {
    const std::size_t kend = std::min(n, k0 + nb);
    // panel, columns [k0, kend)
    for (std::size_t k = k0; k < kend; ++k) {
      std::size_t piv = n;
      for (std::size_t i = k; i < n; ++i) {
        double& v = a[i * n + k];
        v = m.reduce(v);
        if (v != 0 && piv == n) piv = i;
      }
      if (piv == n) return false;
      perm[k] = piv;
      if (piv != k) std::swap_ranges(a + k * n, a + (k + 1) * n, a + piv * n);
      double* rk = a + k * n;
      reduce_array(rk + k + 1, kend - k - 1, m);
      const double inv = double(inv_mod(uint64_t(rk[k]), m.u));
      for (std::size_t i = k + 1; i < n; ++i) {
        double* ri = a + i * n;
        if (ri[k] == 0) continue;
        const double l = m.mul(ri[k], inv);
        ri[k] = l;
        axpy_neg(ri + k + 1, rk + k + 1, l, kend - k - 1);
      }
    }
    if (kend == n) break;
    // U12 = L11^{-1} A12
    for (std::size_t k = k0; k < kend; ++k) {
      double* rk = a + k * n + kend;
      reduce_array(rk, n - kend, m);
      for (std::size_t i = k + 1; i < kend; ++i) {
        const double l = a[i * n + k];
        if (l != 0) axpy_neg(a + i * n + kend, rk, l, n - kend);
      }
    }
    // A22 -= L21 U12
    gemm_acc(n - kend, n - kend, kend - k0, -1.0, a + kend * n + k0, n, a + k0 * n + kend, n,
             a + kend * n + kend, n, m);
  }
  return true;
}

uint64_t det_mod(std::vector<double> a, std::size_t n, const Modulus& m) {
  std::vector<std::size_t> perm;
  if (!lu_inplace(a.data(), n, m, perm)) return 0;
  double d = 1;
  bool neg = false;
  for (std::size_t k = 0; k < n; ++k) {
    d = m.mul(d, a[k * n + k]);
    if (perm[k] != k) neg = !neg;
  }
  uint64_t r = uint64_t(d);
  return (neg && r) ? m.u - r : r;
}

bool inverse_mod(const double* a0, std::size_t n, const Modulus& m, std::vector<double>& inv) {
  std::vector<double> a(a0, a0 + n * n);
  std::vector<std::size_t> perm;
  if (!lu_inplace(a.data(), n, m, perm)) return false;
  // X = P I, then solve L Y = X, U Z = Y.
  inv.assign(n * n, 0.0);
  std::vector<std::size_t> rowof(n);
  for (std::size_t i = 0; i < n; ++i) rowof[i] = i;
  for (std::size_t k = 0; k < n; ++k) std::swap(rowof[k], rowof[perm[k]]);
  for (std::size_t i = 0; i < n; ++i) inv[i * n + rowof[i]] = 1.0;

  const std::size_t nb = block_size(m, 64);
  double* X = inv.data();
  // forward, unit lower
  for (std::size_t k0 = 0; k0 < n; k0 += nb) {
    const std::size_t kend = std::min(n, k0 + nb);
    for (std::size_t k = k0; k < kend; ++k) {
      double* xk = X + k * n;
      reduce_array(xk, n, m);
      for (std::size_t i = k + 1; i < kend; ++i) {
        const double l = a[i * n + k];
        if (l != 0) axpy_neg(X + i * n, xk, l, n);
      }
    }
    if (kend < n)
      gemm_acc(n - kend, n, kend - k0, -1.0, a.data() + kend * n + k0, n, X + k0 * n, n, X + kend * n, n,
               m);
  }
  // backward, upper
  const std::size_t nblocks = (n + nb - 1) / nb;
  for (std::size_t b = nblocks; b-- > 0;) {
    const std::size_t k0 = b * nb, kend = std::min(n, k0 + nb);
    for (std::size_t k = kend; k-- > k0;) {
      double* xk = X + k * n;
      reduce_array(xk, n, m);
      const double d = double(inv_mod(uint64_t(a[k * n + k]), m.u));
      for (std::size_t j = 0; j < n; ++j) xk[j] = m.mul(xk[j], d);
      for (std::size_t i = k0; i < k; ++i) {
        const double u = a[i * n + k];
        if (u != 0) axpy_neg(X + i * n, xk, u, n);
      }
    }
    if (k0 > 0) gemm_acc(k0, n, kend - k0, -1.0, a.data() + k0, n, X + k0 * n, n, X, n, m);
  }
  return true;
}

}  // namespace smith::modp
