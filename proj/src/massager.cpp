#include "smith/massager.hpp"

#include "smith/certify.hpp"
#include "smith/zmod.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace smith {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

IntMat random_matrix(std::size_t rows, std::size_t cols, const mpz_class& bound, Rng& rng) {
  IntMat J(rows, cols);
  for (auto& x : J.data()) x = random_below(bound, rng);
  return J;
}

// V = U_b Pi_b restricted to the active rows of batch bi, where
// Pi_b = (I + M_{b-1} U_{b-1}) ... (I + M_1 U_1).
IntMat chained_rows(const WorkState& st, std::size_t bi) {
  const Batch& b = st.extracted[bi];
  const auto& act = st.cache[bi].active;
  IntMat V(act.size(), st.n);
  for (std::size_t i = 0; i < act.size(); ++i)
    for (std::size_t j = 0; j < st.n; ++j) V(i, j) = b.U(act[i], j);
  for (std::size_t o = bi; o-- > 0;) {
    const Batch& ob = st.extracted[o];
    const auto& oact = st.cache[o].active;
    if (oact.empty()) continue;
    IntMat Mo(st.n, oact.size());
    for (std::size_t k = 0; k < st.n; ++k)
      for (std::size_t j = 0; j < oact.size(); ++j) Mo(k, j) = ob.M(k, oact[j]);
    IntMat W = mat_mul_exact(V, Mo);
    // (V M_o) only matters modulo the factors of batch o
    for (std::size_t i = 0; i < W.rows(); ++i)
      for (std::size_t j = 0; j < W.cols(); ++j)
        mpz_fdiv_r(W(i, j).get_mpz_t(), W(i, j).get_mpz_t(), ob.S[oact[j]].get_mpz_t());
    IntMat Uo(oact.size(), st.n);
    for (std::size_t i = 0; i < oact.size(); ++i)
      for (std::size_t k = 0; k < st.n; ++k) Uo(i, k) = ob.U(oact[i], k);
    V = mat_add(V, mat_mul_exact(W, Uo));
  }
  return V;
}

// Rem(S_b U_b Pi_b A^-1, S_b) on the active rows; false if not integral.
bool compute_phi(WorkState& st, std::size_t bi, Rng& rng) {
  auto& cache = st.cache[bi];
  if (cache.has_phi) return true;
  const auto& act = cache.active;
  if (act.empty()) {
    cache.has_phi = true;
    return true;
  }
  const Batch& b = st.extracted[bi];
  if (!st.solver) st.solver = std::make_shared<PadicSolver>(st.A, rng);
  if (!st.solver_t) st.solver_t = std::make_shared<PadicSolver>(st.solver->transposed());
  IntMat V = chained_rows(st, bi);
  IntMat R(st.n, act.size());
  std::vector<mpz_class> moduli(act.size());
  for (std::size_t j = 0; j < act.size(); ++j) {
    moduli[j] = b.S[act[j]];
    for (std::size_t k = 0; k < st.n; ++k) R(k, j) = V(j, k) * moduli[j];
  }
  PadicSolver::Term term;
  term.Q = &R;
  auto X = st.solver_t->certify({term}, act.size(), R.max_bits(), moduli);
  if (!X) return false;
  cache.Phi = X->transpose();
  cache.has_phi = true;
  return true;
}

}  // namespace

WorkState::WorkState(const IntMat& A_, const mpz_class& s0) : A(A_), n(A_.rows()), s(s0) {
  if (!A.square()) throw DimensionError("WorkState: matrix must be square");
  if (s0 < 1) throw std::invalid_argument("WorkState: modulus must be positive");
}

mpz_class largest_invariant_factor(const IntMat& A, Rng& rng, std::size_t columns) {
  if (!A.square()) throw DimensionError("largest_invariant_factor: matrix must be square");
  if (columns == 0) throw std::invalid_argument("largest_invariant_factor: need at least one column");
  IntMat J = random_matrix(A.rows(), columns, mpz_class(1) << 32, rng);
  return solve_rational(A, J, rng).denominator;
}

std::size_t adaptive_schedule(std::size_t prev_r, std::size_t prev_bits, std::size_t cur_bits,
                              std::size_t remaining) {
  if (cur_bits <= 62) return remaining;
  const std::size_t grow = std::max<std::size_t>(2, prev_bits / std::max<std::size_t>(1, cur_bits));
  return std::min(remaining, std::max<std::size_t>(1, prev_r) * grow);
}

ReverseSmith modular_reverse_smith(const IntMat& P1, const mpz_class& s, std::size_t r) {
  if (r > P1.cols()) throw DimensionError("modular_reverse_smith: r exceeds column count");
  const std::size_t n = P1.rows(), c = P1.cols();
  ZmodSmith z = zmod_smith(P1, s, r);
  ReverseSmith out;
  out.U = IntMat(r, n);
  out.M = IntMat(n, r);
  out.Y = IntMat(c, r);
  out.D.resize(r);
  for (std::size_t j = 0; j < r; ++j) {
    const std::size_t k = r - 1 - j;
    const mpz_class e = k < z.e.size() ? z.e[k] : s;
    out.D[j] = e;
    for (std::size_t i = 0; i < c; ++i) out.Y(i, j) = z.Y(i, k);
    if (e == s) continue;  // zero class
    for (std::size_t t = 0; t < n; ++t) out.U(j, t) = rem_mod(-z.L(k, t), s);
    for (std::size_t i = 0; i < n; ++i) mpz_divexact(out.M(i, j).get_mpz_t(), z.PY(i, k).get_mpz_t(), e.get_mpz_t());
  }
  return out;
}

ReverseSmith modular_reverse_smith(const IntMat& P1, const mpz_class& s) {
  return modular_reverse_smith(P1, s, P1.cols());
}

std::variant<Batch, RetryNeeded> index_massager(WorkState& st, std::size_t r, const MassagerConfig& cfg, Rng& rng,
                                                const JProvider& provide_j) {
  const std::size_t n = st.n;
  if (r == 0 || st.m + r > n) throw std::invalid_argument("index_massager: batch size out of range");
  const mpz_class s = st.s;
  Batch b;
  b.r = r;
  b.modulus = s;
  b.T = IntMat::identity(r);
  if (s == 1) {
    b.S.assign(r, mpz_class(1));
    b.U = IntMat(r, n);
    b.M = IntMat(n, r);
    return b;
  }
  if (!st.solver) st.solver = std::make_shared<PadicSolver>(st.A, rng);
  const std::size_t c = r + cfg.k;
  IntMat J = provide_j ? provide_j(n, c, s) : random_matrix(n, c, s, rng);
  if (J.rows() != n || J.cols() != c) throw DimensionError("index_massager: projection has the wrong shape");

  for (std::size_t bi = 0; bi < st.extracted.size(); ++bi)
    if (!compute_phi(st, bi, rng)) return RetryNeeded{"massaged inverse of batch " + std::to_string(bi + 1) + " is not integral"};

  // s A^-1 (J - sum_b G_b Q3_b) with Q3_b = Rem(-Phi_b J, S_b)
  std::vector<IntMat> qs;
  std::vector<std::vector<double>> gs;
  std::vector<const WorkState::Cache*> used;
  qs.reserve(st.extracted.size() + 1);
  gs.reserve(st.extracted.size());
  IntMat sJ(n, c);
  for (std::size_t e = 0; e < n * c; ++e) sJ.data()[e] = s * J.data()[e];
  qs.push_back(std::move(sJ));
  double dbound = st.solver->modulus().p;
  for (std::size_t bi = 0; bi < st.extracted.size(); ++bi) {
    const auto& cache = st.cache[bi];
    if (cache.active.empty()) continue;
    IntMat Q = mat_mul_exact(cache.Phi, J);
    for (std::size_t i = 0; i < Q.rows(); ++i) {
      const mpz_class& si = st.extracted[bi].S[cache.active[i]];
      for (std::size_t j = 0; j < c; ++j) {
        mpz_class& q = Q(i, j);
        q = -q;
        mpz_fdiv_r(q.get_mpz_t(), q.get_mpz_t(), si.get_mpz_t());
        q *= s;
      }
    }
    qs.push_back(std::move(Q));
    std::vector<double> g(cache.G.size());
    for (std::size_t e = 0; e < g.size(); ++e) g[e] = -cache.G[e];
    gs.push_back(std::move(g));
    used.push_back(&cache);
    dbound += cache.g_norm * double(cache.active.size()) * st.solver->modulus().p;
  }

  std::vector<PadicSolver::Term> terms;
  double rhs_log = 0;
  if (dbound < 0.25 * 4503599627370496.0) {
    terms.resize(qs.size());
    terms[0].Q = &qs[0];
    rhs_log = double(qs[0].max_bits());
    for (std::size_t t = 1; t < qs.size(); ++t) {
      terms[t].Q = &qs[t];
      terms[t].G = &gs[t - 1];
      terms[t].g_norm = used[t - 1]->g_norm;
      rhs_log = std::max(rhs_log, double(qs[t].max_bits()) +
                                      std::log2(std::max(1.0, used[t - 1]->g_norm * double(qs[t].rows()))));
    }
  } else {
    // G entries too large for exact digit products: form the right-hand side explicitly
    IntMat R = qs[0];
    for (std::size_t t = 1; t < qs.size(); ++t) {
      const auto& g = gs[t - 1];
      const std::size_t a = qs[t].rows();
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < a; ++k) {
          const double gv = g[i * a + k];
          if (gv == 0) continue;
          mpz_class gz(gv);
          for (std::size_t j = 0; j < c; ++j) mpz_addmul(R(i, j).get_mpz_t(), gz.get_mpz_t(), qs[t](k, j).get_mpz_t());
        }
    }
    qs.resize(1);
    qs[0] = std::move(R);
    terms.resize(1);
    terms[0].Q = &qs[0];
    rhs_log = double(qs[0].max_bits());
  }
  const std::size_t rhs_bits = std::size_t(std::ceil(rhs_log + std::log2(double(terms.size())))) + 1;

  auto P = st.solver->certify(terms, c, rhs_bits, std::vector<mpz_class>(c, s));
  if (!P) return RetryNeeded{"projection is not integral"};

  ReverseSmith rs = modular_reverse_smith(*P, s, r);
  b.S.resize(r);
  for (std::size_t j = 0; j < r; ++j) mpz_divexact(b.S[j].get_mpz_t(), s.get_mpz_t(), rs.D[j].get_mpz_t());
  b.U = std::move(rs.U);
  b.M = std::move(rs.M);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < r; ++j) mpz_fdiv_r(b.M(i, j).get_mpz_t(), b.M(i, j).get_mpz_t(), b.S[j].get_mpz_t());
  return b;
}

void append_batch(WorkState& st, Batch batch) {
  if (batch.r == 0 || st.m + batch.r > st.n) throw std::invalid_argument("append_batch: batch size out of range");
  WorkState::Cache cache;
  for (std::size_t j = 0; j < batch.r; ++j)
    if (batch.S[j] > 1) cache.active.push_back(j);
  const std::size_t a = cache.active.size();
  if (a > 0) {
    IntMat Ma(st.n, a);
    for (std::size_t k = 0; k < st.n; ++k)
      for (std::size_t j = 0; j < a; ++j) Ma(k, j) = batch.M(k, cache.active[j]);
    IntMat G = mat_mul_exact(st.A, Ma);
    cache.G.resize(st.n * a);
    for (std::size_t i = 0; i < st.n; ++i)
      for (std::size_t j = 0; j < a; ++j) {
        mpz_class& g = G(i, j);
        const mpz_class& sj = batch.S[cache.active[j]];
        if (!mpz_divisible_p(g.get_mpz_t(), sj.get_mpz_t()))
          throw std::logic_error("append_batch: A M is not divisible by the extracted factors");
        mpz_divexact(g.get_mpz_t(), g.get_mpz_t(), sj.get_mpz_t());
        if (bit_length(g) > 52) throw std::logic_error("append_batch: A M S^-1 entry out of double range");
        cache.G[i * a + j] = g.get_d();
        cache.g_norm = std::max(cache.g_norm, std::fabs(cache.G[i * a + j]));
      }
  }
  st.m += batch.r;
  if (!batch.S.empty()) st.s = batch.S.front();
  st.extracted.push_back(std::move(batch));
  st.cache.push_back(std::move(cache));
}

SmithMassager assemble_massager(const WorkState& st) {
  const std::size_t n = st.n;
  if (st.m != n) throw std::logic_error("assemble_massager: not all invariant factors extracted");
  SmithMassager out;
  out.U = IntMat(n, n);
  out.M = IntMat(n, n);
  out.S.factors.resize(n);
  std::size_t off = 0;
  for (std::size_t bi = st.extracted.size(); bi-- > 0;) {
    const Batch& b = st.extracted[bi];
    for (std::size_t j = 0; j < b.r; ++j) {
      const mpz_class& sj = b.S[j];
      out.S.factors[off + j] = sj;
      for (std::size_t k = 0; k < n; ++k) {
        mpz_fdiv_r(out.U(off + j, k).get_mpz_t(), b.U(j, k).get_mpz_t(), sj.get_mpz_t());
        mpz_fdiv_r(out.M(k, off + j).get_mpz_t(), b.M(k, j).get_mpz_t(), sj.get_mpz_t());
      }
    }
    off += b.r;
  }
  IntMat UM = mul_mod_columns(out.U, out.M, out.S.factors);
  out.T = IntMat::identity(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (UM(i, j) == 0) continue;
      mpz_sub(out.T(i, j).get_mpz_t(), out.S.factors[j].get_mpz_t(), UM(i, j).get_mpz_t());
    }
  return out;
}

std::pair<SmithMassager, MassagerStats> compute_smith_massager(const IntMat& A, const MassagerConfig& cfg) {
  if (!A.square() || A.rows() == 0) throw DimensionError("compute_smith_massager: matrix must be square and non-empty");
  if (cfg.k < 1 || cfg.max_restarts < 1) throw std::invalid_argument("compute_smith_massager: bad configuration");
  const auto t_start = Clock::now();
  const std::size_t n = A.rows();
  const std::size_t r0 = std::min(n, cfg.r_init ? cfg.r_init : std::max<std::size_t>(4, (n + 15) / 16));
  Rng rng(cfg.seed);
  MassagerStats stats;
  for (;;) {
    if (stats.restarts >= cfg.max_restarts) throw RestartLimitExceeded(stats.restarts);
    stats.iterations.clear();

    auto t = Clock::now();
    mpz_class s0;
    try {
      s0 = largest_invariant_factor(A, rng, 2 + cfg.k);
    } catch (const SingularMatrix&) {
      throw SingularInput();
    }
    stats.lif_s += since(t);

    t = Clock::now();
    WorkState st(A, s0);
    bool ok = true;
    std::size_t r = r0;
    try {
      while (st.m < n) {
        r = st.s == 1 ? n - st.m : std::min(r, n - st.m);
        const std::size_t bits_before = bit_length(st.s);
        auto res = index_massager(st, r, cfg, rng);
        if (std::holds_alternative<RetryNeeded>(res)) {
          ok = false;
          break;
        }
        append_batch(st, std::get<Batch>(std::move(res)));
        stats.iterations.push_back({r, bits_before});
        if (st.m < n) r = adaptive_schedule(r, bits_before, bit_length(st.s), n - st.m);
      }
    } catch (const SingularMatrix&) {
      throw SingularInput();
    }
    SmithMassager mass;
    if (ok) mass = assemble_massager(st);
    stats.im_s += since(t);

    if (ok) {
      t = Clock::now();
      const bool certified = check_divisibility(mass.S) && check_unimodular(A, mass.S);
      stats.uc_s += since(t);
      if (certified) {
        stats.total_s = since(t_start);
        return {std::move(mass), stats};
      }
    }
    ++stats.restarts;
  }
}

}  // namespace smith
