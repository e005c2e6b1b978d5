#pragma once

#include "smith/lift.hpp"
#include "smith/matcore.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace smith {

struct SingularInput : std::runtime_error {
  SingularInput() : std::runtime_error("input matrix is singular") {}
};

struct RestartLimitExceeded : std::runtime_error {
  explicit RestartLimitExceeded(std::size_t n)
      : std::runtime_error("certification failed " + std::to_string(n) + " times") {}
};

/// (U, M, T, S) with A M S^-1 and (T + U M) S^-1 integral, T unit upper triangular.
struct SmithMassager {
  IntMat U, M, T;
  SmithDiagonal S;
};

struct MassagerConfig {
  std::size_t k = 4;        // extra projection columns
  std::size_t r_init = 0;   // 0: max(4, ceil(n/16))
  std::size_t max_restarts = 20;
  uint64_t seed = 0;
};

struct IterationStat {
  std::size_t r = 0;
  std::size_t modulus_bits = 0;
};

struct MassagerStats {
  double lif_s = 0, im_s = 0, uc_s = 0, total_s = 0;
  std::size_t restarts = 0;
  std::vector<IterationStat> iterations;
};

/// One extracted batch of invariant factors.
struct Batch {
  std::size_t r = 0;
  std::vector<mpz_class> S;  // nondecreasing, each divides `modulus`
  IntMat U;                  // r x n, entries in [0, modulus)
  IntMat M;                  // n x r, column j in [0, S[j])
  IntMat T;                  // I_r
  mpz_class modulus;         // working modulus at extraction
};

struct WorkState {
  IntMat A;
  std::size_t n = 0;
  std::vector<Batch> extracted;  // oldest (largest factors) first
  std::size_t m = 0;
  mpz_class s = 1;

  WorkState(const IntMat& A, const mpz_class& s0);
  // per-batch caches: A M S^-1 and Rem(S U Pi A^-1, S) restricted to rows with S_i > 1
  struct Cache {
    std::vector<std::size_t> active;
    std::vector<double> G;  // n x active.size()
    double g_norm = 0;
    IntMat Phi;  // active.size() x n
    bool has_phi = false;
  };
  std::vector<Cache> cache;
  std::shared_ptr<PadicSolver> solver, solver_t;
};

struct RetryNeeded {
  std::string reason;
};

/// Supplies the projection matrix J (rows x cols, entries in [0, s)); defaults to uniform draws.
using JProvider = std::function<IntMat(std::size_t rows, std::size_t cols, const mpz_class& s)>;

/// Denominator of A^-1 J for a random J with `columns` columns; divides s_n(A).
mpz_class largest_invariant_factor(const IntMat& A, Rng& rng, std::size_t columns = 6);

std::size_t adaptive_schedule(std::size_t prev_r, std::size_t prev_bits, std::size_t cur_bits, std::size_t remaining);

struct ReverseSmith {
  IntMat U;                   // r x n
  IntMat M;                   // n x r
  std::vector<mpz_class> D;   // d_{i+1} | d_i | s
  IntMat Y;                   // c x r column transform; the congruences hold for P1 Y
};

/// -U P1 Y == D and P1 Y == M D (mod s); keeps the r largest classes (default: all columns).
ReverseSmith modular_reverse_smith(const IntMat& P1, const mpz_class& s, std::size_t r);
ReverseSmith modular_reverse_smith(const IntMat& P1, const mpz_class& s);

/// Extracts the next r invariant factors. Appends nothing; the caller commits with append_batch.
std::variant<Batch, RetryNeeded> index_massager(WorkState& state, std::size_t r, const MassagerConfig& cfg, Rng& rng,
                                                const JProvider& provide_j = {});

void append_batch(WorkState& state, Batch batch);

/// Combined massager, newest batch first, U/M reduced modulo S and T filled in.
SmithMassager assemble_massager(const WorkState& state);

std::pair<SmithMassager, MassagerStats> compute_smith_massager(const IntMat& A, const MassagerConfig& cfg);

}  // namespace smith
