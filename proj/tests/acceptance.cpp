// Acceptance gate: one PASS/FAIL line per primary criterion. Exit status 0 iff all pass.

#include "helpers.hpp"
#include "smith/certify.hpp"
#include "smith/gen.hpp"
#include "smith/massager.hpp"
#include "smith/oracle.hpp"
#include "smith/rns.hpp"

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace smith;

namespace {

// pinned limits
constexpr double kOracleRangeSeconds = 30.0;
constexpr std::size_t kPaperN = 1009;
constexpr std::size_t kPaperBits = 4083;
constexpr double kPaperSeconds = 20 * 60.0;
constexpr int kRnsPairs = 200, kRnsBits = 256, kRnsDim = 64, kConvertStacks = 100;
constexpr int kDetMatrices = 50, kDetDim = 20, kDetBits = 8;
constexpr int kLvRuns = 100, kLvDim = 101, kLvMinClean = 90;
constexpr std::size_t kLvMaxRestarts = 20;
constexpr double kLvSeconds = 300.0;
constexpr double kSlopeLo = 2.3, kSlopeHi = 3.6;
constexpr std::size_t kFaultDim = 13;

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

int failures = 0;

void report(bool ok, const std::string& name, const std::string& detail) {
  std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << detail << std::endl;
  if (!ok) ++failures;
}

std::string fmt(const char* f, double x) {
  char b[64];
  std::snprintf(b, sizeof b, f, x);
  return b;
}

void oracle_range() {
  auto t0 = Clock::now();
  std::size_t ok = 0, total = 0;
  std::string bad;
  for (std::size_t p = 3; p <= 53; ++p) {
    if (!is_prime(p)) continue;
    ++total;
    IntMat A = vandermonde_mod(p);
    MassagerConfig cfg;
    cfg.seed = p;
    auto [m, stats] = compute_smith_massager(A, cfg);
    Report r = verify_massager(A, m, 200);
    if (m.S == smith_bruteforce(A) && r.all_pass())
      ++ok;
    else
      bad += " " + std::to_string(p);
  }
  const double t = since(t0);
  report(ok == total && t < kOracleRangeSeconds, "oracle equivalence, primes 3..53",
         std::to_string(ok) + "/" + std::to_string(total) + " match and verify, " + fmt("%.2f s", t) +
             " (limit 30 s)" + (bad.empty() ? "" : ", failed:" + bad));
}

void paper_number() {
  auto t0 = Clock::now();
  IntMat A = vandermonde_mod(kPaperN);
  auto [m, stats] = compute_smith_massager(A, MassagerConfig{});
  const double t = since(t0);
  const std::size_t bits = bit_length(m.S.factors.back());
  const bool chain = check_divisibility(m.S) && check_unimodular(A, m.S);
  report(bits == kPaperBits && chain && t <= kPaperSeconds, "largest invariant factor at n = 1009",
         std::to_string(bits) + " bits (expected 4083), certified " + (chain ? "yes" : "no") + ", " +
             fmt("%.1f s", t) + " (limit 1200 s), restarts " + std::to_string(stats.restarts));
}

void rns_exactness() {
  Rng rng(2024);
  RnsBasis basis = build_basis(kRnsDim, 2 * kRnsBits + 16);
  int ok = 0;
  for (int t = 0; t < kRnsPairs; ++t) {
    IntMat A = testing::random_signed(kRnsDim, kRnsDim, kRnsBits, rng);
    IntMat B = testing::random_signed(kRnsDim, kRnsDim, kRnsBits, rng);
    IntMat C = from_residues(rns_matmul(to_residues(A, basis), to_residues(B, basis)), basis);
    ok += C == mat_mul_exact(A, B);
  }
  RnsBasis from = build_basis(256, 900);
  RnsBasis to = make_basis(build_basis(2048, 700).primes, 2048);
  int cok = 0;
  for (int t = 0; t < kConvertStacks; ++t) {
    ResidueStack st;
    st.basis = &from;
    st.rows = 4;
    st.cols = 6;
    for (uint64_t p : from.primes) {
      std::vector<double> pl(st.rows * st.cols);
      for (auto& v : pl) v = double(rng() % p);
      st.planes.push_back(std::move(pl));
    }
    cok += base_convert(st, from, to).planes == to_residues(from_residues(st, from), to).planes;
  }
  report(ok == kRnsPairs && cok == kConvertStacks, "RNS exactness",
         std::to_string(ok) + "/200 products exact, " + std::to_string(cok) + "/100 base conversions exact");
}

void determinant_identity() {
  Rng rng(77);
  int ok = 0;
  for (int t = 0; t < kDetMatrices; ++t) {
    IntMat A = random_nonsingular(kDetDim, kDetBits, rng);
    MassagerConfig cfg;
    cfg.seed = t;
    auto [m, stats] = compute_smith_massager(A, cfg);
    ok += m.S.product() == abs(det_crt(A)) && m.S.is_chain();
  }
  report(ok == kDetMatrices, "determinant identity, 50 random 20x20",
         std::to_string(ok) + "/50 with product = |det| and divisibility chain");
}

void las_vegas() {
  auto t0 = Clock::now();
  IntMat A = vandermonde_mod(kLvDim);
  int clean = 0, certified = 0;
  std::size_t worst = 0;
  for (int s = 0; s < kLvRuns; ++s) {
    MassagerConfig cfg;
    cfg.seed = s;
    cfg.max_restarts = kLvMaxRestarts;
    try {
      auto [m, stats] = compute_smith_massager(A, cfg);
      ++certified;
      clean += stats.restarts == 0;
      worst = std::max(worst, stats.restarts);
    } catch (const RestartLimitExceeded&) {
    }
  }
  const double t = since(t0);
  report(certified == kLvRuns && clean >= kLvMinClean && t < kLvSeconds, "Las Vegas behaviour at n = 101",
         std::to_string(certified) + "/100 certified, " + std::to_string(clean) + " with 0 restarts (need 90), max " +
             std::to_string(worst) + " restarts, " + fmt("%.1f s", t) + " (limit 300 s)");
}

void scaling() {
  namespace fs = std::filesystem;
  const fs::path csv = fs::temp_directory_path() / ("smith_accept_bench_" + std::to_string(::getpid()) + ".csv");
  const std::string cmd = std::string(SMITH_CLI_PATH) + " bench --sizes 101,211,503 --trials 3 --csv " + csv.string();
  const int st = std::system(cmd.c_str());
  std::vector<double> xs, ys;
  std::ifstream in(csv);
  std::string line;
  std::getline(in, line);
  std::string rows;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string n, t;
    std::getline(ls, n, ',');
    std::getline(ls, t, ',');
    xs.push_back(std::log(std::stod(n)));
    ys.push_back(std::log(std::stod(t)));
    rows += " " + n + ":" + t + "s";
  }
  fs::remove(csv);
  if (!WIFEXITED(st) || WEXITSTATUS(st) != 0 || xs.size() != 3) {
    report(false, "scaling slope", "bench did not produce three rows");
    return;
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i] / xs.size();
    my += ys[i] / ys.size();
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  const double slope = sxy / sxx;
  report(slope >= kSlopeLo && slope <= kSlopeHi, "scaling slope",
         fmt("%.3f", slope) + " (range [2.3, 3.6]);" + rows);
}

void fault_injection() {
  IntMat A = vandermonde_mod(kFaultDim);
  auto [m, stats] = compute_smith_massager(A, MassagerConfig{});
  const bool base = verify_massager(A, m, 200).all_pass();
  int tried = 0, caught = 0;
  for (std::size_t i = 0; i < m.S.size(); ++i) {
    const mpz_class f = m.S.factors[i];
    std::vector<mpz_class> variants = {f * 2, f + 1, f * 3, mpz_class(f - 1)};
    if (f != 1) variants.push_back(1);
    for (const auto& v : variants) {
      if (v == f) continue;
      SmithMassager bad = m;
      bad.S.factors[i] = v;
      ++tried;
      caught += !verify_massager(A, bad, 200).all_pass();
    }
  }
  report(base && caught == tried, "fault injection, n = 13",
         std::string("clean result ") + (base ? "passes" : "FAILS") + ", " + std::to_string(caught) + "/" +
             std::to_string(tried) + " single-factor corruptions detected");
}

void guarded(const char* name, void (*f)()) {
  try {
    f();
  } catch (const std::exception& e) {
    report(false, name, std::string("exception: ") + e.what());
  }
}

}  // namespace

int main() {
  guarded("oracle equivalence, primes 3..53", oracle_range);
  guarded("RNS exactness", rns_exactness);
  guarded("determinant identity, 50 random 20x20", determinant_identity);
  guarded("fault injection, n = 13", fault_injection);
  guarded("Las Vegas behaviour at n = 101", las_vegas);
  guarded("scaling slope", scaling);
  guarded("largest invariant factor at n = 1009", paper_number);
  std::cout << (failures ? "acceptance: " + std::to_string(failures) + " criteria FAILED" : std::string("acceptance: all criteria passed"))
            << std::endl;
  return failures ? 1 : 0;
}
