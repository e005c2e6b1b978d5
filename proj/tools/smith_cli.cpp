// smith: compute, verify, generate and benchmark Smith forms.

#include "smith/certify.hpp"
#include "smith/gen.hpp"
#include "smith/massager.hpp"
#include "smith/modp.hpp"
#include "smith/report.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace smith;

namespace {

constexpr int kOk = 0, kFail = 1, kParse = 2, kSingular = 3, kRestart = 4;

using Clock = std::chrono::steady_clock;

double seconds(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot open " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

int cmd_compute(const std::string& in, uint64_t seed, const std::string& out) {
  IntMat A;
  try {
    A = load_matrix(in);
    if (!A.square()) throw ParseError("matrix must be square");
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kParse;
  }
  MassagerConfig cfg;
  cfg.seed = seed;
  try {
    auto [mass, stats] = compute_smith_massager(A, cfg);
    const std::string js = result_to_json(mass, stats, seed);
    if (out.empty()) {
      std::cout << js;
    } else {
      std::ofstream f(out, std::ios::binary);
      if (!f) {
        std::cerr << "error: cannot write " << out << '\n';
        return kFail;
      }
      f << js;
    }
    return kOk;
  } catch (const SingularInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSingular;
  } catch (const RestartLimitExceeded& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRestart;
  }
}

int cmd_verify(const std::string& in, const std::string& result, bool oracle) {
  IntMat A;
  ResultFile res;
  try {
    A = load_matrix(in);
    res = parse_result_json(read_file(result));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kParse;
  }
  SmithMassager mass;
  if (res.massager) {
    mass = *res.massager;
  } else {
    std::cerr << "warning: result has no massager; integrality cannot be checked\n";
    mass.S = res.S;
  }
  const std::size_t limit = oracle ? 200 : 0;
  if (oracle && A.rows() > limit) std::cerr << "note: oracle comparison skipped for n > " << limit << '\n';
  Report rep = verify_massager(A, mass, limit);
  std::cout << rep.text();
  std::cout << (rep.all_pass() ? "all checks passed\n" : "verification FAILED\n");
  return rep.all_pass() ? kOk : kFail;
}

int cmd_gen(const std::string& family, std::size_t n, std::size_t bits, uint64_t seed, const std::string& out) {
  IntMat A;
  if (family == "vandermonde") {
    if (n < 2) {
      std::cerr << "error: vandermonde needs n >= 2\n";
      return kParse;
    }
    if (!is_prime(n)) std::cerr << "warning: " << n << " is not prime; the matrix may be singular\n";
    A = vandermonde_mod(n);
  } else if (family == "random") {
    if (n < 1 || bits < 1) {
      std::cerr << "error: random needs n >= 1 and bits >= 1\n";
      return kParse;
    }
    Rng rng(seed);
    A = random_nonsingular(n, bits, rng);
  } else {
    std::cerr << "error: unknown family '" << family << "'\n";
    return kParse;
  }
  try {
    save_matrix(out, A);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFail;
  }
  return kOk;
}

double time_dgemm(std::size_t n, Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> a(n * n), b(n * n), c(n * n);
  for (auto& x : a) x = u(rng);
  for (auto& x : b) x = u(rng);
  auto t = Clock::now();
  modp::gemm(n, n, n, 1.0, a.data(), n, b.data(), n, 0.0, c.data(), n);
  return seconds(t);
}

int cmd_bench(const std::vector<std::size_t>& sizes, std::size_t trials, const std::string& family, std::size_t bits,
              uint64_t seed, const std::string& csv) {
  if (trials < 1) {
    std::cerr << "error: --trials must be positive\n";
    return kParse;
  }
  if (family != "vandermonde" && family != "random") {
    std::cerr << "error: unknown family '" << family << "'\n";
    return kParse;
  }
  for (std::size_t n : sizes)
    if (family == "vandermonde" && !is_prime(n)) {
      std::cerr << "error: size " << n << " is not prime\n";
      return kParse;
    }
  std::cerr << "gemm backend: " << modp::gemm_backend() << '\n';
  std::ostringstream os;
  os << "n,smith_s,dgemm_equiv_s,ratio\n";
  Rng rng(seed);
  for (std::size_t n : sizes) {
    IntMat A;
    if (family == "vandermonde") {
      A = vandermonde_mod(n);
    } else {
      A = random_nonsingular(n, bits, rng);
    }
    std::vector<double> ts, gs;
    for (std::size_t t = 0; t < trials; ++t) {
      MassagerConfig cfg;
      cfg.seed = seed + t;
      auto t0 = Clock::now();
      try {
        compute_smith_massager(A, cfg);
      } catch (const SingularInput& e) {
        std::cerr << "error: n = " << n << ": " << e.what() << '\n';
        return kSingular;
      } catch (const RestartLimitExceeded& e) {
        std::cerr << "error: n = " << n << ": " << e.what() << '\n';
        return kRestart;
      }
      ts.push_back(seconds(t0));
      gs.push_back(time_dgemm(n, rng));
    }
    const double sm = median(ts), gm = median(gs);
    char line[160];
    std::snprintf(line, sizeof line, "%zu,%.6f,%.6f,%.2f\n", n, sm, gm, gm > 0 ? sm / gm : 0.0);
    os << line;
    std::cerr << line << std::flush;
  }
  if (csv.empty()) {
    std::cout << os.str();
  } else {
    std::ofstream f(csv, std::ios::binary);
    if (!f) {
      std::cerr << "error: cannot write " << csv << '\n';
      return kFail;
    }
    f << os.str();
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Smith normal form and Smith massager of a nonsingular integer matrix"};
  app.require_subcommand(1);

  std::string in, out, result, family = "vandermonde", csv;
  uint64_t seed = 0;
  std::size_t n = 0, bits = 8, trials = 3;
  bool oracle = false;
  std::vector<std::size_t> sizes;

  auto* compute = app.add_subcommand("compute", "compute the Smith form and a Smith massager");
  compute->add_option("--in", in, "matrix file")->required();
  compute->add_option("--seed", seed, "random seed");
  compute->add_option("--json", out, "write the JSON result here (default: stdout)");

  auto* gen = app.add_subcommand("gen", "write a test matrix");
  gen->add_option("--family", family, "vandermonde or random")->required();
  gen->add_option("--n", n, "dimension")->required();
  gen->add_option("--bits", bits, "entry bits for the random family");
  gen->add_option("--seed", seed, "random seed");
  gen->add_option("--out", out, "output file")->required();

  auto* verify = app.add_subcommand("verify", "check a computed result");
  verify->add_option("--in", in, "matrix file")->required();
  verify->add_option("--result", result, "JSON result file")->required();
  verify->add_flag("--oracle", oracle, "also compare against the brute-force Smith form (n <= 200)");

  auto* bench = app.add_subcommand("bench", "time the pipeline against one dense multiply");
  bench->add_option("--sizes", sizes, "comma-separated dimensions")->required()->delimiter(',');
  bench->add_option("--trials", trials, "trials per size (median reported)");
  bench->add_option("--family", family, "vandermonde or random");
  bench->add_option("--bits", bits, "entry bits for the random family");
  bench->add_option("--seed", seed, "random seed");
  bench->add_option("--csv", csv, "write CSV here (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kParse;
  }

  if (*compute) return cmd_compute(in, seed, out);
  if (*gen) return cmd_gen(family, n, bits, seed, out);
  if (*verify) return cmd_verify(in, result, oracle);
  if (*bench) return cmd_bench(sizes, trials, family, bits, seed, csv);
  return kParse;
}
