#include "smith/report.hpp"

#include "json.hpp"

#include <cmath>

namespace smith {

namespace {

using nlohmann::json;

double round3(double x) { return std::round(x * 1000.0) / 1000.0; }

json matrix_json(const IntMat& A) {
  json rows = json::array();
  for (std::size_t i = 0; i < A.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < A.cols(); ++j) row.push_back(A(i, j).get_str());
    rows.push_back(std::move(row));
  }
  return rows;
}

mpz_class parse_int(const json& v) {
  mpz_class x;
  if (v.is_string()) {
    const std::string& s = v.get_ref<const std::string&>();
    if (s.empty() || x.set_str(s, 10) != 0) throw ParseError("bad integer '" + s + "' in result file");
  } else if (v.is_number_integer()) {
    x = mpz_class(v.dump());
  } else {
    throw ParseError("expected an integer in result file");
  }
  return x;
}

IntMat parse_matrix(const json& v, std::size_t n) {
  if (!v.is_array() || v.size() != n) throw ParseError("massager matrix has the wrong shape");
  IntMat A(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const json& row = v[i];
    if (!row.is_array() || row.size() != n) throw ParseError("massager matrix has the wrong shape");
    for (std::size_t j = 0; j < n; ++j) A(i, j) = parse_int(row[j]);
  }
  return A;
}

}  // namespace

std::string result_to_json(const SmithMassager& mass, const MassagerStats& stats, uint64_t seed,
                           bool include_massager) {
  json j;
  j["n"] = mass.S.size();
  json f = json::array();
  for (const auto& s : mass.S.factors) f.push_back(s.get_str());
  j["invariant_factors"] = std::move(f);
  j["timings"] = {{"lif_s", round3(stats.lif_s)},
                  {"im_s", round3(stats.im_s)},
                  {"uc_s", round3(stats.uc_s)},
                  {"total_s", round3(stats.total_s)}};
  j["restarts"] = stats.restarts;
  json it = json::array();
  for (const auto& s : stats.iterations) it.push_back({{"r", s.r}, {"modulus_bits", s.modulus_bits}});
  j["iterations"] = std::move(it);
  j["seed"] = seed;
  if (include_massager) j["massager"] = {{"U", matrix_json(mass.U)}, {"M", matrix_json(mass.M)}, {"T", matrix_json(mass.T)}};
  return j.dump(1) + "\n";
}

ResultFile parse_result_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("result file is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("invariant_factors") || !j["invariant_factors"].is_array())
    throw ParseError("result file lacks invariant_factors");
  ResultFile r;
  for (const auto& v : j["invariant_factors"]) r.S.factors.push_back(parse_int(v));
  r.n = r.S.size();
  if (j.contains("n")) {
    if (!j["n"].is_number_unsigned() || j["n"].get<std::size_t>() != r.n)
      throw ParseError("n does not match the number of invariant factors");
  }
  if (j.contains("seed") && j["seed"].is_number_unsigned()) r.seed = j["seed"].get<uint64_t>();
  if (j.contains("massager")) {
    const json& m = j["massager"];
    if (!m.is_object() || !m.contains("U") || !m.contains("M") || !m.contains("T"))
      throw ParseError("massager must contain U, M and T");
    SmithMassager mass;
    mass.U = parse_matrix(m["U"], r.n);
    mass.M = parse_matrix(m["M"], r.n);
    mass.T = parse_matrix(m["T"], r.n);
    mass.S = r.S;
    r.massager = std::move(mass);
  }
  return r;
}

std::string report_to_json(const Report& rep) {
  json j;
  j["n"] = rep.n;
  j["divisibility"] = rep.divisibility;
  j["integrality"] = rep.integrality;
  j["unimodularity"] = rep.unimodularity;
  if (rep.oracle) j["oracle"] = *rep.oracle;
  j["all_pass"] = rep.all_pass();
  return j.dump(1) + "\n";
}

}  // namespace smith
