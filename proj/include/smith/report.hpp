#pragma once

// JSON result files shared by `smith compute` and `smith verify`.

#include "smith/certify.hpp"
#include "smith/massager.hpp"

#include <optional>
#include <string>

namespace smith {

struct ResultFile {
  std::size_t n = 0;
  SmithDiagonal S;
  std::optional<SmithMassager> massager;  // present when U, M, T were written
  uint64_t seed = 0;
};

/// {n, invariant_factors, timings, restarts, iterations, seed} plus "massager": {U, M, T} when requested.
std::string result_to_json(const SmithMassager& mass, const MassagerStats& stats, uint64_t seed,
                           bool include_massager = true);

/// Throws ParseError on malformed input.
ResultFile parse_result_json(const std::string& text);

std::string report_to_json(const Report& report);

}  // namespace smith
