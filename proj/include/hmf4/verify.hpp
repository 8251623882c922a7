#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "hmf4/rat.hpp"

namespace hmf4::verify {

enum class CheckStatus { pass, fail, skipped };

std::string status_str(CheckStatus s);

// Outcome of one machine check. `paper_anchor` is a section-keyed slug
// from the fixed table in known_anchors(), naming the documented
// identity or theorem clause the check certifies. `measured` (when
// present) is the worst observed residual, margin violation count, or
// magnitude, rounded away from zero so the report never understates it.
struct CheckResult {
    std::string check_id;
    CheckStatus status = CheckStatus::fail;
    std::string paper_anchor;
    bool has_measured = false;
    double measured = 0.0;
    double tolerance = 0.0;
    std::string note;  // grid description, skip reason, witness policy
    double seconds = 0.0;
};

// The fixed anchor vocabulary; every emitted CheckResult uses one of
// these.
const std::vector<std::string>& known_anchors();
bool anchor_valid(const std::string& anchor);

// sigma = -2, -7/4, ..., k+3 (quarter-integer steps).
std::vector<Rat> default_sigma_grid(long k);

// Identity suite: dimension table, the dual construction of delta4,
// the axis transformation laws of theta/F2/delta4/D2 (both the
// integral-weight (2z)^-w literal form and the uniform (-2iz)^-w ring
// convention), exactness of the ring involution, the special values at
// t = 1/2, and the positivity of delta4 and D2 on their axis ranges.
std::vector<CheckResult> verify_identities(long prec, long bits);

// Nonvanishing certification for the plus-space witness
// g = delta4 * theta^(2k-7), k >= 4: membership, L*(g, sigma) > 0
// beyond the combined error budget on the grid, and a per-sigma Hecke
// eigenform witness with nonzero component and nonvanishing L*.
// prec = 0 selects an automatic series precision.
std::vector<CheckResult> verify_nonvanishing_plus(long k,
                                                  const std::vector<Rat>& sigma_grid,
                                                  long bits, long prec = 0);

// Sign-pattern certification for the minus-space witness
// g = delta4 * D2 * theta^(2k-11), k >= 6: membership,
// sign L*(g, sigma) = sign(sigma - (k/2 + 1/4)) beyond budget on the
// grid, the forced zero at the center, and the per-sigma eigenform
// witness away from the center.
std::vector<CheckResult> verify_sign_pattern_minus(long k,
                                                   const std::vector<Rat>& sigma_grid,
                                                   long bits, long prec = 0);

// All suites for 4 <= k <= k_max (plus) and 6 <= k <= k_max (minus),
// aggregated into the versioned report document:
// {artifact_version, parameters, checks, summary}.
nlohmann::ordered_json full_report(long k_max, long bits, long prec);

nlohmann::ordered_json to_json(const CheckResult& c);

}  // namespace hmf4::verify
