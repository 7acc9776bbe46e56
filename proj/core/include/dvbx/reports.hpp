#pragma once

#include <nlohmann/json.hpp>

#include <optional>
#include <string>

#include "dvbx/checks.hpp"
#include "dvbx/multisymplectic.hpp"
#include "dvbx/variational.hpp"

namespace dvbx {

using Json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "0.1.0";

/// FNV-1a over the canonical JSON dump; stamped into every report so runs
/// are traceable to their configuration.
std::uint64_t config_hash(const Json& config);

/// Common report envelope: tool version, command, config hash, seed.
Json report_header(const std::string& command, const Json& config, std::uint64_t seed);

Json check_report(const std::vector<CheckOutcome>& outcomes, const CheckOptions& opt);

/// Problem description shared by the symbolic commands.
struct ProblemSpec {
    Space space;
    std::optional<ScalarExpr> lagrangian;                  // density
    std::optional<DegenerateLagrangian> degenerate;        // L^i_beta, H
    std::vector<ScalarExpr> characteristics;               // Q^alpha (may be empty)
    std::vector<ScalarExpr> source_components;             // for the inverse problem
};

/// Parses {"space": {"p":2,"vars":["u"]}, "lagrangian": "...",
/// "degenerate": {"L": [["..."]], "H": "..."}, "characteristic": ["..."],
/// "source": ["..."]}.
ProblemSpec load_problem(const Json& spec);

Json el_report(const ProblemSpec& problem);
Json noether_report(const ProblemSpec& problem);
Json inverse_report(const ProblemSpec& problem);
Json ms_report(const ProblemSpec& problem);
Json momentum_report(const ProblemSpec& problem);

struct IntegrateResult {
    bool thresholds_met = false;
    Json manifest;
    std::string csv;
};

/// Runs a configured scheme and assembles the CSV rows plus the JSON run
/// manifest (resolved sweep order, tolerances, versions, seeds). All output
/// bytes are deterministic for a fixed config.
IntegrateResult run_integration(const Json& config);

}  // namespace dvbx
