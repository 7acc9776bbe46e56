#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dvbx/form.hpp"

namespace dvbx {

struct CheckOutcome {
    std::string name;
    bool pass = true;
    long cases = 0;
    std::string counterexample;  // first failing input / residual, rendered
    std::string note;            // extra findings (e.g. which edge identity held)
};

struct CheckOptions {
    std::uint64_t seed = 1;
    int cases = 100;  // per identity, space signature and bidegree

    /// Harness self-test: deliberately break an operator and watch the
    /// battery catch it.
    enum class Inject { None, DvSign };
    Inject inject = Inject::None;
};

/// Runs the full exact-identity battery over random polynomial forms for
/// p in {1,2,3} and q in {1,2}. Every comparison is exact.
std::vector<CheckOutcome> run_identity_battery(const CheckOptions& opt);

bool all_passed(const std::vector<CheckOutcome>& outcomes);

}  // namespace dvbx
