#pragma once

#include <string>
#include <vector>

namespace dvbx {

/// Space signature: p base directions and q named dependent variables.
/// Forms and parsed expressions are only combinable within one signature.
struct Space {
    int base_dim = 1;
    std::vector<std::string> variables = {"u"};

    [[nodiscard]] int fiber_dim() const { return static_cast<int>(variables.size()); }

    bool operator==(const Space&) const = default;
};

}  // namespace dvbx
