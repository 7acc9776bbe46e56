#include "dvbx/mesh.hpp"

#include <algorithm>

#include "dvbx/error.hpp"

namespace dvbx {

namespace {

void validate(const std::vector<double>& nodes, const char* axis) {
    if (nodes.size() < 2)
        throw Error(ErrorCode::ConfigError, std::string("mesh needs at least one cell along ") + axis);
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
        if (!(nodes[i + 1] > nodes[i]))
            throw Error(ErrorCode::ConfigError,
                        std::string("mesh nodes must be strictly increasing along ") + axis);
}

}  // namespace

Mesh Mesh::uniform(std::size_t nx, std::size_t nt, double hx, double ht, double x0, double t0) {
    if (nx < 1 || nt < 1)
        throw Error(ErrorCode::ConfigError, "mesh extents must be positive");
    if (!(hx > 0.0) || !(ht > 0.0))
        throw Error(ErrorCode::ConfigError, "mesh steps must be positive");
    Mesh m;
    m.x_nodes_.resize(nx + 1);
    m.t_nodes_.resize(nt + 1);
    for (std::size_t i = 0; i <= nx; ++i) m.x_nodes_[i] = x0 + hx * static_cast<double>(i);
    for (std::size_t j = 0; j <= nt; ++j) m.t_nodes_[j] = t0 + ht * static_cast<double>(j);
    return m;
}

Mesh Mesh::from_nodes(std::vector<double> x_nodes, std::vector<double> t_nodes) {
    validate(x_nodes, "x");
    validate(t_nodes, "t");
    Mesh m;
    m.x_nodes_ = std::move(x_nodes);
    m.t_nodes_ = std::move(t_nodes);
    return m;
}

double Mesh::max_step_ratio_t() const {
    double lo = ht(0), hi = ht(0);
    for (std::size_t j = 0; j < nt(); ++j) {
        lo = std::min(lo, ht(j));
        hi = std::max(hi, ht(j));
    }
    return hi / lo;
}

}  // namespace dvbx
