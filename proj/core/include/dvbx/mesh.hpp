#pragma once

#include <cstddef>
#include <vector>

namespace dvbx {

/// Rectangular (tensor-product) mesh, possibly non-uniform per direction.
/// Direction 0 is space, direction 1 is time for the PDE schemes; the
/// mechanics driver uses the time axis only.
class Mesh {
public:
    static Mesh uniform(std::size_t nx, std::size_t nt, double hx, double ht, double x0 = 0.0,
                        double t0 = 0.0);
    static Mesh from_nodes(std::vector<double> x_nodes, std::vector<double> t_nodes);

    [[nodiscard]] std::size_t nx() const { return x_nodes_.size() - 1; }  // cells in x
    [[nodiscard]] std::size_t nt() const { return t_nodes_.size() - 1; }  // steps in t

    [[nodiscard]] double x(std::size_t i) const { return x_nodes_[i]; }
    [[nodiscard]] double t(std::size_t j) const { return t_nodes_[j]; }
    [[nodiscard]] double hx(std::size_t i) const { return x_nodes_[i + 1] - x_nodes_[i]; }
    [[nodiscard]] double ht(std::size_t j) const { return t_nodes_[j + 1] - t_nodes_[j]; }

    [[nodiscard]] double max_step_ratio_t() const;

private:
    Mesh() = default;
    std::vector<double> x_nodes_;  // size nx+1, strictly increasing
    std::vector<double> t_nodes_;  // size nt+1, strictly increasing
};

}  // namespace dvbx
