#include "dvbx/random_forms.hpp"

#include <algorithm>
#include <set>

namespace dvbx {

FiberCoord FormSampler::sample_coord() {
    MultiIndex offset(static_cast<std::size_t>(space_.base_dim));
    for (std::size_t i = 0; i < offset.dim(); ++i)
        offset[i] = static_cast<int>(rng_.range(-opt_.stencil_radius, opt_.stencil_radius));
    int alpha = static_cast<int>(rng_.below(space_.fiber_dim()));
    return {alpha, std::move(offset)};
}

ScalarExpr FormSampler::sample_polynomial() {
    ScalarExpr out;
    long terms = rng_.range(1, opt_.max_coeff_terms);
    for (long t = 0; t < terms; ++t) {
        long num = rng_.range(-9, 9);
        if (num == 0) num = 1;
        long den = rng_.range(1, 3);
        ScalarExpr term{make_rational(num, den)};
        long degree = rng_.range(0, opt_.max_fiber_degree);
        for (long d = 0; d < degree; ++d) term *= ScalarExpr::fiber(sample_coord());
        if (opt_.allow_base_coords && rng_.chance(1, 5)) {
            int dir = static_cast<int>(rng_.below(space_.base_dim));
            term *= ScalarExpr::base_coord(dir);
        }
        out += term;
    }
    return out;
}

std::vector<ScalarExpr> FormSampler::sample_characteristic() {
    std::vector<ScalarExpr> q;
    q.reserve(static_cast<std::size_t>(space_.fiber_dim()));
    for (int a = 0; a < space_.fiber_dim(); ++a) q.push_back(sample_polynomial());
    return q;
}

Form FormSampler::sample_form(Bidegree b) {
    Form out(space_);
    long terms = rng_.range(1, opt_.max_wedge_terms);
    for (long t = 0; t < terms; ++t) {
        // Horizontal part: a random k-subset of the directions.
        std::vector<int> dirs;
        for (int i = 0; i < space_.base_dim; ++i) dirs.push_back(i);
        for (int i = space_.base_dim - 1; i > 0; --i)
            std::swap(dirs[static_cast<std::size_t>(i)],
                      dirs[static_cast<std::size_t>(rng_.below(i + 1))]);
        dirs.resize(static_cast<std::size_t>(b.k));
        std::sort(dirs.begin(), dirs.end());

        // Vertical part: l distinct fiber coordinates.
        std::set<FiberCoord> coords;
        int guard = 0;
        while (static_cast<int>(coords.size()) < b.l && guard++ < 200) coords.insert(sample_coord());
        if (static_cast<int>(coords.size()) < b.l) continue;
        std::vector<FiberCoord> vertical(coords.begin(), coords.end());

        out.add_term(WedgeMonomial::from_parts(std::move(dirs), std::move(vertical)),
                     sample_polynomial());
    }
    return out;
}

}  // namespace dvbx
