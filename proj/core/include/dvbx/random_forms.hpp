#pragma once

#include <cstdint>
#include <random>

#include "dvbx/form.hpp"

namespace dvbx {

/// Deterministic RNG facade. mt19937_64 has a standardized sequence and the
/// derived draws avoid std::uniform_int_distribution, whose mapping is
/// implementation-defined; reports built from one seed are byte-stable.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t raw() { return gen_(); }

    /// Uniform draw from [0, n).
    long below(long n) { return n <= 1 ? 0 : static_cast<long>(raw() % static_cast<std::uint64_t>(n)); }

    /// Uniform draw from [a, b] inclusive.
    long range(long a, long b) { return a + below(b - a + 1); }

    bool chance(long num, long den) { return below(den) < num; }

private:
    std::mt19937_64 gen_;
};

struct SamplerOptions {
    int max_wedge_terms = 2;   // wedge monomials per form
    int max_coeff_terms = 2;   // monomials per coefficient polynomial
    int max_fiber_degree = 3;  // per coefficient monomial
    int stencil_radius = 2;    // |offset components| bound
    bool allow_base_coords = true;
};

/// Samples random polynomial data in a fixed space signature.
class FormSampler {
public:
    FormSampler(Space space, Rng& rng, SamplerOptions opt = {})
        : space_(std::move(space)), rng_(rng), opt_(opt) {}

    [[nodiscard]] const Space& space() const { return space_; }

    FiberCoord sample_coord();
    ScalarExpr sample_polynomial();
    std::vector<ScalarExpr> sample_characteristic();
    Form sample_form(Bidegree b);

private:
    Space space_;
    Rng& rng_;
    SamplerOptions opt_;
};

}  // namespace dvbx
