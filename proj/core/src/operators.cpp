#include "dvbx/operators.hpp"

#include <cassert>

#include "dvbx/error.hpp"

namespace dvbx {

ScalarExpr VectorField::apply(const ScalarExpr& f) const {
    ScalarExpr out;
    for (const auto& c : fiber_support(f)) {
        ScalarExpr df = partial(f, c);
        if (df.is_zero()) continue;
        const auto& q = characteristics[static_cast<std::size_t>(c.alpha)];
        out += shift(q, c.offset) * df;
    }
    return out;
}

Form shift_form(const Form& sigma, const MultiIndex& K) {
    if (K.is_zero()) return sigma;
    Form out(sigma.space());
    for (const auto& [m, f] : sigma.terms()) {
        std::vector<FiberCoord> vertical = m.vertical();
        for (auto& c : vertical) c.offset = c.offset + K;
        // Translating every offset by K preserves the lexicographic order,
        // so the monomial stays canonical and no sign appears.
        out.add_term(WedgeMonomial::from_parts(m.horizontal(), std::move(vertical)), shift(f, K));
    }
    return out;
}

Form d_v(const Form& sigma) {
    Form out(sigma.space());
    for (const auto& [m, f] : sigma.terms()) {
        for (const auto& c : fiber_support(f)) {
            ScalarExpr df = partial(f, c);
            if (df.is_zero()) continue;
            std::vector<WedgeLetter> seq;
            seq.reserve(m.degree() + 1);
            seq.push_back(WedgeLetter::vertical(c));
            auto rest = m.letters();
            seq.insert(seq.end(), rest.begin(), rest.end());
            auto canon = WedgeMonomial::canonicalize(std::move(seq));
            if (!canon) continue;
            out.add_term(canon->first, canon->second < 0 ? -df : df);
        }
    }
    return out;
}

Form lie_difference(const Form& sigma, int dir) {
    MultiIndex step = MultiIndex::unit(static_cast<std::size_t>(sigma.space().base_dim),
                                       static_cast<std::size_t>(dir));
    return shift_form(sigma, step) - sigma;
}

Form d_h(const Form& sigma) {
    Form out(sigma.space());
    for (int i = 0; i < sigma.space().base_dim; ++i) {
        Form diff = lie_difference(sigma, i);
        for (const auto& [m, f] : diff.terms()) {
            std::vector<WedgeLetter> seq;
            seq.reserve(m.degree() + 1);
            seq.push_back(WedgeLetter::horizontal(i));
            auto rest = m.letters();
            seq.insert(seq.end(), rest.begin(), rest.end());
            auto canon = WedgeMonomial::canonicalize(std::move(seq));
            if (!canon) continue;
            out.add_term(canon->first, canon->second < 0 ? -f : f);
        }
    }
    return out;
}

Form d_total(const Form& sigma) { return d_h(sigma) + d_v(sigma); }

Form contract(const VectorField& v, const Form& sigma) {
    require_same_space(v.space, sigma.space(), "contract");
    Form out(sigma.space());
    for (const auto& [m, f] : sigma.terms()) {
        auto letters = m.letters();
        for (std::size_t pos = 0; pos < letters.size(); ++pos) {
            if (letters[pos].kind != WedgeLetter::Kind::Vertical) continue;
            const FiberCoord& c = letters[pos].coord;
            ScalarExpr q = shift(v.characteristics[static_cast<std::size_t>(c.alpha)], c.offset);
            if (q.is_zero()) continue;
            std::vector<WedgeLetter> rest;
            rest.reserve(letters.size() - 1);
            for (std::size_t j = 0; j < letters.size(); ++j)
                if (j != pos) rest.push_back(letters[j]);
            auto canon = WedgeMonomial::canonicalize(std::move(rest));
            assert(canon && canon->second == 1);
            ScalarExpr coeff = f * q;
            if (pos % 2 == 1) coeff = -coeff;
            out.add_term(canon->first, coeff);
        }
    }
    return out;
}

Form lie_derivative(const VectorField& v, const Form& sigma) {
    return contract(v, d_v(sigma)) + d_v(contract(v, sigma));
}

}  // namespace dvbx
