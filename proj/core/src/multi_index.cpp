#include "dvbx/multi_index.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

#include "dvbx/error.hpp"

namespace dvbx {

MultiIndex MultiIndex::unit(std::size_t p, std::size_t dir) {
    MultiIndex m(p);
    m[dir] = 1;
    return m;
}

bool MultiIndex::is_zero() const {
    return std::all_of(entries_.begin(), entries_.end(), [](int e) { return e == 0; });
}

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
    assert(dim() == other.dim());
    MultiIndex out(*this);
    for (std::size_t i = 0; i < entries_.size(); ++i) out[i] += other[i];
    return out;
}

MultiIndex MultiIndex::operator-(const MultiIndex& other) const {
    assert(dim() == other.dim());
    MultiIndex out(*this);
    for (std::size_t i = 0; i < entries_.size(); ++i) out[i] -= other[i];
    return out;
}

MultiIndex MultiIndex::operator-() const {
    MultiIndex out(*this);
    for (auto& e : out.entries_) e = -e;
    return out;
}

MultiIndex& MultiIndex::operator+=(const MultiIndex& other) {
    assert(dim() == other.dim());
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += other[i];
    return *this;
}

bool MultiIndex::contains(const MultiIndex& other) const {
    assert(dim() == other.dim());
    for (std::size_t i = 0; i < entries_.size(); ++i)
        if (entries_[i] < other[i]) return false;
    return true;
}

bool MultiIndex::all_nonnegative() const {
    return std::all_of(entries_.begin(), entries_.end(), [](int e) { return e >= 0; });
}

long MultiIndex::order() const {
    long s = 0;
    for (int e : entries_) s += e;
    return s;
}

std::string MultiIndex::to_string() const {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (i) os << ',';
        os << entries_[i];
    }
    os << ']';
    return os.str();
}

Rational binomial(const MultiIndex& upper, const MultiIndex& lower) {
    if (!lower.all_nonnegative() || !upper.contains(lower))
        throw Error(ErrorCode::DomainError,
                    "binomial requires upper ⊇ lower ≥ 0, got " + upper.to_string() +
                        " over " + lower.to_string());
    mpz_class prod = 1;
    for (std::size_t i = 0; i < upper.dim(); ++i) {
        mpz_class c;
        mpz_bin_uiui(c.get_mpz_t(), static_cast<unsigned long>(upper[i]),
                     static_cast<unsigned long>(lower[i]));
        prod *= c;
    }
    return Rational(prod);
}

}  // namespace dvbx
