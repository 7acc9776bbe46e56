#pragma once

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "dvbx/rational.hpp"

namespace dvbx {

/// Signed p-tuple of shift offsets. Entries may be negative; backward shifts
/// are first-class citizens.
class MultiIndex {
public:
    MultiIndex() = default;
    explicit MultiIndex(std::size_t p) : entries_(p, 0) {}
    MultiIndex(std::initializer_list<int> init) : entries_(init) {}
    explicit MultiIndex(std::vector<int> entries) : entries_(std::move(entries)) {}

    /// The unit offset 1_dir (dir is 0-based).
    static MultiIndex unit(std::size_t p, std::size_t dir);

    [[nodiscard]] std::size_t dim() const { return entries_.size(); }
    [[nodiscard]] int operator[](std::size_t i) const { return entries_[i]; }
    int& operator[](std::size_t i) { return entries_[i]; }

    [[nodiscard]] bool is_zero() const;

    MultiIndex operator+(const MultiIndex& other) const;
    MultiIndex operator-(const MultiIndex& other) const;
    MultiIndex operator-() const;
    MultiIndex& operator+=(const MultiIndex& other);

    /// Componentwise >= (the paper's I ⊃ J).
    [[nodiscard]] bool contains(const MultiIndex& other) const;

    [[nodiscard]] bool all_nonnegative() const;

    /// |I| = sum of entries (meaningful for non-negative tuples).
    [[nodiscard]] long order() const;

    auto operator<=>(const MultiIndex& other) const = default;

    [[nodiscard]] std::string to_string() const;

private:
    std::vector<int> entries_;
};

/// Product of per-component binomial coefficients; requires upper ⊇ lower ≥ 0.
Rational binomial(const MultiIndex& upper, const MultiIndex& lower);

}  // namespace dvbx
