#include "dvbx/form.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

#include "dvbx/error.hpp"

namespace dvbx {

int WedgeLetter::compare(const WedgeLetter& other) const {
    if (kind != other.kind) return kind == Kind::Horizontal ? -1 : 1;
    if (kind == Kind::Horizontal) {
        if (dir != other.dir) return dir < other.dir ? -1 : 1;
        return 0;
    }
    if (coord != other.coord) return coord < other.coord ? -1 : 1;
    return 0;
}

std::optional<std::pair<WedgeMonomial, int>> WedgeMonomial::canonicalize(
    std::vector<WedgeLetter> letters) {
    // Insertion sort counting transpositions of odd-degree letters.
    int sign = 1;
    for (std::size_t i = 1; i < letters.size(); ++i) {
        WedgeLetter key = letters[i];
        std::size_t j = i;
        while (j > 0 && key < letters[j - 1]) {
            letters[j] = letters[j - 1];
            --j;
            sign = -sign;
        }
        letters[j] = std::move(key);
    }
    for (std::size_t i = 1; i < letters.size(); ++i)
        if (letters[i] == letters[i - 1]) return std::nullopt;

    WedgeMonomial m;
    for (auto& l : letters) {
        if (l.kind == WedgeLetter::Kind::Horizontal)
            m.horizontal_.push_back(l.dir);
        else
            m.vertical_.push_back(std::move(l.coord));
    }
    return std::make_pair(std::move(m), sign);
}

WedgeMonomial WedgeMonomial::from_parts(std::vector<int> horizontal,
                                        std::vector<FiberCoord> vertical) {
#ifndef NDEBUG
    assert(std::is_sorted(horizontal.begin(), horizontal.end()));
    assert(std::adjacent_find(horizontal.begin(), horizontal.end()) == horizontal.end());
    assert(std::is_sorted(vertical.begin(), vertical.end()));
    assert(std::adjacent_find(vertical.begin(), vertical.end()) == vertical.end());
#endif
    WedgeMonomial m;
    m.horizontal_ = std::move(horizontal);
    m.vertical_ = std::move(vertical);
    return m;
}

std::vector<WedgeLetter> WedgeMonomial::letters() const {
    std::vector<WedgeLetter> out;
    out.reserve(horizontal_.size() + vertical_.size());
    for (int d : horizontal_) out.push_back(WedgeLetter::horizontal(d));
    for (const auto& c : vertical_) out.push_back(WedgeLetter::vertical(c));
    return out;
}

int WedgeMonomial::compare(const WedgeMonomial& other) const {
    if (horizontal_ != other.horizontal_) return horizontal_ < other.horizontal_ ? -1 : 1;
    if (vertical_ != other.vertical_) return vertical_ < other.vertical_ ? -1 : 1;
    return 0;
}

std::string WedgeMonomial::to_string(const Space* space) const {
    if (horizontal_.empty() && vertical_.empty()) return "1";
    std::ostringstream os;
    bool first = true;
    for (int d : horizontal_) {
        if (!first) os << " ";
        os << "^" << (d + 1);
        first = false;
    }
    for (const auto& c : vertical_) {
        if (!first) os << " ";
        os << "dv " << c.to_string(space);
        first = false;
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Form

void require_same_space(const Space& a, const Space& b, const char* what) {
    if (!(a == b))
        throw Error(ErrorCode::SignatureMismatch,
                    std::string(what) + ": operands live in different space signatures");
}

Form Form::scalar(Space space, ScalarExpr f) {
    Form out(std::move(space));
    out.add_term(WedgeMonomial(), f);
    return out;
}

Form Form::term(Space space, WedgeMonomial m, ScalarExpr f) {
    Form out(std::move(space));
    out.add_term(m, f);
    return out;
}

ScalarExpr Form::coefficient(const WedgeMonomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? ScalarExpr() : it->second;
}

void Form::add_term(const WedgeMonomial& m, const ScalarExpr& f) {
    if (f.is_zero()) return;
    auto [it, inserted] = terms_.emplace(m, f);
    if (!inserted) {
        it->second += f;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

Form Form::operator+(const Form& other) const {
    require_same_space(space_, other.space_, "form addition");
    Form out(*this);
    for (const auto& [m, f] : other.terms_) out.add_term(m, f);
    return out;
}

Form Form::operator-(const Form& other) const { return *this + (-other); }

Form Form::operator-() const {
    Form out(space_);
    for (const auto& [m, f] : terms_) out.terms_.emplace(m, -f);
    return out;
}

Form& Form::operator+=(const Form& other) { return *this = *this + other; }
Form& Form::operator-=(const Form& other) { return *this = *this - other; }

Form Form::operator*(const ScalarExpr& f) const {
    Form out(space_);
    for (const auto& [m, g] : terms_) out.add_term(m, f * g);
    return out;
}

bool Form::is_homogeneous(Bidegree* out) const {
    if (terms_.empty()) {
        if (out) *out = {0, 0};
        return true;
    }
    Bidegree b = terms_.begin()->first.bidegree();
    for (const auto& [m, f] : terms_)
        if (!(m.bidegree() == b)) return false;
    if (out) *out = b;
    return true;
}

std::map<Bidegree, Form> Form::homogeneous_components() const {
    std::map<Bidegree, Form> out;
    for (const auto& [m, f] : terms_) {
        auto [it, inserted] = out.emplace(m.bidegree(), Form(space_));
        it->second.add_term(m, f);
    }
    return out;
}

bool Form::operator==(const Form& other) const {
    if (!(space_ == other.space_)) return false;
    if (terms_.size() != other.terms_.size()) return false;
    auto it = terms_.begin();
    auto jt = other.terms_.begin();
    for (; it != terms_.end(); ++it, ++jt) {
        if (!(it->first == jt->first)) return false;
        if (!(it->second == jt->second)) return false;
    }
    return true;
}

std::string Form::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, f] : terms_) {
        if (!first) os << " + ";
        first = false;
        os << "(" << f.to_string(&space_) << ")";
        if (!(m == WedgeMonomial())) os << " " << m.to_string(&space_);
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Exterior algebra operations

Form wedge(const Form& a, const Form& b) {
    require_same_space(a.space(), b.space(), "wedge");
    Form out(a.space());
    for (const auto& [ma, fa] : a.terms()) {
        for (const auto& [mb, fb] : b.terms()) {
            std::vector<WedgeLetter> seq = ma.letters();
            auto lb = mb.letters();
            seq.insert(seq.end(), lb.begin(), lb.end());
            auto canon = WedgeMonomial::canonicalize(std::move(seq));
            if (!canon) continue;
            auto& [m, sign] = *canon;
            ScalarExpr coeff = fa * fb;
            if (sign < 0) coeff = -coeff;
            out.add_term(m, coeff);
        }
    }
    return out;
}

namespace {

bool letter_matches(const FrameVector& x, const WedgeLetter& l) {
    if (x.kind == FrameVector::Kind::BaseDual)
        return l.kind == WedgeLetter::Kind::Horizontal && l.dir == x.dir;
    return l.kind == WedgeLetter::Kind::Vertical && l.coord == x.coord;
}

}  // namespace

Form interior(const FrameVector& x, const Form& sigma) {
    Form out(sigma.space());
    for (const auto& [m, f] : sigma.terms()) {
        auto letters = m.letters();
        for (std::size_t pos = 0; pos < letters.size(); ++pos) {
            if (!letter_matches(x, letters[pos])) continue;
            std::vector<WedgeLetter> rest;
            rest.reserve(letters.size() - 1);
            for (std::size_t j = 0; j < letters.size(); ++j)
                if (j != pos) rest.push_back(letters[j]);
            auto canon = WedgeMonomial::canonicalize(std::move(rest));
            assert(canon && canon->second == 1);  // removing a letter keeps order
            ScalarExpr coeff = (pos % 2 == 0) ? f : -f;
            out.add_term(canon->first, coeff);
            break;  // each letter is listed once in a canonical monomial
        }
    }
    return out;
}

Form vol(const Space& space) {
    std::vector<int> dirs(static_cast<std::size_t>(space.base_dim));
    for (int i = 0; i < space.base_dim; ++i) dirs[static_cast<std::size_t>(i)] = i;
    return Form::term(space, WedgeMonomial::from_parts(std::move(dirs), {}), ScalarExpr(1));
}

Form co_vol(const Space& space, int dir) {
    return interior(FrameVector::base_dual(dir), vol(space));
}

}  // namespace dvbx
