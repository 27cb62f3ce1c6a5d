#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "slwave/errors.hpp"
#include "slwave/grid.hpp"

namespace slwave {

/// Open interval (a, b).
struct Interval {
    double a = 0.0, b = 0.0;
    double measure() const { return b - a; }
};

/// Finite union of disjoint open intervals in [0, length], symmetric about
/// length/2. Normalization: intervals sorted, overlaps and shared endpoints
/// absorbed (sets are representatives modulo measure zero), empty pieces
/// dropped. All arithmetic is plain interval arithmetic on the endpoints, so
/// identities are bitwise-exact whenever the inputs make the endpoint
/// arithmetic exact (e.g. dyadic rationals).
class ElementarySet {
public:
    explicit ElementarySet(double length, std::vector<Interval> iv = {})
        : l_(length), iv_(std::move(iv)) {
        if (!(l_ > 0.0) || !std::isfinite(l_))
            throw parameter_error("ElementarySet: length must be positive");
        normalize();
        check_symmetry();
    }

    static ElementarySet empty(double length) { return ElementarySet(length); }
    static ElementarySet full(double length) { return ElementarySet(length, {{0.0, length}}); }

    double length() const { return l_; }
    const std::vector<Interval>& intervals() const { return iv_; }
    bool is_empty() const { return iv_.empty(); }

    double measure() const {
        double s = 0.0;
        for (const Interval& i : iv_) s += i.measure();
        return s;
    }

    bool operator==(const ElementarySet& o) const {
        if (l_ != o.l_ || iv_.size() != o.iv_.size()) return false;
        for (size_t k = 0; k < iv_.size(); ++k)
            if (iv_[k].a != o.iv_[k].a || iv_[k].b != o.iv_[k].b) return false;
        return true;
    }

private:
    void normalize() {
        for (Interval& i : iv_) {
            if (!std::isfinite(i.a) || !std::isfinite(i.b))
                throw parameter_error("ElementarySet: non-finite endpoint");
            i.a = std::max(i.a, 0.0);
            i.b = std::min(i.b, l_);
        }
        std::erase_if(iv_, [](const Interval& i) { return !(i.a < i.b); });
        std::sort(iv_.begin(), iv_.end(), [](const Interval& x, const Interval& y) {
            return x.a < y.a || (x.a == y.a && x.b < y.b);
        });
        std::vector<Interval> out;
        for (const Interval& i : iv_) {
            if (!out.empty() && i.a <= out.back().b)
                out.back().b = std::max(out.back().b, i.b);
            else
                out.push_back(i);
        }
        iv_ = std::move(out);
    }

    void check_symmetry() const {
        const double tol = 1e-9 * l_;
        const size_t n = iv_.size();
        for (size_t k = 0; k < n; ++k) {
            const Interval& i = iv_[k];
            const Interval& m = iv_[n - 1 - k];
            if (std::fabs((l_ - m.b) - i.a) > tol || std::fabs((l_ - m.a) - i.b) > tol)
                throw parameter_error("ElementarySet: set is not symmetric about length/2");
        }
    }

    double l_ = 1.0;
    std::vector<Interval> iv_;
};

/// Metric neighborhood E^t: every interval widened by t, clipped to [0, length].
inline ElementarySet neighborhood(const ElementarySet& e, double t) {
    if (t < 0.0 || !std::isfinite(t)) throw parameter_error("neighborhood: t must be >= 0");
    std::vector<Interval> iv;
    iv.reserve(e.intervals().size());
    for (const Interval& i : e.intervals()) iv.push_back({i.a - t, i.b + t});
    return ElementarySet(e.length(), std::move(iv));
}

enum class LatticeOp { Join, Meet, Complement };

inline ElementarySet lattice_join(const ElementarySet& a, const ElementarySet& b) {
    if (a.length() != b.length()) throw parameter_error("lattice_join: length mismatch");
    std::vector<Interval> iv = a.intervals();
    iv.insert(iv.end(), b.intervals().begin(), b.intervals().end());
    return ElementarySet(a.length(), std::move(iv));
}

inline ElementarySet lattice_meet(const ElementarySet& a, const ElementarySet& b) {
    if (a.length() != b.length()) throw parameter_error("lattice_meet: length mismatch");
    std::vector<Interval> iv;
    auto ai = a.intervals().begin(), ae = a.intervals().end();
    auto bi = b.intervals().begin(), be = b.intervals().end();
    while (ai != ae && bi != be) {
        double lo = std::max(ai->a, bi->a);
        double hi = std::min(ai->b, bi->b);
        if (lo < hi) iv.push_back({lo, hi});
        if (ai->b < bi->b)
            ++ai;
        else
            ++bi;
    }
    return ElementarySet(a.length(), std::move(iv));
}

inline ElementarySet lattice_complement(const ElementarySet& a) {
    std::vector<Interval> iv;
    double cursor = 0.0;
    for (const Interval& i : a.intervals()) {
        if (cursor < i.a) iv.push_back({cursor, i.a});
        cursor = i.b;
    }
    if (cursor < a.length()) iv.push_back({cursor, a.length()});
    return ElementarySet(a.length(), std::move(iv));
}

inline ElementarySet lattice_op(LatticeOp op, const ElementarySet& a, const ElementarySet* b = nullptr) {
    switch (op) {
        case LatticeOp::Join:
            if (!b) throw parameter_error("lattice_op: join needs two operands");
            return lattice_join(a, *b);
        case LatticeOp::Meet:
            if (!b) throw parameter_error("lattice_op: meet needs two operands");
            return lattice_meet(a, *b);
        case LatticeOp::Complement:
            return lattice_complement(a);
    }
    throw parameter_error("lattice_op: unknown operation");
}

/// Measure of the symmetric difference, m(A u B) - m(A n B).
inline double symdiff_measure(const ElementarySet& a, const ElementarySet& b) {
    return lattice_join(a, b).measure() - lattice_meet(a, b).measure();
}

/// Point of the atom family, parametrized by x in [0, length/2]; stands for
/// the node pair {x, length - x}.
struct Atom {
    double x = 0.0;
};

/// Metric neighborhood of the atom: ({x} u {length-x})^t.
inline ElementarySet atom_set(Atom a, double t, double length) {
    if (!(t > 0.0)) throw parameter_error("atom_set: radius must be positive");
    if (a.x < 0.0 || a.x > 0.5 * length)
        throw parameter_error("atom_set: atom position must lie in [0, length/2]");
    double y = length - a.x;
    return ElementarySet(length, {{a.x - t, a.x + t}, {y - t, y + t}});
}

/// Distance profile f(x) = dist(x, {x_a, length - x_a}) on the grid nodes.
/// Its sub-level set {f < t} equals atom_set(a, t, length).
inline GridFunction eikonal_profile(Atom a, const Grid& g) {
    if (a.x < 0.0 || a.x > 0.5 * g.length)
        throw parameter_error("eikonal_profile: atom position must lie in [0, length/2]");
    double y = g.length - a.x;
    return GridFunction::sample(
        g, [&](double x) { return std::min(std::fabs(x - a.x), std::fabs(x - y)); });
}

/// Intrinsic distance between atoms: |x1 - x2|.
inline double spectrum_distance(Atom a, Atom b) { return std::fabs(a.x - b.x); }

} // namespace slwave
