#pragma once

#include "modsym/bigint.hpp"
#include "modsym/errors.hpp"

#include <compare>
#include <cstdlib>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace modsym {

/// Element of PSL2(Z): an exact integer matrix (a b; c d) with ad - bc = 1,
/// stored with the canonical sign representative c > 0, or c = 0 and a > 0.
class GroupElement {
public:
    GroupElement() : a_(1), b_(0), c_(0), d_(1) {}

    GroupElement(Integer a, Integer b, Integer c, Integer d)
        : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)) {
        if (a_ * d_ - b_ * c_ != 1)
            throw std::invalid_argument("GroupElement: determinant must be 1");
        normalize();
    }

    const Integer& a() const { return a_; }
    const Integer& b() const { return b_; }
    const Integer& c() const { return c_; }
    const Integer& d() const { return d_; }

    static GroupElement identity() { return {}; }
    // The two standard generators of PSL2(Z).
    static GroupElement gen_S() { return {0, -1, 1, 0}; }
    static GroupElement gen_T() { return {1, 1, 0, 1}; }
    static GroupElement translation(const Integer& k) { return {1, k, 0, 1}; }

    GroupElement operator*(const GroupElement& o) const {
        return {a_ * o.a_ + b_ * o.c_, a_ * o.b_ + b_ * o.d_,
                c_ * o.a_ + d_ * o.c_, c_ * o.b_ + d_ * o.d_};
    }

    GroupElement inverse() const { return {d_, -b_, -c_, a_}; }

    GroupElement pow(long k) const {
        if (k < 0) return inverse().pow(-k);
        GroupElement acc;  // identity
        GroupElement base = *this;
        while (k > 0) {
            if (k & 1) acc = acc * base;
            base = base * base;
            k >>= 1;
        }
        return acc;
    }

    bool operator==(const GroupElement& o) const {
        return a_ == o.a_ && b_ == o.b_ && c_ == o.c_ && d_ == o.d_;
    }

    bool operator<(const GroupElement& o) const {
        if (a_ != o.a_) return a_ < o.a_;
        if (b_ != o.b_) return b_ < o.b_;
        if (c_ != o.c_) return c_ < o.c_;
        return d_ < o.d_;
    }

    bool is_identity() const { return a_ == 1 && b_ == 0 && c_ == 0 && d_ == 1; }

    Integer trace_abs() const { return abs(a_ + d_); }

    std::string str() const {
        std::ostringstream os;
        os << "(" << a_ << " " << b_ << "; " << c_ << " " << d_ << ")";
        return os.str();
    }

    friend std::ostream& operator<<(std::ostream& os, const GroupElement& g) {
        return os << g.str();
    }

private:
    void normalize() {
        if (c_ < 0 || (c_ == 0 && a_ < 0)) {
            a_ = -a_; b_ = -b_; c_ = -c_; d_ = -d_;
        }
    }

    Integer a_, b_, c_, d_;
};

enum class TraceClass { Identity, Parabolic, Elliptic, Hyperbolic };

inline Integer norm(const GroupElement& g) {
    Integer m = abs(g.a());
    if (abs(g.b()) > m) m = abs(g.b());
    if (abs(g.c()) > m) m = abs(g.c());
    if (abs(g.d()) > m) m = abs(g.d());
    return m;
}

inline TraceClass classify(const GroupElement& g) {
    if (g.is_identity()) return TraceClass::Identity;
    const Integer t = g.trace_abs();
    if (t == 2) return TraceClass::Parabolic;
    if (t < 2) return TraceClass::Elliptic;
    return TraceClass::Hyperbolic;
}

inline bool in_gamma0(const GroupElement& g, long level) {
    return g.c() % level == 0;
}

inline const char* trace_class_name(TraceClass t) {
    switch (t) {
        case TraceClass::Identity: return "identity";
        case TraceClass::Parabolic: return "parabolic";
        case TraceClass::Elliptic: return "elliptic";
        case TraceClass::Hyperbolic: return "hyperbolic";
    }
    return "?";
}

/// All canonical elements of Gamma_0(level) with norm <= bound, enumerated by
/// bottom row (c, d) and the line of determinant-1 completions above it.
/// Deterministic order: c ascending, d ascending, top row ascending.
inline std::vector<GroupElement> norm_ball(long level, long bound,
                                           std::size_t max_count = 50000000) {
    std::vector<GroupElement> out;
    auto push = [&](GroupElement g) {
        if (out.size() >= max_count)
            throw ResourceError("norm_ball: element cap " + std::to_string(max_count) +
                                " exceeded");
        out.push_back(std::move(g));
    };
    for (long b = -bound; b <= bound; ++b) push(GroupElement(1, b, 0, 1));
    for (long c = level; c <= bound; c += level) {
        for (long d = -bound; d <= bound; ++d) {
            if (std::gcd(c, std::abs(d)) != 1) continue;
            // top rows: a = a0 + t*c with a0*d = 1 mod c, b = (a*d - 1)/c
            const Integer a0 = fmod_pos(ext_gcd(d, c).x, c);
            for (Integer a = a0 - fdiv(a0 + bound, c) * c; a <= bound; a += c) {
                const Integer bb = (a * d - 1) / c;
                if (abs(bb) > bound) continue;
                push(GroupElement(a, bb, c, d));
            }
        }
    }
    return out;
}

}  // namespace modsym
