#pragma once

// Exact search for the horoballs crossed by a geodesic segment.
//
// Every horoball of the truncation is tangent at a cusp p/q with Euclidean
// diameter 1/(q^2 w T). A ball touched by the complete geodesic through z,w
// satisfies |m - xi+||m - xi-| <= rho * diam at the feet xi of the geodesic;
// with w*T >= 3/2 and one endpoint at height >= 3/4 this forces
// |m - xi| < 1/(2 q^2) for q >= 2, so by Legendre's theorem m is a continued
// fraction convergent of a foot. Denominator-1 candidates are the integers
// adjacent to the feet. Feet are rationals or quadratic surds over Q, so both
// expansions run exactly on integers, and each surviving candidate is
// certified by an exact rational segment-versus-disk test. No floating point
// is involved anywhere, hence no false verdicts.

#include "modsym/bigint.hpp"
#include "modsym/cusps.hpp"
#include "modsym/errors.hpp"
#include "modsym/geometry.hpp"

#include <functional>
#include <set>
#include <utility>
#include <vector>

namespace modsym::detail {

struct FootCandidate {
    Integer p, q;    // q >= 1, gcd(p,q) = 1
    Integer q_next;  // next convergent denominator; 0 when unknown/last
};

inline constexpr std::size_t kCfIterationCap = 20000;

// Convergents of a rational, both tail expansions (Legendre needs the
// secondary [.., a_n - 1, 1] form's extra convergent when the target is
// rational).
inline void rational_convergents(const Rational& x, const Integer& q_cap,
                                 std::vector<FootCandidate>& out) {
    Integer num = numerator(x), den = denominator(x);
    const std::size_t first = out.size();
    Integer p0 = 0, q0 = 1, p1 = 1, q1 = 0;  // (p_{k-2}, p_{k-1})
    while (den != 0) {
        const Integer a = fdiv(num, den);
        const Integer p2 = a * p1 + p0, q2 = a * q1 + q0;
        const Integer r = num - a * den;
        num = den;
        den = r;
        if (out.size() > first) out.back().q_next = q2;
        if (q2 > q_cap) return;
        out.push_back({p2, q2, 0});
        if (out.size() - first > kCfIterationCap)
            throw ResourceError("horoball search: continued fraction cap exceeded");
        if (den == 0 && q1 > 0) {
            // final convergent of the secondary expansion [.., a_n - 1, 1];
            // its distance to x is exactly 1/(q_s q2)
            const Integer ps = p2 - p1, qs = q2 - q1;
            if (qs >= 1 && qs <= q_cap) out.push_back({ps, qs, q2});
        }
        p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    }
}

// sign(sqrt(n) - x) for n >= 0 non-square contexts; exact.
inline int cmp_sqrt(const Integer& n, const Integer& x) {
    if (x < 0) return 1;
    const Integer xx = x * x;
    if (n > xx) return 1;
    if (n < xx) return -1;
    return 0;
}

// floor((P + sqrt(Nh)) / Q), Q != 0, exact.
inline Integer floor_surd(const Integer& P, const Integer& Nh, const Integer& Q) {
    Integer a = fdiv(P + sqrt(Nh), Q);  // within 2 of the answer
    auto alpha_minus = [&](const Integer& t) {
        // sign of (P + sqrt(Nh))/Q - t
        const int c = cmp_sqrt(Nh, t * Q - P);
        return Q > 0 ? c : -c;
    };
    while (alpha_minus(a) < 0) --a;
    while (alpha_minus(a + 1) >= 0) ++a;
    return a;
}

// Convergents of (P + sqrt(Nh))/Q with Nh non-square.
inline void surd_convergents(Integer P, Integer Nh, Integer Q, const Integer& q_cap,
                             std::vector<FootCandidate>& out) {
    if ((Nh - P * P) % Q != 0) {  // normalize so Q | Nh - P^2
        P *= abs(Q);
        Nh *= Q * Q;
        Q *= abs(Q);
    }
    Integer p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    const std::size_t first = out.size();
    for (std::size_t it = 0; it < kCfIterationCap; ++it) {
        const Integer a = floor_surd(P, Nh, Q);
        const Integer p2 = a * p1 + p0, q2 = a * q1 + q0;
        if (out.size() > first) out.back().q_next = q2;
        if (q2 > q_cap) return;
        out.push_back({p2, q2, 0});
        p0 = p1; q0 = q1; p1 = p2; q1 = q2;
        P = a * Q - P;
        Q = (Nh - P * P) / Q;
        if (Q == 0) throw std::logic_error("surd_convergents: square discriminant");
    }
    throw ResourceError("horoball search: surd expansion cap exceeded");
}

// Foot data of the complete geodesic through z and w.
struct Feet {
    bool vertical;
    Rational x;        // vertical: the common x
    Rational center;   // otherwise: circle center and squared radius
    Rational radius2;
};

inline Feet geodesic_feet(const RatPoint& z, const RatPoint& w) {
    if (z.x == w.x) return {true, z.x, 0, 0};
    const Rational xc =
        ((z.x * z.x + z.y * z.y) - (w.x * w.x + w.y * w.y)) / (2 * (z.x - w.x));
    const Rational r2 = (z.x - xc) * (z.x - xc) + z.y * z.y;
    return {false, 0, xc, r2};
}

// All cusp candidates that can carry a horoball touched by the segment:
// integers adjacent to the feet plus CF convergents of the feet up to q_cap.
inline std::vector<FootCandidate> foot_candidates(const RatPoint& z, const RatPoint& w,
                                                  const Integer& q_cap) {
    std::vector<FootCandidate> cands;
    const Feet feet = geodesic_feet(z, w);
    auto add_integer = [&cands](const Integer& n) { cands.push_back({n, 1, 0}); };
    if (feet.vertical) {
        const Integer f = floor_rational(feet.x);
        add_integer(f);
        add_integer(f + 1);
        rational_convergents(feet.x, q_cap, cands);
        return cands;
    }
    // xi(+-) = (P +- sqrt(Nh)) / Q over a common integer form
    const Integer XN = numerator(feet.center), XD = denominator(feet.center);
    const Integer RN = numerator(feet.radius2), RD = denominator(feet.radius2);
    const Integer P = XN * RD;
    const Integer Nh = RN * RD * XD * XD;
    const Integer Q = XD * RD;
    const Integer s = sqrt(Nh);
    if (s * s == Nh) {
        // rational feet
        for (int sign : {1, -1}) {
            const Rational xi = Rational(P + sign * s, Q);
            const Integer f = floor_rational(xi);
            add_integer(f);
            add_integer(f + 1);
            rational_convergents(xi, q_cap, cands);
        }
    } else {
        for (int sign : {1, -1}) {
            const Integer f = floor_surd(sign > 0 ? P : -P, Nh, sign > 0 ? Q : -Q);
            add_integer(f);
            add_integer(f + 1);
            surd_convergents(sign > 0 ? P : -P, Nh, sign > 0 ? Q : -Q, q_cap, cands);
        }
    }
    return cands;
}

/// Walks every horoball of the truncation crossed by the segment [z,w];
/// fn(class_index, cusp) returns false to stop early. Returns false iff the
/// walk was stopped. Requires max(Im z, Im w) >= 3/4 (see file comment).
inline bool for_each_crossing(const RatPoint& z, const RatPoint& w,
                              const TruncationParams& trunc,
                              const std::function<bool(std::size_t, const Cusp&)>& fn) {
    const Rational three_quarters(3, 4);
    if (z.y < three_quarters && w.y < three_quarters)
        throw std::invalid_argument(
            "horoball search: one segment endpoint must have height >= 3/4");
    const Rational y_min = z.y < w.y ? z.y : w.y;

    // infinity-cusp horoballs of the classes themselves
    for (std::size_t i = 0; i < trunc.classes.size(); ++i) {
        const CuspClass& cls = trunc.classes[i];
        if (!cls.rep.is_infinity()) continue;
        if (segment_apex_exceeds(z, w, Rational(cls.width) * trunc.T_exact))
            if (!fn(i, Cusp::infinity())) return false;
    }

    // global denominator cap: a crossed ball needs diam > y_min, w >= 1
    const Rational inv_bound = 1 / (trunc.T_exact * y_min);
    if (inv_bound <= 1) return true;
    const Integer q_cap = sqrt(numerator(inv_bound) / denominator(inv_bound)) + 1;

    std::vector<FootCandidate> cands = foot_candidates(z, w, q_cap);
    std::set<std::pair<Integer, Integer>> seen;
    for (const FootCandidate& cand : cands) {
        if (!seen.insert({cand.p, cand.q}).second) continue;
        // cheap exclusion: convergent quality bounds the distance to the foot
        // from below by 1/(q(q + q_next)); a touched ball needs that <= diam
        for (std::size_t i = 0; i < trunc.classes.size(); ++i) {
            const CuspClass& cls = trunc.classes[i];
            const Rational wt = Rational(cls.width) * trunc.T_exact;
            // diam > y_min
            if (cand.q * cand.q * wt * y_min >= 1) continue;
            if (cand.q_next != 0) {
                const Rational gap_lb(1, cand.q * (cand.q + cand.q_next));
                if (gap_lb * cand.q * cand.q * wt > 1) continue;
            }
            const Cusp cusp(cand.p, cand.q);
            if (!cusp_equivalent(cls.rep, cusp, trunc.level)) continue;
            const Rational diam = 1 / (Rational(cand.q * cand.q) * wt);
            if (!segment_enters_disk(z, w, Rational(cand.p, cand.q), diam)) continue;
            if (!fn(i, cusp)) return false;
        }
    }
    return true;
}

/// True iff z lies in no open horoball of the truncation (exact).
inline bool point_below_horoballs(const RatPoint& z, const TruncationParams& trunc) {
    std::vector<FootCandidate> cands;
    bool cands_ready = false;
    for (std::size_t i = 0; i < trunc.classes.size(); ++i) {
        const CuspClass& cls = trunc.classes[i];
        const Rational wt = Rational(cls.width) * trunc.T_exact;
        if (cls.rep.is_infinity() && z.y > wt) return false;
        const Rational inv_bound = 1 / (wt * z.y);
        if (inv_bound <= 1) continue;
        if (!cands_ready) {
            const Integer f = floor_rational(z.x);
            cands.push_back({f, 1, 0});
            cands.push_back({f + 1, 1, 0});
            const Rational global_bound = 1 / (trunc.T_exact * z.y);
            rational_convergents(
                z.x, sqrt(numerator(global_bound) / denominator(global_bound)) + 1, cands);
            cands_ready = true;
        }
        for (const FootCandidate& cand : cands) {
            if (cand.q * cand.q * wt * z.y >= 1) continue;
            const Rational diam = 1 / (Rational(cand.q * cand.q) * wt);
            if (!point_in_disk(z, Rational(cand.p, cand.q), diam)) continue;
            if (cusp_equivalent(cls.rep, Cusp(cand.p, cand.q), trunc.level)) return false;
        }
    }
    return true;
}

}  // namespace modsym::detail
