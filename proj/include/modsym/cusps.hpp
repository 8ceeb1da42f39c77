#pragma once

#include "modsym/bigint.hpp"
#include "modsym/errors.hpp"
#include "modsym/geometry.hpp"
#include "modsym/group_element.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace modsym {

/// Cusp of Gamma_0(N): p/q in lowest terms with q >= 0; infinity is 1/0.
struct Cusp {
    Integer p = 1;
    Integer q = 0;

    Cusp() = default;

    Cusp(Integer p_, Integer q_) : p(std::move(p_)), q(std::move(q_)) {
        if (p == 0 && q == 0) throw std::invalid_argument("Cusp: (0,0) is not a cusp");
        const Integer g = gcd(p, q);
        p /= g;
        q /= g;
        if (q < 0) { p = -p; q = -q; }
        if (q == 0) p = 1;
    }

    static Cusp infinity() { return {}; }
    bool is_infinity() const { return q == 0; }

    bool operator==(const Cusp& o) const { return p == o.p && q == o.q; }

    std::string str() const { return is_infinity() ? "oo" : p.str() + "/" + q.str(); }
};

inline Cusp apply(const GroupElement& g, const Cusp& c) {
    return {g.a() * c.p + g.b() * c.q, g.c() * c.p + g.d() * c.q};
}

/// Integer matrix sending infinity to c (first column p, q).
inline GroupElement cusp_scaling_base(const Cusp& c) {
    const ExtGcd e = ext_gcd(c.p, c.q);  // p*x + q*y = 1
    return {c.p, -e.y, c.q, e.x};
}

/// Width of c in Gamma_0(N): minimal h >= 1 with g_c T^h g_c^{-1} in the
/// group; closed form N / gcd(q^2, N).
inline long cusp_width(const Cusp& c, long level) {
    const Integer g = gcd(c.q * c.q, Integer(level));
    return (Integer(level) / g).convert_to<long>();
}

/// Cusp class data: representative, width, integer scaling base g_rep, the
/// real scaling matrix sigma = g_rep diag(sqrt w, 1/sqrt w), and the parabolic
/// stabilizer generator p_stab = sigma T sigma^{-1} (an integer matrix).
struct CuspClass {
    Cusp rep;
    long width = 1;
    GroupElement g_rep;
    RealMoebius sigma;
    GroupElement p_stab;
};

/// p_stab^k without matrix powering: g_rep (1  w k; 0 1) g_rep^{-1}.
inline GroupElement stabilizer_power(const CuspClass& cls, const Integer& k) {
    return cls.g_rep * GroupElement::translation(Integer(cls.width) * k) *
           cls.g_rep.inverse();
}

namespace detail {

inline Integer mod_inverse(const Integer& a, const Integer& m) {
    const ExtGcd e = ext_gcd(a, m);
    if (e.g != 1) throw std::logic_error("mod_inverse: arguments not coprime");
    return fmod_pos(e.x, m);
}

}  // namespace detail

/// Element gamma of Gamma_0(N) with gamma * from = to, if the cusps are
/// equivalent. Built as g_to T^k g_from^{-1}, where k solves the linear
/// congruence that places the product in Gamma_0(N); solvability of that
/// congruence is exactly the classical equivalence criterion.
inline std::optional<GroupElement> cusp_mapping(const Cusp& from, const Cusp& to, long level) {
    const GroupElement g1 = cusp_scaling_base(from), g2 = cusp_scaling_base(to);
    const Integer n(level);
    // lower-left of g2 T^k g1^{-1} is q2 s1 - q1 s2 - q1 q2 k  (s_i = g_i.d())
    const Integer A = fmod_pos(from.q * to.q, n);
    const Integer B = fmod_pos(to.q * g1.d() - from.q * g2.d(), n);
    const Integer g = gcd(A, n);  // in [1, n]
    if (B % g != 0) return std::nullopt;
    const Integer m = n / g;
    Integer k = m == 1 ? Integer(0)
                       : fmod_pos(B / g * detail::mod_inverse(fmod_pos(A / g, m), m), m);
    if (k > m / 2) k -= m;  // smallest-magnitude representative
    return g2 * GroupElement::translation(k) * g1.inverse();
}

inline bool cusp_equivalent(const Cusp& a, const Cusp& b, long level) {
    return cusp_mapping(a, b, level).has_value();
}

inline long euler_phi(long n) {
    long r = n;
    for (long p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            r -= r / p;
            while (n % p == 0) n /= p;
        }
    }
    if (n > 1) r -= r / n;
    return r;
}

inline Integer cusp_class_count(long n) {
    Integer c = 0;
    for (long d = 1; d <= n; ++d)
        if (n % d == 0) c += euler_phi(std::gcd(d, n / d));
    return c;
}

namespace detail {

inline CuspClass make_class(const Cusp& rep, long level) {
    CuspClass cls;
    cls.rep = rep;
    cls.width = cusp_width(rep, level);
    cls.g_rep = cusp_scaling_base(rep);
    const double sw = std::sqrt(static_cast<double>(cls.width));
    cls.sigma = real_moebius(cls.g_rep) * RealMoebius{sw, 0.0, 0.0, 1.0 / sw};
    cls.p_stab = stabilizer_power(cls, 1);
    if (!in_gamma0(cls.p_stab, level) || classify(cls.p_stab) != TraceClass::Parabolic)
        throw std::logic_error("cusp class: stabilizer generator invalid");
    if (!(apply(cls.p_stab, rep) == rep))
        throw std::logic_error("cusp class: stabilizer does not fix the cusp");
    // cross-check the closed-form width against the minimal-h search
    if (level <= 50) {
        const Integer q2 = rep.q * rep.q;
        for (long h = 1; h < cls.width; ++h)
            if (q2 * h % level == 0)
                throw std::logic_error("cusp class: width not minimal");
    }
    return cls;
}

}  // namespace detail

/// Pairwise inequivalent cusp representatives of Gamma_0(N): one divisor class
/// a/d per divisor d | N and residue a mod gcd(d, N/d), with the d = N class
/// represented by infinity. Count is sum over d|N of phi(gcd(d, N/d)).
inline std::vector<CuspClass> cusp_classes(long level) {
    if (level < 1) throw std::invalid_argument("cusp_classes: level must be >= 1");
    std::vector<CuspClass> out;
    std::vector<long> divisors;
    for (long d = 1; d <= level; ++d)
        if (level % d == 0) divisors.push_back(d);
    for (auto it = divisors.rbegin(); it != divisors.rend(); ++it) {
        const long d = *it;
        const long g = std::gcd(d, level / d);
        const long want = euler_phi(g);
        std::vector<bool> used(g, false);
        long found = 0;
        for (long a = 0; found < want; ++a) {
            if (std::gcd(a, d) != 1) continue;
            if (used[a % g]) continue;
            used[a % g] = true;
            ++found;
            // the divisor-N class is the class of infinity (1/N ~ oo)
            const Cusp rep = d == level ? Cusp::infinity() : Cusp(a, d);
            out.push_back(detail::make_class(rep, level));
        }
    }
    for (std::size_t i = 0; i < out.size(); ++i)
        for (std::size_t j = i + 1; j < out.size(); ++j)
            if (cusp_equivalent(out[i].rep, out[j].rep, level))
                throw std::logic_error("cusp_classes: representatives not inequivalent");
    if (Integer(out.size()) != cusp_class_count(level))
        throw std::logic_error("cusp_classes: count disagrees with divisor formula");
    return out;
}

/// Class index of c plus gamma in Gamma_0(N) with gamma * rep = c. Arbitrary
/// cusps inherit their scaling as gamma * sigma(rep), which makes the
/// compatibility relation hold by construction.
inline std::pair<std::size_t, GroupElement> classify_cusp(const Cusp& c, long level,
                                                          const std::vector<CuspClass>& classes) {
    for (std::size_t i = 0; i < classes.size(); ++i) {
        if (auto m = cusp_mapping(classes[i].rep, c, level)) return {i, *m};
    }
    throw std::logic_error("classify_cusp: cusp matches no class");
}

// ---------------------------------------------------------------------------
// Truncation geometry
// ---------------------------------------------------------------------------

namespace detail {

struct Horoball {
    bool at_infinity;
    Rational m;     // tangency point (rational reps)
    Rational size;  // diameter, or the height cut for the infinity cusp
};

inline Horoball class_horoball(const CuspClass& cls, const Rational& T) {
    if (cls.rep.is_infinity()) return {true, 0, Rational(cls.width) * T};
    const Rational m(cls.rep.p, cls.rep.q);
    return {false, m, 1 / (Rational(cls.rep.q * cls.rep.q) * cls.width * T)};
}

inline bool horoballs_disjoint(const Horoball& a, const Horoball& b) {
    if (a.at_infinity && b.at_infinity) return false;
    if (a.at_infinity) return b.size <= a.size;
    if (b.at_infinity) return a.size <= b.size;
    const Rational dm = a.m - b.m;
    return dm * dm >= a.size * b.size;
}

}  // namespace detail

/// Truncation height T plus the cusp classes it applies to. T lives on the
/// choose_truncation grid (>= 1.5); the horoball-crossing search relies on
/// w*T >= 1.5 for its continued-fraction completeness argument.
struct TruncationParams {
    double T = 4.0;
    Rational T_exact;
    long level = 1;
    std::vector<CuspClass> classes;

    TruncationParams(double T_, long level_, std::vector<CuspClass> classes_)
        : T(T_), T_exact(rational_from_double(T_)), level(level_), classes(std::move(classes_)) {
        if (!(T >= 1.5))
            throw std::invalid_argument("TruncationParams: T must be >= 1.5");
        for (std::size_t i = 0; i < classes.size(); ++i)
            for (std::size_t j = i + 1; j < classes.size(); ++j)
                if (!detail::horoballs_disjoint(detail::class_horoball(classes[i], T_exact),
                                                detail::class_horoball(classes[j], T_exact)))
                    throw std::invalid_argument("TruncationParams: class horoballs overlap");
    }
};

/// True iff the geodesic segment [z,w] meets the open T-horoball of the class
/// representative (the class's own horoball only, not its translates).
inline bool enters_horoball(const PointH& z, const PointH& w, const CuspClass& cls, double T) {
    if (!(T > 0)) throw std::invalid_argument("enters_horoball: T must be positive");
    const RatPoint zr = rat_point(z), wr = rat_point(w);
    const detail::Horoball h = detail::class_horoball(cls, rational_from_double(T));
    if (h.at_infinity) return segment_apex_exceeds(zr, wr, h.size);
    return segment_enters_disk(zr, wr, h.m, h.size);
}

/// Smallest grid T in {1.5, 2, 3, 4, ...} with pairwise disjoint class
/// horoballs and 2*Im(sigma_c^{-1} z0) <= T for every class.
inline TruncationParams choose_truncation(long level, const PointH& z0,
                                          std::vector<CuspClass> classes = {}) {
    if (classes.empty()) classes = cusp_classes(level);
    const RatPoint z0r = rat_point(z0);

    // z0 must not be an elliptic fixed point (scan small-norm elliptics)
    for (const GroupElement& g : norm_ball(level, 20)) {
        if (classify(g) != TraceClass::Elliptic) continue;
        const RatPoint img = mobius(g, z0r);
        if (img.x == z0r.x && img.y == z0r.y)
            throw std::invalid_argument("choose_truncation: z0 is an elliptic fixed point of " +
                                        g.str());
    }

    std::vector<Rational> heights;  // Im(sigma_c^{-1} z0), exact
    for (const CuspClass& cls : classes)
        heights.push_back(mobius(cls.g_rep.inverse(), z0r).y / cls.width);

    for (double T = 1.5; T <= 1048576.0; T = (T < 2.0 ? 2.0 : T + 1.0)) {
        const Rational Tr = rational_from_double(T);
        bool ok = true;
        for (const Rational& h : heights)
            if (2 * h > Tr) { ok = false; break; }
        if (!ok) continue;
        bool disjoint = true;
        for (std::size_t i = 0; i < classes.size() && disjoint; ++i)
            for (std::size_t j = i + 1; j < classes.size() && disjoint; ++j)
                disjoint = detail::horoballs_disjoint(detail::class_horoball(classes[i], Tr),
                                                      detail::class_horoball(classes[j], Tr));
        if (disjoint) return {T, level, std::move(classes)};
    }
    throw std::logic_error("choose_truncation: no admissible T on the grid");
}

}  // namespace modsym
