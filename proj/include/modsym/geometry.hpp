#pragma once

#include "modsym/bigint.hpp"
#include "modsym/group_element.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <utility>

namespace modsym {

/// Point of the hyperbolic upper half plane.
struct PointH {
    double x = 0.0;
    double y = 1.0;

    PointH() = default;
    PointH(double x_, double y_) : x(x_), y(y_) {
        if (!(y > 0.0)) throw std::invalid_argument("PointH: y must be positive");
    }

    bool operator==(const PointH& o) const { return x == o.x && y == o.y; }
};

/// Exact-rational point; doubles embed exactly (they are dyadic rationals).
struct RatPoint {
    Rational x;
    Rational y;  // > 0
};

inline Rational rational_from_double(double v) {
    if (!std::isfinite(v)) throw std::invalid_argument("rational_from_double: non-finite");
    int e = 0;
    const double m = std::frexp(v, &e);  // v = m * 2^e, |m| in [0.5, 1)
    const auto mant = static_cast<long long>(std::ldexp(m, 53));
    Rational r(mant);
    const int shift = e - 53;
    if (shift > 0)
        r *= Rational(Integer(1) << shift);
    else if (shift < 0)
        r /= Rational(Integer(1) << -shift);
    return r;
}

inline RatPoint rat_point(const PointH& z) {
    return {rational_from_double(z.x), rational_from_double(z.y)};
}

inline PointH to_point(const RatPoint& z) {
    return {to_double(z.x), to_double(z.y)};
}

// ---------------------------------------------------------------------------
// Moebius action
// ---------------------------------------------------------------------------

namespace detail {

// Entries converted to double after a common power-of-two downscale, so the
// projective action survives matrices far beyond double range.
inline std::array<double, 4> scaled_entries(const GroupElement& g) {
    const Integer m = norm(g);
    unsigned shift = 0;
    if (m >> 256 != 0) shift = static_cast<unsigned>(msb(m)) - 255;
    auto conv = [&](const Integer& v) {
        if (shift == 0) return v.convert_to<double>();
        return (v >> shift).convert_to<double>();
    };
    return {conv(g.a()), conv(g.b()), conv(g.c()), conv(g.d())};
}

}  // namespace detail

inline PointH mobius(const GroupElement& g, const PointH& z) {
    const auto [a, b, c, d] = detail::scaled_entries(g);
    const std::complex<double> zc(z.x, z.y);
    const std::complex<double> w = (a * zc + b) / (c * zc + d);
    // rounding can only pinch y at extreme norms; the true image has y > 0
    return {w.real(), std::max(w.imag(), std::numeric_limits<double>::min())};
}

inline RatPoint mobius(const GroupElement& g, const RatPoint& z) {
    const Rational u = z.x, v = z.y;
    const Rational cu_d = g.c() * u + g.d();
    const Rational cv = g.c() * v;
    const Rational den = cu_d * cu_d + cv * cv;  // |cz+d|^2 > 0
    const Rational xr = ((g.a() * u + g.b()) * cu_d + g.a() * v * cv) / den;
    const Rational yr = v / den;  // times det = 1
    return {xr, yr};
}

// ---------------------------------------------------------------------------
// Hyperbolic distance
// ---------------------------------------------------------------------------

/// d(z,w) = log((|z-conj w| + |z-w|) / (|z-conj w| - |z-w|)), evaluated through
/// the identity |z-conj w|^2 - |z-w|^2 = 4 Im z Im w so no cancellation occurs.
inline double distance(const PointH& z, const PointH& w) {
    if (z == w) return 0.0;
    const double dx = z.x - w.x;
    const double num = std::hypot(dx, z.y + w.y) + std::hypot(dx, z.y - w.y);
    return 2.0 * std::log(num) - std::log(4.0 * z.y * w.y);
}

/// cosh d(z,w) as an exact rational.
inline Rational cosh_distance(const RatPoint& z, const RatPoint& w) {
    const Rational dx = z.x - w.x, dy = z.y - w.y;
    return 1 + (dx * dx + dy * dy) / (2 * z.y * w.y);
}

inline double dist_from_cosh(const Rational& ch) {
    const Rational e = ch - 1;
    if (e == 0) return 0.0;
    if (e < 0) throw std::domain_error("dist_from_cosh: cosh < 1");
    if (numerator(e) >> 900 != 0 || denominator(e) >> 900 != 0) {
        const double le = log_rational(e);
        if (le > 600.0) return le + M_LN2;  // d = log(2 cosh) up to e^{-d}
        if (le < -600.0) return std::exp(0.5 * (le + M_LN2));
    }
    const double t = to_double(e);
    return std::log1p(t + std::sqrt(t * (t + 2.0)));
}

inline double distance(const RatPoint& z, const RatPoint& w) {
    return dist_from_cosh(cosh_distance(z, w));
}

/// d(gamma i, i) in closed form from the matrix entries; exact integer
/// arithmetic feeds a log-domain evaluation, so arbitrarily large entries work.
inline double distance_gamma_i(const GroupElement& g) {
    const Integer u = (g.b() - g.c()) * (g.b() - g.c()) + (g.a() + g.d()) * (g.a() + g.d());
    const Integer v = (g.b() + g.c()) * (g.b() + g.c()) + (g.a() - g.d()) * (g.a() - g.d());
    // u - v = 4ad - 4bc = 4, so u >= v and u >= 4
    const double lu = log_integer(u);
    if (v == 0) return lu - 2.0 * M_LN2;
    const double lv = log_integer(v);
    return lu + 2.0 * std::log1p(std::exp(0.5 * (lv - lu))) - 2.0 * M_LN2;
}

/// 2 log|gamma| + 3 log 2; always >= distance_gamma_i(gamma).
inline double log_norm_bound(const GroupElement& g) {
    return 2.0 * log_integer(norm(g)) + 3.0 * M_LN2;
}

// ---------------------------------------------------------------------------
// Real Moebius maps (scaling matrices sigma_c and friends)
// ---------------------------------------------------------------------------

struct RealMoebius {
    double a = 1, b = 0, c = 0, d = 1;  // det = 1

    PointH apply(const PointH& z) const {
        const std::complex<double> zc(z.x, z.y);
        const std::complex<double> w = (a * zc + b) / (c * zc + d);
        return {w.real(), w.imag()};
    }

    double im_after(const PointH& z) const {
        const double u = c * z.x + d;
        const double v = c * z.y;
        return z.y / (u * u + v * v);
    }

    RealMoebius inverse() const { return {d, -b, -c, a}; }

    RealMoebius operator*(const RealMoebius& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }
};

inline RealMoebius real_moebius(const GroupElement& g) {
    return {to_double(g.a()), to_double(g.b()), to_double(g.c()), to_double(g.d())};
}

// ---------------------------------------------------------------------------
// Exact segment geometry (geodesic segments against horoballs)
// ---------------------------------------------------------------------------

/// True iff max Im over the closed geodesic segment [z,w] exceeds height h.
inline bool segment_apex_exceeds(const RatPoint& z, const RatPoint& w, const Rational& h) {
    if (h <= 0) return true;
    const Rational ymax = z.y > w.y ? z.y : w.y;
    if (z.x == w.x) return ymax > h;
    // circle center on the real axis equidistant from both points
    const Rational xc =
        ((z.x * z.x + z.y * z.y) - (w.x * w.x + w.y * w.y)) / (2 * (z.x - w.x));
    const Rational lo = z.x < w.x ? z.x : w.x;
    const Rational hi = z.x < w.x ? w.x : z.x;
    if (xc < lo || xc > hi) return ymax > h;
    const Rational r2 = (z.x - xc) * (z.x - xc) + z.y * z.y;  // apex = radius
    return r2 > h * h;
}

/// True iff the closed segment [z,w] meets the open horoball tangent at the
/// real point m with Euclidean diameter diam. Tested by inverting m to
/// infinity (an isometry), which turns the ball into {Im > 1/diam}.
inline bool segment_enters_disk(const RatPoint& z, const RatPoint& w, const Rational& m,
                                const Rational& diam) {
    auto invert = [&m](const RatPoint& p) -> RatPoint {
        const Rational dx = p.x - m;
        const Rational s = dx * dx + p.y * p.y;  // > 0, p interior
        return {-dx / s, p.y / s};
    };
    return segment_apex_exceeds(invert(z), invert(w), 1 / diam);
}

/// True iff z lies inside the open horoball at m of diameter diam.
inline bool point_in_disk(const RatPoint& z, const Rational& m, const Rational& diam) {
    if (z.y >= diam) return false;
    const Rational dx = z.x - m;
    return dx * dx < z.y * (diam - z.y);
}

/// Geodesic through z0 at angle phi (measured in the tangent space at z0 via
/// the isometry sending i to z0), at signed arclength t from z0.
inline PointH geodesic_point(const PointH& z0, double phi, double t) {
    const double sy = std::sqrt(z0.y);
    const RealMoebius affine{sy, z0.x / sy, 0.0, 1.0 / sy};  // i -> z0
    const RealMoebius rot{std::cos(phi), std::sin(phi), -std::sin(phi), std::cos(phi)};
    const RealMoebius m = affine * rot;
    return m.apply(PointH(0.0, std::exp(t)));
}

}  // namespace modsym
