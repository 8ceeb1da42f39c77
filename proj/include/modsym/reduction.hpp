#pragma once

#include "modsym/bigint.hpp"
#include "modsym/cusps.hpp"
#include "modsym/errors.hpp"
#include "modsym/geometry.hpp"
#include "modsym/group_element.hpp"
#include "modsym/horoball_search.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace modsym {

struct ReductionResult {
    GroupElement gamma_s;
    std::vector<GroupElement> parabolics;  // applied left to right: p1 first
    std::size_t steps = 0;
    std::vector<double> distance_trace;  // d(z0, p_k...p_1 gamma z0), initial first
};

/// Raised when the step cap is hit or no candidate makes progress while the
/// geodesic still crosses a horoball; carries the best iterate reached.
struct ReductionCapError : ResourceError {
    ReductionCapError(const std::string& what, ReductionResult best_)
        : ResourceError(what), best(std::move(best_)) {}
    ReductionResult best;
};

/// True iff the geodesic segment [z,w] stays out of every open horoball of the
/// truncation (class horoballs and all their group translates); when true, the
/// truncated distance equals the unrestricted one.
inline bool geodesic_in_truncation(const RatPoint& z, const RatPoint& w,
                                   const TruncationParams& trunc) {
    return detail::for_each_crossing(z, w, trunc,
                                     [](std::size_t, const Cusp&) { return false; });
}

inline bool geodesic_in_truncation(const PointH& z, const PointH& w,
                                   const TruncationParams& trunc) {
    return geodesic_in_truncation(rat_point(z), rat_point(w), trunc);
}

struct ReduceOptions {
    long power_window = 8;        // stabilizer exponents +-1..+-K always tried
    std::size_t max_steps = 10000;
    double min_improvement = 1e-12;
};

namespace detail {

// Candidate parabolic at one cusp: distances to z0 after applying stabilizer
// powers are evaluated in sigma^-1 coordinates, where the stabilizer acts as
// translation by 1 and both the integer matrix and the width scaling are
// isometries. Everything is exact rational.
struct CuspCandidate {
    GroupElement base;  // mapping * g_rep; first column (A, C)
    long width;
    Integer best_k;
    Rational best_cosh;
};

inline std::optional<CuspCandidate> best_power_at(const GroupElement& base, long width,
                                                  const RatPoint& z0, const RatPoint& target,
                                                  long power_window) {
    const GroupElement inv = base.inverse();
    RatPoint zeta = mobius(inv, z0);
    RatPoint omega = mobius(inv, target);
    const Rational w(width);
    zeta.x /= w; zeta.y /= w;
    omega.x /= w; omega.y /= w;
    const Rational dy2 = (zeta.y - omega.y) * (zeta.y - omega.y);
    const Rational two_yy = 2 * zeta.y * omega.y;
    const Rational dx = zeta.x - omega.x;
    auto cosh_for = [&](const Integer& k) {
        const Rational off = dx - k;  // omega + k vs zeta
        return 1 + (off * off + dy2) / two_yy;
    };
    const Integer ideal = round_rational(dx);
    std::optional<CuspCandidate> best;
    auto consider = [&](const Integer& k) {
        if (k == 0) return;
        const Rational c = cosh_for(k);
        if (!best || c < best->best_cosh) best = CuspCandidate{base, width, k, c};
    };
    for (long a = 1; a <= power_window; ++a) {
        consider(Integer(a));
        consider(Integer(-a));
    }
    consider(ideal - 1);
    consider(ideal);
    consider(ideal + 1);
    return best;
}

// k-th stabilizer power at the cusp base(oo): base (1 m; 0 1) base^-1 with
// m = width * k, expanded so only the first column of base enters.
inline GroupElement stabilizer_matrix(const GroupElement& base, long width, const Integer& k) {
    const Integer m = Integer(width) * k;
    const Integer &A = base.a(), &C = base.c();
    return {1 - m * A * C, m * A * A, -m * C * C, 1 + m * A * C};
}

}  // namespace detail

/// Lemma-1 reduction: left-multiplies by parabolic elements, each strictly
/// decreasing d(z0, . z0), until the geodesic from z0 to gamma_s z0 crosses no
/// horoball of the truncation and no candidate improves further.
inline ReductionResult reduce(const GroupElement& gamma, const TruncationParams& trunc,
                              const PointH& z0, const ReduceOptions& opts = {}) {
    if (!in_gamma0(gamma, trunc.level))
        throw MembershipError("reduce: element not in Gamma_0(" +
                              std::to_string(trunc.level) + ")");
    const RatPoint z0r = rat_point(z0);
    if (z0r.y < Rational(3, 4))
        throw std::invalid_argument("reduce: base point must have height >= 3/4");
    if (!detail::point_below_horoballs(z0r, trunc))
        throw std::invalid_argument("reduce: base point lies inside a horoball");

    ReductionResult res;
    res.gamma_s = gamma;
    RatPoint target = mobius(gamma, z0r);
    Rational cosh_cur = cosh_distance(z0r, target);
    double d_cur = dist_from_cosh(cosh_cur);
    res.distance_trace.push_back(d_cur);

    for (std::size_t step = 0; step <= opts.max_steps; ++step) {
        std::vector<std::pair<std::size_t, Cusp>> crossings;
        detail::for_each_crossing(z0r, target, trunc,
                                  [&crossings](std::size_t i, const Cusp& c) {
                                      crossings.emplace_back(i, c);
                                      return true;
                                  });

        std::optional<detail::CuspCandidate> best;
        auto consider = [&](const std::optional<detail::CuspCandidate>& cand) {
            if (cand && (!best || cand->best_cosh < best->best_cosh)) best = cand;
        };
        for (const CuspClass& cls : trunc.classes)
            consider(detail::best_power_at(cls.g_rep, cls.width, z0r, target,
                                           opts.power_window));
        for (const auto& [idx, cusp] : crossings) {
            const CuspClass& cls = trunc.classes[idx];
            if (cusp == cls.rep) continue;  // already covered above
            const auto mapping = cusp_mapping(cls.rep, cusp, trunc.level);
            if (!mapping) throw std::logic_error("reduce: crossing cusp not in its class");
            consider(detail::best_power_at(*mapping * cls.g_rep, cls.width, z0r, target,
                                           opts.power_window));
        }

        const double d_best = best ? dist_from_cosh(best->best_cosh)
                                   : std::numeric_limits<double>::infinity();
        if (!best || d_best >= d_cur - opts.min_improvement) {
            if (crossings.empty()) {
                res.steps = res.parabolics.size();
                return res;
            }
            throw ReductionCapError(
                "reduce: stalled while a horoball is still crossed (T too small "
                "or candidate search too narrow)",
                std::move(res));
        }

        const GroupElement p =
            detail::stabilizer_matrix(best->base, best->width, best->best_k);
        res.parabolics.push_back(p);
        res.gamma_s = p * res.gamma_s;
        target = mobius(p, target);
        cosh_cur = best->best_cosh;
        d_cur = d_best;
        res.distance_trace.push_back(d_cur);
    }
    throw ReductionCapError("reduce: step cap exceeded", std::move(res));
}

}  // namespace modsym
