#pragma once

#include "modsym/bigint.hpp"
#include "modsym/cusps.hpp"
#include "modsym/errors.hpp"
#include "modsym/geometry.hpp"
#include "modsym/group_element.hpp"
#include "modsym/horoball_search.hpp"
#include "modsym/reduction.hpp"
#include "modsym/rng.hpp"
#include "modsym/symbols.hpp"
#include "modsym/words.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace modsym {

struct GrowthRecord {
    std::size_t input_index = 0;
    Integer norm_value;
    double log_norm = 0.0;
    std::size_t word_len = 0;
    double dist = 0.0;          // d(z0, gamma z0)
    double reduced_dist = 0.0;  // d(z0, gamma_s z0)
    double abs_psi = 0.0;
};

struct GrowthFit {
    double A = 0.0;
    double B = 0.0;
};

enum class SampleStrategy { RandomWord, NormBall };

/// Random-word: freely reduced products of up to max_len_or_norm uniform
/// generator letters (word length drawn uniformly in [0, max]). Norm-ball:
/// every canonical element with norm <= max_len_or_norm, size acting as a
/// resource cap. Deterministic for a fixed seed.
inline std::vector<GroupElement> sample_elements(const GeneratorTable& t,
                                                 SampleStrategy strategy, std::size_t size,
                                                 long max_len_or_norm, std::uint64_t seed) {
    if (strategy == SampleStrategy::NormBall)
        return norm_ball(t.level, max_len_or_norm, size > 0 ? size : 50000000);
    if (size < 1) throw std::invalid_argument("sample_elements: size must be >= 1");
    Rng rng(seed);
    std::vector<GroupElement> out;
    out.reserve(size);
    const auto n_gens = static_cast<std::uint64_t>(t.generators.size());
    for (std::size_t i = 0; i < size; ++i) {
        const auto len = static_cast<std::size_t>(
            rng.below(static_cast<std::uint64_t>(max_len_or_norm) + 1));
        Word w;
        for (std::size_t j = 0; j < len; ++j)
            detail::append_reduced(w, Letter{static_cast<std::uint32_t>(rng.below(n_gens)), 1},
                                   detail::TableCancel{&t});
        out.push_back(evaluate(w, t));
    }
    return out;
}

struct ScanResult {
    std::vector<GrowthRecord> records;
    std::vector<std::pair<std::size_t, std::string>> row_errors;
};

/// One record per sample element: norm, rewriting word length, |psi| through
/// the generator map, orbit distance, and the Lemma-1 reduced distance.
/// Row failures are recorded, not fatal.
inline ScanResult scan(std::span<const GroupElement> sample, const SymbolMap& map,
                       const TruncationParams& trunc, const PointH& z0,
                       const ReduceOptions& reduce_opts = {}) {
    ScanResult res;
    const RatPoint z0r = rat_point(z0);
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const GroupElement& g = sample[i];
        try {
            GrowthRecord rec;
            rec.input_index = i;
            rec.norm_value = norm(g);
            rec.log_norm = log_integer(rec.norm_value);
            const Word w = rewrite(g, *map.table);
            rec.word_len = w.length();
            std::complex<double> psi = 0.0;
            for (const Letter& l : w.letters)
                psi += l.exp > 0 ? map.values[l.index] : -map.values[l.index];
            rec.abs_psi = std::abs(psi);
            rec.dist = distance(z0r, mobius(g, z0r));
            const ReductionResult red = reduce(g, trunc, z0, reduce_opts);
            rec.reduced_dist = red.distance_trace.back();
            res.records.push_back(std::move(rec));
        } catch (const std::exception& e) {
            res.row_errors.emplace_back(i, e.what());
        }
    }
    return res;
}

/// Deterministic fitting rule: B is the largest |psi| among norm <= 2 records,
/// A the smallest slope through the rest after subtracting B.
inline GrowthFit fit_log_bound(std::span<const GrowthRecord> records) {
    if (records.empty()) throw std::invalid_argument("fit_log_bound: no records");
    GrowthFit fit;
    for (const GrowthRecord& r : records)
        if (r.norm_value <= 2) fit.B = std::max(fit.B, r.abs_psi);
    for (const GrowthRecord& r : records)
        if (r.norm_value > 2) fit.A = std::max(fit.A, (r.abs_psi - fit.B) / r.log_norm);
    fit.A = std::max(fit.A, 0.0);
    return fit;
}

// ---------------------------------------------------------------------------
// Explicit constants (ball generators, r, C_S)
// ---------------------------------------------------------------------------

struct ExplicitConstants {
    double R = 0.0;                        // estimated radius of F_T around z0
    std::vector<GroupElement> ball_gens;   // S = {s : sB intersects B}
    double r_lower = 0.0;                  // lower bound for inf d(B, gamma B)
    double C_S = 0.0;                      // max |psi| over S
};

struct ConstantsOptions {
    std::size_t rays = 1000;          // boundary sample size
    int bisect_iters = 46;
    long dirichlet_norm_cap = 64;     // norms used in the membership test
    std::size_t ball_cap = 2000000;   // enumeration resource cap
};

namespace detail {

// Membership in F_T: the capped Dirichlet inequality plus exact horoball
// exclusion. A too-small cap can only enlarge the estimate, which weakens but
// never falsifies the Lemma-2 bound downstream. The Dirichlet side compares
// cosh distances in doubles (monotone, log-free) and runs first.
class TruncatedDomainTester {
public:
    TruncatedDomainTester(const TruncationParams& trunc, const PointH& z0, long norm_cap)
        : trunc_(trunc), z0_(z0) {
        for (GroupElement& g : norm_ball(trunc.level, norm_cap)) {
            if (g.is_identity()) continue;
            test_set_.push_back({to_double(g.a()), to_double(g.b()), to_double(g.c()),
                                 to_double(g.d())});
        }
    }

    bool contains(const PointH& z) const {
        const double ch_z = cosh_dist(z.x, z.y);
        for (const auto& m : test_set_) {
            const double u = m[2] * z.x + m[3], v = m[2] * z.y;
            const double den = u * u + v * v;
            const double ix = ((m[0] * z.x + m[1]) * u + m[0] * z.y * v) / den;
            const double iy = z.y / den;
            if (cosh_dist(ix, iy) < ch_z * (1.0 - 1e-12)) return false;
        }
        return point_below_horoballs(rat_point(z), trunc_);
    }

private:
    double cosh_dist(double x, double y) const {
        const double dx = x - z0_.x, dy = y - z0_.y;
        return 1.0 + (dx * dx + dy * dy) / (2.0 * y * z0_.y);
    }

    const TruncationParams& trunc_;
    PointH z0_;
    std::vector<std::array<double, 4>> test_set_;
};

}  // namespace detail

/// R from a deterministic ray sample of the boundary of F_T, ball generators
/// S = {gamma : d(z0, gamma z0) <= 2R}, the distance gap r_lower, and C_S.
inline ExplicitConstants explicit_constants(const GeneratorTable& table,
                                            const TruncationParams& trunc, const PointH& z0,
                                            const SymbolMap& map,
                                            const ConstantsOptions& opts = {}) {
    if (map.table != &table)
        throw std::invalid_argument("explicit_constants: map was built on another table");
    const detail::TruncatedDomainTester domain(trunc, z0, opts.dirichlet_norm_cap);
    if (!domain.contains(z0))
        throw std::invalid_argument("explicit_constants: z0 not inside F_T");

    // geodesic rays from z0; arclength equals the parameter, so R is the
    // largest boundary-crossing parameter over the sample
    double R = 0.0;
    const std::size_t half = opts.rays / 2;
    for (std::size_t k = 0; k < half; ++k) {
        const double phi = M_PI * static_cast<double>(k) / static_cast<double>(half);
        for (const double sign : {1.0, -1.0}) {
            double lo = 0.0, hi = 1.0;
            while (domain.contains(geodesic_point(z0, phi, sign * hi)) && hi < 64.0) {
                lo = hi;
                hi *= 2.0;
            }
            if (hi >= 64.0)
                throw ResourceError("explicit_constants: ray escaped; Dirichlet cap too small");
            for (int it = 0; it < opts.bisect_iters; ++it) {
                const double mid = 0.5 * (lo + hi);
                (domain.contains(geodesic_point(z0, phi, sign * mid)) ? lo : hi) = mid;
            }
            R = std::max(R, lo);
        }
    }

    const double d0i = distance(z0, PointH(0.0, 1.0));
    const RatPoint z0r = rat_point(z0);
    auto orbit_dist = [&](const GroupElement& g) {
        return dist_from_cosh(cosh_distance(z0r, mobius(g, z0r)));
    };
    auto ball_norm_bound = [&](double rho) {
        return static_cast<long>(std::ceil(M_SQRT2 * std::exp(0.5 * (rho + 2.0 * d0i)))) + 1;
    };

    ExplicitConstants out;
    out.R = R;
    for (GroupElement& g : norm_ball(table.level, ball_norm_bound(2.0 * R), opts.ball_cap))
        if (orbit_dist(g) <= 2.0 * R + 1e-9) out.ball_gens.push_back(std::move(g));

    // smallest orbit distance outside S; the enumeration radius grows until a
    // witness appears, which keeps the infimum search finite
    double best = std::numeric_limits<double>::infinity();
    for (double reach = 2.0 * R + 1.0;; reach += 1.0) {
        for (const GroupElement& g : norm_ball(table.level, ball_norm_bound(reach), opts.ball_cap)) {
            const double d = orbit_dist(g);
            if (d <= 2.0 * R + 1e-9) continue;  // in S
            best = std::min(best, d);
        }
        if (best <= reach) break;
    }
    out.r_lower = std::max(best - 2.0 * R, 0.0);

    for (const GroupElement& g : out.ball_gens)
        out.C_S = std::max(out.C_S, std::abs(modsym_word(g, map)));
    return out;
}

struct Lemma2Report {
    std::size_t checked = 0;
    std::size_t violations = 0;
    double max_slack = 0.0;
    double min_slack = std::numeric_limits<double>::infinity();
};

/// Checks |psi| <= C_S (2/r log|gamma| + 3 log 2 / r + 1) over the records.
inline Lemma2Report verify_lemma2(std::span<const GrowthRecord> records,
                                  const ExplicitConstants& consts) {
    Lemma2Report rep;
    if (consts.r_lower <= 0)
        throw std::invalid_argument("verify_lemma2: r_lower must be positive");
    for (const GrowthRecord& r : records) {
        const double rhs =
            consts.C_S * (2.0 / consts.r_lower * r.log_norm + 3.0 * M_LN2 / consts.r_lower + 1.0);
        const double slack = rhs - r.abs_psi;
        ++rep.checked;
        if (slack < 0) ++rep.violations;
        rep.max_slack = std::max(rep.max_slack, slack);
        rep.min_slack = std::min(rep.min_slack, slack);
    }
    if (rep.checked == 0) rep.min_slack = 0.0;
    return rep;
}

// ---------------------------------------------------------------------------
// CSV output
// ---------------------------------------------------------------------------

inline void write_csv(std::ostream& os, std::span<const GrowthRecord> records) {
    os << "norm,log_norm,word_len,dist,reduced_dist,abs_psi\n";
    char buf[128];
    for (const GrowthRecord& r : records) {
        os << r.norm_value.str() << ',';
        std::snprintf(buf, sizeof buf, "%.12g,%zu,%.12g,%.12g,%.12g", r.log_norm, r.word_len,
                      r.dist, r.reduced_dist, r.abs_psi);
        os << buf << '\n';
    }
}

inline void write_csv(const std::string& path, std::span<const GrowthRecord> records) {
    std::ofstream os(path);
    if (!os) throw ParseError(path + ": cannot open output file");
    write_csv(os, records);
}

}  // namespace modsym
