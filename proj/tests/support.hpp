#pragma once

// Shared test fixtures and independent oracles. Oracles here must not reuse
// the implementation path they are checking.

#include "modsym/modsym.hpp"

#include <complex>
#include <numeric>
#include <vector>

namespace testsupport {

using namespace modsym;

// arccosh-based distance oracle: cosh d = 1 + |z-w|^2 / (2 Im z Im w).
inline double distance_oracle(const PointH& z, const PointH& w) {
    const double dx = z.x - w.x, dy = z.y - w.y;
    const double t = (dx * dx + dy * dy) / (2.0 * z.y * w.y);
    return std::log1p(t + std::sqrt(t * (t + 2.0)));
}

// Uniform point in a box of moderate hyperbolic diameter.
inline PointH random_point(Rng& rng) {
    return {-4.0 + 8.0 * rng.uniform01(), 0.2 + 4.0 * rng.uniform01()};
}

// Random element of Gamma_0(level) with norm <= max_norm, built from a random
// bottom row and a random determinant-1 completion.
inline GroupElement random_gamma0(Rng& rng, long level, long max_norm) {
    for (;;) {
        const long cmax = max_norm / level;
        const long c = level * rng.range(0, cmax);
        if (c == 0) {
            const Integer b = rng.range(-max_norm, max_norm);
            return GroupElement(1, b, 0, 1);
        }
        const long d = rng.range(-max_norm, max_norm);
        if (std::gcd(c, std::abs(d)) != 1) continue;
        Integer a0 = fmod_pos(ext_gcd(d, c).x, c);
        if (a0 > c / 2) a0 -= c;  // smallest completion
        const Integer tmax = (Integer(max_norm) - abs(a0)) / c;
        if (tmax < 0) continue;
        const Integer t = rng.range(-tmax.convert_to<long long>(), tmax.convert_to<long long>());
        const Integer a = a0 + t * c;
        const Integer b = (a * d - 1) / c;
        if (abs(a) > max_norm || abs(b) > max_norm) continue;
        return GroupElement(a, b, c, d);
    }
}

// Random freely-reduced word product over the table generators.
inline GroupElement random_word_element(Rng& rng, const GeneratorTable& t, long max_len) {
    const auto len = static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(max_len) + 1));
    Word w;
    for (std::size_t j = 0; j < len; ++j)
        detail::append_reduced(w, Letter{static_cast<std::uint32_t>(rng.below(t.generators.size())), 1},
                               detail::TableCancel{&t});
    return evaluate(w, t);
}

// Brute-force expansion of prod (1-q^n)^2 (1-q^{11n})^2 mod q^order by
// explicit polynomial multiplication (independent of the pentagonal route).
inline std::vector<long long> eta_product_bruteforce(std::size_t order) {
    std::vector<long long> p(order, 0);
    p[0] = 1;
    auto mul_factor = [&p, order](std::size_t e) {
        // multiply by (1 - q^e)
        for (std::size_t i = order; i-- > e;) p[i] -= p[i - e];
    };
    for (std::size_t n = 1; n < order; ++n) {
        mul_factor(n);
        mul_factor(n);
        if (11 * n < order) {
            mul_factor(11 * n);
            mul_factor(11 * n);
        }
    }
    return p;
}

// Rank-2 lattice recovery by Gauss reduction; true iff every value is an
// integer combination m*w1 + n*w2 within tol and |m|,|n| <= coeff_cap.
inline bool fit_rank2_lattice(const std::vector<std::complex<double>>& values, double tol,
                              long coeff_cap, std::complex<double>& w1_out,
                              std::complex<double>& w2_out) {
    using C = std::complex<double>;
    std::vector<C> nz;
    for (const C& v : values)
        if (std::abs(v) > tol) nz.push_back(v);
    if (nz.size() < 2) return false;
    C v1 = nz[0];
    for (const C& v : nz)
        if (std::abs(v) < std::abs(v1)) v1 = v;
    C v2 = 0.0;
    double best = 0.0;
    bool found = false;
    for (const C& v : nz) {
        const double area = std::abs(std::imag(std::conj(v1) * v));
        if (area > 1e-9 * std::abs(v1) * std::abs(v) &&
            (!found || std::abs(v) < best)) {
            v2 = v;
            best = std::abs(v);
            found = true;
        }
    }
    if (!found) return false;
    for (int it = 0; it < 64; ++it) {
        const double mu =
            std::round(std::real(v2 * std::conj(v1)) / std::norm(v1));
        v2 -= mu * v1;
        if (std::abs(v2) < std::abs(v1)) std::swap(v1, v2);
        else if (mu == 0.0) break;
    }
    const double det = std::real(v1) * std::imag(v2) - std::real(v2) * std::imag(v1);
    if (std::abs(det) < 1e-12) return false;
    for (const C& v : values) {
        const double m = (std::real(v) * std::imag(v2) - std::real(v2) * std::imag(v)) / det;
        const double n = (std::real(v1) * std::imag(v) - std::real(v) * std::imag(v1)) / det;
        const double mr = std::round(m), nr = std::round(n);
        if (std::abs(mr) > static_cast<double>(coeff_cap) ||
            std::abs(nr) > static_cast<double>(coeff_cap))
            return false;
        if (std::abs(v - (mr * v1 + nr * v2)) > tol) return false;
    }
    w1_out = v1;
    w2_out = v2;
    return true;
}

// Shared heavyweight fixtures (built once per binary).
inline const CuspFormSeries& level11_series(std::size_t order = 20000) {
    static const CuspFormSeries f = builtin_level11(order);
    return f;
}

inline const GeneratorTable& table11() {
    static const GeneratorTable t = coset_table(11);
    return t;
}

inline const SymbolMap& map11() {
    static const SymbolMap m = build_symbol_map(table11(), level11_series(), 1e-8);
    return m;
}

inline const TruncationParams& trunc11() {
    static const TruncationParams t = choose_truncation(11, PointH(0, 2));
    return t;
}

}  // namespace testsupport
