#pragma once

#include "modsym/bigint.hpp"
#include "modsym/errors.hpp"
#include "modsym/geometry.hpp"
#include "modsym/group_element.hpp"
#include "modsym/words.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

namespace modsym {

/// Weight-2 cusp form given by its truncated q-expansion. coeff_bound is the
/// measured kappa with |a_n| <= kappa * n over the stored coefficients.
struct CuspFormSeries {
    long level = 1;
    int weight = 2;
    std::size_t order = 0;  // truncation order M
    std::vector<std::complex<double>> coeffs;  // a_1 .. a_M
    double coeff_bound = 0.0;

    static CuspFormSeries from_coeffs(long level, std::vector<std::complex<double>> an) {
        CuspFormSeries f;
        f.level = level;
        f.order = an.size();
        f.coeffs = std::move(an);
        for (std::size_t n = 1; n <= f.order; ++n)
            f.coeff_bound = std::max(f.coeff_bound,
                                     std::abs(f.coeffs[n - 1]) / static_cast<double>(n));
        return f;
    }
};

struct EichlerValue {
    std::complex<double> value;
    double tail;  // certified bound on the dropped terms
};

namespace detail {

template <typename Real>
struct EichlerSum {
    Real re, im, tail;
};

// Core summation of F(z) = sum a_n/n e^{2 pi i n z}, templated so tests can
// re-run it at higher precision. Stops once the geometric tail bound
// kappa |q|^{n+1} / (1 - |q|) falls below stop_below (0 = sum everything).
template <typename Real>
EichlerSum<Real> eichler_sum(const CuspFormSeries& f, Real x, Real y, double stop_below) {
    using std::acos;
    using std::cos;
    using std::exp;
    using std::sin;
    const Real two_pi = 2 * acos(Real(-1));
    const Real r = exp(-two_pi * y);
    const Real qr = r * cos(two_pi * x), qi = r * sin(two_pi * x);
    Real pr = 1, pi_ = 0;                 // q^n
    Real rpow = 1;                        // |q|^n
    Real sr = 0, si = 0, cr = 0, ci = 0;  // Kahan-compensated sums
    const Real kappa = static_cast<Real>(f.coeff_bound);
    Real tail = kappa * r / (1 - r);
    for (std::size_t n = 1; n <= f.order; ++n) {
        const Real t = pr * qr - pi_ * qi;
        pi_ = pr * qi + pi_ * qr;
        pr = t;
        rpow *= r;
        const std::complex<double> an = f.coeffs[n - 1];
        const Real ar = static_cast<Real>(an.real()) / static_cast<Real>(n);
        const Real ai = static_cast<Real>(an.imag()) / static_cast<Real>(n);
        const Real vr = ar * pr - ai * pi_ - cr;
        const Real tr = sr + vr;
        cr = (tr - sr) - vr;
        sr = tr;
        const Real vi = ar * pi_ + ai * pr - ci;
        const Real ti = si + vi;
        ci = (ti - si) - vi;
        si = ti;
        tail = kappa * rpow * r / (1 - r);
        if (stop_below > 0 && tail < static_cast<Real>(stop_below)) break;
    }
    return {sr, si, tail};
}

}  // namespace detail

/// Antiderivative value F(z) with certified truncation tail. Errors out when
/// Im z is too small for the requested tolerance at the stored order.
inline EichlerValue eichler_F(const PointH& z, const CuspFormSeries& f, double tol) {
    if (!(tol > 0)) throw std::invalid_argument("eichler_F: tolerance must be positive");
    const double r = std::exp(-2.0 * M_PI * z.y);
    const double tail_at_order =
        f.coeff_bound * std::exp(-2.0 * M_PI * static_cast<double>(f.order) * z.y) / (1.0 - r);
    if (!(tail_at_order <= tol))
        throw PrecisionError("eichler_F: tail bound " + std::to_string(tail_at_order) +
                             " exceeds tolerance " + std::to_string(tol) + " at Im z = " +
                             std::to_string(z.y) + ", order " + std::to_string(f.order));
    const auto s = detail::eichler_sum<double>(f, z.x, z.y, tol * 1e-2);
    return {{s.re, s.im}, s.tail};
}

/// Modular symbol by direct evaluation: F(z0) - F(gamma z0) at the balanced
/// base point z0 = (-d + i)/c, where both endpoints sit at height 1/c. The
/// x coordinates are reduced mod 1 exactly (F has period 1), so large entries
/// lose no phase accuracy. Upper-triangular elements return exactly 0.
inline std::complex<double> modsym_direct(const GroupElement& g, const CuspFormSeries& f,
                                          double tol) {
    if (!in_gamma0(g, f.level))
        throw MembershipError("modsym_direct: element not in Gamma_0(" +
                              std::to_string(f.level) + ")");
    if (g.c() == 0) return 0.0;  // parabolic or identity: symbol vanishes
    const double y = 1.0 / to_double(g.c());
    const double x1 = to_double(Rational(fmod_pos(-g.d(), g.c()), g.c()));
    const double x2 = to_double(Rational(fmod_pos(g.a(), g.c()), g.c()));
    const EichlerValue F1 = eichler_F({x1, y}, f, tol / 2);
    const EichlerValue F2 = eichler_F({x2, y}, f, tol / 2);
    return F1.value - F2.value;
}

/// Symbol values on the Schreier generators of a coset table.
struct SymbolMap {
    const GeneratorTable* table = nullptr;
    std::vector<std::complex<double>> values;
    double tol = 1e-8;
};

inline SymbolMap build_symbol_map(const GeneratorTable& t, const CuspFormSeries& f,
                                  double tol = 1e-8) {
    if (t.level != f.level)
        throw std::invalid_argument("build_symbol_map: table level " +
                                    std::to_string(t.level) + " != series level " +
                                    std::to_string(f.level));
    SymbolMap map;
    map.table = &t;
    map.tol = tol;
    map.values.reserve(t.generators.size());
    for (const GroupElement& s : t.generators) {
        try {
            map.values.push_back(modsym_direct(s, f, tol));
        } catch (const PrecisionError& e) {
            throw PrecisionError(std::string(e.what()) + " (generator " + s.str() + ")");
        }
    }
    for (std::size_t j = 0; j < map.values.size(); ++j) {
        const std::size_t k = t.inverse_index[j];
        if (std::abs(map.values[j] + map.values[k]) > 2 * tol + 1e-12)
            throw PrecisionError("build_symbol_map: inverse pair " + std::to_string(j) +
                                 "/" + std::to_string(k) + " breaks antisymmetry");
    }
    return map;
}

/// C_S: the largest generator value modulus.
inline double word_bound_constant(const SymbolMap& map) {
    double m = 0.0;
    for (const auto& v : map.values) m = std::max(m, std::abs(v));
    return m;
}

/// Symbol via the homomorphism property: rewrite gamma over the table's
/// generators and add the per-letter values. |result| <= C_S * word length.
inline std::complex<double> modsym_word(const GroupElement& g, const SymbolMap& map) {
    const Word w = rewrite(g, *map.table);
    std::complex<double> sum = 0.0;
    for (const Letter& l : w.letters)
        sum += l.exp > 0 ? map.values[l.index] : -map.values[l.index];
    return sum;
}

// ---------------------------------------------------------------------------
// Series input
// ---------------------------------------------------------------------------

/// Format: first content line "N 2 M", then M lines "n re" or "n re im" with
/// n = 1..M in order. Blank lines and lines starting with '#' are skipped.
inline CuspFormSeries load_series(std::istream& in, const std::string& name = "<stream>") {
    std::string line;
    std::size_t lineno = 0;
    auto next_content = [&](std::string& out) {
        while (std::getline(in, line)) {
            ++lineno;
            const auto pos = line.find_first_not_of(" \t\r");
            if (pos == std::string::npos || line[pos] == '#') continue;
            out = line;
            return true;
        }
        return false;
    };
    auto fail = [&](const std::string& msg) -> ParseError {
        return ParseError(name + ":" + std::to_string(lineno) + ": " + msg);
    };

    std::string content;
    if (!next_content(content)) throw fail("missing header line \"N 2 M\"");
    long level = 0, weight = 0;
    long long order = 0;
    {
        std::istringstream hs(content);
        if (!(hs >> level >> weight >> order)) throw fail("malformed header line");
        std::string extra;
        if (hs >> extra) throw fail("trailing tokens after header");
    }
    if (level < 1) throw fail("level must be >= 1");
    if (weight != 2) throw fail("weight mismatch: only weight 2 is supported");
    if (order < 1) throw fail("empty coefficient list (order must be >= 1)");

    std::vector<std::complex<double>> an;
    an.reserve(static_cast<std::size_t>(order));
    for (long long n = 1; n <= order; ++n) {
        if (!next_content(content))
            throw fail("expected coefficient line n = " + std::to_string(n));
        std::istringstream cs(content);
        long long idx = 0;
        double re = 0.0, im = 0.0;
        if (!(cs >> idx >> re)) throw fail("malformed coefficient line");
        if (!(cs >> im)) im = 0.0;
        std::string extra;
        if (cs.clear(), cs >> extra) throw fail("trailing tokens on coefficient line");
        if (idx != n)
            throw fail("coefficient index " + std::to_string(idx) + ", expected " +
                       std::to_string(n));
        an.emplace_back(re, im);
    }
    return CuspFormSeries::from_coeffs(level, std::move(an));
}

inline CuspFormSeries load_series(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open coefficient file");
    return load_series(in, path);
}

// ---------------------------------------------------------------------------
// The level-11 form: q prod (1-q^n)^2 (1-q^{11n})^2
// ---------------------------------------------------------------------------

namespace detail {

// prod (1-q^{s n}) as the sparse pentagonal-number series, exponents < order.
inline std::vector<std::pair<std::size_t, long long>> pentagonal_sparse(long s,
                                                                        std::size_t order) {
    std::vector<std::pair<std::size_t, long long>> terms{{0, 1}};
    for (long long k = 1;; ++k) {
        const long long g1 = k * (3 * k - 1) / 2, g2 = k * (3 * k + 1) / 2;
        const long long sign = k % 2 ? -1 : 1;
        bool any = false;
        for (long long g : {g1, g2}) {
            const long long e = g * s;
            if (e < static_cast<long long>(order)) {
                terms.emplace_back(static_cast<std::size_t>(e), sign);
                any = true;
            }
        }
        if (!any) break;
    }
    return terms;
}

inline void mul_sparse(std::vector<long long>& dense,
                       const std::vector<std::pair<std::size_t, long long>>& sparse) {
    std::vector<long long> out(dense.size(), 0);
    for (const auto& [e, s] : sparse)
        for (std::size_t i = 0; i + e < dense.size(); ++i)
            out[i + e] += s * dense[i];
    dense.swap(out);
}

}  // namespace detail

/// Integer q-expansion of the level-11 weight-2 form to order M.
inline CuspFormSeries builtin_level11(std::size_t order = 100000) {
    if (order < 1) throw std::invalid_argument("builtin_level11: order must be >= 1");
    std::vector<long long> dense(order, 0);
    dense[0] = 1;
    const auto p1 = detail::pentagonal_sparse(1, order);
    const auto p11 = detail::pentagonal_sparse(11, order);
    detail::mul_sparse(dense, p1);
    detail::mul_sparse(dense, p1);
    detail::mul_sparse(dense, p11);
    detail::mul_sparse(dense, p11);
    std::vector<std::complex<double>> an(order);
    for (std::size_t n = 0; n < order; ++n) an[n] = static_cast<double>(dense[n]);
    return CuspFormSeries::from_coeffs(11, std::move(an));
}

}  // namespace modsym
