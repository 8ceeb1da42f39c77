#pragma once

#include "modsym/bigint.hpp"
#include "modsym/errors.hpp"
#include "modsym/geometry.hpp"
#include "modsym/group_element.hpp"

#include <cstdint>
#include <map>
#include <numeric>
#include <queue>
#include <span>
#include <vector>

namespace modsym {

struct Letter {
    std::uint32_t index;
    int exp;  // +1 or -1
};

/// Freely reduced word over some generator alphabet; which alphabet is
/// determined by context (the fixed {S,T} pair of PSL2(Z), or the Schreier
/// generators of a GeneratorTable).
struct Word {
    std::vector<Letter> letters;
    std::size_t length() const { return letters.size(); }
    bool empty() const { return letters.empty(); }
};

// Alphabet indices used by decompose_psl2z.
inline constexpr std::uint32_t kLetterS = 0;
inline constexpr std::uint32_t kLetterT = 1;

namespace detail {

// Appends a letter, cancelling against the tail when the two letters are
// mutual inverses under `cancels`.
template <typename CancelFn>
void append_reduced(Word& w, Letter l, const CancelFn& cancels) {
    if (!w.letters.empty() && cancels(w.letters.back(), l)) {
        w.letters.pop_back();
        return;
    }
    w.letters.push_back(l);
}

// In PSL2(Z), S is an involution, so any two S letters cancel.
inline bool st_cancels(const Letter& x, const Letter& y) {
    if (x.index != y.index) return false;
    if (x.index == kLetterS) return true;
    return x.exp == -y.exp;
}

}  // namespace detail

/// Word over {S, T} evaluating to g in PSL2(Z), from the nearest-integer
/// Euclidean algorithm on the first column.
inline Word decompose_psl2z(const GroupElement& g, std::size_t max_letters = 100000000) {
    Word w;
    Integer a = g.a(), b = g.b(), c = g.c(), d = g.d();
    auto emit_t_power = [&](const Integer& k) {
        const int e = k > 0 ? 1 : -1;
        for (Integer i = 0; i < abs(k); ++i) {
            detail::append_reduced(w, Letter{kLetterT, e}, detail::st_cancels);
            if (w.length() > max_letters)
                throw ResourceError("decompose_psl2z: word length cap exceeded");
        }
    };
    while (true) {
        if (c < 0 || (c == 0 && a < 0)) {
            a = -a; b = -b; c = -c; d = -d;
        }
        if (c == 0) {
            emit_t_power(b);  // a = d = 1 here
            break;
        }
        const Integer q = fdiv(2 * a + c, 2 * c);  // nearest(a/c), |a - qc| <= c/2
        emit_t_power(q);
        detail::append_reduced(w, Letter{kLetterS, 1}, detail::st_cancels);
        // g <- S^{-1} T^{-q} g ; S^{-1}(a b; c d) = (c d; -a -b)
        const Integer a1 = a - q * c, b1 = b - q * d;
        a = c; b = d; c = -a1; d = -b1;
    }
    return w;
}

inline GroupElement evaluate_st(const Word& w) {
    GroupElement g;
    const GroupElement S = GroupElement::gen_S(), T = GroupElement::gen_T();
    for (const Letter& l : w.letters) {
        const GroupElement& base = l.index == kLetterS ? S : T;
        g = g * (l.exp > 0 ? base : base.inverse());
    }
    return g;
}

// ---------------------------------------------------------------------------
// Coset structure of Gamma_0(N) in PSL2(Z)
// ---------------------------------------------------------------------------

/// Coset table of Gamma_0(N)\PSL2(Z) over the projective line P^1(Z/N),
/// with Schreier transversal and an inverse-closed Schreier generator set.
struct GeneratorTable {
    static constexpr std::uint32_t kNoGen = UINT32_MAX;

    long level = 1;
    std::vector<std::pair<long, long>> cosets;  // canonical (c:d) in P^1(Z/N)
    std::vector<GroupElement> transversal;      // [0] = identity
    std::vector<GroupElement> generators;       // inverse-closed, identity-free
    std::vector<std::uint32_t> inverse_index;   // j -> j* with gen[j*] = gen[j]^-1
    std::vector<std::uint32_t> action_S, action_T, action_Tinv;
    std::vector<std::uint32_t> schreier_S, schreier_T, schreier_Tinv;  // kNoGen = trivial
    std::map<GroupElement, std::uint32_t> generator_index;

    std::size_t size() const { return cosets.size(); }

    std::size_t coset_of(long cr, long dr) const {
        if (level == 1) return 0;
        const long idx = lookup_[static_cast<std::size_t>(cr) * level + dr];
        return static_cast<std::size_t>(idx);
    }

    std::size_t coset_of(const GroupElement& g) const {
        if (level == 1) return 0;
        const long cr = static_cast<long>(fmod_pos(g.c(), level).convert_to<long>());
        const long dr = static_cast<long>(fmod_pos(g.d(), level).convert_to<long>());
        return coset_of(cr, dr);
    }

    std::vector<std::int32_t> lookup_;  // dense (c,d) -> coset index, -1 invalid
};

/// Index of Gamma_0(N) in PSL2(Z): N * prod_{p|N} (1 + 1/p).
inline Integer gamma0_index(long n) {
    Integer idx = n;
    long m = n;
    for (long p = 2; p * p <= m; ++p) {
        if (m % p == 0) {
            idx = idx / p * (p + 1);
            while (m % p == 0) m /= p;
        }
    }
    if (m > 1) idx = idx / m * (m + 1);
    return idx;
}

inline GeneratorTable coset_table(long level, std::size_t max_index = 200000) {
    if (level < 1) throw std::invalid_argument("coset_table: level must be >= 1");
    const Integer predicted = gamma0_index(level);
    if (predicted > static_cast<long long>(max_index))
        throw ResourceError("coset_table: index " + predicted.str() +
                            " exceeds cap " + std::to_string(max_index));

    GeneratorTable t;
    t.level = level;
    const long n = level;

    if (level == 1) {
        t.cosets = {{0, 0}};
    } else {
        t.lookup_.assign(static_cast<std::size_t>(n) * n, -1);
        std::vector<long> units;
        for (long u = 1; u < n; ++u)
            if (std::gcd(u, n) == 1) units.push_back(u);
        for (long c = 0; c < n; ++c) {
            for (long d = 0; d < n; ++d) {
                if (std::gcd(std::gcd(c, d), n) != 1) continue;
                if (t.lookup_[static_cast<std::size_t>(c) * n + d] >= 0) continue;
                const auto idx = static_cast<std::int32_t>(t.cosets.size());
                t.cosets.emplace_back(c, d);
                for (long u : units)
                    t.lookup_[static_cast<std::size_t>(u * c % n) * n + u * d % n] = idx;
            }
        }
    }
    if (Integer(t.cosets.size()) != predicted)
        throw std::logic_error("coset_table: P^1 enumeration disagrees with index formula");

    const std::size_t m = t.cosets.size();
    auto act = [&](std::size_t k, int letter) -> std::size_t {
        // bottom row transforms under right multiplication
        const auto [c, d] = t.cosets[k];
        switch (letter) {
            case 0: return t.coset_of(((d % n) + n) % n, ((-c % n) + n) % n);   // * S
            case 1: return t.coset_of(c, (c + d) % n);                           // * T
            default: return t.coset_of(c, ((d - c) % n + n) % n);                // * T^-1
        }
    };
    t.action_S.resize(m);
    t.action_T.resize(m);
    t.action_Tinv.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
        t.action_S[k] = static_cast<std::uint32_t>(act(k, 0));
        t.action_T[k] = static_cast<std::uint32_t>(act(k, 1));
        t.action_Tinv[k] = static_cast<std::uint32_t>(act(k, 2));
    }

    // Schreier transversal by breadth-first search from the identity coset.
    const GroupElement S = GroupElement::gen_S(), T = GroupElement::gen_T();
    t.transversal.assign(m, GroupElement());
    std::vector<bool> seen(m, false);
    std::queue<std::size_t> bfs;
    seen[0] = true;
    bfs.push(0);
    while (!bfs.empty()) {
        const std::size_t k = bfs.front();
        bfs.pop();
        const struct { std::uint32_t to; const GroupElement* g; } edges[] = {
            {t.action_T[k], &T}, {t.action_S[k], &S}, {t.action_Tinv[k], nullptr}};
        for (const auto& e : edges) {
            if (seen[e.to]) continue;
            seen[e.to] = true;
            t.transversal[e.to] = e.g ? t.transversal[k] * *e.g : t.transversal[k] * T.inverse();
            bfs.push(e.to);
        }
    }
    for (bool s : seen)
        if (!s) throw std::logic_error("coset_table: coset space not transitive");

    auto schreier_of = [&](std::size_t k, const GroupElement& x,
                           std::size_t kx) -> std::uint32_t {
        const GroupElement gamma = t.transversal[k] * x * t.transversal[kx].inverse();
        if (gamma.is_identity()) return GeneratorTable::kNoGen;
        auto [it, inserted] =
            t.generator_index.try_emplace(gamma, static_cast<std::uint32_t>(t.generators.size()));
        if (inserted) t.generators.push_back(gamma);
        return it->second;
    };
    t.schreier_S.resize(m);
    t.schreier_T.resize(m);
    t.schreier_Tinv.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
        t.schreier_S[k] = schreier_of(k, S, t.action_S[k]);
        t.schreier_T[k] = schreier_of(k, T, t.action_T[k]);
        t.schreier_Tinv[k] = schreier_of(k, T.inverse(), t.action_Tinv[k]);
    }

    t.inverse_index.resize(t.generators.size());
    for (std::size_t j = 0; j < t.generators.size(); ++j) {
        const auto it = t.generator_index.find(t.generators[j].inverse());
        if (it == t.generator_index.end())
            throw std::logic_error("coset_table: Schreier set not inverse-closed");
        t.inverse_index[j] = it->second;
    }
    return t;
}

namespace detail {

struct TableCancel {
    const GeneratorTable* table;
    bool operator()(const Letter& x, const Letter& y) const {
        if (y.index == x.index && y.exp == -x.exp) return true;
        return table->inverse_index[x.index] == y.index && y.exp == x.exp;
    }
};

}  // namespace detail

/// Reidemeister rewriting: lifts the {S,T} word of g through the coset action,
/// emitting one Schreier generator per letter. Requires g in Gamma_0(N).
inline Word rewrite(const GroupElement& g, const GeneratorTable& t) {
    if (!in_gamma0(g, t.level))
        throw MembershipError("rewrite: element not in Gamma_0(" + std::to_string(t.level) +
                              "): " + g.str());
    Word out;
    if (const auto it = t.generator_index.find(g); it != t.generator_index.end()) {
        out.letters.push_back(Letter{it->second, 1});
        return out;
    }
    const Word st = decompose_psl2z(g);
    const detail::TableCancel cancel{&t};
    std::size_t k = 0;
    for (const Letter& l : st.letters) {
        std::uint32_t gen;
        std::size_t next;
        if (l.index == kLetterS) {
            gen = t.schreier_S[k];
            next = t.action_S[k];
        } else if (l.exp > 0) {
            gen = t.schreier_T[k];
            next = t.action_T[k];
        } else {
            gen = t.schreier_Tinv[k];
            next = t.action_Tinv[k];
        }
        if (gen != GeneratorTable::kNoGen)
            detail::append_reduced(out, Letter{gen, 1}, cancel);
        k = next;
    }
    if (k != 0) throw std::logic_error("rewrite: path did not return to identity coset");
    return out;
}

inline GroupElement evaluate(const Word& w, const GeneratorTable& t) {
    GroupElement g;
    for (const Letter& l : w.letters) {
        const GroupElement& base = t.generators.at(l.index);
        g = g * (l.exp > 0 ? base : base.inverse());
    }
    return g;
}

// ---------------------------------------------------------------------------
// Empirical Svarc-Milnor constants
// ---------------------------------------------------------------------------

struct SvarcMilnorFit {
    double lambda = 1.0;  // >= 1
    double cee = 0.0;     // >= 0
    std::size_t sample_size = 0;
    PointH base_point;
};

struct LengthDistPair {
    double length;
    double dist;
};

/// Smallest lambda on the grid {1.0, 1.1, ...} whose additive constant
/// C(lambda) = max(0, max_i(l_i - lambda d_i)) stays within c_cap; ties in
/// lambda resolved by the (then unique) C.
inline std::pair<double, double> fit_lambda_c(std::span<const LengthDistPair> pairs,
                                              double c_cap = 50.0,
                                              double lambda_max = 10000.0) {
    for (int k = 0;; ++k) {
        const double lambda = (10 + k) / 10.0;
        if (lambda > lambda_max)
            throw std::logic_error("fit_lambda_c: no admissible lambda below cap");
        double c = 0.0;
        for (const auto& p : pairs) c = std::max(c, p.length - lambda * p.dist);
        if (c <= c_cap) return {lambda, c};
    }
}

inline SvarcMilnorFit estimate_svarc_milnor(const GeneratorTable& t,
                                            std::span<const GroupElement> sample,
                                            const PointH& z0, double c_cap = 50.0) {
    if (sample.empty()) throw std::invalid_argument("estimate_svarc_milnor: empty sample");
    std::vector<LengthDistPair> pairs;
    pairs.reserve(sample.size());
    for (const GroupElement& g : sample) {
        pairs.push_back({static_cast<double>(rewrite(g, t).length()),
                         distance(z0, mobius(g, z0))});
    }
    const auto [lambda, cee] = fit_lambda_c(pairs, c_cap);
    return {lambda, cee, sample.size(), z0};
}

}  // namespace modsym
