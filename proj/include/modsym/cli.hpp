#pragma once

#include "modsym/errors.hpp"
#include "modsym/growth.hpp"
#include "modsym/modsym_version.hpp"
#include "modsym/reduction.hpp"
#include "modsym/symbols.hpp"
#include "modsym/table_cache.hpp"

#include <CLI11.hpp>

#include <complex>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace modsym::cli {

/// Shared experiment configuration. Flags override config-file values
/// (CLI11 "key = value" files via --config).
struct RunConfig {
    long level = 1;
    double z0x = 0.0;
    double z0y = 2.0;  // default base point 2i: not elliptic, high enough
    double trunc_override = 0.0;  // 0 = choose automatically
    std::string coeffs = "builtin:11";
    std::size_t order = 100000;
    std::string strategy = "random-word";
    std::size_t size = 100;
    long max_len = 20;
    std::uint64_t seed = 1;
    double tol = 1e-8;
    std::string out_path;

    void validate() const {
        if (!(z0y > 0)) throw std::invalid_argument("base point must have Im > 0");
        if (!(tol > 0 && tol < 1)) throw std::invalid_argument("tolerance must lie in (0,1)");
        if (strategy != "random-word" && strategy != "norm-ball")
            throw std::invalid_argument("strategy must be random-word or norm-ball");
    }

    PointH z0() const { return {z0x, z0y}; }

    TruncationParams truncation(const std::vector<CuspClass>& classes) const {
        if (trunc_override > 0) return {trunc_override, level, classes};
        return choose_truncation(level, z0(), classes);
    }
};

namespace detail {

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline Integer parse_integer(const std::string& s) {
    try {
        return Integer(s);
    } catch (const std::exception&) {
        throw ParseError("not an integer: \"" + s + "\"");
    }
}

inline GroupElement parse_matrix(const std::string& a, const std::string& b,
                                 const std::string& c, const std::string& d) {
    const Integer A = parse_integer(a), B = parse_integer(b), C = parse_integer(c),
                  D = parse_integer(d);
    if (A * D - B * C != 1)
        throw std::invalid_argument("matrix (" + a + " " + b + "; " + c + " " + d +
                                    ") does not have determinant 1");
    return {A, B, C, D};
}

inline CuspFormSeries load_coeffs(const std::string& source, long level, std::size_t order) {
    if (source == "builtin:11") {
        if (level != 11)
            throw std::invalid_argument("builtin:11 is a level-11 series, got level " +
                                        std::to_string(level));
        return builtin_level11(order);
    }
    CuspFormSeries f = load_series(source);
    if (f.level != level)
        throw std::invalid_argument("coefficient file has level " + std::to_string(f.level) +
                                    ", command expects " + std::to_string(level));
    return f;
}

inline std::string word_to_string(const Word& w, bool st_alphabet) {
    if (w.empty()) return "(empty)";
    std::string s;
    for (std::size_t i = 0; i < w.letters.size();) {
        std::size_t j = i;
        while (j < w.letters.size() && w.letters[j].index == w.letters[i].index &&
               w.letters[j].exp == w.letters[i].exp)
            ++j;
        if (!s.empty()) s += ' ';
        if (st_alphabet)
            s += w.letters[i].index == kLetterS ? "S" : "T";
        else
            s += "g" + std::to_string(w.letters[i].index);
        const long long e = static_cast<long long>(j - i) * w.letters[i].exp;
        if (e != 1) s += "^" + std::to_string(e);
        i = j;
    }
    return s;
}

}  // namespace detail

/// Dispatches one invocation. Exit status: 0 success, 1 domain errors
/// (membership, parsing, usage), 2 precision or resource errors.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"numerical modular symbols on Gamma_0(N) and their growth"};
    app.set_config("--config", "", "key = value configuration file");
    app.require_subcommand(1);
    app.fallthrough(false);

    RunConfig cfg;
    std::string ma = "1", mb = "0", mc = "0", md = "1";

    auto add_level = [&](CLI::App* cmd) {
        cmd->add_option("N", cfg.level, "level of Gamma_0(N)")->required();
    };
    auto add_matrix = [&](CLI::App* cmd) {
        cmd->add_option("a", ma)->required();
        cmd->add_option("b", mb)->required();
        cmd->add_option("c", mc)->required();
        cmd->add_option("d", md)->required();
    };
    auto add_base_point = [&](CLI::App* cmd) {
        cmd->add_option("--z0x", cfg.z0x, "base point, real part");
        cmd->add_option("--z0y", cfg.z0y, "base point, imaginary part");
        cmd->add_option("--T", cfg.trunc_override, "truncation height override");
    };
    auto add_coeffs = [&](CLI::App* cmd) {
        cmd->add_option("--coeffs", cfg.coeffs, "coefficient file or builtin:11")->required();
        cmd->add_option("--order", cfg.order, "series order for builtin coefficients");
        cmd->add_option("--tol", cfg.tol, "evaluation tolerance");
    };

    CLI::App* gens = app.add_subcommand("gens", "coset table and Schreier generators");
    add_level(gens);
    gens->callback([&] {
        cfg.validate();
        const GeneratorTable t = cached_coset_table(cfg.level);
        out << "level " << t.level << "\n";
        out << "index " << t.size() << "\n";
        out << "cosets";
        for (const auto& [c, d] : t.cosets) out << " (" << c << ":" << d << ")";
        out << "\n";
        for (std::size_t j = 0; j < t.generators.size(); ++j)
            out << "generator " << j << " " << t.generators[j].str() << " inverse "
                << t.inverse_index[j] << "\n";
    });

    CLI::App* cusps = app.add_subcommand("cusps", "cusp classes and widths");
    add_level(cusps);
    cusps->callback([&] {
        cfg.validate();
        for (const CuspClass& c : cusp_classes(cfg.level))
            out << c.rep.str() << " width " << c.width << "\n";
    });

    CLI::App* dec = app.add_subcommand("decompose", "word over S, T in PSL2(Z)");
    add_matrix(dec);
    dec->callback([&] {
        const Word w = decompose_psl2z(detail::parse_matrix(ma, mb, mc, md));
        out << "length " << w.length() << "\n";
        out << "word " << detail::word_to_string(w, true) << "\n";
    });

    CLI::App* sym = app.add_subcommand("symbol", "modular symbol of one element");
    add_level(sym);
    add_coeffs(sym);
    add_matrix(sym);
    sym->callback([&] {
        cfg.validate();
        const GroupElement g = detail::parse_matrix(ma, mb, mc, md);
        const CuspFormSeries f = detail::load_coeffs(cfg.coeffs, cfg.level, cfg.order);
        std::complex<double> v;
        try {
            v = modsym_direct(g, f, cfg.tol);
        } catch (const PrecisionError&) {
            // out of direct range: go through the generator map
            const GeneratorTable t = cached_coset_table(cfg.level);
            v = modsym_word(g, build_symbol_map(t, f, cfg.tol));
        }
        out << detail::fmt(v.real()) << " " << detail::fmt(v.imag()) << " "
            << detail::fmt(std::abs(v)) << "\n";
    });

    CLI::App* red = app.add_subcommand("reduce", "Lemma-1 reduction of one element");
    add_level(red);
    add_matrix(red);
    add_base_point(red);
    red->callback([&] {
        cfg.validate();
        const GroupElement g = detail::parse_matrix(ma, mb, mc, md);
        const TruncationParams trunc = cfg.truncation(cusp_classes(cfg.level));
        const ReductionResult r = reduce(g, trunc, cfg.z0());
        out << "gamma_s " << r.gamma_s.str() << "\n";
        out << "parabolics " << r.parabolics.size() << "\n";
        out << "distance_before " << detail::fmt(r.distance_trace.front()) << "\n";
        out << "distance_after " << detail::fmt(r.distance_trace.back()) << "\n";
    });

    CLI::App* scan_cmd = app.add_subcommand("scan", "sample elements and emit growth CSV");
    add_level(scan_cmd);
    add_coeffs(scan_cmd);
    add_base_point(scan_cmd);
    scan_cmd->add_option("--size", cfg.size, "sample size");
    scan_cmd->add_option("--max-len", cfg.max_len, "max word length (or norm bound)");
    scan_cmd->add_option("--seed", cfg.seed, "random seed");
    scan_cmd->add_option("--strategy", cfg.strategy, "random-word or norm-ball");
    scan_cmd->add_option("--out", cfg.out_path, "output CSV path")->required();
    scan_cmd->callback([&] {
        cfg.validate();
        const CuspFormSeries f = detail::load_coeffs(cfg.coeffs, cfg.level, cfg.order);
        const GeneratorTable t = cached_coset_table(cfg.level);
        const SymbolMap map = build_symbol_map(t, f, cfg.tol);
        const TruncationParams trunc = cfg.truncation(cusp_classes(cfg.level));
        const auto strat = cfg.strategy == "norm-ball" ? SampleStrategy::NormBall
                                                       : SampleStrategy::RandomWord;
        const auto sample = sample_elements(t, strat, cfg.size, cfg.max_len, cfg.seed);
        const ScanResult res = scan(sample, map, trunc, cfg.z0());
        write_csv(cfg.out_path, res.records);
        const GrowthFit fit = fit_log_bound(res.records);
        out << "rows " << res.records.size() << "\n";
        out << "row_errors " << res.row_errors.size() << "\n";
        for (const auto& [i, msg] : res.row_errors)
            err << "error: row " << i << ": " << msg << "\n";
        out << "A " << detail::fmt(fit.A) << " B " << detail::fmt(fit.B) << "\n";
        out << "wrote " << cfg.out_path << "\n";
    });

    CLI::App* cons = app.add_subcommand("constants", "explicit Lemma-2 constants");
    add_level(cons);
    add_coeffs(cons);
    add_base_point(cons);
    cons->callback([&] {
        cfg.validate();
        const CuspFormSeries f = detail::load_coeffs(cfg.coeffs, cfg.level, cfg.order);
        const GeneratorTable t = cached_coset_table(cfg.level);
        const SymbolMap map = build_symbol_map(t, f, cfg.tol);
        const TruncationParams trunc = cfg.truncation(cusp_classes(cfg.level));
        const ExplicitConstants ec = explicit_constants(t, trunc, cfg.z0(), map);
        out << "R " << detail::fmt(ec.R) << "\n";
        out << "ball_size " << ec.ball_gens.size() << "\n";
        out << "r_lower " << detail::fmt(ec.r_lower) << "\n";
        out << "C_S " << detail::fmt(ec.C_S) << "\n";
        out << "lemma2_slope " << detail::fmt(2.0 * ec.C_S / ec.r_lower) << "\n";
        out << "lemma2_offset "
            << detail::fmt(ec.C_S * (3.0 * M_LN2 / ec.r_lower + 1.0)) << "\n";
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.get_name() << ": " << e.what() << "\n";
        return 1;
    } catch (const PrecisionError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const ResourceError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace modsym::cli
