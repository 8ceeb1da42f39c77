#include "support.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <sstream>

using namespace modsym;
using testsupport::map11;
using testsupport::table11;
using testsupport::trunc11;

TEST_CASE("sampling: determinism, degenerate length, norm-ball") {
    const GeneratorTable& t = table11();
    const auto s1 = sample_elements(t, SampleStrategy::RandomWord, 25, 10, 7);
    const auto s2 = sample_elements(t, SampleStrategy::RandomWord, 25, 10, 7);
    REQUIRE(s1 == s2);
    const auto s3 = sample_elements(t, SampleStrategy::RandomWord, 25, 10, 8);
    REQUIRE(s1 != s3);

    const auto only_id = sample_elements(t, SampleStrategy::RandomWord, 1, 0, 5);
    REQUIRE(only_id.size() == 1);
    REQUIRE(only_id[0].is_identity());

    const GeneratorTable t1 = coset_table(1);
    const auto ball = sample_elements(t1, SampleStrategy::NormBall, 0, 1, 0);
    REQUIRE(ball.size() == 10);  // cross-checked against brute force elsewhere
    REQUIRE_THROWS_AS(sample_elements(t1, SampleStrategy::NormBall, 5, 100, 0),
                      ResourceError);
}

TEST_CASE("scan: trivial records and per-row errors") {
    const PointH z0(0, 2);
    const GeneratorTable t1 = coset_table(1);
    const CuspFormSeries zero = CuspFormSeries::from_coeffs(1, {0.0});
    const SymbolMap m1 = build_symbol_map(t1, zero, 1e-8);
    const TruncationParams tr1 = choose_truncation(1, z0);

    const std::vector<GroupElement> sample{GroupElement::identity(), GroupElement::gen_T()};
    const ScanResult res = scan(sample, m1, tr1, z0);
    REQUIRE(res.records.size() == 2);
    REQUIRE(res.row_errors.empty());
    REQUIRE(res.records[0].abs_psi == 0.0);
    REQUIRE(res.records[0].dist == 0.0);
    REQUIRE(res.records[0].word_len == 0);
    REQUIRE(res.records[1].abs_psi == 0.0);  // T is parabolic
    REQUIRE(res.records[1].log_norm == 0.0);

    // a non-member row is recorded as an error, not a crash
    const std::vector<GroupElement> bad{GroupElement::identity(), GroupElement(1, 0, 7, 1)};
    const ScanResult res2 = scan(bad, map11(), trunc11(), z0);
    REQUIRE(res2.records.size() == 1);
    REQUIRE(res2.row_errors.size() == 1);
    REQUIRE(res2.row_errors[0].first == 1);
}

TEST_CASE("fit_log_bound rule") {
    auto rec = [](long long nrm, double psi) {
        GrowthRecord r;
        r.norm_value = nrm;
        r.log_norm = std::log(static_cast<double>(nrm));
        r.abs_psi = psi;
        return r;
    };
    // all-zero values
    std::vector<GrowthRecord> zeros{rec(1, 0), rec(5, 0), rec(50, 0)};
    GrowthFit f0 = fit_log_bound(zeros);
    REQUIRE(f0.A == 0.0);
    REQUIRE(f0.B == 0.0);

    // a single norm-1 record pins B
    std::vector<GrowthRecord> one{rec(1, 0.7)};
    GrowthFit f1 = fit_log_bound(one);
    REQUIRE(f1.A == 0.0);
    REQUIRE(f1.B == 0.7);

    // pure slope-2 data
    std::vector<GrowthRecord> slope{rec(3, 2 * std::log(3.0)), rec(10, 2 * std::log(10.0)),
                                    rec(1000, 2 * std::log(1000.0))};
    GrowthFit f2 = fit_log_bound(slope);
    REQUIRE(f2.A == Catch::Approx(2.0).epsilon(1e-12));
    REQUIRE(f2.B == 0.0);

    REQUIRE_THROWS_AS(fit_log_bound(std::vector<GrowthRecord>{}), std::invalid_argument);
}

TEST_CASE("scan records satisfy the fitted bound and the proof chain") {
    const PointH z0(0, 2);
    const auto sample = sample_elements(table11(), SampleStrategy::RandomWord, 60, 14, 99);
    const ScanResult res = scan(sample, map11(), trunc11(), z0);
    REQUIRE(res.row_errors.empty());

    const GrowthFit fit = fit_log_bound(res.records);
    const double d0i = distance(z0, PointH(0, 1));
    const double cs = word_bound_constant(map11());
    std::vector<LengthDistPair> pairs;
    for (const GrowthRecord& r : res.records) {
        REQUIRE(r.abs_psi <= fit.A * r.log_norm + fit.B + 1e-9);
        REQUIRE(r.reduced_dist <= r.dist + 1e-9);
        REQUIRE(r.abs_psi <= cs * static_cast<double>(r.word_len) + 1e-9);
        REQUIRE(r.reduced_dist <= 2.0 * r.log_norm + 3.0 * M_LN2 + 2.0 * d0i + 1e-9);
        pairs.push_back({static_cast<double>(r.word_len), r.reduced_dist});
    }
    // word length against the reduced distance, fitted on the same sample
    const auto [lam, cee] = fit_lambda_c(pairs);
    REQUIRE(lam >= 1.0);
    REQUIRE(cee <= 50.0);
    for (const LengthDistPair& p : pairs) REQUIRE(p.length <= lam * p.dist + cee + 1e-9);
}

TEST_CASE("explicit constants at level 1") {
    const PointH z0(0, 2);
    const GeneratorTable t1 = coset_table(1);
    const CuspFormSeries zero = CuspFormSeries::from_coeffs(1, {0.0});
    const SymbolMap m1 = build_symbol_map(t1, zero, 1e-8);
    const TruncationParams tr1 = choose_truncation(1, z0);

    ConstantsOptions opts;
    opts.rays = 256;
    const ExplicitConstants ec = explicit_constants(t1, tr1, z0, m1, opts);
    REQUIRE(ec.R > 0.5);
    REQUIRE(ec.R < 3.0);
    REQUIRE(ec.r_lower > 0.0);
    REQUIRE(ec.C_S == 0.0);

    // S contains the identity and is inverse-closed
    bool has_id = false;
    for (const GroupElement& g : ec.ball_gens) {
        has_id = has_id || g.is_identity();
        REQUIRE(std::find(ec.ball_gens.begin(), ec.ball_gens.end(), g.inverse()) !=
                ec.ball_gens.end());
    }
    REQUIRE(has_id);
    // members really meet the ball condition, non-members exceed it
    const RatPoint z0r = rat_point(z0);
    for (const GroupElement& g : ec.ball_gens)
        REQUIRE(distance(z0r, mobius(g, z0r)) <= 2.0 * ec.R + 1e-6);
}

TEST_CASE("explicit constants at level 11 bound the scan records") {
    const PointH z0(0, 2);
    ConstantsOptions opts;
    opts.rays = 256;
    const ExplicitConstants ec = explicit_constants(table11(), trunc11(), z0, map11(), opts);
    REQUIRE(ec.r_lower > 0.0);
    REQUIRE(ec.C_S > 0.0);

    const auto sample = sample_elements(table11(), SampleStrategy::RandomWord, 40, 12, 5);
    const ScanResult res = scan(sample, map11(), trunc11(), z0);
    const Lemma2Report rep = verify_lemma2(res.records, ec);
    REQUIRE(rep.checked == res.records.size());
    REQUIRE(rep.violations == 0);
    REQUIRE(rep.min_slack >= 0.0);

    // norm-1 members are bounded by the offset term alone
    for (const GrowthRecord& r : res.records)
        if (r.norm_value == 1)
            REQUIRE(ec.C_S * (3.0 * M_LN2 / ec.r_lower + 1.0) >= r.abs_psi);

    const Lemma2Report empty = verify_lemma2(std::vector<GrowthRecord>{}, ec);
    REQUIRE(empty.violations == 0);
}

TEST_CASE("csv output format") {
    GrowthRecord r;
    r.norm_value = 12345;
    r.log_norm = std::log(12345.0);
    r.word_len = 7;
    r.dist = 1.5;
    r.reduced_dist = 0.75;
    r.abs_psi = 0.25;
    std::ostringstream os;
    write_csv(os, std::vector<GrowthRecord>{r});
    REQUIRE(os.str() ==
            "norm,log_norm,word_len,dist,reduced_dist,abs_psi\n"
            "12345,9.42100640177,7,1.5,0.75,0.25\n");
}
