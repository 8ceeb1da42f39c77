#include "support.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace modsym;
using testsupport::random_gamma0;

TEST_CASE("cusp normalization") {
    REQUIRE(Cusp(2, 4) == Cusp(1, 2));
    REQUIRE(Cusp(-1, -2) == Cusp(1, 2));
    REQUIRE(Cusp(3, -6) == Cusp(-1, 2));
    REQUIRE(Cusp(-7, 0) == Cusp::infinity());
    REQUIRE(Cusp::infinity().str() == "oo");
    REQUIRE_THROWS_AS(Cusp(0, 0), std::invalid_argument);
}

TEST_CASE("class counts match the divisor formula") {
    REQUIRE(cusp_classes(1).size() == 1);
    REQUIRE(cusp_classes(11).size() == 2);
    REQUIRE(cusp_classes(4).size() == 3);
    for (long n = 1; n <= 50; ++n)
        REQUIRE(Integer(cusp_classes(n).size()) == cusp_class_count(n));
}

TEST_CASE("representatives for small levels") {
    const auto c1 = cusp_classes(1);
    REQUIRE(c1[0].rep == Cusp::infinity());
    const auto c11 = cusp_classes(11);
    REQUIRE(c11[0].rep == Cusp::infinity());
    REQUIRE(c11[1].rep == Cusp(0, 1));
}

TEST_CASE("width examples and closed form") {
    REQUIRE(cusp_width(Cusp::infinity(), 11) == 1);
    REQUIRE(cusp_width(Cusp(0, 1), 11) == 11);
    REQUIRE(cusp_width(Cusp(1, 2), 4) == 1);
    // minimality cross-check against the direct search
    for (long n = 1; n <= 50; ++n) {
        for (const CuspClass& cls : cusp_classes(n)) {
            const Integer q2 = cls.rep.q * cls.rep.q;
            long h = 1;
            while (fmod_pos(q2 * h, n) != 0) ++h;
            REQUIRE(h == cls.width);
        }
    }
}

TEST_CASE("stabilizer generators: membership, parabolicity, fixed point") {
    for (long n = 1; n <= 50; ++n) {
        for (const CuspClass& cls : cusp_classes(n)) {
            REQUIRE(in_gamma0(cls.p_stab, n));
            REQUIRE(cls.p_stab.trace_abs() == 2);
            REQUIRE(classify(cls.p_stab) == TraceClass::Parabolic);
            REQUIRE(apply(cls.p_stab, cls.rep) == cls.rep);
            // sigma T sigma^{-1} as a real matrix agrees with p_stab up to sign
            const RealMoebius lhs =
                cls.sigma * RealMoebius{1, 1, 0, 1} * cls.sigma.inverse();
            const double sign = lhs.a * to_double(cls.p_stab.a()) >= 0 ? 1.0 : -1.0;
            REQUIRE(lhs.a == Catch::Approx(sign * to_double(cls.p_stab.a())).margin(1e-9));
            REQUIRE(lhs.b == Catch::Approx(sign * to_double(cls.p_stab.b())).margin(1e-9));
            REQUIRE(lhs.c == Catch::Approx(sign * to_double(cls.p_stab.c())).margin(1e-9));
            REQUIRE(lhs.d == Catch::Approx(sign * to_double(cls.p_stab.d())).margin(1e-9));
        }
    }
}

TEST_CASE("classify_cusp examples") {
    const auto classes = cusp_classes(11);

    const auto [i_rep, m_rep] = classify_cusp(classes[1].rep, 11, classes);
    REQUIRE(i_rep == 1);
    REQUIRE(m_rep.is_identity());

    // 1 = T * 0
    const auto [i_one, m_one] = classify_cusp(Cusp(1, 1), 11, classes);
    REQUIRE(i_one == 1);
    REQUIRE(in_gamma0(m_one, 11));
    REQUIRE(apply(m_one, classes[1].rep) == Cusp(1, 1));

    // denominators divisible by the level are equivalent to infinity
    const auto [i_deep, m_deep] = classify_cusp(Cusp(5, 11), 11, classes);
    REQUIRE(i_deep == 0);
    REQUIRE(apply(m_deep, Cusp::infinity()) == Cusp(5, 11));
}

TEST_CASE("equivalence criterion against bounded orbit search") {
    for (long n : {6L, 11L, 14L}) {
        const auto ball = norm_ball(n, 12);
        std::vector<Cusp> cusps;
        for (long q = 0; q <= 6; ++q)
            for (long p = -4; p <= 4; ++p)
                if ((p != 0 || q != 0) && gcd(Integer(p), Integer(q)) == 1 && !(q == 0 && p != 1))
                    cusps.emplace_back(p, q);
        for (const Cusp& a : cusps) {
            for (const Cusp& b : cusps) {
                bool orbit_hit = false;
                for (const GroupElement& g : ball)
                    if (apply(g, a) == b) {
                        orbit_hit = true;
                        break;
                    }
                const bool crit = cusp_equivalent(a, b, n);
                if (orbit_hit) REQUIRE(crit);
                if (crit) {
                    // the mapping element is an explicit witness
                    const auto m = cusp_mapping(a, b, n);
                    REQUIRE(m.has_value());
                    REQUIRE(in_gamma0(*m, n));
                    REQUIRE(apply(*m, a) == b);
                }
            }
        }
    }
}

TEST_CASE("scaling compatibility: sigma_{gamma c} sigma_c^{-1} lies in the group") {
    Rng rng(51);
    for (long n : {11L, 14L}) {
        const auto classes = cusp_classes(n);
        for (int i = 0; i < 50; ++i) {
            const GroupElement g = random_gamma0(rng, n, 200);
            for (const CuspClass& cls : classes) {
                const Cusp moved = apply(g, cls.rep);
                const auto [idx, m] = classify_cusp(moved, n, classes);
                REQUIRE(idx == static_cast<std::size_t>(&cls - classes.data()));
                // scaling of the moved cusp is m * sigma(rep); composing with
                // sigma(rep)^{-1} gives exactly m, a group element fixing
                // nothing more than the compatibility relation requires
                REQUIRE(in_gamma0(m, n));
                REQUIRE(apply(m, cls.rep) == moved);
                // m differs from g by a stabilizer element of the rep
                REQUIRE(apply(m.inverse() * g, cls.rep) == cls.rep);
            }
        }
    }
}

TEST_CASE("enters_horoball examples") {
    const auto classes = cusp_classes(1);
    const CuspClass& inf = classes[0];
    REQUIRE_FALSE(enters_horoball(PointH(0, 1), PointH(0, 2), inf, 10.0));
    REQUIRE(enters_horoball(PointH(0, 1), PointH(0, 100), inf, 10.0));
    REQUIRE(enters_horoball(PointH(0, 1), PointH(1, 1), inf, 1.1));
    REQUIRE_FALSE(enters_horoball(PointH(0, 1), PointH(1, 1), inf, 1.15));
}

TEST_CASE("horoball entry is stabilizer-invariant") {
    Rng rng(52);
    const auto classes = cusp_classes(11);
    const Rational T = rational_from_double(4.0);
    for (const CuspClass& cls : classes) {
        const detail::Horoball h = detail::class_horoball(cls, T);
        auto enters = [&](const RatPoint& a, const RatPoint& b) {
            return h.at_infinity ? segment_apex_exceeds(a, b, h.size)
                                 : segment_enters_disk(a, b, h.m, h.size);
        };
        std::size_t positives = 0;
        for (int i = 0; i < 200; ++i) {
            const RatPoint z = rat_point(testsupport::random_point(rng));
            const RatPoint w = rat_point(testsupport::random_point(rng));
            const RatPoint pz = mobius(cls.p_stab, z), pw = mobius(cls.p_stab, w);
            const bool before = enters(z, w);
            REQUIRE(before == enters(pz, pw));
            positives += before;
        }
        INFO("class " << cls.rep.str() << ": " << positives << " entering segments");
    }
}

TEST_CASE("choose_truncation examples and validation") {
    const TruncationParams t1 = choose_truncation(1, PointH(0, 2));
    REQUIRE(t1.T == 4.0);  // height 2 with safety factor 2
    const TruncationParams t11 = choose_truncation(11, PointH(0, 2));
    REQUIRE(t11.T >= 4.0);
    const TruncationParams tx = choose_truncation(11, PointH(0.1, 1.2));
    REQUIRE(tx.T > 2.4);

    REQUIRE_THROWS_AS(choose_truncation(1, PointH(0, 1)), std::invalid_argument);
    REQUIRE_THROWS_AS(TruncationParams(1.2, 1, cusp_classes(1)), std::invalid_argument);
}
