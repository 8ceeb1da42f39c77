#include "support.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace modsym;
using testsupport::map11;
using testsupport::random_gamma0;
using testsupport::random_word_element;
using testsupport::table11;
using testsupport::trunc11;

namespace {

void check_postconditions(const GroupElement& g, const ReductionResult& r,
                          const TruncationParams& trunc, const PointH& z0) {
    GroupElement acc = g;
    for (const GroupElement& p : r.parabolics) {
        REQUIRE(classify(p) == TraceClass::Parabolic);
        acc = p * acc;
    }
    REQUIRE(acc == r.gamma_s);
    REQUIRE(r.steps == r.parabolics.size());
    REQUIRE(r.distance_trace.size() == r.steps + 1);
    for (std::size_t i = 1; i < r.distance_trace.size(); ++i)
        REQUIRE(r.distance_trace[i] < r.distance_trace[i - 1]);
    REQUIRE(r.distance_trace.back() <= r.distance_trace.front() + 1e-9);
    const RatPoint z0r = rat_point(z0);
    REQUIRE(geodesic_in_truncation(z0r, mobius(r.gamma_s, z0r), trunc));
}

}  // namespace

TEST_CASE("reduce: identity and pure parabolic") {
    const PointH z0(0, 2);
    const TruncationParams t1 = choose_truncation(1, z0);

    const ReductionResult rid = reduce(GroupElement::identity(), t1, z0);
    REQUIRE(rid.gamma_s.is_identity());
    REQUIRE(rid.steps == 0);

    // T^5 collapses to the identity through p1 = T^-5
    const ReductionResult r = reduce(GroupElement::gen_T().pow(5), t1, z0);
    REQUIRE(r.gamma_s.is_identity());
    REQUIRE(r.steps == 1);
    REQUIRE(r.parabolics[0] == GroupElement::gen_T().pow(-5));
    REQUIRE(r.distance_trace.back() == 0.0);
}

TEST_CASE("reduce: preconditions") {
    const PointH z0(0, 2);
    REQUIRE_THROWS_AS(reduce(GroupElement::gen_S(), trunc11(), z0), MembershipError);
    REQUIRE_THROWS_AS(reduce(GroupElement::identity(), trunc11(), PointH(0, 0.5)),
                      std::invalid_argument);
}

TEST_CASE("reduce: postconditions on random members at several levels") {
    const PointH z0(0, 2);
    std::size_t max_steps_seen = 0;
    for (long n : {1L, 11L, 14L}) {
        const TruncationParams trunc = choose_truncation(n, z0);
        Rng rng(60 + n);
        for (int i = 0; i < 60; ++i) {
            const GroupElement g = random_gamma0(rng, n, 10000);
            const ReductionResult r = reduce(g, trunc, z0);
            check_postconditions(g, r, trunc, z0);
            max_steps_seen = std::max(max_steps_seen, r.steps);
        }
    }
    INFO("maximum observed reduction steps: " << max_steps_seen);
    REQUIRE(max_steps_seen <= 10000);
}

TEST_CASE("reduce preserves the symbol value") {
    const PointH z0(0, 2);
    Rng rng(61);
    for (int i = 0; i < 40; ++i) {
        const GroupElement g = random_gamma0(rng, 11, 5000);
        const ReductionResult r = reduce(g, trunc11(), z0);
        const auto before = modsym_word(g, map11());
        const auto after = modsym_word(r.gamma_s, map11());
        REQUIRE(std::abs(before - after) < 1e-6);
    }
}

TEST_CASE("reduce: final bound chain") {
    const PointH z0(0, 2);
    const double d0i = distance(z0, PointH(0, 1));
    Rng rng(62);
    for (int i = 0; i < 60; ++i) {
        const GroupElement g = random_gamma0(rng, 11, 10000);
        const ReductionResult r = reduce(g, trunc11(), z0);
        const double lhs = r.distance_trace.back();
        REQUIRE(lhs <= 2.0 * d0i + distance_gamma_i(g) + 1e-9);
        REQUIRE(lhs <= 2.0 * log_integer(norm(g)) + 3.0 * M_LN2 + 2.0 * d0i + 1e-9);
    }
}

TEST_CASE("reduce handles very large norms") {
    const PointH z0(0, 2);
    Rng rng(63);
    const GeneratorTable& t = table11();
    for (int i = 0; i < 10; ++i) {
        const GroupElement g = random_word_element(rng, t, 40);
        const ReductionResult r = reduce(g, trunc11(), z0);
        check_postconditions(g, r, trunc11(), z0);
    }
}

TEST_CASE("geodesic_in_truncation examples") {
    const TruncationParams t1 = choose_truncation(1, PointH(0, 2));
    REQUIRE(geodesic_in_truncation(PointH(0, 1), PointH(0, 1.5), t1));

    const TruncationParams t_manual(10.0, 1, cusp_classes(1));
    REQUIRE_FALSE(geodesic_in_truncation(PointH(0, 1), PointH(0, 100), t_manual));

    // straddle a translated horoball at the cusp 0 of Gamma_0(11): push a high
    // vertical segment through S so it dives toward 0
    const RatPoint high{Rational(1, 1000), Rational(50)};
    const RatPoint low = mobius(GroupElement::gen_S(), high);
    REQUIRE_FALSE(geodesic_in_truncation(RatPoint{Rational(0), Rational(1)}, low, trunc11()));
}

TEST_CASE("crossing search certifies a designed deep incursion") {
    // cusp 1/3 lies in the class of 0 for Gamma_0(11) (width 11); its horoball
    // at T = 4 has diameter 1/396. Aim a segment from 2i into that ball.
    REQUIRE(cusp_equivalent(Cusp(0, 1), Cusp(1, 3), 11));
    const RatPoint z0r{Rational(0), Rational(2)};
    const RatPoint inside{Rational(1, 3) + Rational(1, 100000), Rational(1, 500)};
    REQUIRE(point_in_disk(inside, Rational(1, 3), Rational(1, 396)));

    std::vector<Cusp> reported;
    detail::for_each_crossing(z0r, inside, trunc11(), [&](std::size_t idx, const Cusp& c) {
        REQUIRE(idx < trunc11().classes.size());
        reported.push_back(c);
        return true;
    });
    bool found = false;
    for (const Cusp& c : reported) found = found || c == Cusp(1, 3);
    REQUIRE(found);
    REQUIRE_FALSE(geodesic_in_truncation(z0r, inside, trunc11()));
}
