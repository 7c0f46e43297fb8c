#include "doctest.h"

#include <cmath>

#include "rwlab/muckenhoupt.hpp"
#include "rwlab/operators.hpp"

using namespace rwlab;

namespace {
const RadialWeight std0 = RadialWeight::standard(0.0);
const RadialWeight std1 = RadialWeight::standard(1.0);
const RadialWeight loga2 = RadialWeight::log_type(2.0);
const ExponentPair p2 = ExponentPair::from_p(2.0);
} // namespace

TEST_CASE("ap_profile: equal weights give the constant profile 1") {
    for (const RadialWeight& w : {std0, std1, loga2}) {
        const auto prof = ap_profile(w, w, p2, Grid::sup_default(128, 1e-6), 1);
        for (double v : prof.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(prof.sup_estimate == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(prof.diagnosis == Diagnosis::bounded);
    }
}

TEST_CASE("ap_profile: standard pair is constant in r with the closed-form value") {
    const auto prof = ap_profile(std1, std0, p2, Grid::sup_default(), 2);
    const double expected = 2.0 / std::sqrt(3.0);
    for (double v : prof.values) CHECK(v == doctest::Approx(expected).epsilon(1e-10));
    CHECK(prof.sup_estimate == doctest::Approx(1.1547005383792515).epsilon(1e-10));
    CHECK(prof.diagnosis == Diagnosis::bounded);
}

TEST_CASE("ap_profile: log pair diverges like sqrt(log)") {
    const auto prof = ap_profile(std0, loga2, p2, Grid::sup_default(), 2);
    CHECK(prof.diagnosis == Diagnosis::diverging);
    REQUIRE(prof.refinement_history.size() == 3);
    CHECK(prof.refinement_history[1] > prof.refinement_history[0] * 1.05);
    CHECK(prof.refinement_history[2] > prof.refinement_history[1] * 1.05);
    // values track const * sqrt(log(e/(1-r^2))) on deep nodes
    const double r = prof.grid.back();
    const double model = prof.values.back() / std::sqrt(log_e_over(one_minus_sq(r)));
    const double r2 = prof.grid[prof.grid.size() / 2];
    const double model2 =
        prof.values[prof.grid.size() / 2] / std::sqrt(log_e_over(one_minus_sq(r2)));
    CHECK(model == doctest::Approx(model2).epsilon(0.08));
}

TEST_CASE("ap_profile: pointwise divergence flag for non-integrable sigma") {
    const auto prof = ap_profile(std0, RadialWeight::standard(3.0), p2, Grid::sup_default(64, 1e-4), 1);
    CHECK(prof.diagnosis == Diagnosis::diverging);
    CHECK(prof.divergent_flag);
    CHECK(std::isinf(prof.sup_estimate));
}

TEST_CASE("mp_profile: closed-form cumulative for equal constant weights") {
    // values^2 = (1 + r^2)/2
    const auto prof = mp_profile(std0, std0, p2, Grid::sup_default(256, 1e-8), 0);
    for (size_t i = 0; i < prof.grid.size(); ++i) {
        const double expected = std::sqrt(0.5 * (1.0 + prof.grid[i] * prof.grid[i]));
        CHECK(prof.values[i] == doctest::Approx(expected).epsilon(1e-6));
    }
    CHECK(prof.sup_estimate == doctest::Approx(1.0).epsilon(1e-6));
    // r -> 0 limit: sigma1_tail(0)^{1/p'} = tail1(0)^{1/2}
    CHECK(prof.values.front() ==
          doctest::Approx(std::sqrt(std0.tail1(0.0))).epsilon(1e-9));
}

TEST_CASE("mp_profile: the log counterexample stays bounded") {
    const auto prof = mp_profile(std0, loga2, p2, Grid::sup_default(), 2);
    CHECK(prof.diagnosis == Diagnosis::bounded);
    const auto& h = prof.refinement_history;
    CHECK(h.back() / h[h.size() - 2] == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("scaling invariance of the A_p profile") {
    const Grid g = Grid::sup_default(96, 1e-6);
    const auto base = ap_profile(std1, std0, p2, g, 0);
    const auto scaled = ap_profile(std1.scaled(3.7), std0.scaled(0.2), p2, g, 0);
    REQUIRE(base.values.size() == scaled.values.size());
    for (size_t i = 0; i < base.values.size(); ++i)
        CHECK(scaled.values[i] == doctest::Approx(base.values[i]).epsilon(1e-9));
}

TEST_CASE("A_p finiteness implies M_p finiteness on built-in pairs") {
    const Grid g = Grid::sup_default(192, 1e-8);
    struct Pair {
        RadialWeight omega, nu;
        double p;
    };
    const std::vector<Pair> pairs = {
        {std0, std0, 2.0},
        {std1, std0, 2.0},
        {std0, std1, 3.0},
        {std1, power_tail_weight(std1, 0.3), 2.0},
    };
    for (const auto& pr : pairs) {
        const auto pp = ExponentPair::from_p(pr.p);
        const auto ap = ap_profile(pr.omega, pr.nu, pp, g, 2);
        REQUIRE(ap.diagnosis == Diagnosis::bounded);
        const auto mp = mp_profile(pr.omega, pr.nu, pp, g, 2);
        CHECK(mp.diagnosis == Diagnosis::bounded);
    }
}

TEST_CASE("Forelli-Rudin dichotomy on a sampled parameter set") {
    const Grid g = Grid::sup_default(192, 1e-8);
    for (double gamma : {-0.5, 0.0, 1.0}) {
        for (double beta : {0.0, 1.0, 2.0}) {
            for (double p : {1.5, 2.0}) {
                const auto pp = ExponentPair::from_p(p);
                const auto prof =
                    ap_profile(RadialWeight::standard(gamma), RadialWeight::standard(beta), pp, g, 2);
                const bool sign = p * (gamma + 1.0) > beta + 1.0;
                if (sign)
                    CHECK(prof.diagnosis == Diagnosis::bounded);
                else
                    CHECK(prof.diagnosis == Diagnosis::diverging);
            }
        }
    }
}

TEST_CASE("power-tail pairs: bounded iff -1 < alpha < p/p'") {
    const Grid g = Grid::sup_default(128, 1e-8);
    const double p = 2.0; // p/p' = 1
    const auto pp = ExponentPair::from_p(p);
    for (double alpha : {-0.9, -0.5, 0.0, 0.5, 0.9}) {
        const auto prof = ap_profile(std1, power_tail_weight(std1, alpha), pp, g, 2);
        CHECK(prof.diagnosis == Diagnosis::bounded);
    }
    for (double alpha : {1.0, 1.5, 3.0}) {
        const auto prof = ap_profile(std1, power_tail_weight(std1, alpha), pp, g, 2);
        CHECK(prof.diagnosis == Diagnosis::diverging);
    }
}

TEST_CASE("A_p duality: pointwise ratio is 1") {
    const Grid g = Grid::sup_default(96, 1e-6);
    SUBCASE("self-dual") {
        const auto d = ap_duality_check(std0, [](double) { return 1.0; }, p2, g);
        CHECK(d.max_deviation <= 1e-10);
    }
    SUBCASE("factor (1-s^2), p=2") {
        const auto d = ap_duality_check(std0, [](double s) { return one_minus_sq(s); }, p2, g);
        CHECK(d.max_deviation <= 1e-8);
    }
    SUBCASE("factor (1-s^2)^{-1/2}, p=3") {
        const auto d = ap_duality_check(
            std1, [](double s) { return std::pow(one_minus_sq(s), -0.5); },
            ExponentPair::from_p(3.0), g);
        CHECK(d.max_deviation <= 1e-8);
    }
}

TEST_CASE("A_p duality accepts sampled profile factors") {
    const Grid g = Grid::sup_default(64, 1e-5);
    const Profile f = Profile::sample([](double s) { return 1.0 + s * s; }, Grid::operator_grid(64, 1e-6));
    const auto d = ap_duality_check(std0, f, p2, g);
    CHECK(d.max_deviation <= 1e-8);
}

TEST_CASE("M_p of a weight against itself stays bounded even for steep decay") {
    // closed structure: M_p(w,w)(r)^p = 1 + tail1(r)(1 - 1/tail1(0)) for p = 2
    const RadialWeight expw = RadialWeight::exponential(1.0, 1.0);
    const auto prof = mp_profile(expw, expw, p2, Grid::sup_default(96, 1e-6), 1);
    CHECK(prof.diagnosis == Diagnosis::bounded);
    CHECK(prof.sup_estimate == doctest::Approx(1.0).epsilon(1e-5));
    const double t0 = expw.tail1(0.0);
    for (size_t i = 0; i < prof.grid.size(); i += 7) {
        const double closed = std::sqrt(1.0 + expw.tail1(prof.grid[i]) * (1.0 - 1.0 / t0));
        CHECK(prof.values[i] == doctest::Approx(closed).epsilon(1e-4));
    }
}
