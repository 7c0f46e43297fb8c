#include "doctest.h"

#include <cmath>
#include <fstream>
#include <thread>

#include "oracle.hpp"
#include "rwlab/weight.hpp"

using namespace rwlab;

namespace {
const RadialWeight std0 = RadialWeight::standard(0.0);
const RadialWeight std1 = RadialWeight::standard(1.0);
const RadialWeight loga2 = RadialWeight::log_type(2.0);
const RadialWeight expw = RadialWeight::exponential(1.0, 1.0);

double log_tail1_closed(double alpha, double r) {
    return std::pow(1.0 - std::log((1.0 - r) * (1.0 + r)), 1.0 - alpha) / (2.0 * (alpha - 1.0));
}
} // namespace

TEST_CASE("eval: closed-form kinds") {
    CHECK(std0(0.5) == 1.0);
    CHECK(loga2(0.0) == doctest::Approx(1.0).epsilon(1e-14)); // (1)^{-1} (log e)^{-2}
    // e^{-c/(1-r)} at c=1, r=0.5; reference value of e^{-2}
    CHECK(expw(0.5) == doctest::Approx(0.13533528323661270).epsilon(1e-15));
    CHECK(std1(0.5) == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("eval: domain errors") {
    CHECK_THROWS_AS(std0(1.0), std::domain_error);
    CHECK_THROWS_AS(std0(1.5), std::domain_error);
    CHECK_THROWS_AS(std0(-0.1), std::domain_error);
}

TEST_CASE("construction guards") {
    CHECK_THROWS_AS(RadialWeight::standard(-1.0), std::invalid_argument);
    CHECK_THROWS_AS(RadialWeight::log_type(1.0), std::invalid_argument);
    CHECK_THROWS_AS(RadialWeight::exponential(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(power_tail_weight(std0, -1.0), std::invalid_argument);
}

TEST_CASE("tail: closed forms against the Simpson oracle") {
    CHECK(std0.tail(0.5) == doctest::Approx(0.5).epsilon(1e-13));
    // antiderivative of (1-s^2) is s - s^3/3
    CHECK(std1.tail(0.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
    CHECK(std1.tail(0.3) ==
          doctest::Approx(oracle::integrate([](double s) { return 1.0 - s * s; }, 0.3, 1.0))
              .epsilon(1e-12));
    // log-kind tail decreases to 0
    double prev = loga2.tail(0.9);
    for (double r : {0.99, 0.999, 0.9999}) {
        const double t = loga2.tail(r);
        CHECK(t < prev);
        CHECK(t > 0.0);
        prev = t;
    }
    // partial integral cross-check in raw s-space
    const double part = oracle::integrate(
        [](double s) {
            const double x = (1.0 - s) * (1.0 + s);
            return std::pow(1.0 - std::log(x), -2.0) / x;
        },
        0.3, 0.9, 1e-13);
    CHECK(loga2.tail(0.3) - loga2.tail(0.9) == doctest::Approx(part).epsilon(1e-9));
}

TEST_CASE("tail1: closed forms and oracle cross-checks") {
    CHECK(std0.tail1(0.6) == doctest::Approx(0.32).epsilon(1e-14)); // (1-r^2)/2
    CHECK(std1.tail1(0.0) == doctest::Approx(0.25).epsilon(1e-14));
    // u-substitution closed form for the log kind
    CHECK(loga2.tail1(0.5) == doctest::Approx(log_tail1_closed(2.0, 0.5)).epsilon(1e-14));
    const double part = oracle::integrate(
        [](double s) {
            const double x = (1.0 - s) * (1.0 + s);
            return s * std::pow(1.0 - std::log(x), -2.0) / x;
        },
        0.5, 0.9, 1e-13);
    CHECK(loga2.tail1(0.5) - loga2.tail1(0.9) == doctest::Approx(part).epsilon(1e-10));
    // exponential kind against the oracle
    CHECK(expw.tail1(0.2) ==
          doctest::Approx(oracle::integrate(
                              [](double s) { return s * std::exp(-1.0 / (1.0 - s)); }, 0.2, 1.0,
                              1e-14))
              .epsilon(1e-9));
}

TEST_CASE("tail additivity and monotonicity") {
    for (const RadialWeight& w : {std0, std1, loga2, expw}) {
        double prev_t = w.tail(0.0), prev_t1 = w.tail1(0.0);
        for (double r : {0.2, 0.5, 0.8, 0.95, 0.99}) {
            CHECK(w.tail(r) <= prev_t + 1e-15);
            CHECK(w.tail1(r) <= prev_t1 + 1e-15);
            prev_t = w.tail(r);
            prev_t1 = w.tail1(r);
        }
        const double seg = oracle::integrate([&w](double s) { return s * w(s); }, 0.3, 0.7, 1e-13);
        CHECK(w.tail1(0.3) - w.tail1(0.7) == doctest::Approx(seg).epsilon(1e-8));
    }
}

TEST_CASE("finite-difference derivative identity d tail1/dr = -r w(r)") {
    const double h = 1e-6;
    for (const RadialWeight& w : {std0, std1, loga2, expw}) {
        for (double r : {0.3, 0.6, 0.85}) {
            const double fd = (w.tail1(r + h) - w.tail1(r - h)) / (2.0 * h);
            const double target = -r * w(r);
            CHECK(std::abs(fd - target) <= 1e-6 * (1.0 + r * w(r)));
        }
    }
}

TEST_CASE("moments: closed forms, cache, monotonicity") {
    CHECK(std0.moment(3.0) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(std1.moment(1.0) == doctest::Approx(0.25).epsilon(1e-14));
    // Beta identity: w_x = B((x+1)/2, gamma+1)/2; at gamma=0.5, x=2 the oracle
    const RadialWeight g05 = RadialWeight::standard(0.5);
    const double expected = oracle::integrate(
        [](double s) { return s * s * std::sqrt((1.0 - s) * (1.0 + s)); }, 0.0, 1.0, 1e-14);
    CHECK(g05.moment(2.0) == doctest::Approx(expected).epsilon(1e-11));
    CHECK(g05.moment(2.0) == doctest::Approx(M_PI / 16.0).epsilon(1e-12));
    // log kind: w_1 equals tail1(0) by definition (independent code paths)
    CHECK(loga2.moment(1.0) == doctest::Approx(loga2.tail1(0.0)).epsilon(1e-10));
    // nonincreasing in x; moment(0) = tail(0)
    for (const RadialWeight& w : {std0, std1, loga2}) {
        double prev = w.moment(0.0);
        CHECK(prev == doctest::Approx(w.tail(0.0)).epsilon(1e-11));
        for (double x : {0.5, 1.0, 2.0, 4.0, 8.0}) {
            CHECK(w.moment(x) <= prev * (1.0 + 1e-12));
            prev = w.moment(x);
        }
    }
    CHECK_THROWS_AS(std0.moment(-1.0), std::invalid_argument);
}

TEST_CASE("power_tail weight and the exact tail1 identity") {
    // alpha = 0 reproduces the base weight
    const RadialWeight same = power_tail_weight(std0, 0.0);
    for (double r : {0.0, 0.4, 0.9}) CHECK(same(r) == doctest::Approx(std0(r)).epsilon(1e-14));

    const RadialWeight nu1 = power_tail_weight(std0, 1.0);
    for (double r : {0.0, 0.3, 0.7}) {
        const double w1 = std0.tail1(r);
        CHECK(nu1.tail1(r) == doctest::Approx(w1 * w1 / 2.0).epsilon(1e-14));
        CHECK(nu1(r) == doctest::Approx((1.0 - r * r) / 2.0).epsilon(1e-14));
    }
    // oracle check of the identity at alpha = 1
    const double direct = oracle::integrate_to_one([&](double s) { return s * nu1(s); }, 0.25);
    CHECK(nu1.tail1(0.25) == doctest::Approx(direct).epsilon(1e-10));

    const RadialWeight nuh = power_tail_weight(std1, -0.5);
    CHECK(nuh.tail1(0.0) ==
          doctest::Approx(std::pow(std1.tail1(0.0), 0.5) / 0.5).epsilon(1e-13));
    const double direct2 = oracle::integrate_to_one([&](double s) { return s * nuh(s); }, 0.0);
    CHECK(nuh.tail1(0.0) == doctest::Approx(direct2).epsilon(1e-8));
}

TEST_CASE("sigma weight recognitions and conventions") {
    const ExponentPair p2 = ExponentPair::from_p(2.0);
    // nu == omega collapses to omega
    CHECK(sigma_weight(std1, std1, p2).same_object(std1));
    // standard pair: exponent gamma p' - beta p'/p
    const RadialWeight sig = sigma_weight(std1, std0, p2);
    for (double r : {0.0, 0.5, 0.9}) {
        const double x = (1.0 - r) * (1.0 + r);
        CHECK(sig(r) == doctest::Approx(x * x).epsilon(1e-13));
    }
    // non-integrable sigma reports infinite tails
    const RadialWeight sig_div = sigma_weight(std0, RadialWeight::standard(3.0), p2);
    CHECK(std::isinf(sig_div.tail1(0.5)));
    CHECK(std::isinf(sig_div.tail(0.5)));
    // power-tail recognition: nu = omega tail1^alpha gives sigma = omega tail1^{-alpha p'/p}
    const RadialWeight nu = power_tail_weight(std1, 0.5);
    const RadialWeight sig_pt = sigma_weight(std1, nu, p2);
    for (double r : {0.1, 0.6}) {
        CHECK(sig_pt(r) ==
              doctest::Approx(std1(r) * std::pow(std1.tail1(r), -0.5)).epsilon(1e-12));
    }
}

TEST_CASE("scalar multiples scale tails and moments exactly") {
    const RadialWeight w = RadialWeight::standard(1.3);
    const RadialWeight cw = w.scaled(2.5);
    for (double r : {0.0, 0.4, 0.9}) {
        CHECK(cw(r) == 2.5 * w(r));
        CHECK(cw.tail(r) == 2.5 * w.tail(r));
        CHECK(cw.tail1(r) == 2.5 * w.tail1(r));
    }
    CHECK(cw.moment(2.0) == 2.5 * w.moment(2.0));
    CHECK_THROWS_AS(w.scaled(0.0), std::invalid_argument);
}

TEST_CASE("tabulated weights: exact trapezoid tails, decay extension") {
    const RadialWeight tab = RadialWeight::tabulated({0.0, 0.5}, {1.0, 1.0});
    CHECK(tab(0.25) == 1.0);
    CHECK(tab(0.75) == doctest::Approx(0.5).epsilon(1e-14)); // linear decay to 0 at r=1
    CHECK(tab.tail(0.0) == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(tab.tail1(0.0) == doctest::Approx(7.0 / 24.0).epsilon(1e-13));
    CHECK(tab.tail1(0.75) ==
          doctest::Approx(oracle::integrate([&](double s) { return s * 2.0 * (1.0 - s); }, 0.75,
                                            1.0, 1e-14))
              .epsilon(1e-12));

    CHECK_THROWS_AS(RadialWeight::tabulated({0.0, 0.5}, {1.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(RadialWeight::tabulated({0.5, 0.2}, {1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(RadialWeight::tabulated({0.0, 0.5}, {-1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(RadialWeight::tabulated({0.0}, {1.0}), std::invalid_argument);
}

TEST_CASE("products") {
    const RadialWeight prod2 = product(std1, std1);
    for (double r : {0.2, 0.7}) {
        const double x = (1.0 - r) * (1.0 + r);
        CHECK(prod2(r) == doctest::Approx(x * x).epsilon(1e-14));
    }
    const double t = oracle::integrate_to_one([&](double s) { return prod2(s); }, 0.5);
    CHECK(prod2.tail(0.5) == doctest::Approx(t).epsilon(1e-9));
}

TEST_CASE("exponent pair") {
    const ExponentPair p = ExponentPair::from_p(1.5);
    CHECK(1.0 / p.p + 1.0 / p.conj == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(p.conj == doctest::Approx(3.0).epsilon(1e-15));
    CHECK_THROWS_AS(ExponentPair::from_p(1.0), std::invalid_argument);
}

TEST_CASE("weight spec mini-language") {
    CHECK(parse_weight("std:gamma=1.5").standard_gamma() == 1.5);
    CHECK(parse_weight("log:alpha=2").log_alpha() == 2.0);
    CHECK(parse_weight("exp:c=1,k=2")(0.5) == doctest::Approx(std::exp(-4.0)).epsilon(1e-14));
    const RadialWeight pt = parse_weight("powtail:base=std:gamma=1,alpha=-0.5");
    CHECK(pt.power_tail_alpha() == -0.5);
    CHECK(pt.power_tail_base().standard_gamma() == 1.0);
    // nested commas: the last ,alpha= splits
    const RadialWeight pt2 = parse_weight("powtail:base=exp:c=1,k=1,alpha=0.5");
    CHECK(pt2.power_tail_base().kind() == WeightKind::exponential);
    const RadialWeight pr = parse_weight("prod:std:gamma=1*log:alpha=2");
    CHECK(pr(0.5) == doctest::Approx(std1(0.5) * loga2(0.5)).epsilon(1e-13));
    CHECK_THROWS_AS(parse_weight("std:gamma"), std::invalid_argument);
    CHECK_THROWS_AS(parse_weight("gauss:s=1"), std::invalid_argument);
    CHECK_THROWS_AS(parse_weight(""), std::invalid_argument);
    // round-trip through describe for the simple kinds
    CHECK(parse_weight(std1.describe()).standard_gamma() == 1.0);
}

TEST_CASE("caches are safe under concurrent readers and value-stable") {
    const RadialWeight w = RadialWeight::log_type(2.5);
    std::vector<double> first(8);
    for (int i = 0; i < 8; ++i) first[i] = w.moment(double(i));
    std::vector<std::thread> pool;
    std::vector<std::vector<double>> got(4, std::vector<double>(8));
    for (int t = 0; t < 4; ++t) {
        pool.emplace_back([&, t] {
            for (int i = 0; i < 8; ++i) got[t][i] = w.moment(double(i));
        });
    }
    for (auto& th : pool) th.join();
    for (int t = 0; t < 4; ++t)
        for (int i = 0; i < 8; ++i) CHECK(got[t][i] == first[i]);
}

TEST_CASE("sigma flags +inf where nu vanishes under positive omega") {
    const ExponentPair p2 = ExponentPair::from_p(2.0);
    const RadialWeight nu = RadialWeight::tabulated({0.0, 0.3, 0.6}, {1.0, 0.0, 1.0});
    const RadialWeight sig = sigma_weight(std0, nu, p2);
    CHECK(std::isinf(sig(0.3)));
    CHECK(sig(0.6) == doctest::Approx(1.0));
    // interior zeros are allowed as long as the tail stays positive
    CHECK(nu.tail(0.3) > 0.0);
}

TEST_CASE("quadrature spec plumbs through with_quadrature") {
    QuadratureSpec loose;
    loose.relative_tolerance = 1e-6;
    const RadialWeight w = RadialWeight::exponential(1.0, 1.0).with_quadrature(loose);
    CHECK(w.quadrature().relative_tolerance == 1e-6);
    CHECK(w.tail(0.2) == doctest::Approx(RadialWeight::exponential(1.0, 1.0).tail(0.2)).epsilon(1e-5));
}

TEST_CASE("table weight specs load CSV files") {
    const std::string path = "/tmp/rwlab_test_table.csv";
    {
        std::ofstream out(path);
        out << "r,value\n0.0,1.0\n0.4,2.0\n0.8,0.5\n";
    }
    const RadialWeight w = parse_weight("table:" + path);
    CHECK(w.kind() == WeightKind::tabulated);
    CHECK(w(0.2) == doctest::Approx(1.5));
    CHECK(w(0.9) == doctest::Approx(0.25)); // linear decay from (0.8, 0.5) to (1, 0)
    CHECK_THROWS_AS(parse_weight("table:/nonexistent/file.csv"), std::invalid_argument);
}

TEST_CASE("structural equality drives the sigma shortcut across parses") {
    const ExponentPair p2 = ExponentPair::from_p(2.0);
    const RadialWeight a = parse_weight("exp:c=1,k=1");
    const RadialWeight b = parse_weight("exp:c=1,k=1");
    CHECK_FALSE(a.same_object(b));
    CHECK(a.structurally_equal(b));
    CHECK(sigma_weight(a, b, p2).kind() == WeightKind::exponential);
    CHECK_FALSE(a.structurally_equal(parse_weight("exp:c=2,k=1")));
    CHECK(parse_weight("powtail:base=std:gamma=1,alpha=0.5")
              .structurally_equal(parse_weight("powtail:base=std:gamma=1,alpha=0.5")));
}

TEST_CASE("exponential tails keep relative accuracy far below underflow") {
    const RadialWeight expw = RadialWeight::exponential(1.0, 1.0);
    // log_tail1 stays finite and consistent with the value where representable
    for (double r : {0.5, 0.9, 0.98}) {
        CHECK(std::log(expw.tail1(r)) == doctest::Approx(expw.log_tail1(r)).epsilon(1e-10));
    }
    // deep in the dead zone the log path still resolves the tail
    const double lt = expw.log_tail1(0.999);
    CHECK(lt < -990.0);
    CHECK(lt > -1030.0);
    CHECK(expw.tail1(0.999) == 0.0); // value underflows, log does not
}
