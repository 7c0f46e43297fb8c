// Acceptance suite: one line per criterion, nonzero exit when any fails.
// Tolerances and runtime caps are pinned here and must not be loosened to
// make a red criterion green.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "rwlab/bergman.hpp"
#include "rwlab/classes.hpp"
#include "rwlab/muckenhoupt.hpp"
#include "rwlab/operators.hpp"
#include "rwlab/scenarios.hpp"

using namespace rwlab;

namespace {

int g_failures = 0;

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

void report(int idx, const std::string& label, bool pass, double secs, double limit,
            const std::string& detail) {
    const bool in_time = limit <= 0.0 || secs < limit;
    const bool ok = pass && in_time;
    if (!ok) ++g_failures;
    std::printf("[%s] criterion %d: %s (%.2fs%s) %s\n", ok ? "PASS" : "FAIL", idx, label.c_str(),
                secs, limit > 0.0 ? (", limit " + std::to_string(int(limit)) + "s").c_str() : "",
                detail.c_str());
    std::fflush(stdout);
}

// 1. kernel closed form, gamma in {0, 1, 2.5}, 200 points of [0, 0.9], rel 1e-10
void criterion1() {
    Timer t;
    double worst = 0.0;
    for (double gamma : {0.0, 1.0, 2.5}) {
        KernelSeries k(RadialWeight::standard(gamma));
        for (int i = 0; i < 200; ++i) {
            const double u = 0.9 * i / 199.0;
            const double closed = (gamma + 1.0) * std::pow(1.0 - u, -(2.0 + gamma));
            const double got = k.eval({u, 0.0}, 1e-13).value.real();
            worst = std::max(worst, std::abs(got - closed) / closed);
        }
    }
    report(1, "kernel closed form", worst <= 1e-10, t.seconds(), 5.0,
           "max rel err " + std::to_string(worst));
}

// 2. Forelli-Rudin grid: diagnosis equals the sign test on the full grid,
//    bounded constants match the closed form to 1e-6
void criterion2() {
    Timer t;
    int mismatches = 0, cases = 0;
    double worst_const = 0.0;
    const Grid grid = Grid::sup_default();
    for (double p : {1.5, 2.0, 3.0}) {
        const ExponentPair pp = ExponentPair::from_p(p);
        for (double gamma : {-0.5, 0.0, 1.0, 2.0}) {
            for (double beta : {-0.5, 0.0, 1.0, 2.0}) {
                ++cases;
                const RadialWeight omega = RadialWeight::standard(gamma);
                const RadialWeight nu = RadialWeight::standard(beta);
                const auto prof = ap_profile(omega, nu, pp, grid, 2);
                const bool sign = p * (gamma + 1.0) > beta + 1.0;
                const bool ok = sign ? prof.diagnosis == Diagnosis::bounded
                                     : prof.diagnosis == Diagnosis::diverging;
                if (!ok) ++mismatches;
                if (sign) {
                    const double expected =
                        (gamma + 1.0) * std::pow(beta + 1.0, -1.0 / p) *
                        std::pow(gamma * pp.conj - beta * pp.conj / p + 1.0, -1.0 / pp.conj);
                    worst_const =
                        std::max(worst_const, std::abs(prof.sup_estimate - expected) / expected);
                }
            }
        }
    }
    report(2, "forelli-rudin grid", mismatches == 0 && worst_const <= 1e-6, t.seconds(), 30.0,
           std::to_string(cases) + " cases, " + std::to_string(mismatches) +
               " mismatches, const err " + std::to_string(worst_const));
}

// 3. log counterexample: M_2 sup moves < 1% between the last refinements,
//    A_2 diverges with A_2^2/log varying < 10% over the last band
void criterion3() {
    Timer t;
    const RadialWeight omega = RadialWeight::standard(0.0);
    const RadialWeight nu = RadialWeight::log_type(2.0);
    const ExponentPair p2 = ExponentPair::from_p(2.0);
    const Grid grid = Grid::sup_default(); // reaches 1 - 1e-8

    const ConstantProfile mp = mp_profile(omega, nu, p2, grid, 2);
    const auto& h = mp.refinement_history;
    const bool mp_ok = mp.diagnosis == Diagnosis::bounded &&
                       std::abs(h.back() / h[h.size() - 2] - 1.0) < 0.01;

    const ConstantProfile ap = ap_profile(omega, nu, p2, grid, 2);
    const bool ap_div = ap.diagnosis == Diagnosis::diverging;

    const ConstantProfile apb = ap_profile(omega, nu, p2, grid, 0);
    double rmax = 0.0, rmin = 1e300;
    const double eps = 1.0 - apb.grid.back();
    for (size_t i = 0; i < apb.grid.size(); ++i) {
        const double gap = 1.0 - apb.grid[i];
        if (gap >= eps && gap < 2.0 * eps) {
            const double q = apb.values[i] * apb.values[i] / log_e_over(one_minus_sq(apb.grid[i]));
            rmax = std::max(rmax, q);
            rmin = std::min(rmin, q);
        }
    }
    const bool band_ok = rmax / rmin - 1.0 < 0.10;
    report(3, "log counterexample", mp_ok && ap_div && band_ok, t.seconds(), 30.0,
           "M2 drift " + std::to_string(std::abs(h.back() / h[h.size() - 2] - 1.0)) +
               ", A2^2/log band " + std::to_string(rmax / rmin - 1.0));
}

// 4. weak type over 1000 seeded (f, lambda), gamma in {0, 1}
void criterion4() {
    Timer t;
    Rng rng(416100);
    const Grid g = Grid::operator_grid(192, 1e-6);
    bool ok = true;
    double worst = -1e300;
    for (double gamma : {0.0, 1.0}) {
        const RadialWeight w = RadialWeight::standard(gamma);
        for (int i = 0; i < 500; ++i) {
            const Profile f = random_profile(rng, g);
            const double lambda = 0.1 + 8.0 * rng.uniform();
            const auto wt = weak_type_check(w, f, lambda);
            const double slack = wt.level_measure - wt.bound * (1.0 + 1e-9);
            worst = std::max(worst, slack);
            if (slack > 0.0) ok = false;
        }
    }
    report(4, "weak-type bound on 1000 seeded pairs", ok, t.seconds(), 0.0,
           "max excess " + std::to_string(worst));
}

// 5. level sets over 100 seeded strictly-increasing-ratio profiles
void criterion5() {
    Timer t;
    Rng rng(515205);
    const Grid g = Grid::operator_grid(160, 1e-5);
    bool ok = true;
    double worst_ratio = 0.0, worst_factor = 0.0;
    for (int i = 0; i < 100; ++i) {
        const RadialWeight w = (i % 2 == 0) ? RadialWeight::standard(0.0)
                                            : RadialWeight::standard(1.0);
        const Profile f = random_increasing_profile(rng, g);
        const LevelPoints lp = level_points(w, f, -40, 40);
        for (double q : lp.ratio_halving) {
            worst_ratio = std::max(worst_ratio, q);
            if (q > 0.5 + 1e-6) ok = false;
        }
        for (double q : lp.doubling_factor) {
            worst_factor = std::max(worst_factor, q);
            if (q > 2.0 + 1e-6) ok = false;
        }
    }
    report(5, "level-set halving and doubling", ok, t.seconds(), 0.0,
           "max halving " + std::to_string(worst_ratio) + ", max doubling " +
               std::to_string(worst_factor));
}

// 6. pointwise chains on 1000 seeded profiles across 4 built-in weights
void criterion6() {
    Timer t;
    Rng rng(612006);
    const std::vector<RadialWeight> weights{
        RadialWeight::standard(0.0), RadialWeight::standard(1.0), RadialWeight::log_type(2.0),
        RadialWeight::exponential(1.0, 1.0)};
    const Grid g = Grid::operator_grid(128, 1e-5);
    double worst = -1e300;
    for (int i = 0; i < 1000; ++i) {
        const Profile f = random_profile(rng, g);
        for (const RadialWeight& w : weights) {
            const Profile Hf = apply_H(w, f);
            const Profile Hs = apply_Hstar(w, f);
            const Profile Sf = apply_S(w, f);
            const Profile Mf = apply_Mmax(w, f);
            for (size_t j = 0; j < Sf.v.size(); ++j) {
                const double hh = Hf.v[j] + Hs.v[j];
                const double scale = std::max({1.0, Mf.v[j], Sf.v[j], hh});
                worst = std::max(worst, (Mf.v[j] - 2.0 * Sf.v[j]) / scale);
                worst = std::max(worst, (Sf.v[j] - hh) / scale);
                worst = std::max(worst, (0.5 * hh - Sf.v[j]) / scale);
            }
        }
    }
    report(6, "pointwise chains M <= 2S, (H+H*)/2 <= S <= H+H*", worst <= 1e-8, t.seconds(), 0.0,
           "max normalized violation " + std::to_string(worst));
}

// 7. Calderon comparability across 6 bounded pairs
void criterion7() {
    Timer t;
    struct Pair {
        RadialWeight omega, nu;
        double p;
        const char* label;
    };
    const RadialWeight std0 = RadialWeight::standard(0.0);
    const RadialWeight std1 = RadialWeight::standard(1.0);
    const RadialWeight std2 = RadialWeight::standard(2.0);
    const RadialWeight log2w = RadialWeight::log_type(2.0);
    const std::vector<Pair> pairs{
        {std0, std0, 2.0, "(1,1,p=2)"},
        {std1, std0, 2.0, "(g1,g0,p=2)"},
        {std0, std1, 3.0, "(g0,g1,p=3)"},
        {std2, std2, 1.5, "(g2,g2,p=1.5)"},
        {std1, power_tail_weight(std1, 0.3), 2.5, "(g1,powtail0.3,p=2.5)"},
        {log2w, log2w, 2.0, "(log2,log2,p=2)"},
    };
    bool all_ok = true;
    std::string detail;
    for (const auto& pr : pairs) {
        const ExponentPair pp = ExponentPair::from_p(pr.p);
        const ConstantProfile ap = ap_profile(pr.omega, pr.nu, pp, Grid::sup_default(), 2);
        if (ap.diagnosis != Diagnosis::bounded) {
            all_ok = false;
            detail += std::string(pr.label) + ":ap-not-bounded ";
            continue;
        }
        const double A = ap.sup_estimate;
        const Grid og = Grid::operator_grid(320).clipped(
            [&pr](double r) { return !(pr.omega.tail1(r) > 0.0); });
        const auto family = default_test_family(pr.omega, pr.nu, pp, og, 77001);
        const double mlow = opnorm_lower(OperatorTag::Mmax, pr.omega, pr.nu, pp, family).value;
        bool ok = A <= mlow * 1.05;
        for (OperatorTag tag : {OperatorTag::Mmax, OperatorTag::S, OperatorTag::Calderon}) {
            const auto est = opnorm_estimate(tag, pr.omega, pr.nu, pp, og, 77001);
            const double ratio = est.heuristic_estimate / A;
            ok = ok && ratio >= 0.25 && ratio <= 64.0 && est.converged;
        }
        if (!ok) {
            all_ok = false;
            detail += std::string(pr.label) + ":band-or-stability ";
        }
    }
    report(7, "calderon comparability over 6 pairs", all_ok, t.seconds(), 0.0,
           detail.empty() ? "A_p <= 1.05 lower(M), bands in [A/4, 64A], <2% drift" : detail);
}

// 8. block equivalence: every monomial k <= 2^12 in [2^-3, 2^3]; 50 random
//    polynomials of degree <= 2^10 in a band of width <= 2^6
void criterion8() {
    Timer t;
    const RadialWeight std0 = RadialWeight::standard(0.0);
    bool ok = true;
    double mono_lo = 1e300, mono_hi = 0.0;
    for (long k = 0; k <= 4096; ++k) {
        const auto eq = block_norm_equivalence(std0, std0, CoefficientVector::monomial(k), 2.0);
        mono_lo = std::min(mono_lo, eq.ratio);
        mono_hi = std::max(mono_hi, eq.ratio);
        if (eq.ratio < 0.125 || eq.ratio > 8.0) ok = false;
    }
    Rng rng(808808);
    double band_lo = 1e300, band_hi = 0.0;
    for (int i = 0; i < 50; ++i) {
        const long deg = 16 + long(rng.uniform() * (1024 - 16));
        CoefficientVector f;
        f.c.resize(size_t(deg) + 1);
        for (auto& c : f.c)
            c = cplx{2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0};
        const auto eq = block_norm_equivalence(std0, std0, f, 2.0);
        band_lo = std::min(band_lo, eq.ratio);
        band_hi = std::max(band_hi, eq.ratio);
    }
    if (band_hi / band_lo > 64.0) ok = false;
    report(8, "dyadic block norm equivalence", ok, t.seconds(), 60.0,
           "monomial ratios [" + std::to_string(mono_lo) + ", " + std::to_string(mono_hi) +
               "], random band width " + std::to_string(band_hi / band_lo));
}

// 9. adjoint identity: direct norm matches the displayed identity to 1e-8
//    for n <= 64 across 4 weight pairs
void criterion9() {
    Timer t;
    struct Pair {
        RadialWeight omega, nu;
        double p;
    };
    const RadialWeight std0 = RadialWeight::standard(0.0);
    const RadialWeight std1 = RadialWeight::standard(1.0);
    const RadialWeight std2 = RadialWeight::standard(2.0);
    const std::vector<Pair> pairs{
        {std0, std0, 2.0},
        {std1, std0, 2.0},
        {std2, std1, 2.0},
        {std1, power_tail_weight(std1, 0.4), 2.5},
    };
    double worst = 0.0;
    for (const auto& pr : pairs) {
        const ExponentPair pp = ExponentPair::from_p(pr.p);
        for (long n = 0; n <= 64; ++n) {
            const auto adj = adjoint_monomial(pr.omega, pr.nu, n, pp);
            if (adj.divergent) {
                worst = 1e300;
                break;
            }
            worst = std::max(worst,
                             std::abs(adj.norm_direct - adj.norm_identity) / adj.norm_identity);
        }
    }
    report(9, "adjoint monomial norm identity", worst <= 1e-8, t.seconds(), 0.0,
           "max rel gap " + std::to_string(worst));
}

} // namespace

int main() {
    Timer total;
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    std::printf("%d of 9 criteria passed (total %.1fs)\n", 9 - g_failures, total.seconds());
    return g_failures == 0 ? 0 : 1;
}
