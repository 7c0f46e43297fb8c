#include "rwlab/classes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rwlab {

std::string to_string(Trend t) {
    switch (t) {
    case Trend::stable: return "stable";
    case Trend::growing: return "growing";
    default: return "inconclusive";
    }
}

namespace {

// Sup of `value` over the grid nodes whose gap 1-r lies in [lo, hi).
double band_sup(const Grid& grid, const std::vector<double>& values, double lo, double hi) {
    double s = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < grid.size(); ++i) {
        const double gap = 1.0 - grid[i];
        if (gap >= lo && gap < hi) s = std::max(s, values[i]);
    }
    return s;
}

Trend classify_bands(const Grid& grid, const std::vector<double>& values) {
    const double eps = 1.0 - grid.back();
    const double last = band_sup(grid, values, eps, 2.0 * eps);
    const double prev = band_sup(grid, values, 2.0 * eps, 4.0 * eps);
    if (!std::isfinite(last) || !std::isfinite(prev) || prev <= 0.0) return Trend::inconclusive;
    const double ratio = last / prev;
    if (ratio > 1.05) return Trend::growing;
    if (ratio > 0.95) return Trend::stable;
    return Trend::inconclusive;
}

} // namespace

DoublingReport dhat_profile(const RadialWeight& w, const Grid& grid) {
    DoublingReport rep;
    rep.class_tag = DoublingReport::Tag::dhat;
    rep.grid_meta = grid.meta();

    std::vector<double> ratios(grid.size(), std::numeric_limits<double>::quiet_NaN());
    double sup = 0.0, argmax = 0.0;
    bool underflow = false;
    size_t last_finite = 0;
    for (size_t i = 0; i < grid.size(); ++i) {
        const double r = grid[i];
        const double num = w.tail(r);
        const double den = w.tail(0.5 * (1.0 + r));
        if (den <= 0.0 || !std::isfinite(num)) {
            underflow = true;
            break;
        }
        ratios[i] = num / den;
        last_finite = i;
        if (ratios[i] > sup) {
            sup = ratios[i];
            argmax = r;
        }
    }
    rep.sup_estimate = sup;
    rep.argmax_radius = argmax;
    if (underflow) {
        // denominator tail below double range: the ratio left the measurable
        // window while still growing
        rep.trend = Trend::growing;
        rep.member = false;
        rep.note = "tail underflow beyond r=" + std::to_string(grid[last_finite]) +
                   "; last finite ratio " + std::to_string(ratios[last_finite]);
        return rep;
    }
    rep.trend = classify_bands(grid, ratios);
    rep.member = rep.trend == Trend::stable;
    return rep;
}

DoublingReport dcheck_search(const RadialWeight& w, const std::vector<double>& K_candidates,
                             const Grid& grid) {
    for (double K : K_candidates)
        if (!(K > 1.0)) throw std::invalid_argument("dcheck_search: each K must exceed 1");

    DoublingReport rep;
    rep.class_tag = DoublingReport::Tag::dcheck;
    rep.K_candidates = K_candidates;
    rep.grid_meta = grid.meta();

    // C(K) on the base grid and two extensions toward 1; membership requires
    // the margin to survive refinement instead of decaying to 1.
    std::vector<Grid> levels{grid, grid.extended(1e-2), grid.extended(1e-4)};
    std::vector<std::vector<double>> C(levels.size(),
                                       std::vector<double>(K_candidates.size(),
                                                           std::numeric_limits<double>::infinity()));
    std::vector<double> arg_r(K_candidates.size(), 0.0);
    for (size_t l = 0; l < levels.size(); ++l) {
        for (size_t j = 0; j < K_candidates.size(); ++j) {
            const double K = K_candidates[j];
            double inf_ratio = std::numeric_limits<double>::infinity();
            double arg = 0.0;
            for (size_t i = 0; i < levels[l].size(); ++i) {
                const double r = levels[l][i];
                const double num = w.tail(r);
                const double den = w.tail(1.0 - (1.0 - r) / K);
                if (!(den > 0.0) || !std::isfinite(num)) break; // underflow window ended
                const double q = num / den;
                if (q < inf_ratio) {
                    inf_ratio = q;
                    arg = r;
                }
            }
            C[l][j] = inf_ratio;
            if (l == levels.size() - 1) arg_r[j] = arg;
        }
    }

    const double margin = 1.05;
    rep.C_of_K = C.back();
    double best = 0.0;
    size_t best_j = 0;
    for (size_t j = 0; j < K_candidates.size(); ++j) {
        if (rep.C_of_K[j] > best) {
            best = rep.C_of_K[j];
            best_j = j;
        }
    }
    rep.sup_estimate = best;
    rep.best_K = K_candidates.empty() ? 0.0 : K_candidates[best_j];
    rep.argmax_radius = K_candidates.empty() ? 0.0 : arg_r[best_j];

    // Membership needs C(K) > 1 with a margin that survives refinement. The
    // excess is compared in log space, where a slowly varying tail shows a
    // fixed shrink factor per level regardless of how large C(K) started.
    bool member = false;
    for (size_t j = 0; j < K_candidates.size(); ++j) {
        const double c2 = C.back()[j], c1 = C[1][j];
        if (!std::isfinite(c2) || !std::isfinite(c1)) continue;
        if (c2 > margin && std::log(c2) >= 0.95 * std::log(c1)) member = true;
    }
    rep.member = member;
    rep.trend = member ? (C.back()[best_j] > 2.0 * C.front()[best_j] ? Trend::growing
                                                                     : Trend::stable)
                       : Trend::inconclusive;
    if (!member) rep.note = "C(K) margin decays toward 1 under refinement";
    return rep;
}

DyadicDecomposition rho_sequence(const RadialWeight& w, int n_max) {
    if (n_max < 1) throw std::invalid_argument("rho_sequence: need n_max >= 1");
    DyadicDecomposition d;
    d.tail1_zero = w.tail1(0.0);
    d.rho.push_back(0.0); // tail1(rho_0) = tail1(0) by the dyadic normalization
    d.M.push_back(0);

    const double xtol = 1e-14;
    double lo = 0.0;
    for (int n = 1; n <= n_max; ++n) {
        const double target = std::ldexp(d.tail1_zero, -n);
        if (target < 1e-280) {
            d.truncated = true;
            break;
        }
        // tail1 is nonincreasing; bracket [lo, hi) with tail1(hi) < target
        double hi = std::max(0.5, lo);
        double gap = 1.0 - hi;
        while (w.tail1(1.0 - gap) >= target && gap > 1e-15) gap *= 0.5;
        hi = 1.0 - gap;
        if (w.tail1(hi) >= target) {
            // target below the tail resolution of double radii near 1
            d.truncated = true;
            break;
        }
        const double rho =
            bisect_decreasing([&w](double r) { return w.tail1(r); }, lo, hi, target, xtol);
        d.rho.push_back(rho);
        d.M.push_back(long(std::floor(1.0 / (1.0 - rho))));
        if (d.M.size() >= 2 && d.M.back() == d.M[d.M.size() - 2])
            d.empty_blocks.push_back(long(d.M.size()) - 2);
        lo = rho;
    }
    return d;
}

long block_of_index(const DyadicDecomposition& d, long k) {
    if (k < 0 || d.M.size() < 2 || k >= d.M.back())
        throw std::out_of_range("block_of_index: index beyond computed dyadic range");
    // first n with M[n+1] > k
    auto it = std::upper_bound(d.M.begin(), d.M.end(), k);
    return long(it - d.M.begin()) - 1;
}

} // namespace rwlab
