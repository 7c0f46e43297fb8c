#include "rwlab/muckenhoupt.hpp"

#include "rwlab/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rwlab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

struct LevelResult {
    std::vector<double> values;
    double sup = 0.0;
    double argmax = 0.0;
    bool divergent = false;
};

LevelResult ap_values(const RadialWeight& omega, const RadialWeight& nu, const RadialWeight& sigma,
                      const ExponentPair& p, const Grid& grid) {
    LevelResult out;
    out.values.reserve(grid.size());
    // sigma1_tail is nonincreasing: +inf at the deepest node means +inf at
    // every node, and the whole profile is settled
    if (!std::isfinite(sigma.tail1(grid.back())) || !std::isfinite(nu.tail1(grid.back()))) {
        out.values.assign(grid.size(), kInf);
        out.sup = kInf;
        out.argmax = grid.back();
        out.divergent = true;
        return out;
    }
    for (size_t i = 0; i < grid.size(); ++i) {
        const double r = grid[i];
        const double w1 = omega.tail1(r);
        const double n1 = nu.tail1(r);
        const double s1 = sigma.tail1(r);
        double v;
        if (!std::isfinite(s1) || !std::isfinite(n1)) {
            v = kInf;
            out.divergent = true;
        } else if (!(w1 > 0.0)) {
            v = kInf; // denominator underflow: value unresolvable at this node
            out.divergent = true;
        } else {
            v = std::pow(n1, 1.0 / p.p) * std::pow(s1, 1.0 / p.conj) / w1;
        }
        out.values.push_back(v);
        if (v > out.sup) {
            out.sup = v;
            out.argmax = r;
        }
    }
    return out;
}

LevelResult mp_values(const RadialWeight& omega, const RadialWeight& nu, const RadialWeight& sigma,
                      const ExponentPair& p, const Grid& grid) {
    LevelResult out;
    out.values.reserve(grid.size());
    if (!std::isfinite(sigma.tail1(grid.back()))) {
        out.values.assign(grid.size(), kInf);
        out.sup = kInf;
        out.argmax = grid.back();
        out.divergent = true;
        return out;
    }
    const double pp = p.p;
    auto log_integrand = [&omega, &nu, pp](double s) {
        const double nv = nu(s);
        if (!(nv > 0.0) || !(s > 0.0)) return -kInf;
        return std::log(nv) + std::log(s) - pp * omega.log_tail1(s);
    };
    auto log_add = [](double a, double b) {
        if (a == -kInf) return b;
        if (b == -kInf) return a;
        const double m = std::max(a, b);
        return m + std::log(std::exp(a - m) + std::exp(b - m));
    };
    // log of int_0^{r_i} nu1 / w1_tail^p ds, accumulated once along the grid;
    // the integral can overflow double range long before M_p itself does
    // (exponentially decaying omega), so everything stays in log space
    double log_inner = -kInf;
    double prev_r = 0.0;
    if (grid[0] > 0.0) log_inner = integrate_log(log_integrand, 0.0, grid[0]);
    prev_r = grid[0];
    for (size_t i = 0; i < grid.size(); ++i) {
        const double r = grid[i];
        if (r > prev_r) {
            log_inner = log_add(log_inner, integrate_log(log_integrand, prev_r, r));
            prev_r = r;
        }
        const double s1 = sigma.tail1(r);
        double v;
        if (!std::isfinite(s1) || log_inner == kInf) {
            v = kInf;
            out.divergent = true;
        } else {
            // log(inner + 1), safe for both tiny and huge inner
            const double log_inner1 =
                log_inner > 36.0 ? log_inner : std::log1p(std::exp(log_inner));
            const double log_s1 = s1 > 0.0 ? std::log(s1) : sigma.log_tail1(r);
            v = std::exp(log_inner1 / pp + log_s1 / p.conj);
        }
        out.values.push_back(v);
        if (v > out.sup) {
            out.sup = v;
            out.argmax = r;
        }
    }
    return out;
}

ConstantProfile assemble(const RadialWeight& omega, const RadialWeight& nu, const ExponentPair& p,
                         const Grid& grid, int refinements, bool mp) {
    if (refinements < 0) throw std::invalid_argument("profile: refinements must be >= 0");
    const RadialWeight sigma = sigma_weight(omega, nu, p);

    ConstantProfile prof;
    prof.note = "grid includes r=0; sigma uses the 0/0 -> 0 convention";

    Grid level = grid;
    LevelResult last;
    Grid usable = level;
    for (int l = 0; l <= refinements; ++l) {
        if (l > 0) level = level.extended(1e-2);
        // trailing nodes where the denominator tail underflows carry no
        // information; drop them (matters for exponentially decaying omega)
        usable = level.clipped([&omega](double r) { return !(omega.tail1(r) > 0.0); });
        last = mp ? mp_values(omega, nu, sigma, p, usable) : ap_values(omega, nu, sigma, p, usable);
        prof.refinement_history.push_back(last.divergent ? kInf : last.sup);
        if (last.divergent) break; // pointwise +inf settles the diagnosis
    }

    prof.grid = usable;
    if (usable.size() < level.size())
        prof.note += "; " + std::to_string(level.size() - usable.size()) +
                     " tail1-underflow nodes dropped at the finest level";
    prof.values = std::move(last.values);
    prof.sup_estimate = last.divergent ? kInf : last.sup;
    prof.divergent_flag = last.divergent;
    prof.argmax = last.argmax;
    prof.grid_meta = usable.meta();

    if (last.divergent) {
        prof.diagnosis = Diagnosis::diverging;
        return prof;
    }
    // The growth test runs on sup^p: both conditions carry an outer 1/p
    // power, so the p-th power is the scale at which "5% per level" means
    // the same thing for every exponent.
    const auto& h = prof.refinement_history;
    if (h.size() >= 3) {
        const double g1 = std::pow(h[h.size() - 2] / h[h.size() - 3], p.p);
        const double g2 = std::pow(h[h.size() - 1] / h[h.size() - 2], p.p);
        if (g1 > 1.05 && g2 > 1.05)
            prof.diagnosis = Diagnosis::diverging;
        else if (h[h.size() - 1] / h[h.size() - 2] < 1.01)
            prof.diagnosis = Diagnosis::bounded;
        else
            prof.diagnosis = Diagnosis::inconclusive;
    } else if (h.size() == 2) {
        prof.diagnosis = h.back() / h.front() < 1.01 ? Diagnosis::bounded : Diagnosis::inconclusive;
    } else {
        prof.diagnosis = Diagnosis::inconclusive;
    }
    return prof;
}

} // namespace

std::string to_string(Diagnosis d) {
    switch (d) {
    case Diagnosis::bounded: return "bounded";
    case Diagnosis::diverging: return "diverging";
    default: return "inconclusive";
    }
}

ConstantProfile ap_profile(const RadialWeight& omega, const RadialWeight& nu,
                           const ExponentPair& p, const Grid& grid, int refinements) {
    return assemble(omega, nu, p, grid, refinements, false);
}

ConstantProfile mp_profile(const RadialWeight& omega, const RadialWeight& nu,
                           const ExponentPair& p, const Grid& grid, int refinements) {
    return assemble(omega, nu, p, grid, refinements, true);
}

DualityRatio ap_duality_check(const RadialWeight& omega,
                              const std::function<double(double)>& factor, const ExponentPair& p,
                              const Grid& grid) {
    const RadialWeight om = omega;
    const auto f = factor;
    const double e = -p.conj / p.p;
    RadialWeight nu_a = RadialWeight::custom(
        "omega*f", [om, f](double r) { return om(r) * f(r); });
    RadialWeight nu_b = RadialWeight::custom(
        "omega*f^(-p'/p)", [om, f, e](double r) { return om(r) * std::pow(f(r), e); });
    const ExponentPair pc{p.conj, p.p};
    const RadialWeight sig_a = sigma_weight(omega, nu_a, p);
    const RadialWeight sig_b = sigma_weight(omega, nu_b, pc);

    DualityRatio out;
    out.grid = grid;
    const auto lhs = ap_values(omega, nu_a, sig_a, p, grid);
    const auto rhs = ap_values(omega, nu_b, sig_b, pc, grid);
    out.lhs = lhs.values;
    out.rhs = rhs.values;
    out.ratio.resize(grid.size());
    for (size_t i = 0; i < grid.size(); ++i) {
        out.ratio[i] = out.lhs[i] / out.rhs[i];
        out.max_deviation = std::max(out.max_deviation, std::abs(out.ratio[i] - 1.0));
    }
    return out;
}

DualityRatio ap_duality_check(const RadialWeight& omega, const Profile& factor,
                              const ExponentPair& p, const Grid& grid) {
    factor.validate();
    return ap_duality_check(omega, factor.as_function(), p, grid);
}

} // namespace rwlab
