#include "rwlab/weight.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <sstream>

namespace rwlab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// 2-point Gauss-Legendre on [a,b]; exact for cubics.
double gl2(const RealFn& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const double x = h * 0.5773502691896257645091488;
    return h * (f(c - x) + f(c + x));
}
} // namespace

struct RadialWeight::Impl {
    WeightKind kind;
    double scale = 1.0;
    // standard / log / exponential parameters
    double gamma = 0.0;   // standard exponent (may be <= -1 for derived sigma)
    double alpha = 0.0;   // log exponent or power-tail exponent
    double c = 0.0, k = 0.0; // exponential parameters
    bool integrable = true;
    // power_tail / product children
    std::vector<RadialWeight> children;
    // tabulated data
    std::vector<double> tab_r, tab_v;
    // custom evaluator
    std::function<double(double)> fn;
    std::string label;

    QuadratureSpec spec;

    mutable std::shared_mutex cache_mutex;
    mutable std::map<double, double> moment_cache;
    mutable std::map<double, double> tail_cache;
    mutable std::map<double, double> tail1_cache;

    Impl() = default;
    Impl(const Impl& o)
        : kind(o.kind), scale(o.scale), gamma(o.gamma), alpha(o.alpha), c(o.c), k(o.k),
          integrable(o.integrable), children(o.children), tab_r(o.tab_r), tab_v(o.tab_v),
          fn(o.fn), label(o.label), spec(o.spec) {}

    double eval(double r) const;
    double tail(double r) const;
    double tail1(double r) const;
    double log_tail1(double r) const;
    double moment(double x) const;

    double eval_unscaled(double r) const;
    double tail_unscaled(double r) const;
    double tail1_unscaled(double r) const;
    double moment_unscaled(double x) const;

    /// log of int_r^1 [s] exp(-c/(1-s)^k) ds with the boundary magnitude
    /// factored out, so the result keeps full relative accuracy (and stays
    /// finite in log space) far below the double underflow threshold.
    double exp_log_tail(double r, bool with_s) const;

    double cached(std::map<double, double>& cache, double key, const RealFn& compute) const;
};

double RadialWeight::Impl::cached(std::map<double, double>& cache, double key,
                                  const RealFn& compute) const {
    {
        std::shared_lock lock(cache_mutex);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    const double value = compute(key);
    std::unique_lock lock(cache_mutex);
    auto [it, inserted] = cache.emplace(key, value);
    (void)inserted; // first writer wins; value is deterministic either way
    return it->second;
}

double RadialWeight::Impl::eval_unscaled(double r) const {
    switch (kind) {
    case WeightKind::standard:
        return std::pow(one_minus_sq(r), gamma);
    case WeightKind::log_type:
        return std::pow(log_e_over(one_minus_sq(r)), -alpha) / one_minus_sq(r);
    case WeightKind::exponential:
        return std::exp(-c / std::pow(1.0 - r, k));
    case WeightKind::power_tail: {
        const double t1 = children[0].tail1(r);
        if (t1 == 0.0 && alpha < 0.0) return kInf;
        return children[0](r) * std::pow(t1, alpha);
    }
    case WeightKind::product: {
        double v = 1.0;
        for (const auto& w : children) v *= w(r);
        return v;
    }
    case WeightKind::tabulated: {
        if (r <= tab_r.front()) return tab_v.front();
        if (r >= tab_r.back()) {
            const double gap = 1.0 - tab_r.back();
            return gap > 0.0 ? tab_v.back() * (1.0 - r) / gap : 0.0;
        }
        auto it = std::upper_bound(tab_r.begin(), tab_r.end(), r);
        const size_t i = size_t(it - tab_r.begin()) - 1;
        const double t = (r - tab_r[i]) / (tab_r[i + 1] - tab_r[i]);
        return tab_v[i] + t * (tab_v[i + 1] - tab_v[i]);
    }
    case WeightKind::custom:
        return fn(r);
    }
    return 0.0;
}

double RadialWeight::Impl::eval(double r) const { return scale * eval_unscaled(r); }

double RadialWeight::Impl::exp_log_tail(double r, bool with_s) const {
    const double cc = c, kk = k;
    const double base = cc / std::pow(1.0 - r, kk);
    const double body = integrate(
        [cc, kk, base, with_s](double s) {
            const double t = cc / std::pow(1.0 - s, kk);
            const double v = std::exp(-(t - base));
            return with_s ? s * v : v;
        },
        r, 1.0, spec);
    return -base + std::log(body);
}

double RadialWeight::Impl::tail_unscaled(double r) const {
    switch (kind) {
    case WeightKind::standard: {
        if (!integrable) return kInf;
        const double a = gamma + 1.0, b = 0.5;
        return 0.5 * std::exp(log_beta(a, b)) * reg_inc_beta(one_minus_sq(r), a, b);
    }
    case WeightKind::log_type: {
        // tail = tail1 + int_r^1 (log(e/(1-s^2)))^{-alpha}/(1+s) ds
        const double a = alpha;
        auto corr = integrate_to_one(
            [a](double s) { return std::pow(log_e_over(one_minus_sq(s)), -a) / (1.0 + s); }, r,
            spec);
        return tail1_unscaled(r) + corr.value;
    }
    case WeightKind::exponential:
        return std::exp(exp_log_tail(r, /*with_s=*/false));
    case WeightKind::tabulated: {
        const size_t m = tab_r.size() - 1;
        double acc = 0.0;
        if (r < tab_r.back()) {
            if (r < tab_r.front()) acc += tab_v.front() * (tab_r.front() - r); // flat head
            for (size_t i = 0; i < m; ++i) {
                const double a = std::max(r, tab_r[i]);
                const double b = tab_r[i + 1];
                if (b <= a) continue;
                const double va = eval_unscaled(a), vb = tab_v[i + 1];
                acc += 0.5 * (va + vb) * (b - a); // exact: integrand is linear
            }
            const double gap = 1.0 - tab_r.back();
            acc += 0.5 * tab_v.back() * gap;
        } else {
            const double gap = 1.0 - tab_r.back();
            if (gap > 0.0) acc = 0.5 * tab_v.back() * (1.0 - r) * (1.0 - r) / gap;
        }
        return acc;
    }
    default: {
        auto res = integrate_to_one([this](double s) { return eval_unscaled(s); }, r, spec);
        return res.divergent ? kInf : res.value;
    }
    }
}

double RadialWeight::Impl::tail1_unscaled(double r) const {
    switch (kind) {
    case WeightKind::standard: {
        if (!integrable) return kInf;
        return std::pow(one_minus_sq(r), gamma + 1.0) / (2.0 * (gamma + 1.0));
    }
    case WeightKind::log_type:
        return std::pow(log_e_over(one_minus_sq(r)), 1.0 - alpha) / (2.0 * (alpha - 1.0));
    case WeightKind::power_tail: {
        // exact: int_r^1 s w tail1_base^alpha ds = tail1_base(r)^(1+alpha)/(1+alpha)
        if (!integrable) return kInf;
        return std::pow(children[0].tail1(r), 1.0 + alpha) / (1.0 + alpha);
    }
    case WeightKind::exponential:
        return std::exp(exp_log_tail(r, /*with_s=*/true));
    case WeightKind::tabulated: {
        const size_t m = tab_r.size() - 1;
        auto seg = [this](double a, double b) {
            // s * piecewise-linear value: quadratic, gl2 is exact
            return gl2([this](double s) { return s * eval_unscaled(s); }, a, b);
        };
        double acc = 0.0;
        if (r < tab_r.back()) {
            if (r < tab_r.front()) acc += seg(r, tab_r.front());
            for (size_t i = 0; i < m; ++i) {
                const double a = std::max(r, tab_r[i]);
                const double b = tab_r[i + 1];
                if (b > a) acc += seg(a, b);
            }
            acc += seg(tab_r.back(), 1.0);
        } else {
            acc = seg(r, 1.0);
        }
        return acc;
    }
    default: {
        auto res =
            integrate_to_one([this](double s) { return s * eval_unscaled(s); }, r, spec);
        return res.divergent ? kInf : res.value;
    }
    }
}

double RadialWeight::Impl::tail(double r) const {
    switch (kind) {
    case WeightKind::standard:
        return scale * tail_unscaled(r);
    default:
        return cached(tail_cache, r, [this](double rr) { return scale * tail_unscaled(rr); });
    }
}

double RadialWeight::Impl::tail1(double r) const {
    switch (kind) {
    case WeightKind::standard:
    case WeightKind::log_type:
    case WeightKind::power_tail:
        return scale * tail1_unscaled(r);
    default:
        return cached(tail1_cache, r, [this](double rr) { return scale * tail1_unscaled(rr); });
    }
}

double RadialWeight::Impl::log_tail1(double r) const {
    switch (kind) {
    case WeightKind::standard:
        if (!integrable) return kInf;
        return (gamma + 1.0) * std::log(one_minus_sq(r)) - std::log(2.0 * (gamma + 1.0)) +
               std::log(scale);
    case WeightKind::log_type:
        return (1.0 - alpha) * std::log(log_e_over(one_minus_sq(r))) -
               std::log(2.0 * (alpha - 1.0)) + std::log(scale);
    case WeightKind::power_tail:
        if (!integrable) return kInf;
        return (1.0 + alpha) * children[0].log_tail1(r) - std::log1p(alpha) + std::log(scale);
    case WeightKind::exponential:
        return exp_log_tail(r, /*with_s=*/true) + std::log(scale);
    default:
        return std::log(tail1(r));
    }
}

double RadialWeight::Impl::moment_unscaled(double x) const {
    switch (kind) {
    case WeightKind::standard:
        if (!integrable) return kInf;
        return 0.5 * std::exp(log_beta(0.5 * (x + 1.0), gamma + 1.0));
    case WeightKind::log_type: {
        // t = log(e/(1-s^2)) maps the singular end to a t^{-alpha} tail. Below
        // t = 2 (s < sqrt(1-1/e)) the raw integrand is smooth; beyond it the
        // t-space integrand has u = 1-e^{1-t} bounded away from 0.
        const double a = alpha, e2 = 0.5 * (x - 1.0);
        const double s_split = std::sqrt(-std::expm1(-1.0));
        const double head = integrate(
            [this, x](double s) { return std::pow(s, x) * eval_unscaled(s); }, 0.0, s_split, spec);
        const double tail_part = integrate_to_infinity(
            [a, e2](double t) {
                const double u = -std::expm1(1.0 - t); // 1-e^{1-t}
                return std::pow(u, e2) * std::pow(t, -a);
            },
            2.0, spec);
        return head + 0.5 * tail_part;
    }
    default: {
        auto res = integrate_to_one(
            [this, x](double s) { return std::pow(s, x) * eval_unscaled(s); }, 0.0, spec);
        return res.divergent ? kInf : res.value;
    }
    }
}

double RadialWeight::Impl::moment(double x) const {
    return cached(moment_cache, x, [this](double xx) { return scale * moment_unscaled(xx); });
}

// --- public surface ---------------------------------------------------------

namespace {
void check_radius(double r) {
    if (!(r >= 0.0) || r >= 1.0)
        throw std::domain_error("RadialWeight: radius must lie in [0,1)");
}

std::shared_ptr<RadialWeight::Impl> make_impl() { return std::make_shared<RadialWeight::Impl>(); }

// tail(r) must stay positive; probe derived kinds whose support is not known
// analytically
void probe_positive_tail(const RadialWeight& w) {
    for (double r : {0.0, 0.5, 0.9, 0.99, 0.999}) {
        if (!(w.tail(r) > 0.0))
            throw std::invalid_argument(
                "RadialWeight: tail integral vanishes (or underflows) at r=" +
                std::to_string(r));
    }
}
} // namespace

RadialWeight RadialWeight::standard(double gamma) {
    if (!(gamma > -1.0))
        throw std::invalid_argument("standard weight: need gamma > -1 for integrability");
    auto impl = make_impl();
    impl->kind = WeightKind::standard;
    impl->gamma = gamma;
    return RadialWeight(impl);
}

RadialWeight standard_any_exponent(double e, double scale) {
    auto impl = make_impl();
    impl->kind = WeightKind::standard;
    impl->gamma = e;
    impl->integrable = e > -1.0;
    impl->scale = scale;
    return RadialWeight(impl);
}

RadialWeight RadialWeight::log_type(double alpha) {
    if (!(alpha > 1.0))
        throw std::invalid_argument("log weight: need alpha > 1 for integrability");
    auto impl = make_impl();
    impl->kind = WeightKind::log_type;
    impl->alpha = alpha;
    return RadialWeight(impl);
}

RadialWeight RadialWeight::exponential(double c, double k) {
    if (!(c > 0.0) || !(k > 0.0))
        throw std::invalid_argument("exponential weight: need c > 0 and k > 0");
    auto impl = make_impl();
    impl->kind = WeightKind::exponential;
    impl->c = c;
    impl->k = k;
    return RadialWeight(impl);
}

RadialWeight RadialWeight::tabulated(std::vector<double> radii, std::vector<double> values) {
    if (radii.size() != values.size() || radii.size() < 2)
        throw std::invalid_argument("tabulated weight: need >= 2 (r,value) pairs");
    for (size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] >= 0.0) || radii[i] >= 1.0)
            throw std::invalid_argument("tabulated weight: radii must lie in [0,1)");
        if (i > 0 && !(radii[i] > radii[i - 1]))
            throw std::invalid_argument("tabulated weight: radii must be strictly increasing");
        if (!(values[i] >= 0.0))
            throw std::invalid_argument("tabulated weight: values must be nonnegative");
    }
    if (!(values.back() > 0.0))
        throw std::invalid_argument(
            "tabulated weight: last value must be positive (tail integral would vanish)");
    auto impl = make_impl();
    impl->kind = WeightKind::tabulated;
    impl->tab_r = std::move(radii);
    impl->tab_v = std::move(values);
    return RadialWeight(impl);
}

RadialWeight RadialWeight::custom(std::string label, std::function<double(double)> eval) {
    auto impl = make_impl();
    impl->kind = WeightKind::custom;
    impl->label = std::move(label);
    impl->fn = std::move(eval);
    RadialWeight w = RadialWeight(impl);
    probe_positive_tail(w);
    return w;
}

RadialWeight RadialWeight::scaled(double c) const {
    if (!(c > 0.0)) throw std::invalid_argument("RadialWeight::scaled: need c > 0");
    auto impl = std::make_shared<Impl>(*impl_);
    impl->scale *= c;
    return RadialWeight(impl);
}

RadialWeight power_tail_weight(const RadialWeight& w, double alpha) {
    if (!(alpha > -1.0))
        throw std::invalid_argument("power_tail_weight: need alpha > -1 (result not integrable)");
    auto impl = make_impl();
    impl->kind = WeightKind::power_tail;
    impl->alpha = alpha;
    impl->children.push_back(w);
    impl->spec = w.quadrature();
    return RadialWeight(impl);
}

RadialWeight product(const RadialWeight& a, const RadialWeight& b) {
    auto impl = make_impl();
    impl->kind = WeightKind::product;
    impl->children = {a, b};
    RadialWeight w = RadialWeight(impl);
    probe_positive_tail(w);
    return w;
}

double RadialWeight::operator()(double r) const {
    check_radius(r);
    return impl_->eval(r);
}

double RadialWeight::tail(double r) const {
    check_radius(r);
    return impl_->tail(r);
}

double RadialWeight::tail1(double r) const {
    check_radius(r);
    return impl_->tail1(r);
}

double RadialWeight::log_tail1(double r) const {
    check_radius(r);
    return impl_->log_tail1(r);
}

double RadialWeight::moment(double x) const {
    if (!(x >= 0.0)) throw std::invalid_argument("RadialWeight::moment: need x >= 0");
    return impl_->moment(x);
}

double RadialWeight::integral_against(const std::function<double(double)>& g, double x) const {
    if (!(x >= 0.0)) throw std::invalid_argument("integral_against: need x >= 0");
    const Impl& im = *impl_;
    if (im.kind == WeightKind::log_type) {
        // below t = 2 the raw integrand is smooth; beyond it substitute
        // t = log(e/(1-s^2)), where g(s(t)) s(t)^x t^{-alpha}/2 decays like a power
        const double a = im.alpha;
        const double s_split = std::sqrt(-std::expm1(-1.0));
        const double head = integrate(
            [&](double s) { return g(s) * std::pow(s, x) * im.eval(s); }, 0.0, s_split, im.spec);
        const double tail_part = integrate_to_infinity(
            [&](double t) {
                const double s = std::sqrt(-std::expm1(1.0 - t));
                return g(s) * std::pow(s, x - 1.0) * std::pow(t, -a);
            },
            2.0, im.spec);
        return head + 0.5 * im.scale * tail_part;
    }
    auto res = integrate_to_one(
        [&](double s) { return g(s) * std::pow(s, x) * im.eval(s); }, 0.0, im.spec);
    if (res.divergent)
        throw AccuracyError("integral_against: divergent integral",
                            std::numeric_limits<double>::infinity(), res.error);
    return res.value;
}

WeightKind RadialWeight::kind() const { return impl_->kind; }
double RadialWeight::scale() const { return impl_->scale; }

bool RadialWeight::structurally_equal(const RadialWeight& other) const {
    if (impl_ == other.impl_) return true;
    const Impl& a = *impl_;
    const Impl& b = *other.impl_;
    if (a.kind != b.kind || a.scale != b.scale) return false;
    switch (a.kind) {
    case WeightKind::standard:
        return a.gamma == b.gamma;
    case WeightKind::log_type:
        return a.alpha == b.alpha;
    case WeightKind::exponential:
        return a.c == b.c && a.k == b.k;
    case WeightKind::power_tail:
        return a.alpha == b.alpha && a.children[0].structurally_equal(b.children[0]);
    case WeightKind::product:
        return a.children.size() == b.children.size() &&
               std::equal(a.children.begin(), a.children.end(), b.children.begin(),
                          [](const RadialWeight& x, const RadialWeight& y) {
                              return x.structurally_equal(y);
                          });
    case WeightKind::tabulated:
        return a.tab_r == b.tab_r && a.tab_v == b.tab_v;
    case WeightKind::custom:
        return false; // distinct evaluators are never assumed equal
    }
    return false;
}

const QuadratureSpec& RadialWeight::quadrature() const { return impl_->spec; }

RadialWeight RadialWeight::with_quadrature(const QuadratureSpec& spec) const {
    spec.validate();
    auto impl = std::make_shared<Impl>(*impl_);
    impl->spec = spec;
    return RadialWeight(impl);
}

double RadialWeight::standard_gamma() const {
    if (impl_->kind != WeightKind::standard)
        throw std::logic_error("standard_gamma: not a standard weight");
    return impl_->gamma;
}

double RadialWeight::log_alpha() const {
    if (impl_->kind != WeightKind::log_type)
        throw std::logic_error("log_alpha: not a log weight");
    return impl_->alpha;
}

const RadialWeight& RadialWeight::power_tail_base() const {
    if (impl_->kind != WeightKind::power_tail)
        throw std::logic_error("power_tail_base: not a power-tail weight");
    return impl_->children[0];
}

double RadialWeight::power_tail_alpha() const {
    if (impl_->kind != WeightKind::power_tail)
        throw std::logic_error("power_tail_alpha: not a power-tail weight");
    return impl_->alpha;
}

std::string RadialWeight::describe() const {
    std::ostringstream os;
    if (impl_->scale != 1.0) os << "scale(" << impl_->scale << ")*";
    switch (impl_->kind) {
    case WeightKind::standard:
        os << "std:gamma=" << impl_->gamma;
        break;
    case WeightKind::log_type:
        os << "log:alpha=" << impl_->alpha;
        break;
    case WeightKind::exponential:
        os << "exp:c=" << impl_->c << ",k=" << impl_->k;
        break;
    case WeightKind::power_tail:
        os << "powtail:base=" << impl_->children[0].describe() << ",alpha=" << impl_->alpha;
        break;
    case WeightKind::product:
        os << "prod:" << impl_->children[0].describe() << "*" << impl_->children[1].describe();
        break;
    case WeightKind::tabulated:
        os << "table:<" << impl_->tab_r.size() << " nodes>";
        break;
    case WeightKind::custom:
        os << impl_->label;
        break;
    }
    return os.str();
}

RadialWeight sigma_weight(const RadialWeight& omega, const RadialWeight& nu,
                          const ExponentPair& p) {
    // nu == omega: the exponent algebra collapses, sigma = omega exactly
    if (omega.structurally_equal(nu)) return omega;

    if (omega.kind() == WeightKind::standard && nu.kind() == WeightKind::standard) {
        const double e = omega.standard_gamma() * p.conj - nu.standard_gamma() * p.conj / p.p;
        const double c =
            std::pow(omega.scale(), p.conj) * std::pow(nu.scale(), -p.conj / p.p);
        return standard_any_exponent(e, c);
    }

    if (nu.kind() == WeightKind::power_tail && nu.power_tail_base().structurally_equal(omega)) {
        const double a = -nu.power_tail_alpha() * p.conj / p.p;
        const double c = std::pow(nu.scale(), -p.conj / p.p);
        if (a > -1.0) return power_tail_weight(omega, a).scaled(c);
        // non-integrable sigma: fall through to the generic evaluator, whose
        // tail quadrature reports the divergence
    }

    const double pp = p.p, pc = p.conj;
    const RadialWeight om = omega, nn = nu;
    std::string label = "sigma(" + omega.describe() + "," + nu.describe() + ";p=" +
                        std::to_string(pp) + ")";
    auto eval = [om, nn, pp, pc](double r) {
        const double w = om(r);
        const double v = nn(r);
        if (v == 0.0) return w == 0.0 ? 0.0 : kInf; // 0/0 convention: sigma = 0
        return std::pow(w / std::pow(v, 1.0 / pp), pc);
    };
    return RadialWeight::custom(std::move(label), std::move(eval));
}

} // namespace rwlab
