#include "rwlab/bergman.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rwlab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// GK15 nodes/weights, reused as a fixed radial panel rule (positive weights,
// degree-22 exactness).
constexpr double kX[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr double kW[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
} // namespace

KernelSeries::KernelSeries(RadialWeight w, int n_cap, double u_cap)
    : w_(std::move(w)), n_cap_(n_cap), u_cap_(u_cap) {
    if (n_cap_ < 1 || !(u_cap_ > 0.0) || !(u_cap_ < 1.0))
        throw std::invalid_argument("KernelSeries: bad cap parameters");
}

void KernelSeries::grow(int n) const {
    std::lock_guard lock(mu_);
    while (int(coeffs_.size()) <= n)
        coeffs_.push_back(0.5 / w_.moment(2.0 * double(coeffs_.size()) + 1.0));
}

double KernelSeries::coefficient(int n) const {
    if (n > n_cap_) throw std::out_of_range("KernelSeries: coefficient beyond n_cap");
    {
        std::lock_guard lock(mu_);
        if (n < int(coeffs_.size())) return coeffs_[n];
    }
    grow(n);
    std::lock_guard lock(mu_);
    return coeffs_[n];
}

double KernelSeries::truncation_bound(double abs_u, int N) const {
    // w_{2n+1} >= rho^{2n+1} tail(rho) for every rho < 1; with rho^2=(1+|u|)/2
    // the remainder is dominated by a geometric series in q = |u|/rho^2 < 1.
    const double rho = std::sqrt(0.5 * (1.0 + abs_u));
    const double q = abs_u / (rho * rho);
    const double wr = w_.tail(rho);
    if (!(wr > 0.0)) return kInf;
    return std::pow(q, N + 1) / (2.0 * rho * wr * (1.0 - q));
}

KernelSeries::Eval KernelSeries::eval(cplx u, double tol) const {
    const double au = std::abs(u);
    if (au > u_cap_)
        throw std::domain_error("KernelSeries::eval: |u| beyond the configured cap");
    if (!(tol > 0.0)) throw std::invalid_argument("KernelSeries::eval: need tol > 0");

    const double rho = std::sqrt(0.5 * (1.0 + au));
    const double q = au / (rho * rho);
    const double wr = w_.tail(rho);
    const double pref = 1.0 / (2.0 * rho * wr * (1.0 - q));

    Eval out;
    cplx un{1.0, 0.0};
    double qn = q; // q^{n+1}
    double mag = 0.0; // sum of |terms| (= value at real |u|)
    for (int n = 0; n <= n_cap_; ++n) {
        const double a = coefficient(n);
        out.value += a * un;
        mag += a * std::pow(au, n);
        un *= u;
        const double bound = pref * qn;
        qn *= q;
        out.terms = n + 1;
        if (bound <= tol * std::max(mag, 1e-300)) {
            out.tail_bound = bound;
            return out;
        }
    }
    out.tail_bound = pref * std::pow(q, out.terms);
    throw AccuracyError("KernelSeries::eval: tolerance unreachable within n_cap (bound " +
                            std::to_string(out.tail_bound) + ")",
                        std::abs(out.value), out.tail_bound);
}

double project_mode(const RadialWeight& w, const std::function<double(double)>& g, long k) {
    if (k < 0) return 0.0; // no matching kernel mode
    const double x = double(k);
    return w.integral_against(g, x + 1.0) / w.moment(2.0 * x + 1.0);
}

double project_mode(const RadialWeight& w, const Profile& g, long k) {
    g.validate();
    return project_mode(w, g.as_function(), k);
}

PolarField PolarField::make(int radial_panels, int n_theta, double gap_min) {
    if (radial_panels < 1 || n_theta < 4)
        throw std::invalid_argument("PolarField: need >= 1 radial panel and >= 4 angles");
    if (!(gap_min > 0.0) || !(gap_min < 0.5))
        throw std::invalid_argument("PolarField: gap_min must lie in (0, 0.5)");
    PolarField f;
    f.n_theta = n_theta;
    // geometric panel edges in the gap 1-s: 1, 1/2, ..., down to gap_min, 0
    std::vector<double> edges{0.0};
    double gap = 0.5;
    for (int i = 1; i < radial_panels; ++i) {
        edges.push_back(1.0 - gap);
        if (gap * 0.5 < gap_min) break;
        gap *= 0.5;
    }
    edges.push_back(1.0); // last panel reaches 1; interior nodes stay below 1
    for (size_t e = 0; e + 1 < edges.size(); ++e) {
        const double c = 0.5 * (edges[e] + edges[e + 1]);
        const double h = 0.5 * (edges[e + 1] - edges[e]);
        for (int i = 0; i < 7; ++i) {
            f.s.push_back(c - h * kX[i]);
            f.ws.push_back(h * kW[i]);
            f.s.push_back(c + h * kX[i]);
            f.ws.push_back(h * kW[i]);
        }
        f.s.push_back(c);
        f.ws.push_back(h * kW[7]);
    }
    // sort nodes radially (weights travel along)
    std::vector<size_t> idx(f.s.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return f.s[a] < f.s[b]; });
    std::vector<double> s2, w2;
    for (size_t i : idx) {
        s2.push_back(f.s[i]);
        w2.push_back(f.ws[i]);
    }
    f.s = std::move(s2);
    f.ws = std::move(w2);
    f.values.assign(f.s.size() * size_t(n_theta), cplx{0.0, 0.0});
    return f;
}

PolarField PolarField::sample(const std::function<cplx(cplx)>& fn, int radial_panels, int n_theta,
                              double gap_min) {
    PolarField f = make(radial_panels, n_theta, gap_min);
    for (size_t j = 0; j < f.s.size(); ++j) {
        for (int l = 0; l < n_theta; ++l) {
            const double th = f.theta(l);
            f.at(j, l) = fn(f.s[j] * cplx{std::cos(th), std::sin(th)});
        }
    }
    return f;
}

double PolarField::unit_mass() const {
    // int 1 dA = (1/pi) int_0^{2pi} int_0^1 s ds dtheta
    double acc = 0.0;
    for (size_t j = 0; j < s.size(); ++j) acc += ws[j] * s[j];
    return 2.0 * acc;
}

PolarField project_grid(const KernelSeries& K, const PolarField& F, bool absolute_kernel,
                        double out_radius_cap) {
    if (F.radial_size() > 256 || F.n_theta > 256)
        throw std::invalid_argument("project_grid: resolution beyond the 256x256 desk-scale cap");
    if (!(out_radius_cap > 0.0) || out_radius_cap > 0.999)
        throw std::invalid_argument("project_grid: bad output radius cap");
    const RadialWeight& w = K.weight();
    const int nt = F.n_theta;

    PolarField out;
    out.n_theta = nt;
    for (size_t i = 0; i < F.radial_size(); ++i) {
        if (F.s[i] <= out_radius_cap) {
            out.s.push_back(F.s[i]);
            out.ws.push_back(F.ws[i]);
        }
    }
    out.values.assign(out.s.size() * size_t(nt), cplx{0.0, 0.0});

    std::vector<cplx> ring(nt);
    std::vector<cplx> rot(nt);
    for (int d = 0; d < nt; ++d) {
        const double th = 2.0 * M_PI * d / nt;
        rot[d] = cplx{std::cos(th), std::sin(th)};
    }
    const double cell = 2.0 / double(nt); // angular dA weight per node

    // term counts from the certified bound, relative to the n=0 coefficient
    // (conservative: the kernel modulus is at least that on real arguments)
    const double a0 = K.coefficient(0);
    auto terms_for = [&K, a0](double u0) {
        if (!(u0 > 0.0)) return 1;
        const double q = 2.0 * u0 / (1.0 + u0);
        const double b0 = K.truncation_bound(u0, 0);
        const double target = 1e-10 * a0;
        if (b0 <= target) return 1;
        const int n = 1 + int(std::ceil(std::log(target / b0) / std::log(q)));
        return std::max(1, n);
    };
    // snapshot the coefficients once: the largest |u| needs the longest sum
    const double u_max = out.s.empty() ? 0.0 : out.s.back() * F.s.back();
    const int n_terms = terms_for(u_max);
    if (n_terms > K.cap())
        throw AccuracyError("project_grid: kernel truncation infeasible at the grid corner",
                            0.0, K.truncation_bound(u_max, K.cap()));
    std::vector<double> coeff(static_cast<size_t>(n_terms), 0.0);
    for (int n = 0; n < n_terms; ++n) coeff[size_t(n)] = K.coefficient(n);

    for (size_t i = 0; i < out.s.size(); ++i) {
        const double ri = out.s[i];
        for (size_t j = 0; j < F.radial_size(); ++j) {
            const double u0 = ri * F.s[j];
            const int N = std::min<int>(n_terms, terms_for(u0));
            for (int d = 0; d < nt; ++d) {
                // Horner for sum a_n (u0 rot)^n
                cplx acc{0.0, 0.0};
                const cplx z = u0 * rot[d];
                for (int n = N - 1; n >= 0; --n) acc = acc * z + coeff[size_t(n)];
                ring[d] = absolute_kernel ? cplx{std::abs(acc), 0.0} : acc;
            }
            const double wgt = cell * F.ws[j] * F.s[j] * w(F.s[j]);
            for (int m = 0; m < nt; ++m) {
                cplx acc{0.0, 0.0};
                for (int l = 0; l < nt; ++l) {
                    int d = m - l;
                    if (d < 0) d += nt;
                    acc += F.at(j, l) * ring[d];
                }
                out.values[i * nt + m] += wgt * acc;
            }
        }
    }
    return out;
}

CoefficientVector CoefficientVector::monomial(long k, cplx coeff) {
    if (k < 0) throw std::invalid_argument("CoefficientVector: negative degree");
    CoefficientVector f;
    f.c.assign(size_t(k) + 1, cplx{0.0, 0.0});
    f.c.back() = coeff;
    f.canonicalize();
    return f;
}

CoefficientVector CoefficientVector::from_real(std::vector<double> coeffs) {
    CoefficientVector f;
    f.c.reserve(coeffs.size());
    for (double x : coeffs) f.c.push_back(cplx{x, 0.0});
    f.canonicalize();
    return f;
}

void CoefficientVector::canonicalize() {
    while (!c.empty() && c.back() == cplx{0.0, 0.0}) c.pop_back();
}

cplx CoefficientVector::eval(cplx z) const {
    cplx acc{0.0, 0.0};
    for (size_t n = c.size(); n-- > 0;) acc = acc * z + c[n];
    return acc;
}

CoefficientVector i_omega(const RadialWeight& w, const CoefficientVector& g) {
    CoefficientVector out = g;
    for (size_t k = 0; k < out.c.size(); ++k) out.c[k] *= w.moment(2.0 * double(k) + 1.0);
    out.canonicalize();
    return out;
}

AdjointMonomial adjoint_monomial(const RadialWeight& omega, const RadialWeight& nu, long n,
                                 const ExponentPair& p) {
    if (n < 0) throw std::invalid_argument("adjoint_monomial: need n >= 0");
    AdjointMonomial out;
    const double xn = double(n);
    const double nu_m = nu.moment(2.0 * xn + 1.0);
    const double om_m = omega.moment(2.0 * xn + 1.0);
    const RadialWeight om = omega, nn = nu;
    const double ratio = nu_m / om_m;
    out.radial_factor = [om, nn, ratio, xn](double s) {
        const double wv = om(s), nv = nn(s);
        if (nv == 0.0) return wv == 0.0 ? 0.0 : kInf;
        return (wv / nv) * ratio * std::pow(s, xn);
    };

    // route 1: direct quadrature of |factor|^{p'} s nu(s)
    const auto factor = out.radial_factor;
    const double pc = p.conj;
    double direct;
    bool direct_div = false;
    try {
        direct = nn.integral_against([factor, pc](double s) { return std::pow(factor(s), pc); },
                                     1.0);
    } catch (const AccuracyError&) {
        direct = kInf;
        direct_div = true;
    }
    // route 2: the factored moment identity 2 (nu_m/om_m)^{p'} int s^{np'+1} sigma(s) ds
    const RadialWeight sigma = sigma_weight(omega, nu, p);
    const double sig_m = sigma.moment(xn * pc + 1.0);

    if (direct_div || !std::isfinite(direct) || !std::isfinite(sig_m)) {
        out.divergent = true;
        out.norm_direct = kInf;
        out.norm_identity = kInf;
        return out;
    }
    out.norm_direct = std::pow(2.0 * direct, 1.0 / pc);
    out.norm_identity = std::pow(2.0 * std::pow(ratio, pc) * sig_m, 1.0 / pc);
    return out;
}

namespace {

double block_circle_norm(const std::vector<cplx>& coeffs, long k_lo, double p) {
    // H^p norm on the circle; modes k_lo..k_lo+len-1
    if (coeffs.empty()) return 0.0;
    if (p == 2.0) {
        // the uniform rule beyond Nyquist integrates |poly|^2 exactly; equal
        // to the coefficient sum
        double acc = 0.0;
        for (const cplx& z : coeffs) acc += std::norm(z);
        return std::sqrt(acc);
    }
    const long top_degree = k_lo + long(coeffs.size()) - 1;
    const long m = std::max<long>(16, 8 * (top_degree + 1));
    double acc = 0.0;
    for (long j = 0; j < m; ++j) {
        const double th = 2.0 * M_PI * double(j) / double(m);
        // |e^{i k_lo th}| = 1: evaluate the reduced polynomial
        cplx z{std::cos(th), std::sin(th)};
        cplx val{0.0, 0.0};
        for (size_t n = coeffs.size(); n-- > 0;) val = val * z + coeffs[n];
        acc += std::pow(std::abs(val), p);
    }
    return std::pow(acc / double(m), 1.0 / p);
}

} // namespace

std::vector<double> hardy_block_norms(const DyadicDecomposition& d, const CoefficientVector& f,
                                      double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("hardy_block_norms: need p >= 1");
    std::vector<double> norms;
    const long deg = f.degree();
    for (size_t n = 0; n + 1 < d.M.size(); ++n) {
        const long lo = d.M[n], hi = d.M[n + 1];
        if (lo > deg) break;
        std::vector<cplx> block;
        for (long k = lo; k < hi && k <= deg; ++k) block.push_back(f.c[size_t(k)]);
        norms.push_back(block_circle_norm(block, lo, p));
    }
    return norms;
}

BlockEquivalence block_norm_equivalence(const RadialWeight& omega, const RadialWeight& nu,
                                        const CoefficientVector& f, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("block_norm_equivalence: need p >= 1");
    const bool same = nu.same_object(omega);
    if (!same &&
        !(nu.kind() == WeightKind::power_tail && nu.power_tail_base().same_object(omega)))
        throw std::invalid_argument(
            "block_norm_equivalence: nu must be omega or a power-tail weight of omega");

    BlockEquivalence out;
    if (f.c.empty()) {
        out.degenerate = true;
        return out;
    }
    const long deg = f.degree();
    // enough dyadic radii to cover the top degree
    int n_max = 4;
    DyadicDecomposition d = rho_sequence(omega, n_max);
    while (!d.truncated && d.M.back() <= deg) {
        n_max += 4;
        d = rho_sequence(omega, n_max);
    }
    out.empty_blocks = d.empty_blocks;
    out.block_norms = hardy_block_norms(d, f, p);

    double bsum = 0.0;
    for (size_t n = 0; n < out.block_norms.size(); ++n)
        bsum += nu.tail1(d.rho[n]) * std::pow(out.block_norms[n], p);
    out.block_sum = bsum;

    double norm_p = 0.0;
    if (p == 2.0) {
        for (size_t k = 0; k < f.c.size(); ++k)
            norm_p += std::norm(f.c[k]) * 2.0 * nu.moment(2.0 * double(k) + 1.0);
    } else {
        const long m = std::max<long>(16, 8 * (deg + 1));
        auto circle_avg = [&f, m, p](double s) {
            double acc = 0.0;
            for (long j = 0; j < m; ++j) {
                const double th = 2.0 * M_PI * double(j) / double(m);
                acc += std::pow(std::abs(f.eval(s * cplx{std::cos(th), std::sin(th)})), p);
            }
            return acc / double(m);
        };
        norm_p = 2.0 * nu.integral_against(circle_avg, 1.0);
    }
    out.norm_p = norm_p;
    if (!(norm_p > 0.0)) {
        out.degenerate = true;
        return out;
    }
    out.ratio = bsum / norm_p;
    return out;
}

} // namespace rwlab
