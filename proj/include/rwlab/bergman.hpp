#pragma once

#include <complex>
#include <functional>
#include <mutex>
#include <string>
#include <vector>

#include "rwlab/classes.hpp"
#include "rwlab/grid.hpp"
#include "rwlab/operators.hpp"
#include "rwlab/weight.hpp"

// Bergman kernel via the odd-moment series, the projection applied per
// Fourier mode and on small polar grids, the adjoint image of monomials, the
// coefficient multiplier I, and Hardy block norms with the dyadic-block norm
// equivalence check.

namespace rwlab {

using cplx = std::complex<double>;

/// Truncated kernel series B(u) = sum_n u^n / (2 w_{2n+1}) with a certified
/// geometric truncation bound from w_{2n+1} >= rho^{2n+1} tail(rho).
class KernelSeries {
public:
    explicit KernelSeries(RadialWeight w, int n_cap = 1 << 14, double u_cap = 0.999);

    struct Eval {
        cplx value{0.0, 0.0};
        double tail_bound = 0.0;
        int terms = 0;
    };

    /// Partial sum with N chosen so the certified tail bound <= tol (tol is
    /// relative to the accumulated |value| at real |u|, absolute floor 1e-300).
    /// Throws AccuracyError when n_cap terms cannot reach tol.
    Eval eval(cplx u, double tol) const;

    /// Series coefficient 1/(2 w_{2n+1}).
    double coefficient(int n) const;

    /// Certified bound on |sum_{n>N} u^n/(2 w_{2n+1})| at |u| = abs_u.
    double truncation_bound(double abs_u, int N) const;

    const RadialWeight& weight() const { return w_; }
    int cap() const { return n_cap_; }

private:
    RadialWeight w_;
    int n_cap_;
    double u_cap_;
    mutable std::vector<double> coeffs_;
    mutable std::mutex mu_;
    void grow(int n) const;
};

/// Mode-k coefficient of the projection: for f(zeta) = g(s) e^{ik theta},
/// P f(z) = c z^k with c = int_0^1 g(s) s^{k+1} w(s) ds / w_{2k+1}.
/// Negative modes (k < 0) have no matching kernel mode; the projection is 0.
double project_mode(const RadialWeight& w, const std::function<double(double)>& g, long k);
double project_mode(const RadialWeight& w, const Profile& g, long k);

/// Polar sampling grid with quadrature weights for dA = r dr dtheta / pi.
/// Radial nodes are Gauss-Kronrod panels graded geometrically toward 1 and
/// cover [0,1] entirely, so the discrete area of the disc is 1.
struct PolarField {
    std::vector<double> s;    // radial nodes
    std::vector<double> ws;   // radial weights (for ds)
    int n_theta = 0;
    std::vector<cplx> values; // [j * n_theta + l]

    static PolarField make(int radial_panels, int n_theta, double gap_min = 1e-4);
    static PolarField sample(const std::function<cplx(cplx)>& f, int radial_panels, int n_theta,
                             double gap_min = 1e-4);

    double theta(int l) const { return 2.0 * M_PI * l / n_theta; }
    cplx& at(size_t j, int l) { return values[j * n_theta + l]; }
    cplx at(size_t j, int l) const { return values[j * n_theta + l]; }
    /// Quadrature of the constant 1 against dA (the unit-mass check).
    double unit_mass() const;
    size_t radial_size() const { return s.size(); }
};

/// Full 2D quadrature of P (absolute_kernel = false) or P+ (true). The kernel
/// depends on conj(z) zeta only, so the angular structure is a circular
/// convolution per radial pair. Output rows are restricted to radii
/// <= out_radius_cap: beyond it the truncated kernel series and the angular
/// aliasing of an n_theta-point rule are no longer certified. Refuses
/// resolutions beyond 256x256.
PolarField project_grid(const KernelSeries& K, const PolarField& F, bool absolute_kernel,
                        double out_radius_cap = 0.9);

/// Finite Maclaurin coefficient vector; trailing zeros canonicalized away.
struct CoefficientVector {
    std::vector<cplx> c;

    static CoefficientVector monomial(long k, cplx coeff = 1.0);
    static CoefficientVector from_real(std::vector<double> coeffs);
    void canonicalize();
    long degree() const { return long(c.size()) - 1; }
    cplx eval(cplx z) const;
};

/// Coefficient multiplier (I g)(z) = sum_k g_k w_{2k+1} z^k.
CoefficientVector i_omega(const RadialWeight& w, const CoefficientVector& g);

struct AdjointMonomial {
    std::function<double(double)> radial_factor; // s -> w(s) nu_{2n+1} / (nu(s) w_{2n+1}) s^n
    double norm_direct = 0.0;   // L^{p'}_nu norm by direct quadrature
    double norm_identity = 0.0; // same norm through the sigma-moment identity
    bool divergent = false;
};

/// Image of the monomial z^n under the adjoint of the projection (radial
/// factor and its L^{p'}_nu norm, computed by two independent routes).
AdjointMonomial adjoint_monomial(const RadialWeight& omega, const RadialWeight& nu, long n,
                                 const ExponentPair& p);

/// H^p norms of the dyadic Maclaurin blocks of f. For p = 2 the uniform
/// circle rule beyond the Nyquist degree equals the coefficient sum exactly
/// and is evaluated that way; other p sample the circle with 8x oversampling
/// past the block's top degree.
std::vector<double> hardy_block_norms(const DyadicDecomposition& d, const CoefficientVector& f,
                                      double p);

struct BlockEquivalence {
    double ratio = 0.0; // sum_n nu1_tail(rho_n) ||block_n f||^p / ||f||_{A^p_nu}^p
    bool degenerate = false;
    double block_sum = 0.0;
    double norm_p = 0.0; // ||f||_{A^p_nu}^p
    std::vector<double> block_norms;
    std::vector<long> empty_blocks;
};

/// Requires nu of the power-tail form nu = omega * tail1^alpha (alpha = 0 for
/// nu == omega). For p = 2 the reference norm uses exact mode integrals.
BlockEquivalence block_norm_equivalence(const RadialWeight& omega, const RadialWeight& nu,
                                        const CoefficientVector& f, double p);

} // namespace rwlab
