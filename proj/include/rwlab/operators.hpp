#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rwlab/grid.hpp"
#include "rwlab/weight.hpp"

// Radial averaging operator H, its adjoint H*, the Stieltjes transform S and
// the Hormander maximal function M, all acting per-ray on radial profiles.
// Discretization: trapezoid segments on the profile grid plus closed-form
// head/tail terms for the constant extensions, arranged so that the pointwise
// chains M <= 2S and (H+H*)/2 <= S <= H+H* survive discretization exactly
// (up to roundoff).

namespace rwlab {

/// Point samples of a radial function with piecewise-linear reconstruction;
/// constant extension before the first and after the last node.
struct Profile {
    std::vector<double> r;
    std::vector<double> v;

    size_t size() const { return r.size(); }

    double operator()(double s) const;

    static Profile constant(double value, const Grid& g);
    static Profile sample(const std::function<double(double)>& f, const Grid& g);
    /// 0 below the jump radius a, f(s) at and beyond it (extra node at a).
    static Profile cutoff_sample(const std::function<double(double)>& f, const Grid& g, double a);

    std::function<double(double)> as_function() const;
    void validate() const;
};

enum class OperatorTag { H, Hstar, S, Mmax, Calderon };

std::string to_string(OperatorTag t);

/// (H f)(r) = int_r^1 f w1 ds / tail1(r); one backward cumulative pass.
/// Trailing nodes where tail1 underflows to 0 are dropped from the output.
Profile apply_H(const RadialWeight& w, const Profile& f);

/// (H* f)(r) = int_0^r f(s) w1(s)/tail1(s) ds; forward cumulative pass.
Profile apply_Hstar(const RadialWeight& w, const Profile& f);

/// (S f)(r) = int_0^1 f(s) w1(s)/(tail1(s)+tail1(r)) ds; full quadrature per
/// output radius (quadratic cost).
Profile apply_S(const RadialWeight& w, const Profile& f);

/// (M f)(r) = sup_{b <= r} int_b^1 |f| w1 ds / tail1(b), realized as a running
/// max over grid nodes; output is nondecreasing.
Profile apply_Mmax(const RadialWeight& w, const Profile& f);

Profile apply_operator(OperatorTag tag, const RadialWeight& w, const Profile& f);

/// ||f||_{L^p_nu} = (2 int_0^1 |f(s)|^p s nu(s) ds)^{1/p} against the
/// piecewise-linear reconstruction, tails in closed form.
double lp_norm(const RadialWeight& nu, const Profile& f, double p);

/// Thrown by level_points when the ratio function is flat somewhere.
class DegeneracyError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct LevelPoints {
    long k_lo = 0, k_hi = -1;      // attained dyadic levels (may be empty)
    std::vector<double> b;          // b[k - k_lo] solves R(b) = 2^k
    std::vector<double> ratio_halving; // tail1(b_{k+1})/tail1(b_k)  (<= 1/2)
    std::vector<double> doubling_factor; // tail1(b_k) / int_{b_k}^{b_{k+1}} w1 (<= 2)
    Profile f;
    std::string note;
};

/// Level radii of R(b) = int_b^1 f w1 / tail1(b) at the dyadic heights 2^k.
/// Pre: f >= 0 and R strictly increasing on the grid (checked). The k-range
/// is truncated to the attained levels within [k_min, k_max].
LevelPoints level_points(const RadialWeight& w, const Profile& f, long k_min, long k_max);

struct WeakTypeResult {
    bool empty = false;     // level set {M f > lambda} is empty
    double b = 1.0;         // level set is (b, 1)
    double level_measure = 0.0; // eta_tail(b) with eta = w1
    double bound = 0.0;     // ||f||_{L1(eta)} / lambda
};

/// Weak-type (1,1) data for M_{eta} with eta = (eta_base)_1.
WeakTypeResult weak_type_check(const RadialWeight& eta_base, const Profile& f, double lambda);

struct OpNormEstimate {
    double lower_bound = 0.0;       // max ratio over the exhibited test family
    Profile lower_witness;
    double heuristic_estimate = 0.0; // ascent / power iteration value
    Profile witness;
    bool converged = false;          // stable under one grid refinement (2%)
    double refined_estimate = 0.0;
    std::string grid_meta;
};

/// Test family for opnorm_lower: truncated extremal profiles
/// (nu/omega)^{-p'/p} chi_[a,1) over a grid of cut radii, plus seeded random
/// nonnegative profiles.
std::vector<Profile> default_test_family(const RadialWeight& omega, const RadialWeight& nu,
                                         const ExponentPair& p, const Grid& grid,
                                         std::uint64_t seed, int n_extremal = 48,
                                         int n_random = 16);

struct LowerBound {
    double value = 0.0;
    Profile witness;
};

/// Certified-by-witness lower bound: max over the family of
/// ||T f||_{L^p_nu} / ||f||_{L^p_nu}. Zero-norm members are skipped.
LowerBound opnorm_lower(OperatorTag tag, const RadialWeight& omega, const RadialWeight& nu,
                        const ExponentPair& p, const std::vector<Profile>& family);

/// Discretized-operator norm estimate: power iteration for p = 2, projected
/// ascent on the nonnegative cone otherwise; Mmax reports its lower bound
/// only. The heuristic is re-evaluated through lp_norm on the final witness,
/// so heuristic >= lower_bound holds by construction.
OpNormEstimate opnorm_estimate(OperatorTag tag, const RadialWeight& omega, const RadialWeight& nu,
                               const ExponentPair& p, const Grid& grid, std::uint64_t seed);

/// Dense matrix of the discretized operator on profile values (row-major).
/// Exposed for tests: matrix rows must reproduce apply_* exactly.
std::vector<double> operator_matrix(OperatorTag tag, const RadialWeight& w, const Grid& grid);

/// Seeded nonnegative profile with heavy-tailed values and occasional zeros.
Profile random_profile(Rng& rng, const Grid& g);

/// Seeded strictly increasing positive profile (strictly increasing ratio
/// function R for any weight).
Profile random_increasing_profile(Rng& rng, const Grid& g);

} // namespace rwlab
