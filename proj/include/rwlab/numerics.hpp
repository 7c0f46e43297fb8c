#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

// Low-level quadrature and special-function kernels shared by the weight
// machinery. Everything here is deterministic: identical inputs produce
// bit-identical outputs regardless of call order.

namespace rwlab {

/// Tolerances and grading knobs for the adaptive quadrature paths.
struct QuadratureSpec {
    double relative_tolerance = 1e-11;
    double absolute_tolerance = 1e-15;
    /// Geometric panels toward a singular endpoint shrink by 2^(-graded_exponent).
    double graded_exponent = 1.0;
    /// Maximum bisection depth inside a single panel.
    int max_refinements = 40;

    void validate() const {
        if (!(relative_tolerance > 0.0) || !(absolute_tolerance > 0.0))
            throw std::invalid_argument("QuadratureSpec: tolerances must be positive");
        if (!(graded_exponent > 0.0))
            throw std::invalid_argument("QuadratureSpec: graded_exponent must be positive");
        if (max_refinements < 1)
            throw std::invalid_argument("QuadratureSpec: max_refinements must be >= 1");
    }
};

/// Thrown when a quadrature fails to reach its tolerance budget. Carries the
/// best available estimate and the error bound actually achieved.
class AccuracyError : public std::runtime_error {
public:
    AccuracyError(const std::string& what, double best, double bound)
        : std::runtime_error(what), best_estimate(best), error_bound(bound) {}
    double best_estimate;
    double error_bound;
};

using RealFn = std::function<double(double)>;

/// One Gauss-Kronrod 7-15 panel on [a,b]. err receives the |K15-G7| estimate.
double gk15(const RealFn& f, double a, double b, double* err = nullptr);

/// Adaptive GK15 on a finite interval with a smooth integrand.
double integrate(const RealFn& f, double a, double b, const QuadratureSpec& spec = {});

struct TailIntegral {
    double value = 0.0;
    bool divergent = false;
    double error = 0.0;
};

/// Integral of f over [a,1) where f may have an integrable singularity at 1.
/// Geometric panels cluster toward 1; non-integrable growth is detected and
/// reported through `divergent` instead of an error.
TailIntegral integrate_to_one(const RealFn& f, double a, const QuadratureSpec& spec = {});

/// Integral of g over [a,inf) for g decaying at least like a power < -1.
double integrate_to_infinity(const RealFn& g, double a, const QuadratureSpec& spec = {});

/// Adaptive panel integral of exp(log_f) over [a,b], carried in log space.
/// Returns log of the integral (-inf for a zero integral).
double integrate_log(const RealFn& log_f, double a, double b, int depth = 12);

/// Bisection for g(x) = target on [lo,hi] with g monotone nondecreasing.
double bisect_increasing(const RealFn& g, double lo, double hi, double target, double xtol);

/// Bisection for g(x) = target on [lo,hi] with g monotone nonincreasing.
double bisect_decreasing(const RealFn& g, double lo, double hi, double target, double xtol);

// --- special functions -----------------------------------------------------

double log_beta(double a, double b);

/// Regularized incomplete beta I_x(a,b) by Lentz continued fraction.
double reg_inc_beta(double x, double a, double b);

// --- misc helpers ----------------------------------------------------------

/// (1-r^2) evaluated as (1-r)(1+r); exact subtraction for r in [0.5,1].
inline double one_minus_sq(double r) { return (1.0 - r) * (1.0 + r); }

/// log(e/(1-r^2)) = 1 - log((1-r)(1+r)).
inline double log_e_over(double x) { return 1.0 - std::log(x); }

/// Deterministic random source. Raw mt19937_64 output is pinned by the
/// standard; transforms below avoid std::*_distribution, whose streams are
/// implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

    std::uint64_t next_u64() {
        // xorshift* keeps the dependency surface minimal and the stream portable
        std::uint64_t x = state_;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        state_ = x;
        return x * 0x2545f4914f6cdd1dull;
    }

    /// Uniform in [0,1).
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in (0,1].
    double uniform_pos() { return 1.0 - uniform(); }

    /// Heavy-tailed positive sample: Pareto-type u^(-alpha), alpha in (0,1).
    double heavy(double alpha = 0.7) { return std::pow(uniform_pos(), -alpha); }

private:
    std::uint64_t state_;
};

} // namespace rwlab
