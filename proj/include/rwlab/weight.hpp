#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "rwlab/numerics.hpp"

namespace rwlab {

/// Holder exponent pair: 1/p + 1/conj = 1.
struct ExponentPair {
    double p;
    double conj;

    static ExponentPair from_p(double p) {
        if (!(p > 1.0) || !std::isfinite(p))
            throw std::invalid_argument("ExponentPair: need 1 < p < inf");
        return {p, p / (p - 1.0)};
    }
};

enum class WeightKind { standard, log_type, exponential, power_tail, product, tabulated, custom };

/// A radial weight on [0,1): nonnegative, integrable, with positive tails
/// tail(r) = int_r^1 w(s) ds. Immutable after construction; moment and tail
/// caches are write-once-per-key and safe under concurrent readers.
///
/// `standard(g)` is the unnormalized (1-s^2)^g; explicit scaling recovers the
/// normalized (g+1)(1-s^2)^g when needed.
class RadialWeight {
public:
    static RadialWeight standard(double gamma);
    /// (1-s^2)^{-1} (log(e/(1-s^2)))^{-alpha}, alpha > 1.
    static RadialWeight log_type(double alpha);
    /// exp(-c/(1-s)^k), c > 0, k > 0.
    static RadialWeight exponential(double c, double k);
    /// Piecewise-linear table on strictly increasing radii in [0,1);
    /// beyond the last node the value decays linearly to 0 at r=1.
    static RadialWeight tabulated(std::vector<double> radii, std::vector<double> values);
    /// Arbitrary nonnegative evaluator; tails and moments by quadrature.
    static RadialWeight custom(std::string label, std::function<double(double)> eval);

    /// Scalar multiple c*w. Tails/moments scale exactly.
    RadialWeight scaled(double c) const;

    /// w(r). Throws std::domain_error for r outside [0,1).
    double operator()(double r) const;
    /// tail(r) = int_r^1 w(s) ds. +inf when the integral diverges.
    double tail(double r) const;
    /// tail1(r) = int_r^1 s w(s) ds.
    double tail1(double r) const;
    /// log(tail1(r)); closed form where available so it stays finite far
    /// below the double underflow threshold of tail1 itself.
    double log_tail1(double r) const;
    /// Moment w_x = int_0^1 r^x w(r) dr, cached per exponent.
    double moment(double x) const;

    /// int_0^1 g(s) s^x w(s) ds for bounded g, using the kind-specific
    /// singular-endpoint treatment (the log kind integrates in the
    /// substituted variable where its tail decays like a power).
    double integral_against(const std::function<double(double)>& g, double x = 0.0) const;

    WeightKind kind() const;
    double scale() const;
    /// Round-trippable description in the weight-spec mini-language where the
    /// kind admits one; informational label otherwise.
    std::string describe() const;

    const QuadratureSpec& quadrature() const;
    RadialWeight with_quadrature(const QuadratureSpec& spec) const;

    /// Identity of the underlying implementation (shared by copies).
    bool same_object(const RadialWeight& other) const { return impl_ == other.impl_; }

    /// Structural identity: same kind, parameters, scale and children.
    /// Custom evaluators compare by object identity only.
    bool structurally_equal(const RadialWeight& other) const;

    // introspection used by derived-weight recognitions
    double standard_gamma() const;    // valid for kind standard
    double log_alpha() const;         // valid for kind log_type
    const RadialWeight& power_tail_base() const; // valid for kind power_tail
    double power_tail_alpha() const;  // valid for kind power_tail

    struct Impl;

private:
    explicit RadialWeight(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const Impl> impl_;
    friend RadialWeight power_tail_weight(const RadialWeight&, double);
    friend RadialWeight product(const RadialWeight&, const RadialWeight&);
    friend RadialWeight standard_any_exponent(double, double);
};

/// nu(s) = w(s) * tail1(s)^alpha, alpha > -1. Satisfies the exact identity
/// nu_tail1(r) = tail1(r)^(1+alpha)/(1+alpha).
RadialWeight power_tail_weight(const RadialWeight& w, double alpha);

/// Pointwise product of two weights.
RadialWeight product(const RadialWeight& a, const RadialWeight& b);

/// sigma = (omega / nu^{1/p})^{p'}. Closed-form kinds are recognized
/// (omega==nu, standard pairs, power-tail of omega); otherwise a custom
/// evaluator with the conventions: omega=nu=0 -> 0, nu=0<omega -> +inf.
/// The result may be non-integrable; its tails then report +inf.
RadialWeight sigma_weight(const RadialWeight& omega, const RadialWeight& nu, const ExponentPair& p);

/// Internal: standard kind without the integrability check on the exponent
/// (tails report +inf when e <= -1). Used for derived sigma weights.
RadialWeight standard_any_exponent(double e, double scale = 1.0);

/// Parse the weight-spec mini-language:
///   std:gamma=<g> | log:alpha=<a> | exp:c=<c>,k=<k>
///   | powtail:base=<spec>,alpha=<a> | prod:<spec>*<spec> | table:<path.csv>
RadialWeight parse_weight(const std::string& spec);

} // namespace rwlab
