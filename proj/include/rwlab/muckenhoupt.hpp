#pragma once

#include <string>
#include <vector>

#include "rwlab/grid.hpp"
#include "rwlab/weight.hpp"

// Condition profiles r -> A_p(omega,nu)(r) and r -> M_p(omega,nu)(r).
// Divergence of the sup over [0,1) is not computable; what is reported is a
// grid diagnosis: the sup over successive grid refinements (each reaching
// closer to 1 by a factor 1e-2 in 1-r) must keep growing by more than 5% per
// level to be declared diverging.

namespace rwlab {

enum class Diagnosis { bounded, diverging, inconclusive };

std::string to_string(Diagnosis d);

struct ConstantProfile {
    Grid grid;                      // finest refinement level
    std::vector<double> values;     // +inf entries flag pointwise divergence
    double sup_estimate = 0.0;      // max of values; +inf when divergent
    bool divergent_flag = false;    // some value is +inf
    double argmax = 0.0;
    Diagnosis diagnosis = Diagnosis::inconclusive;
    std::vector<double> refinement_history; // sup per refinement level
    std::string grid_meta;
    std::string note; // conventions in effect (sigma 0/0 -> 0, r=0 included)
};

/// A_p(omega,nu)(r) = nu1_tail(r)^{1/p} sigma1_tail(r)^{1/p'} / w1_tail(r).
ConstantProfile ap_profile(const RadialWeight& omega, const RadialWeight& nu,
                           const ExponentPair& p, const Grid& grid, int refinements = 2);

/// M_p(omega,nu)(r) = (int_0^r nu1/w1_tail^p ds + 1)^{1/p} sigma1_tail(r)^{1/p'}.
/// The inner integral accumulates once along the grid in log space.
ConstantProfile mp_profile(const RadialWeight& omega, const RadialWeight& nu,
                           const ExponentPair& p, const Grid& grid, int refinements = 2);

struct DualityRatio {
    Grid grid;
    std::vector<double> lhs;    // A_p(omega, omega*f)(r)
    std::vector<double> rhs;    // A_{p'}(omega, omega*f^{-p'/p})(r)
    std::vector<double> ratio;  // lhs/rhs, identically 1 up to quadrature
    double max_deviation = 0.0; // max |ratio - 1|
};

/// Pointwise check of A_p(omega, omega f) = A_{p'}(omega, omega f^{-p'/p}).
DualityRatio ap_duality_check(const RadialWeight& omega, const std::function<double(double)>& factor,
                              const ExponentPair& p, const Grid& grid);

struct Profile;
/// Same check with the factor given as a sampled profile (piecewise-linear
/// reconstruction); the identity holds for the reconstruction exactly.
DualityRatio ap_duality_check(const RadialWeight& omega, const Profile& factor,
                              const ExponentPair& p, const Grid& grid);

} // namespace rwlab
