#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rwlab/grid.hpp"
#include "rwlab/weight.hpp"

// Empirical diagnostics for the doubling classes (upper and lower) and the
// dyadic radius/block machinery. Membership in either class is asymptotic and
// not decidable from finitely many samples; these routines diagnose, they do
// not prove.

namespace rwlab {

enum class Trend { stable, growing, inconclusive };

std::string to_string(Trend t);

struct DoublingReport {
    enum class Tag { dhat, dcheck };
    Tag class_tag;
    double sup_estimate = 0.0;   // dhat: sup ratio; dcheck: best C(K)
    double argmax_radius = 0.0;  // radius attaining the reported extremum
    Trend trend = Trend::inconclusive;
    bool member = false;         // empirical verdict
    double best_K = 0.0;         // dcheck only
    std::vector<double> C_of_K;  // dcheck only, aligned with K_candidates
    std::vector<double> K_candidates;
    std::string grid_meta;
    std::string note;
};

/// Upper-doubling diagnostic: sup over the grid of tail(r)/tail((1+r)/2),
/// with a trend classification over the last two dyadic bands of the grid.
DoublingReport dhat_profile(const RadialWeight& w, const Grid& grid);

/// Lower-doubling diagnostic: for each K > 1 reports
/// C(K) = inf over the grid of tail(r)/tail(1-(1-r)/K), across refinements.
/// Membership is declared when some C(K) stays above 1 with margin.
DoublingReport dcheck_search(const RadialWeight& w, const std::vector<double>& K_candidates,
                             const Grid& grid);

struct DyadicDecomposition {
    std::vector<double> rho;    // rho[n] solves tail1(rho_n) = 2^-n tail1(0)
    std::vector<long> M;        // M[0] = 0, M[n] = floor(1/(1-rho_n)) for n >= 1
    std::vector<long> empty_blocks; // indices n with M[n+1] == M[n]
    bool truncated = false;     // n_max hit the underflow guard
    double tail1_zero = 0.0;    // tail1(0), the dyadic normalization
};

/// Solves tail1(rho_n) = 2^-n tail1(0) by bisection (radius tolerance 1e-14).
DyadicDecomposition rho_sequence(const RadialWeight& w, int n_max);

/// The unique n with M_n <= k < M_{n+1}. Throws std::out_of_range when k is
/// beyond the computed range.
long block_of_index(const DyadicDecomposition& d, long k);

} // namespace rwlab
