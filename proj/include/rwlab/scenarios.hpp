#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rwlab/report.hpp"
#include "rwlab/weight.hpp"

// Scenario runner reproducing the named results at desk scale as
// machine-checkable reports.

namespace rwlab {

/// Forelli-Rudin case: the sign of p(gamma+1)-(beta+1) against the A_p
/// diagnosis, the closed-form constant in the bounded case, and the
/// power-tail representation nu = (2(gamma+1))^{-alpha} omega tail1^alpha.
Report verify_forelli_rudin(double gamma, double beta, double p);

/// omega = 1 against the logarithmic weight: the lower-doubling search fails,
/// M_p stays bounded, A_p diverges like log^{1/p}.
Report counterexample_report(double alpha, double p);

struct CalderonOptions {
    int grid_n = 320;
    int chain_profiles = 1000;
    std::uint64_t seed = 20240901;
    double band_lo = 0.25;  // acceptance band [A_p/4, 64 A_p]
    double band_hi = 64.0;  // acceptance constant of this artifact, not a sharp bound
    double eps_grid = 0.05; // slack for A_p <= lower(Mmax)(1+eps)
};

/// Operator-norm comparability for one weight pair: A_p against the maximal
/// lower bound, band membership of the three norm estimates, the pointwise
/// chains on seeded profiles, and the divergence branch when A_p = inf.
Report verify_calderon(const RadialWeight& omega, const RadialWeight& nu, double p,
                       const CalderonOptions& opts = {});

/// Scenario description: flat key-value table (see scenarios/*.toml).
struct Scenario {
    std::string name;
    std::string kind; // forelli-rudin-grid | counterexample | calderon
    std::map<std::string, std::string> strings;
    std::map<std::string, std::vector<double>> numbers;
    std::uint64_t seed = 0;
    std::vector<std::string> checks; // empty = all checks of the kind

    double number(const std::string& key, double fallback) const;
    std::vector<double> list(const std::string& key, std::vector<double> fallback) const;
};

Scenario parse_scenario_file(const std::string& path);
Scenario parse_scenario_text(const std::string& text, const std::string& name_hint);

/// Validates the scenario (unknown check names are config errors raised
/// before any computation) and dispatches. Sub-checks of grid scenarios run
/// concurrently; report assembly is an ordered merge.
Report run_scenario(const Scenario& s);

} // namespace rwlab
