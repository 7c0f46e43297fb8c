// rwlab: batch CLI for radial-weight diagnostics, Muckenhoupt-type condition
// profiles, radial operator norm estimation, Bergman kernel/projection
// evaluation, dyadic block norms, and scenario verification.

#include <complex>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "rwlab/bergman.hpp"
#include "rwlab/classes.hpp"
#include "rwlab/muckenhoupt.hpp"
#include "rwlab/operators.hpp"
#include "rwlab/scenarios.hpp"

namespace {

using nlohmann::ordered_json;

ordered_json doubling_json(const rwlab::DoublingReport& rep) {
    ordered_json j;
    j["class"] = rep.class_tag == rwlab::DoublingReport::Tag::dhat ? "Dhat" : "Dcheck";
    j["sup_estimate"] = rep.sup_estimate;
    j["argmax_radius"] = rep.argmax_radius;
    j["trend"] = rwlab::to_string(rep.trend);
    j["member"] = rep.member;
    if (rep.class_tag == rwlab::DoublingReport::Tag::dcheck) {
        j["K_candidates"] = rep.K_candidates;
        j["C_of_K"] = rep.C_of_K;
        j["best_K"] = rep.best_K;
    }
    j["grid"] = rep.grid_meta;
    if (!rep.note.empty()) j["note"] = rep.note;
    return j;
}

ordered_json profile_json(const rwlab::ConstantProfile& p, const std::string& name) {
    ordered_json j;
    j["profile"] = name;
    j["sup_estimate"] = p.sup_estimate;
    j["argmax"] = p.argmax;
    j["diagnosis"] = rwlab::to_string(p.diagnosis);
    j["refinement_history"] = p.refinement_history;
    j["grid"] = p.grid_meta;
    j["note"] = p.note;
    j["r"] = p.grid.r;
    j["values"] = p.values;
    return j;
}

void write_out(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file " + out_path);
    out << text;
}

std::function<double(double)> parse_profile_spec(const std::string& spec) {
    if (spec.rfind("const:", 0) == 0) {
        const double v = std::stod(spec.substr(6));
        return [v](double) { return v; };
    }
    if (spec.rfind("poly:", 0) == 0) {
        std::vector<double> coeffs;
        std::istringstream is(spec.substr(5));
        std::string tok;
        while (std::getline(is, tok, ',')) coeffs.push_back(std::stod(tok));
        return [coeffs](double s) {
            double acc = 0.0;
            for (size_t n = coeffs.size(); n-- > 0;) acc = acc * s + coeffs[n];
            return acc;
        };
    }
    if (spec.rfind("table:", 0) == 0) {
        std::ifstream in(spec.substr(6));
        if (!in) throw std::invalid_argument("profile spec: cannot open " + spec.substr(6));
        std::vector<double> r, v;
        std::string line;
        while (std::getline(in, line)) {
            std::istringstream ls(line);
            std::string a, b;
            if (!std::getline(ls, a, ',') || !std::getline(ls, b)) continue;
            try {
                r.push_back(std::stod(a));
                v.push_back(std::stod(b));
            } catch (const std::exception&) {
                if (!r.empty()) throw;
            }
        }
        rwlab::Profile p{r, v};
        p.validate();
        return p.as_function();
    }
    throw std::invalid_argument("profile spec: expected const:<v>, poly:<c0,c1,...> or table:<csv>");
}

std::complex<double> parse_complex(const std::string& s) {
    const size_t comma = s.find(',');
    if (comma == std::string::npos) return {std::stod(s), 0.0};
    return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"radial-weight laboratory: weights, condition profiles, radial operators, "
                 "Bergman kernels and scenario verification"};
    app.require_subcommand(1);

    std::string weight_spec, omega_spec, nu_spec, format = "json", out_path, scenario_path;
    std::string op_name = "calderon", g_spec = "const:1", u_text = "0";
    double p_value = 2.0, grid_min = 1e-8, tol = 1e-10, alpha = 0.0;
    int refinements = 2, grid_n = 320;
    long mode_k = 0, degree = 16;
    std::uint64_t seed = 20240901;
    std::vector<double> K_list{2.0, 4.0, 8.0, 16.0};

    auto* classes = app.add_subcommand("classes", "doubling-class diagnostics for one weight");
    classes->add_option("--weight", weight_spec, "weight spec")->required();
    classes->add_option("--grid-min", grid_min, "deepest gap 1-r of the grid");
    classes->add_option("--K", K_list, "K candidates for the lower-doubling search");

    auto* ap_cmd = app.add_subcommand("ap", "A_p(omega,nu) condition profile");
    auto* mp_cmd = app.add_subcommand("mp", "M_p(omega,nu) condition profile");
    for (auto* cmd : {ap_cmd, mp_cmd}) {
        cmd->add_option("--omega", omega_spec, "inducing weight spec")->required();
        cmd->add_option("--nu", nu_spec, "target weight spec")->required();
        cmd->add_option("--p", p_value, "exponent p > 1");
        cmd->add_option("--grid-min", grid_min, "deepest gap 1-r of the base grid");
        cmd->add_option("--refinements", refinements, "refinement levels toward 1");
        cmd->add_option("--format", format, "json|csv");
    }

    auto* opnorm = app.add_subcommand("opnorm", "operator norm lower bound and estimate");
    opnorm->add_option("--op", op_name, "h|hstar|stieltjes|maximal|calderon");
    opnorm->add_option("--omega", omega_spec, "inducing weight spec")->required();
    opnorm->add_option("--nu", nu_spec, "norm weight spec")->required();
    opnorm->add_option("--p", p_value, "exponent p > 1");
    opnorm->add_option("--grid", grid_n, "operator grid size");
    opnorm->add_option("--seed", seed, "test-family seed");
    opnorm->add_option("--format", format, "json");

    auto* kernel = app.add_subcommand("kernel", "Bergman kernel value from the odd-moment series");
    kernel->add_option("--weight", weight_spec, "weight spec")->required();
    kernel->add_option("--u", u_text, "argument u = conj(z) zeta, 're' or 're,im'");
    kernel->add_option("--tol", tol, "relative truncation tolerance");

    auto* project = app.add_subcommand("project", "projection of g(s) e^{ik theta} per mode");
    project->add_option("--weight", weight_spec, "weight spec")->required();
    project->add_option("--mode", mode_k, "angular mode k (negative modes project to 0)");
    project->add_option("--g", g_spec, "radial profile spec");

    auto* blocks = app.add_subcommand("blocks", "dyadic block norms and the norm-equivalence ratio");
    blocks->add_option("--omega", omega_spec, "inducing weight spec")->required();
    blocks->add_option("--alpha", alpha, "power-tail exponent of nu = omega tail1^alpha");
    blocks->add_option("--p", p_value, "exponent p >= 1");
    blocks->add_option("--degree", degree, "monomial degree for the ratio check");

    auto* verify = app.add_subcommand("verify", "run a scenario file and emit a report");
    verify->add_option("--scenario", scenario_path, "scenario file (flat key-value table)")
        ->required();
    verify->add_option("--out", out_path, "output path (stdout when omitted)");
    verify->add_option("--format", format, "json|csv");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*classes) {
            const rwlab::RadialWeight w = rwlab::parse_weight(weight_spec);
            const rwlab::Grid grid = rwlab::Grid::sup_default(512, grid_min);
            ordered_json j;
            j["weight"] = w.describe();
            j["dhat"] = doubling_json(rwlab::dhat_profile(w, grid));
            j["dcheck"] = doubling_json(rwlab::dcheck_search(w, K_list, grid));
            std::cout << j.dump(2) << "\n";
        } else if (*ap_cmd || *mp_cmd) {
            const rwlab::RadialWeight omega = rwlab::parse_weight(omega_spec);
            const rwlab::RadialWeight nu = rwlab::parse_weight(nu_spec);
            const auto pp = rwlab::ExponentPair::from_p(p_value);
            const rwlab::Grid grid = rwlab::Grid::sup_default(512, grid_min);
            const rwlab::ConstantProfile prof =
                *ap_cmd ? rwlab::ap_profile(omega, nu, pp, grid, refinements)
                        : rwlab::mp_profile(omega, nu, pp, grid, refinements);
            if (format == "csv") {
                std::ostringstream os;
                os.precision(17);
                os << "r," << (*ap_cmd ? "A_p" : "M_p") << "\n";
                for (size_t i = 0; i < prof.grid.size(); ++i)
                    os << prof.grid[i] << "," << prof.values[i] << "\n";
                std::cout << os.str();
            } else {
                std::cout << profile_json(prof, *ap_cmd ? "A_p" : "M_p").dump(2) << "\n";
            }
        } else if (*opnorm) {
            const rwlab::RadialWeight omega = rwlab::parse_weight(omega_spec);
            const rwlab::RadialWeight nu = rwlab::parse_weight(nu_spec);
            const auto pp = rwlab::ExponentPair::from_p(p_value);
            rwlab::OperatorTag tag;
            if (op_name == "h") tag = rwlab::OperatorTag::H;
            else if (op_name == "hstar") tag = rwlab::OperatorTag::Hstar;
            else if (op_name == "stieltjes") tag = rwlab::OperatorTag::S;
            else if (op_name == "maximal") tag = rwlab::OperatorTag::Mmax;
            else if (op_name == "calderon") tag = rwlab::OperatorTag::Calderon;
            else throw std::invalid_argument("opnorm: unknown --op " + op_name);
            const rwlab::Grid grid = rwlab::Grid::operator_grid(grid_n);
            const auto est = rwlab::opnorm_estimate(tag, omega, nu, pp, grid, seed);
            ordered_json j;
            j["op"] = op_name;
            j["omega"] = omega.describe();
            j["nu"] = nu.describe();
            j["p"] = p_value;
            j["seed"] = seed;
            j["lower_bound"] = est.lower_bound;
            j["heuristic_estimate"] = est.heuristic_estimate;
            j["refined_estimate"] = est.refined_estimate;
            j["converged"] = est.converged;
            j["grid"] = est.grid_meta;
            std::cout << j.dump(2) << "\n";
        } else if (*kernel) {
            const rwlab::RadialWeight w = rwlab::parse_weight(weight_spec);
            rwlab::KernelSeries K(w);
            const auto ev = K.eval(parse_complex(u_text), tol);
            ordered_json j;
            j["weight"] = w.describe();
            j["u"] = u_text;
            j["value_re"] = ev.value.real();
            j["value_im"] = ev.value.imag();
            j["terms"] = ev.terms;
            j["tail_bound"] = ev.tail_bound;
            std::cout << j.dump(2) << "\n";
        } else if (*project) {
            const rwlab::RadialWeight w = rwlab::parse_weight(weight_spec);
            const double c = rwlab::project_mode(w, parse_profile_spec(g_spec), mode_k);
            ordered_json j;
            j["weight"] = w.describe();
            j["mode"] = mode_k;
            j["coefficient"] = c;
            std::cout << j.dump(2) << "\n";
        } else if (*blocks) {
            const rwlab::RadialWeight omega = rwlab::parse_weight(omega_spec);
            const rwlab::RadialWeight nu =
                alpha == 0.0 ? omega : rwlab::power_tail_weight(omega, alpha);
            const auto f = rwlab::CoefficientVector::monomial(degree);
            const auto eq = rwlab::block_norm_equivalence(omega, nu, f, p_value);
            ordered_json j;
            j["omega"] = omega.describe();
            j["nu"] = nu.describe();
            j["p"] = p_value;
            j["degree"] = degree;
            j["ratio"] = eq.ratio;
            j["degenerate"] = eq.degenerate;
            j["block_norms"] = eq.block_norms;
            j["empty_blocks"] = eq.empty_blocks;
            std::cout << j.dump(2) << "\n";
        } else if (*verify) {
            const rwlab::Scenario sc = rwlab::parse_scenario_file(scenario_path);
            const rwlab::Report rep = rwlab::run_scenario(sc);
            write_out(format == "csv" ? rep.to_csv() : rep.to_json(), out_path);
            std::cerr << "scenario " << rep.scenario << ": " << (rep.pass() ? "PASS" : "FAIL")
                      << " (" << rep.wall_ms << " ms)\n";
            return rep.pass() ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
