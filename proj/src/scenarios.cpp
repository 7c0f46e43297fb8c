#include "rwlab/scenarios.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

#include "rwlab/classes.hpp"
#include "rwlab/muckenhoupt.hpp"
#include "rwlab/operators.hpp"

namespace rwlab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

CheckResult check(std::string name, double value, double expected, double tol, bool pass,
                  std::string note = "") {
    return CheckResult{std::move(name), value, expected, tol, pass, std::move(note)};
}

// max of values over grid nodes with gap in [lo, hi)
double band_extreme(const Grid& g, const std::vector<double>& v, double lo, double hi, bool want_max) {
    double out = want_max ? -kInf : kInf;
    for (size_t i = 0; i < g.size(); ++i) {
        const double gap = 1.0 - g[i];
        if (gap >= lo && gap < hi) out = want_max ? std::max(out, v[i]) : std::min(out, v[i]);
    }
    return out;
}

template <typename T, typename Fn>
std::vector<Report> parallel_map(const std::vector<T>& items, Fn&& fn) {
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (hw <= 1 || items.size() <= 1) {
        std::vector<Report> out;
        out.reserve(items.size());
        for (const auto& it : items) out.push_back(fn(it));
        return out;
    }
    std::vector<std::future<Report>> futs;
    futs.reserve(items.size());
    for (const auto& it : items)
        futs.push_back(std::async(std::launch::async, [&fn, it] { return fn(it); }));
    std::vector<Report> out;
    out.reserve(items.size());
    for (auto& f : futs) out.push_back(f.get()); // ordered merge
    return out;
}

} // namespace

Report verify_forelli_rudin(double gamma, double beta, double p) {
    if (!(gamma > -1.0) || !(beta > -1.0) || !(p > 1.0))
        throw std::invalid_argument("verify_forelli_rudin: need gamma,beta > -1 and p > 1");
    const auto t0 = std::chrono::steady_clock::now();
    Report rep;
    std::ostringstream nm;
    nm << "forelli-rudin(gamma=" << gamma << ",beta=" << beta << ",p=" << p << ")";
    rep.scenario = nm.str();
    rep.kind = "forelli-rudin";
    rep.conventions = "standard weights unnormalized; sigma 0/0 -> 0";

    const RadialWeight omega = RadialWeight::standard(gamma);
    const RadialWeight nu = RadialWeight::standard(beta);
    const ExponentPair pp = ExponentPair::from_p(p);
    const Grid grid = Grid::sup_default();
    rep.grid_meta = grid.meta();

    const bool sign = p * (gamma + 1.0) > beta + 1.0;
    const ConstantProfile ap = ap_profile(omega, nu, pp, grid, 2);
    const bool bounded = ap.diagnosis == Diagnosis::bounded;
    const bool diverging = ap.diagnosis == Diagnosis::diverging;
    rep.checks.push_back(check("sign_vs_ap", bounded ? 1.0 : (diverging ? 0.0 : 0.5),
                               sign ? 1.0 : 0.0, 0.0,
                               sign ? bounded : diverging,
                               std::string("diagnosis=") + to_string(ap.diagnosis)));

    if (sign) {
        const double expected = (gamma + 1.0) * std::pow(beta + 1.0, -1.0 / p) *
                                std::pow(gamma * pp.conj - beta * pp.conj / p + 1.0, -1.0 / pp.conj);
        const double err = std::abs(ap.sup_estimate - expected) / expected;
        rep.checks.push_back(check("constant", ap.sup_estimate, expected, 1e-6, err <= 1e-6));
    }

    // nu is a scalar multiple of omega tail1^alpha with alpha = (beta-gamma)/(gamma+1);
    // tail1 = (1-s^2)^{gamma+1}/(2(gamma+1)) forces the constant (2(gamma+1))^{+alpha}
    const double alpha = (beta - gamma) / (gamma + 1.0);
    const double c = std::pow(2.0 * (gamma + 1.0), alpha);
    const RadialWeight nu_rep = power_tail_weight(omega, alpha).scaled(c);
    double max_rel = 0.0;
    for (double r : Grid::geometric(64, 0.5, 1e-7).r) {
        const double a = nu_rep(r), b = nu(r);
        max_rel = std::max(max_rel, std::abs(a - b) / std::max(b, 1e-300));
    }
    rep.checks.push_back(check("powtail_repr", max_rel, 0.0, 1e-10, max_rel <= 1e-10,
                               "alpha=" + std::to_string(alpha)));

    rep.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                      .count();
    return rep;
}

Report counterexample_report(double alpha, double p) {
    if (!(alpha > 1.0) || !(p > 1.0))
        throw std::invalid_argument("counterexample_report: need alpha > 1 and p > 1");
    const auto t0 = std::chrono::steady_clock::now();
    Report rep;
    std::ostringstream nm;
    nm << "log-counterexample(alpha=" << alpha << ",p=" << p << ")";
    rep.scenario = nm.str();
    rep.kind = "counterexample";

    const RadialWeight omega = RadialWeight::standard(0.0);
    const RadialWeight nu = RadialWeight::log_type(alpha);
    const ExponentPair pp = ExponentPair::from_p(p);
    const Grid grid = Grid::sup_default();
    rep.grid_meta = grid.meta();

    const DoublingReport dc = dcheck_search(nu, {2.0, 4.0, 8.0}, grid);
    rep.checks.push_back(check("dcheck_fail", dc.sup_estimate, 1.0, 0.05, !dc.member,
                               "best C(K) at K=" + std::to_string(dc.best_K)));

    const ConstantProfile mp = mp_profile(omega, nu, pp, grid, 2);
    const auto& h = mp.refinement_history;
    const double mp_growth = h.size() >= 2 ? h.back() / h[h.size() - 2] : kInf;
    rep.checks.push_back(check("mp_bounded", std::abs(mp_growth - 1.0), 0.0, 0.01,
                               mp.diagnosis == Diagnosis::bounded &&
                                   std::abs(mp_growth - 1.0) < 0.01,
                               "sup=" + std::to_string(mp.sup_estimate)));

    const ConstantProfile apb = ap_profile(omega, nu, pp, grid, 0); // base grid, reaches 1e-8
    const ConstantProfile ap = ap_profile(omega, nu, pp, grid, 2);
    rep.checks.push_back(check("ap_diverging", ap.refinement_history.back(),
                               kInf, 0.0, ap.diagnosis == Diagnosis::diverging,
                               "history grows by >5% per refinement"));

    // A_p(r)^p / log(e/(1-r^2)) settles on the deepest bands of the base grid
    std::vector<double> ratio(apb.grid.size());
    for (size_t i = 0; i < apb.grid.size(); ++i)
        ratio[i] = std::pow(apb.values[i], p) / log_e_over(one_minus_sq(apb.grid[i]));
    const double eps = 1.0 - apb.grid.back();
    const double hi = band_extreme(apb.grid, ratio, eps, 2.0 * eps, true);
    const double lo = band_extreme(apb.grid, ratio, eps, 2.0 * eps, false);
    const double hi2 = band_extreme(apb.grid, ratio, 2.0 * eps, 4.0 * eps, true);
    const double lo2 = band_extreme(apb.grid, ratio, 2.0 * eps, 4.0 * eps, false);
    const double variation =
        std::max(hi / lo, std::max(hi, hi2) / std::min(lo, lo2)) - 1.0;
    rep.checks.push_back(
        check("ratio_band", variation, 0.0, 0.10, variation < 0.10,
              "A_p^p / log stabilizes near " + std::to_string(0.5 * (hi + lo))));

    rep.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                      .count();
    return rep;
}

Report verify_calderon(const RadialWeight& omega, const RadialWeight& nu, double p,
                       const CalderonOptions& opts) {
    const auto t0 = std::chrono::steady_clock::now();
    Report rep;
    rep.scenario = "calderon(" + omega.describe() + "," + nu.describe() + ",p=" +
                   std::to_string(p) + ")";
    rep.kind = "calderon";
    rep.seed = opts.seed;
    rep.conventions = "band [A_p/4, 64 A_p] is an acceptance constant of this artifact, not a sharp bound";
    const ExponentPair pp = ExponentPair::from_p(p);

    const Grid sup_grid = Grid::sup_default();
    const ConstantProfile ap = ap_profile(omega, nu, pp, sup_grid, 2);
    const bool ap_finite = ap.diagnosis == Diagnosis::bounded;

    Grid op_grid = Grid::operator_grid(opts.grid_n).clipped(
        [&omega](double r) { return !(omega.tail1(r) > 0.0); });
    rep.grid_meta = op_grid.meta();

    if (ap_finite) {
        const double A = ap.sup_estimate;
        const auto family = default_test_family(omega, nu, pp, op_grid, opts.seed);
        const LowerBound mlb = opnorm_lower(OperatorTag::Mmax, omega, nu, pp, family);
        rep.checks.push_back(check("ap_vs_lower", A, mlb.value, opts.eps_grid,
                                   A <= mlb.value * (1.0 + opts.eps_grid),
                                   "A_p <= lower(Mmax) * (1+eps_grid)"));

        double worst_band = 1.0;
        bool all_stable = true;
        for (OperatorTag tag : {OperatorTag::Mmax, OperatorTag::S, OperatorTag::Calderon}) {
            const OpNormEstimate est = opnorm_estimate(tag, omega, nu, pp, op_grid, opts.seed);
            const double ratio = est.heuristic_estimate / A;
            worst_band = std::max(worst_band, std::max(ratio / opts.band_hi, opts.band_lo / ratio));
            all_stable = all_stable && est.converged;
            rep.checks.push_back(check("band_" + to_string(tag), est.heuristic_estimate, A, 0.0,
                                       ratio >= opts.band_lo && ratio <= opts.band_hi,
                                       "lower=" + std::to_string(est.lower_bound) +
                                           ", refined=" + std::to_string(est.refined_estimate)));
        }
        rep.checks.push_back(check("stability", all_stable ? 1.0 : 0.0, 1.0, 0.02, all_stable,
                                   "estimates move < 2% under one grid refinement"));
    } else {
        // divergence branch: lower bounds grow without stabilizing as the grid
        // extends toward 1
        double prev = 0.0;
        bool growing = true;
        Grid g = op_grid;
        std::ostringstream trail;
        for (int l = 0; l < 3; ++l) {
            if (l > 0) g = g.extended(1e-2).clipped(
                [&omega](double r) { return !(omega.tail1(r) > 0.0); });
            const auto family = default_test_family(omega, nu, pp, g, opts.seed);
            const double lb = opnorm_lower(OperatorTag::Mmax, omega, nu, pp, family).value;
            if (l > 0 && lb < prev * 1.02) growing = false;
            trail << (l ? " -> " : "") << lb;
            prev = lb;
        }
        rep.checks.push_back(check("divergence_growth", prev, kInf, 0.02, growing,
                                   "lower(Mmax): " + trail.str()));
    }

    // pointwise chains on seeded nonnegative profiles
    {
        Rng rng(opts.seed);
        Grid chain_grid = Grid::operator_grid(192).clipped(
            [&omega](double r) { return !(omega.tail1(r) > 0.0); });
        double worst = 0.0;
        long two_s_below = 0, nodes = 0;
        for (int t = 0; t < opts.chain_profiles; ++t) {
            const Profile f = random_profile(rng, chain_grid);
            const Profile Hf = apply_H(omega, f);
            const Profile Hsf = apply_Hstar(omega, f);
            const Profile Sf = apply_S(omega, f);
            const Profile Mf = apply_Mmax(omega, f);
            for (size_t i = 0; i < Sf.v.size(); ++i) {
                const double hh = Hf.v[i] + Hsf.v[i];
                const double scale = std::max({Mf.v[i], Sf.v[i], hh, 1.0});
                worst = std::max(worst, (Mf.v[i] - 2.0 * Sf.v[i]) / scale);
                worst = std::max(worst, (Sf.v[i] - hh) / scale);
                worst = std::max(worst, (0.5 * hh - Sf.v[i]) / scale);
                if (2.0 * Sf.v[i] <= hh + 1e-12 * scale) ++two_s_below;
                ++nodes;
            }
        }
        rep.checks.push_back(check(
            "chains", worst, 0.0, 1e-8, worst <= 1e-8,
            "M<=2S, (H+H*)/2<=S<=H+H*; 2S<=H+H* held at " + std::to_string(two_s_below) + "/" +
                std::to_string(nodes) + " nodes"));
    }

    rep.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                      .count();
    return rep;
}

// --- scenario files ----------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    size_t b = s.find_last_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

const std::set<std::string>& known_checks(const std::string& kind) {
    static const std::map<std::string, std::set<std::string>> table{
        {"forelli-rudin-grid", {"sign_vs_ap", "constant", "powtail_repr"}},
        {"counterexample", {"dcheck_fail", "mp_bounded", "ap_diverging", "ratio_band"}},
        {"calderon",
         {"ap_vs_lower", "band_maximal", "band_stieltjes", "band_calderon", "stability", "chains",
          "divergence_growth"}},
    };
    auto it = table.find(kind);
    if (it == table.end())
        throw std::invalid_argument("scenario: unknown kind '" + kind + "'");
    return it->second;
}

} // namespace

double Scenario::number(const std::string& key, double fallback) const {
    auto it = numbers.find(key);
    if (it == numbers.end() || it->second.empty()) return fallback;
    return it->second.front();
}

std::vector<double> Scenario::list(const std::string& key, std::vector<double> fallback) const {
    auto it = numbers.find(key);
    if (it == numbers.end() || it->second.empty()) return fallback;
    return it->second;
}

Scenario parse_scenario_text(const std::string& text, const std::string& name_hint) {
    Scenario s;
    s.name = name_hint;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("scenario: expected key = value, got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (val.size() >= 2 && val.front() == '"' && val.back() == '"') {
            const std::string sv = val.substr(1, val.size() - 2);
            if (key == "name") s.name = sv;
            else if (key == "kind") s.kind = sv;
            else s.strings[key] = sv;
        } else if (!val.empty() && val.front() == '[') {
            if (val.back() != ']') throw std::invalid_argument("scenario: unterminated list");
            std::vector<double> items;
            std::vector<std::string> words;
            std::string body = val.substr(1, val.size() - 2);
            std::istringstream bs(body);
            std::string tok;
            bool is_string_list = body.find('"') != std::string::npos;
            while (std::getline(bs, tok, ',')) {
                tok = trim(tok);
                if (tok.empty()) continue;
                if (is_string_list) {
                    if (tok.size() >= 2 && tok.front() == '"' && tok.back() == '"')
                        words.push_back(tok.substr(1, tok.size() - 2));
                    else
                        words.push_back(tok);
                } else {
                    items.push_back(std::stod(tok));
                }
            }
            if (is_string_list && key == "checks") s.checks = words;
            else if (is_string_list)
                throw std::invalid_argument("scenario: string lists only allowed for 'checks'");
            else s.numbers[key] = items;
        } else {
            if (key == "seed") s.seed = std::stoull(val);
            else {
                try {
                    s.numbers[key] = {std::stod(val)};
                } catch (const std::exception&) {
                    if (key == "kind") s.kind = val;
                    else if (key == "name") s.name = val;
                    else s.strings[key] = val;
                }
            }
        }
    }
    if (s.kind.empty()) throw std::invalid_argument("scenario: missing kind");
    return s;
}

Scenario parse_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("scenario: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    std::string name = path;
    const size_t slash = name.find_last_of('/');
    if (slash != std::string::npos) name = name.substr(slash + 1);
    return parse_scenario_text(ss.str(), name);
}

Report run_scenario(const Scenario& s) {
    const auto& known = known_checks(s.kind); // throws for unknown kind
    for (const auto& c : s.checks)
        if (!known.count(c))
            throw std::invalid_argument("scenario: unknown check '" + c + "' for kind " + s.kind);
    auto wanted = [&s](const std::string& name) {
        if (s.checks.empty()) return true;
        for (const auto& c : s.checks)
            if (c == name) return true;
        return false;
    };

    const auto t0 = std::chrono::steady_clock::now();
    Report rep;
    rep.scenario = s.name;
    rep.kind = s.kind;
    rep.seed = s.seed;

    if (s.kind == "forelli-rudin-grid") {
        const auto gammas = s.list("gamma", {-0.5, 0.0, 1.0, 2.0});
        const auto betas = s.list("beta", {-0.5, 0.0, 1.0, 2.0});
        const auto ps = s.list("p", {1.5, 2.0, 3.0});
        struct Case {
            double g, b, p;
        };
        std::vector<Case> cases;
        for (double p : ps)
            for (double g : gammas)
                for (double b : betas) cases.push_back({g, b, p});
        auto subs = parallel_map(cases, [](const Case& c) {
            return verify_forelli_rudin(c.g, c.b, c.p);
        });
        for (size_t i = 0; i < subs.size(); ++i) {
            for (const auto& c : subs[i].checks) {
                if (!wanted(c.name)) continue;
                CheckResult cc = c;
                cc.name = subs[i].scenario + "/" + c.name;
                rep.checks.push_back(std::move(cc));
            }
            if (rep.grid_meta.empty()) rep.grid_meta = subs[i].grid_meta;
        }
    } else if (s.kind == "counterexample") {
        Report sub = counterexample_report(s.number("alpha", 2.0), s.number("p", 2.0));
        rep.grid_meta = sub.grid_meta;
        for (auto& c : sub.checks)
            if (wanted(c.name)) rep.checks.push_back(std::move(c));
    } else if (s.kind == "calderon") {
        auto omega_it = s.strings.find("omega");
        auto nu_it = s.strings.find("nu");
        if (omega_it == s.strings.end() || nu_it == s.strings.end())
            throw std::invalid_argument("scenario: calderon needs omega and nu weight specs");
        CalderonOptions opts;
        if (s.seed) opts.seed = s.seed;
        opts.grid_n = int(s.number("grid_n", opts.grid_n));
        opts.chain_profiles = int(s.number("chain_profiles", opts.chain_profiles));
        Report sub = verify_calderon(parse_weight(omega_it->second), parse_weight(nu_it->second),
                                     s.number("p", 2.0), opts);
        rep.grid_meta = sub.grid_meta;
        rep.conventions = sub.conventions;
        for (auto& c : sub.checks)
            if (wanted(c.name)) rep.checks.push_back(std::move(c));
    }

    rep.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                      .count();
    return rep;
}

} // namespace rwlab
