#pragma once

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "bernstein.hpp"
#include "config.hpp"
#include "fraccalc.hpp"
#include "kernel.hpp"
#include "montecarlo.hpp"
#include "norms.hpp"
#include "solver.hpp"
#include "specfun.hpp"

namespace fraclab {

using json = nlohmann::json;

/// Acceptance tolerances.
namespace tol {
constexpr double recurrence = 1e-10;
constexpr std::size_t recurrence_points = 1000;
constexpr double exponential = 1e-12;
constexpr double laplace = 1e-6;
constexpr double normalization = 1e-6;
constexpr double two_route = 1e-3;
constexpr double two_route_floor = 1e-8;
constexpr double drift = 0.05;
constexpr double self_similarity = 1e-4;
constexpr double order_window = 0.3;
constexpr double single_mode = 1e-6;
constexpr double horizon_factor = 2.0;
constexpr double doubling = 0.2;
constexpr double partition = 1e-12;
constexpr double char_z = 3.0;
constexpr double histogram_l1 = 0.05;
constexpr double control_floor = 3.0;
constexpr double first_order = 1.0;
}  // namespace tol

/// One check: the quantity (a sup or an error) compared against its threshold.
struct Verdict {
    std::string ref;    // identity or inequality certified
    std::string quote;  // its formula
    std::string label;  // parameters of this instance
    double value = 0.0;
    double threshold = 0.0;
    bool upper = true;  // pass iff value < threshold (upper) or value >= threshold
    bool pass = false;
    double runtime = 0.0;
    json detail = json::object();

    void decide(bool extra = true) { pass = extra && std::isfinite(value) && (upper ? value < threshold : value >= threshold); }

    [[nodiscard]] json to_json() const {
        return {{"ref", ref},          {"quote", quote}, {"case", label},       {"sup_or_error", value},
                {"threshold", threshold}, {"compare", upper ? "<" : ">="},   {"pass", pass},
                {"runtime", runtime},  {"detail", detail}};
    }
};

struct Artifact {
    std::string name;  // file name
    std::string text;
};

struct HarnessReport {
    std::string harness;
    std::string title;
    std::vector<Verdict> verdicts;
    std::vector<Artifact> artifacts;
    std::string error;  // set when the harness threw
    double runtime = 0.0;

    [[nodiscard]] bool passed() const {
        if (!error.empty()) return false;
        return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
    }
    [[nodiscard]] std::size_t pass_count() const {
        return static_cast<std::size_t>(std::count_if(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; }));
    }

    [[nodiscard]] json to_json(const std::string& config_hash) const {
        json v = json::array();
        for (const auto& x : verdicts) v.push_back(x.to_json());
        json j{{"harness", harness}, {"title", title},     {"config_hash", config_hash},
               {"pass", passed()},   {"runtime", runtime}, {"verdicts", v}};
        if (!error.empty()) j["error"] = error;
        return j;
    }
};

/// Worker budget from FRACLAB_WORKERS (default 1).
inline int worker_budget() {
    const char* env = std::getenv("FRACLAB_WORKERS");
    if (!env || !*env) return 1;
    try {
        const int w = std::stoi(env);
        if (w >= 1) return w;
    } catch (const std::exception&) {
    }
    throw ConfigError(std::string("FRACLAB_WORKERS must be a positive integer, got '") + env + "'");
}

namespace detail {

class Stopwatch {
public:
    [[nodiscard]] double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline std::string join(const std::vector<double>& v) {
    std::string s;
    for (double x : v) s += (s.empty() ? "" : ",") + format_double(x);
    return s;
}

inline Verdict from_bound(const BoundReport& r, const std::string& label, double seconds) {
    Verdict v;
    v.ref = r.name;
    v.quote = r.formula;
    v.label = label;
    v.value = r.refinement_drift;
    v.threshold = tol::drift;
    v.runtime = seconds;
    v.detail = {{"sup_ratio", r.sup_ratio}, {"refined_sup", r.refined_sup}, {"arg_t", r.arg_t},
                {"arg_r", r.arg_r},         {"grid", r.grid}};
    v.decide(r.finite());
    return v;
}

inline Verdict from_samples(const SampleReport& r, const std::string& label, double seconds) {
    Verdict v;
    v.ref = r.name;
    v.quote = r.formula;
    v.label = label;
    v.value = r.spread;
    v.threshold = r.threshold;
    v.runtime = seconds;
    std::vector<std::uint64_t> seeds = r.seeds;
    v.detail = {{"sup", r.sup},           {"sup_alt", r.sup_alt},   {"comparison", r.comparison},
                {"grid", r.grid},         {"seeds", seeds},         {"ratios", r.ratios},
                {"ratios_alt", r.ratios_alt}, {"excluded", r.excluded}, {"accuracy_flag", r.accuracy_flag}};
    v.decide(r.finite());
    return v;
}

}  // namespace detail

// ---------------------------------------------------------------------------------------------
// Harnesses. Each reads its section of the configuration and returns verdicts; tolerances are tol::.

inline HarnessReport run_specfun(const ExperimentConfig& c) {
    HarnessReport h{"specfun", "special-function identities"};
    {
        detail::Stopwatch sw;
        std::ostringstream csv;
        csv << "alpha,beta,x,value,flag\n";
        csv.precision(17);
        double worst = 0.0;
        std::size_t count = 0;
        for (double a : c.range("specfun", "recurrence_alpha").points())
            for (double b : c.range("specfun", "recurrence_beta").points())
                for (double y : c.range("specfun", "recurrence_y").points()) {
                    const auto e = mittag_leffler(a, b, -y);
                    const auto e2 = mittag_leffler(a, a + b, -y);
                    const double res = std::abs(e.value - rgamma(b) + y * e2.value) / (1.0 + std::abs(e.value));
                    worst = std::max(worst, std::isfinite(res) ? res : std::numeric_limits<double>::infinity());
                    csv << a << "," << b << "," << -y << "," << e.value << "," << (e.degraded ? 1 : 0) << "\n";
                    ++count;
                }
        Verdict v{"ml_recurrence", "E_{a,b}(x) = 1/Gamma(b) + x E_{a,a+b}(x)", "scaled residual / (1 + |E|)", worst,
                  tol::recurrence};
        v.detail = {{"points", count}};
        v.decide(count >= tol::recurrence_points);
        v.runtime = sw.seconds();
        h.verdicts.push_back(v);
        h.artifacts.push_back({"specfun_recurrence.csv", csv.str()});
    }
    {
        detail::Stopwatch sw;
        double worst = 0.0;
        for (double x : c.range("specfun", "exp_x").points())
            worst = std::max(worst, std::abs(mittag_leffler(1.0, 1.0, -x).value - std::exp(-x)));
        Verdict v{"ml_exponential", "E_{1,1}(-x) = exp(-x)", "x " + c.text("specfun", "exp_x"), worst, tol::exponential};
        v.decide();
        v.runtime = sw.seconds();
        h.verdicts.push_back(v);
    }
    for (double a : c.reals("specfun", "laplace_alphas")) {
        detail::Stopwatch sw;
        double worst = 0.0;
        for (double b : {a, 1.0, 1.0 + a})
            for (double s : c.range("specfun", "laplace_sigma").points())
                worst = std::max(worst, laplace_residual(FracOrder{a, b}, 1.0, s));
        Verdict v{"laplace_transform", "int_0^inf e^(-s t) t^(b-1) E_{a,b}(-t^a) dt = s^(a-b) / (s^a + 1)",
                  "alpha=" + format_double(a) + ", beta in {alpha, 1, 1+alpha}, s t^alpha " +
                      c.text("specfun", "laplace_sigma"),
                  worst, tol::laplace};
        v.decide();
        v.runtime = sw.seconds();
        h.verdicts.push_back(v);
    }
    return h;
}

inline HarnessReport run_normalization(const ExperimentConfig& c) {
    HarnessReport h{"normalization", "kernel normalization"};
    for (const auto& spec : c.phis("normalization", "phis"))
        for (int d : c.ints("normalization", "dims")) {
            detail::Stopwatch sw;
            double worst = 0.0;
            json cases = json::array();
            for (double a : c.reals("normalization", "alphas"))
                for (double t : c.reals("normalization", "times")) {
                    const auto m = q_signed_mass(spec, FracOrder{a, a}, t, d);
                    const double e = std::isfinite(m.value) ? std::abs(m.value - 1.0) : std::numeric_limits<double>::infinity();
                    worst = std::max(worst, e);
                    cases.push_back({{"alpha", a}, {"t", t}, {"mass", m.value}, {"degraded", m.degraded}});
                }
            Verdict v{"kernel_normalization", "int q_{a,a}(t,x) dx = 1",
                      "phi=" + spec.str() + ", d=" + std::to_string(d), worst, tol::normalization};
            v.detail = {{"cases", cases}};
            v.decide();
            v.runtime = sw.seconds();
            h.verdicts.push_back(v);
        }
    return h;
}

inline HarnessReport run_two_route(const ExperimentConfig& c) {
    HarnessReport h{"two_route", "subordination versus Fourier construction"};
    const auto radii = c.range("two_route", "radii").points();
    const double t = c.real("two_route", "t");
    std::ostringstream csv;
    csv.precision(17);
    csv << "phi,d,alpha,beta,r,fourier,subordination\n";
    for (const auto& spec : c.phis("two_route", "phis"))
        for (int d : c.ints("two_route", "dims")) {
            HeatTable table(spec, d, radii);
            for (double a : c.reals("two_route", "alphas"))
                for (double b : {a, 1.0}) {
                    detail::Stopwatch sw;
                    const FracOrder ord{a, b};
                    const auto sub = q_kernel_subordination(table, ord, t);
                    const auto fou = q_kernel_fourier(spec, ord, d, t, radii);
                    const double mx = fou.max_value();
                    double worst = 0.0;
                    std::size_t compared = 0;
                    for (std::size_t i = 0; i < radii.size(); ++i) {
                        csv << spec.str() << "," << d << "," << a << "," << b << "," << radii[i] << "," << fou.values[i]
                            << "," << sub.values[i] << "\n";
                        if (!(std::abs(fou.values[i]) > tol::two_route_floor * mx)) continue;
                        ++compared;
                        worst = std::max(worst, std::abs(sub.values[i] - fou.values[i]) / std::abs(fou.values[i]));
                    }
                    Verdict v{"two_route_agreement", "q_{a,b} by subordination = q_{a,b} by Fourier inversion",
                              "phi=" + spec.str() + ", d=" + std::to_string(d) + ", alpha=" + format_double(a) +
                                  ", beta=" + format_double(b) + ", t=" + format_double(t),
                              worst, tol::two_route};
                    v.detail = {{"compared_radii", compared},
                                {"fourier_degraded", fou.degraded},
                                {"subordination_degraded", sub.degraded}};
                    v.decide(compared > 0);
                    v.runtime = sw.seconds();
                    h.verdicts.push_back(v);
                }
        }
    h.artifacts.push_back({"two_route_profiles.csv", csv.str()});
    return h;
}

inline HarnessReport run_bounds(const ExperimentConfig& c) {
    HarnessReport h{"bounds", "kernel and Bernstein bound certification"};
    const auto tg = c.range("bounds", "t_grid");
    const auto rg = c.range("bounds", "r_grid");
    const double alpha = c.real("bounds", "alpha");
    const auto dims = c.ints("bounds", "dims");
    auto add = [&](const std::string& label, const std::function<BoundReport()>& f) {
        detail::Stopwatch sw;
        const auto r = f();
        h.verdicts.push_back(detail::from_bound(r, label, sw.seconds()));
    };
    for (const auto& spec : c.phis("bounds", "phis")) {
        const std::string ps = "phi=" + spec.str();
        for (int d : dims) {
            const std::string pd = ps + ", d=" + std::to_string(d);
            add(pd, [&] { return check_p_bound(spec, d, tg, rg); });
            for (double b : {alpha, 1.0})
                add(pd + ", alpha=" + format_double(alpha) + ", beta=" + format_double(b),
                    [&] { return check_q_bound(spec, FracOrder{alpha, b}, d, tg, rg); });
            add(pd + ", alpha=" + format_double(alpha), [&] { return check_tail_mass_bound(spec, alpha, d, tg, rg); });
        }
        for (int n : c.ints("bounds", "deriv_orders"))
            add(ps + ", n=" + std::to_string(n),
                [&] { return check_deriv_bound(spec, n, c.range("bounds", "lambda_grid")); });
        add(ps, [&] { return check_tail_integral_bound(spec, rg); });
    }
    for (const auto& spec : c.phis("bounds", "mass_phis"))
        add("phi=" + spec.str() + ", d=1, alpha=" + format_double(alpha) + ", beta=1",
            [&] { return check_mass_bound(spec, FracOrder{alpha, 1.0}, 1, tg); });
    // exact self-similarity of stable kernels: t^{beta-alpha} int |q_{alpha,beta}| is constant in t
    for (const auto& spec : c.phis("bounds", "phis")) {
        if (!spec.is_stable()) continue;
        detail::Stopwatch sw;
        const FracOrder ord{alpha, 1.0};
        std::vector<double> m;
        for (double t : {tg.lo, std::sqrt(tg.lo * tg.hi), tg.hi}) m.push_back(q_mass(spec, ord, t).value);
        const auto [lo, hi] = std::minmax_element(m.begin(), m.end());
        Verdict v{"stable_mass_self_similarity", "t^(beta-alpha) int |q_{a,b}(t,x)| dx constant in t",
                  "phi=" + spec.str() + ", d=1, alpha=" + format_double(alpha) + ", beta=1",
                  (*hi - *lo) / std::abs(*lo), tol::self_similarity};
        v.detail = {{"masses", m}, {"times", {tg.lo, std::sqrt(tg.lo * tg.hi), tg.hi}}};
        v.decide();
        v.runtime = sw.seconds();
        h.verdicts.push_back(v);
    }
    return h;
}

inline HarnessReport run_solver(const ExperimentConfig& c) {
    HarnessReport h{"solver", "solver convergence"};
    const auto spec = c.phi("solver", "phi");
    const GridSpec g{1, c.real("solver", "L"), static_cast<int>(c.integer("solver", "N"))};
    g.validate();
    const double T = c.real("solver", "T");
    const auto base = static_cast<std::size_t>(c.integer("solver", "base_steps"));
    const int levels = static_cast<int>(c.integer("solver", "levels"));
    const auto profile = random_field(g, static_cast<std::uint64_t>(c.integer("solver", "seed")), 6);
    for (double alpha : c.reals("solver", "alphas")) {
        detail::Stopwatch sw;
        std::vector<double> res;
        for (int level = 0; level < levels; ++level) {
            const std::size_t steps = base << level;
            const auto p = manufactured_polynomial(spec, alpha, profile, T, steps);
            const auto u = solve(spec, alpha, GridFunction(g), p.f, T);
            res.push_back(residual(spec, alpha, u, p.f).sup_norm(1));
        }
        const auto orders = observed_orders(res);
        double dev = 0.0;
        for (double o : orders) dev = std::max(dev, std::isfinite(o) ? std::abs(o - (2.0 - alpha)) : 1e300);
        Verdict v{"l1_residual_order", "L1 residual = O(dt^(2-alpha)) on smooth data",
                  "phi=" + spec.str() + ", alpha=" + format_double(alpha) + ", u=(t^2+t^3) g(x), N=" +
                      std::to_string(g.N) + ", Nt=" + std::to_string(base) + "..." +
                      std::to_string(base << (levels - 1)),
                  dev, tol::order_window};
        v.detail = {{"residuals", res}, {"orders", orders}, {"target", 2.0 - alpha}};
        v.decide();
        v.runtime = sw.seconds();
        h.verdicts.push_back(v);

        detail::Stopwatch sw2;
        const WaveVector k{3, 0, 0};
        const std::size_t fine = base << (levels - 1);
        const auto u = solve(spec, alpha, GridFunction::plane_wave(g, k), T, fine);
        const double err = max_difference(u, single_mode_solution(spec, alpha, g, k, T, fine));
        Verdict s{"single_mode_exact", "u(t) = E_alpha(-t^alpha phi(|xi|^2)) e^(i xi x)",
                  "phi=" + spec.str() + ", alpha=" + format_double(alpha) + ", k=3, Nt=" + std::to_string(fine), err,
                  tol::single_mode};
        s.decide();
        s.runtime = sw2.seconds();
        h.verdicts.push_back(s);
    }
    return h;
}

inline HarnessReport run_maxreg(const ExperimentConfig& c, int workers = 1) {
    HarnessReport h{"maxreg", "maximal regularity, T versus 4T"};
    const auto spec = c.phi("maxreg", "phi");
    const GridSpec g{1, c.real("maxreg", "L"), static_cast<int>(c.integer("maxreg", "N"))};
    HarnessOptions opts;
    opts.samples = static_cast<std::size_t>(c.integer("maxreg", "samples"));
    opts.seed = static_cast<std::uint64_t>(c.integer("maxreg", "seed"));
    opts.steps = static_cast<std::size_t>(c.integer("maxreg", "steps"));
    opts.workers = workers;
    const auto pairs = c.pairs("maxreg", "pairs");
    for (double alpha : c.reals("maxreg", "alphas")) {
        detail::Stopwatch sw;
        const auto reps = maximal_reg_ratios(spec, alpha, pairs, c.real("maxreg", "T"), g, opts);
        const double each = sw.seconds() / static_cast<double>(reps.size());
        for (std::size_t k = 0; k < reps.size(); ++k)
            h.verdicts.push_back(detail::from_samples(reps[k],
                                                      "alpha=" + format_double(alpha) + ", p=" + format_double(pairs[k].first) +
                                                          ", q=" + format_double(pairs[k].second),
                                                      each));
    }
    return h;
}

inline HarnessReport run_besov(const ExperimentConfig& c, int workers = 1) {
    HarnessReport h{"besov", "homogeneous Besov bound"};
    const auto spec = c.phi("besov", "phi");
    const GridSpec g{1, c.real("besov", "L"), static_cast<int>(c.integer("besov", "N"))};
    HarnessOptions opts;
    opts.samples = static_cast<std::size_t>(c.integer("besov", "samples"));
    opts.seed = static_cast<std::uint64_t>(c.integer("besov", "seed"));
    opts.workers = workers;
    const double p = c.real("besov", "p"), q = c.real("besov", "q"), T = c.real("besov", "T");
    const auto alphas = c.reals("besov", "alphas");
    for (double alpha : alphas) {
        detail::Stopwatch sw;
        const auto r = homogeneous_besov_ratio(spec, alpha, p, q, T, g, opts);
        h.verdicts.push_back(detail::from_samples(r, "alpha=" + format_double(alpha), sw.seconds()));
    }
    {
        detail::Stopwatch sw;
        const FilterBank bank(g);
        Verdict v{"partition_of_unity", "sum_j Psi_j(xi) = 1", "N=" + std::to_string(g.N) + ", L=" + format_double(g.L),
                  bank.partition_defect(), tol::partition};
        v.decide();
        v.runtime = sw.seconds();
        h.verdicts.push_back(v);
    }
    const FilterBank bank(g);
    const int j_max = static_cast<int>(c.integer("besov", "band_levels"));
    const auto band_t = c.range("besov", "band_t");
    for (double alpha : alphas) {
        detail::Stopwatch sw;
        const auto stated = check_band_bound(bank, spec, alpha, j_max, band_t, BandEnvelope::stated);
        const auto ml = check_band_bound(bank, spec, alpha, j_max, band_t, BandEnvelope::mittag_leffler);
        auto v = detail::from_bound(stated, "alpha=" + format_double(alpha), sw.seconds());
        v.detail["ml_rate_diagnostic"] = {{"formula", ml.formula},         {"sup_ratio", ml.sup_ratio},
                                          {"refined_sup", ml.refined_sup}, {"drift", ml.refinement_drift}};
        h.verdicts.push_back(v);
    }
    return h;
}

inline HarnessReport run_montecarlo(const ExperimentConfig& c, int workers = 1) {
    HarnessReport h{"montecarlo", "Monte Carlo cross-check"};
    const auto xi = c.range("montecarlo", "xi").points();
    std::ostringstream csv;
    csv.precision(17);
    csv << "alpha,beta,xi,estimate,standard_error,exact\n";
    for (auto [alpha, beta] : c.pairs("montecarlo", "pairs")) {
        MCConfig cfg;
        cfg.alpha = alpha;
        cfg.beta = beta;
        cfg.dim = static_cast<int>(c.integer("montecarlo", "dim"));
        cfg.t = c.real("montecarlo", "t");
        cfg.n = static_cast<std::size_t>(c.integer("montecarlo", "n"));
        cfg.seed = static_cast<std::uint64_t>(c.integer("montecarlo", "seed"));
        cfg.workers = workers;
        const std::string label = "alpha=" + format_double(alpha) + ", beta=" + format_double(beta) +
                                  ", d=" + std::to_string(cfg.dim) + ", t=" + format_double(cfg.t) +
                                  ", n=" + std::to_string(cfg.n);
        detail::Stopwatch sw;
        const auto y = sample_y(cfg);
        const auto chk = check_characteristic(y, cfg, xi);
        for (std::size_t i = 0; i < xi.size(); ++i)
            csv << alpha << "," << beta << "," << xi[i] << "," << chk.empirical[i].mean << "," << chk.empirical[i].se
                << "," << chk.exact[i] << "\n";
        Verdict ch{"characteristic_function", "E exp(i xi Y_t) = E_alpha(-t^alpha |xi|^(2 beta))", label, chk.max_z,
                   tol::char_z};
        ch.detail = {{"xi", xi}, {"exact", chk.exact}};
        ch.decide();
        ch.runtime = sw.seconds();
        h.verdicts.push_back(ch);

        detail::Stopwatch sw2;
        const auto prof = reference_profile(cfg);
        const auto d = compare_density(y, prof);
        Verdict hist{"histogram_l1", "histogram of |Y_t| against the analytic kernel", label, d.l1, tol::histogram_l1};
        hist.detail = {{"bins", d.bins}, {"bin_width", d.bin_width}, {"ks", d.ks}, {"noise_floor", d.noise_floor}};
        hist.decide();
        hist.runtime = sw2.seconds();
        h.verdicts.push_back(hist);

        detail::Stopwatch sw3;
        auto wrong = cfg;
        wrong.alpha = control_alpha(alpha);
        const auto bad = compare_density(sample_y(wrong), prof);
        Verdict ctl{"negative_control", "samples with a wrong alpha are detected",
                    label + ", sampled alpha=" + format_double(wrong.alpha), bad.l1 / bad.noise_floor,
                    tol::control_floor};
        ctl.upper = false;
        ctl.detail = {{"l1", bad.l1}, {"noise_floor", bad.noise_floor}};
        ctl.decide();
        ctl.runtime = sw3.seconds();
        h.verdicts.push_back(ctl);
    }
    h.artifacts.push_back({"montecarlo_characteristic.csv", csv.str()});
    return h;
}

inline HarnessReport run_fraccalc(const ExperimentConfig& c) {
    HarnessReport h{"fraccalc", "fractional calculus identities"};
    const auto base = static_cast<std::size_t>(c.integer("fraccalc", "base_steps"));
    const int levels = static_cast<int>(c.integer("fraccalc", "levels"));
    auto min_order = [](const std::vector<double>& e) {
        double m = std::numeric_limits<double>::infinity();
        for (double o : observed_orders(e)) m = std::min(m, std::isfinite(o) ? o : -1e300);
        return m;
    };
    auto smooth = [](double t) { return std::exp(-t) * std::cos(2.0 * t) + t; };
    for (auto [a, b] : c.pairs("fraccalc", "semigroup_pairs")) {
        detail::Stopwatch sw;
        std::vector<double> e;
        for (int k = 0; k < levels; ++k) {
            const auto s = TimeSeries::sample(smooth, 2.0, base << k);
            e.push_back(max_difference(rl_integral(a, rl_integral(b, s)), rl_integral(a + b, s)));
        }
        Verdict v{"rl_semigroup", "I^a I^b u = I^(a+b) u",
                  "a=" + format_double(a) + ", b=" + format_double(b) + ", u=exp(-t)cos(2t)+t on [0,2]", min_order(e),
                  tol::first_order};
        v.upper = false;
        v.detail = {{"errors", e}, {"orders", observed_orders(e)}};
        v.decide();
        v.runtime = sw.seconds();
        h.verdicts.push_back(v);
    }
    auto wave = [](double t) { return std::sin(3.0 * t) + 1.0; };
    for (double a : c.reals("fraccalc", "inversion_alphas")) {
        detail::Stopwatch sw;
        std::vector<double> e;
        for (int k = 0; k < levels; ++k) {
            const std::size_t n = base << k;
            const auto s = TimeSeries::sample(wave, 1.0, n);
            e.push_back(rl_derivative(a, rl_integral(a, s)).max_error(wave, n / 8));
        }
        Verdict v{"rl_inversion", "D^a I^a u = u", "a=" + format_double(a) + ", u=sin(3t)+1, t >= 1/8", min_order(e),
                  tol::first_order};
        v.upper = false;
        v.detail = {{"errors", e}, {"orders", observed_orders(e)}};
        v.decide();
        v.runtime = sw.seconds();
        h.verdicts.push_back(v);
    }
    return h;
}

/// Module-level precondition checks of every selected harness, run before any computation.
inline void check_preconditions(const ExperimentConfig& c) {
    for (const auto& name : c.harnesses()) {
        if (name == "solver" || name == "maxreg" || name == "besov") {
            const GridSpec g{1, c.real(name, "L"), static_cast<int>(c.integer(name, "N"))};
            try {
                g.validate();
            } catch (const ConfigError& e) {
                throw ConfigError("[" + name + "] " + e.what());
            }
        }
        if (name == "besov") {
            const GridSpec g{1, c.real(name, "L"), static_cast<int>(c.integer(name, "N"))};
            const FilterBank bank(g);
            const int j_max = static_cast<int>(c.integer(name, "band_levels"));
            try {
                for (int j = 0; j <= j_max; ++j) bank.require_resolved(j);
            } catch (const ConfigError& e) {
                throw ConfigError("[besov] band_levels: " + std::string(e.what()));
            }
            if (!c.range(name, "band_t").logarithmic) throw ConfigError("[besov] band_t must be a log: range");
        }
        if (name == "maxreg")
            for (auto [p, q] : c.pairs(name, "pairs"))
                if (!(p > 1.0 && q > 1.0)) throw ConfigError("[maxreg] pairs: p and q must exceed 1");
        if (name == "montecarlo")
            for (auto [a, b] : c.pairs(name, "pairs")) {
                MCConfig m;
                m.alpha = a;
                m.beta = b;
                m.dim = static_cast<int>(c.integer(name, "dim"));
                m.t = c.real(name, "t");
                m.n = static_cast<std::size_t>(c.integer(name, "n"));
                try {
                    m.validate();
                } catch (const ConfigError& e) {
                    throw ConfigError("[montecarlo] pairs: " + std::string(e.what()));
                }
            }
    }
}

inline HarnessReport run_harness(const std::string& name, const ExperimentConfig& c, int workers = 1) {
    detail::Stopwatch sw;
    HarnessReport h;
    try {
        if (name == "specfun") h = run_specfun(c);
        else if (name == "normalization") h = run_normalization(c);
        else if (name == "two_route") h = run_two_route(c);
        else if (name == "bounds") h = run_bounds(c);
        else if (name == "solver") h = run_solver(c);
        else if (name == "maxreg") h = run_maxreg(c, workers);
        else if (name == "besov") h = run_besov(c, workers);
        else if (name == "montecarlo") h = run_montecarlo(c, workers);
        else if (name == "fraccalc") h = run_fraccalc(c);
        else throw ConfigError("unknown harness '" + name + "'");
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        h.harness = name;
        h.error = e.what();
    }
    h.runtime = sw.seconds();
    return h;
}

/// Writes text to path through a temporary file and a rename.
inline void write_atomic(const std::filesystem::path& path, const std::string& text) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << text;
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

struct Bundle {
    std::string config_hash;
    std::vector<HarnessReport> reports;

    [[nodiscard]] bool passed() const {
        return std::all_of(reports.begin(), reports.end(), [](const HarnessReport& r) { return r.passed(); });
    }
};

/// Validates the configuration, runs the selected harnesses (up to `workers` at once, each single-threaded
/// unless it runs alone), and writes <output>/<harness>.json, CSV artifacts and summary.json.
inline Bundle run(const ExperimentConfig& c, int workers = worker_budget(),
                  const std::function<void(const HarnessReport&)>& on_done = {}) {
    check_preconditions(c);
    const auto names = c.harnesses();
    Bundle b{c.hash(), std::vector<HarnessReport>(names.size())};
    const std::filesystem::path out = c.text("run", "output");
    std::filesystem::create_directories(out);
    std::mutex lock;
    auto finish = [&](std::size_t i) {
        auto& r = b.reports[i];
        write_atomic(out / (r.harness + ".json"), r.to_json(b.config_hash).dump(2) + "\n");
        for (const auto& a : r.artifacts) write_atomic(out / a.name, a.text);
        if (on_done) {
            std::lock_guard<std::mutex> g(lock);
            on_done(r);
        }
    };
    const int inner = names.size() == 1 ? workers : 1;
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    auto work = [&] {
        for (std::size_t i = next++; i < names.size(); i = next++) {
            try {
                b.reports[i] = run_harness(names[i], c, inner);
                finish(i);
            } catch (...) {
                std::lock_guard<std::mutex> g(lock);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    const int threads = std::max(1, std::min<int>(workers, static_cast<int>(names.size())));
    for (int w = 1; w < threads; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    json summary{{"config_hash", b.config_hash}, {"pass", b.passed()}, {"harnesses", json::array()}};
    for (const auto& r : b.reports)
        summary["harnesses"].push_back({{"harness", r.harness}, {"pass", r.passed()},
                                        {"checks", r.verdicts.size()}, {"passed_checks", r.pass_count()}});
    write_atomic(out / "summary.json", summary.dump(2) + "\n");
    write_atomic(out / "config.ini", c.serialize());
    return b;
}

}  // namespace fraclab
