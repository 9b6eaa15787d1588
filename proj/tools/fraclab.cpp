#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "fraclab.hpp"

using namespace fraclab;

namespace {

// Writes to `path`, or stdout when it is empty or "-".
void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

std::string bound_json(const std::vector<BoundReport>& reports) {
    json a = json::array();
    for (const auto& r : reports)
        a.push_back({{"ref", r.name},
                     {"quote", r.formula},
                     {"grid", r.grid},
                     {"sup_ratio", r.sup_ratio},
                     {"arg_t", r.arg_t},
                     {"arg_r", r.arg_r},
                     {"refined_sup", r.refined_sup},
                     {"refinement_drift", r.refinement_drift},
                     {"threshold", r.drift_tolerance},
                     {"pass", r.passed()}});
    return a.dump(2) + "\n";
}

json sample_json(const SampleReport& r) {
    std::vector<std::uint64_t> seeds = r.seeds;
    return {{"ref", r.name},           {"quote", r.formula},      {"grid", r.grid},
            {"comparison", r.comparison}, {"seeds", seeds},       {"ratios", r.ratios},
            {"ratios_alt", r.ratios_alt}, {"excluded", r.excluded}, {"sup", r.sup},
            {"sup_alt", r.sup_alt},     {"spread", r.spread},     {"threshold", r.threshold},
            {"accuracy_flag", r.accuracy_flag}, {"pass", r.passed()}};
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> v;
    for (const auto& x : detail::split(s, ',')) v.push_back(detail::parse_real(x, "list"));
    if (v.empty()) throw ConfigError("empty list '" + s + "'");
    return v;
}

std::vector<std::pair<double, double>> parse_pairs(const std::string& s) {
    std::vector<std::pair<double, double>> out;
    for (const auto& x : detail::split(s, ',')) {
        const auto p = detail::split(x, ':');
        if (p.size() != 2) throw ConfigError("'" + x + "' is not a pair a:b");
        out.emplace_back(detail::parse_real(p[0], "pair"), detail::parse_real(p[1], "pair"));
    }
    return out;
}

// "gauss", "mode:k" or "file:path" (one real value per line, N^d of them)
GridFunction initial_data(const GridSpec& g, const std::string& spec) {
    if (spec == "gauss") return gaussian_field(g, 1.0);
    if (spec.rfind("mode:", 0) == 0) {
        const int k = static_cast<int>(detail::parse_integer(spec.substr(5), "--u0"));
        return GridFunction::plane_wave(g, WaveVector{k, 0, 0});
    }
    if (spec.rfind("file:", 0) == 0) {
        std::ifstream in(spec.substr(5));
        if (!in) throw ConfigError("--u0: cannot read " + spec.substr(5));
        GridFunction u(g);
        std::size_t i = 0;
        for (double v; in >> v; ++i) {
            if (i >= u.data.size()) throw ConfigError("--u0: file has more than N^d values");
            u.data[i] = v;
        }
        if (i != u.data.size()) throw ConfigError("--u0: file has " + std::to_string(i) + " values, need " +
                                                  std::to_string(u.data.size()));
        return u;
    }
    throw ConfigError("--u0 must be gauss, mode:k or file:path");
}

// "zero", "noise:seed" or "mode:k" (constant in time)
SpaceTimeField forcing(const GridSpec& g, const std::string& spec, double T, std::size_t steps) {
    if (spec == "zero") return SpaceTimeField::zeros(g, T, steps);
    if (spec.rfind("noise:", 0) == 0)
        return random_forcing(g, static_cast<std::uint64_t>(detail::parse_integer(spec.substr(6), "--f")), T, steps);
    if (spec.rfind("mode:", 0) == 0) {
        const int k = static_cast<int>(detail::parse_integer(spec.substr(5), "--f"));
        return SpaceTimeField::separable(GridFunction::plane_wave(g, WaveVector{k, 0, 0}), T, steps,
                                         [](double) { return 1.0; });
    }
    throw ConfigError("--f must be zero, noise:seed or mode:k");
}

int cmd_specfun(const std::string& alphas, const std::string& betas, const std::string& xs, bool derivative,
                const std::string& out) {
    std::ostringstream csv;
    csv.precision(17);
    csv << "alpha,beta,x,value,flag\n";
    for (double a : parse_list(alphas))
        for (double b : parse_list(betas))
            for (double x : Range::parse(xs).points()) {
                const auto v = derivative ? mittag_leffler_deriv(a, b, x) : mittag_leffler(a, b, x);
                csv << a << "," << b << "," << x << "," << v.value << "," << (v.degraded ? 1 : 0) << "\n";
            }
    emit(out, csv.str());
    return 0;
}

struct KernelArgs {
    std::string phi = "stable:0.5";
    double alpha = 0.5;
    double beta = -1.0;
    int dim = 1;
    double t = 1.0;
    std::string radii = "log:0.01:100:33";
    std::string route = "fourier";
    std::string out;
    std::string json_out;
    std::string t_grid = "log:0.01:100:9";
};

int cmd_kernel(const KernelArgs& k) {
    const auto spec = parse_bernstein(k.phi);
    const FracOrder ord{k.alpha, k.beta < 0.0 ? k.alpha : k.beta};
    ord.validate();
    const auto radii = Range::parse(k.radii).points();
    if (k.route != "fourier" && k.route != "subordination" && k.route != "both")
        throw ConfigError("--route must be fourier, subordination or both");
    RadialProfile fou, sub;
    if (k.route != "subordination") fou = q_kernel_fourier(spec, ord, k.dim, k.t, radii);
    if (k.route != "fourier") sub = q_kernel_subordination(spec, ord, k.dim, k.t, radii);
    std::ostringstream csv;
    csv.precision(17);
    csv << "r";
    if (!fou.values.empty()) csv << ",fourier";
    if (!sub.values.empty()) csv << ",subordination";
    csv << "\n";
    for (std::size_t i = 0; i < radii.size(); ++i) {
        csv << radii[i];
        if (!fou.values.empty()) csv << "," << fou.values[i];
        if (!sub.values.empty()) csv << "," << sub.values[i];
        csv << "\n";
    }
    emit(k.out, csv.str());
    if (!k.json_out.empty()) {
        json j{{"phi", spec.str()}, {"alpha", ord.alpha}, {"beta", ord.beta}, {"dim", k.dim}, {"t", k.t}};
        if (!fou.values.empty()) j["fourier_degraded"] = fou.degraded;
        if (!sub.values.empty()) j["subordination_degraded"] = sub.degraded;
        if (!fou.values.empty() && !sub.values.empty()) {
            double worst = 0.0;
            const double mx = fou.max_value();
            for (std::size_t i = 0; i < radii.size(); ++i)
                if (std::abs(fou.values[i]) > tol::two_route_floor * mx)
                    worst = std::max(worst, std::abs(sub.values[i] - fou.values[i]) / std::abs(fou.values[i]));
            j["two_route_max_rel_error"] = worst;
        }
        const auto tg = Range::parse(k.t_grid);
        const auto rg = Range::parse(k.radii);
        j["bounds"] = json::parse(bound_json({check_p_bound(spec, k.dim, tg, rg), check_q_bound(spec, ord, k.dim, tg, rg)}));
        emit(k.json_out, j.dump(2) + "\n");
    }
    return 0;
}

int cmd_bounds(const KernelArgs& k, const std::string& which, const std::string& lambda_grid) {
    const auto spec = parse_bernstein(k.phi);
    const FracOrder ord{k.alpha, k.beta < 0.0 ? k.alpha : k.beta};
    ord.validate();
    const auto tg = Range::parse(k.t_grid);
    const auto rg = Range::parse(k.radii);
    std::vector<BoundReport> reps;
    for (const auto& w : detail::split(which, ',')) {
        if (w == "p") reps.push_back(check_p_bound(spec, k.dim, tg, rg));
        else if (w == "q") reps.push_back(check_q_bound(spec, ord, k.dim, tg, rg));
        else if (w == "mass") reps.push_back(check_mass_bound(spec, ord, k.dim, tg));
        else if (w == "tail") reps.push_back(check_tail_mass_bound(spec, ord.alpha, k.dim, tg, rg));
        else if (w == "tailint") reps.push_back(check_tail_integral_bound(spec, rg));
        else if (w.rfind("deriv", 0) == 0) {
            const int n = w.size() > 5 ? static_cast<int>(detail::parse_integer(w.substr(5), "--which")) : 1;
            auto r = check_deriv_bound(spec, n, Range::parse(lambda_grid));
            reps.push_back(r);
        } else
            throw ConfigError("--which: unknown report '" + w + "' (p, q, mass, tail, tailint, derivN)");
    }
    emit(k.out, bound_json(reps));
    return std::all_of(reps.begin(), reps.end(), [](const BoundReport& r) { return r.passed(); }) ? 0 : 1;
}

struct SolveArgs {
    std::string phi = "stable:0.5";
    double alpha = 0.5;
    int dim = 1;
    double L = -1.0;
    int N = 0;
    double T = 1.0;
    int Nt = 0;
    std::string u0 = "gauss";
    std::string f = "zero";
    int slices = 5;
    std::string out;
    std::string json_out;
};

int cmd_solve(const SolveArgs& s) {
    const auto spec = parse_bernstein(s.phi);
    auto g = GridSpec::defaults(s.dim);
    if (s.L > 0.0) g.L = s.L;
    if (s.N > 0) g.N = s.N;
    g.validate();
    const std::size_t steps = s.Nt > 0 ? static_cast<std::size_t>(s.Nt) : GridSpec::default_steps(s.dim);
    const auto u0 = initial_data(g, s.u0);
    const auto f = forcing(g, s.f, s.T, steps);
    const auto u = solve(spec, s.alpha, u0, f, s.T);
    std::ostringstream csv;
    csv.precision(17);
    csv << "t";
    for (int a = 0; a < g.dim; ++a) csv << ",x" << a + 1;
    csv << ",re,im\n";
    const int count = std::max(1, s.slices);
    for (int m = 0; m < count; ++m) {
        const std::size_t n = count == 1 ? steps : steps * static_cast<std::size_t>(m) / static_cast<std::size_t>(count - 1);
        const auto& slice = u.slices[n];
        for (std::size_t j = 0; j < slice.data.size(); ++j) {
            const auto x = g.point(j);
            csv << u.time(n);
            for (int a = 0; a < g.dim; ++a) csv << "," << x[a];
            csv << "," << slice.data[j].real() << "," << slice.data[j].imag() << "\n";
        }
    }
    emit(s.out, csv.str());
    if (!s.json_out.empty()) {
        const auto r = residual(spec, s.alpha, u, f);
        std::vector<double> per_step;
        for (std::size_t n = 1; n < r.slices.size(); ++n) per_step.push_back(r.slices[n].max_abs());
        json j{{"phi", spec.str()},        {"alpha", s.alpha},       {"dim", g.dim},
               {"L", g.L},                 {"N", g.N},               {"T", s.T},
               {"Nt", steps},              {"u0", s.u0},             {"f", s.f},
               {"residual_sup", r.sup_norm(1)}, {"residual_by_step", per_step},
               {"aliased", u.aliased},     {"ml_degraded", u.ml_degraded}};
        emit(s.json_out, j.dump(2) + "\n");
    }
    return 0;
}

struct HarnessArgs {
    std::string phi = "stable:0.5";
    double alpha = 0.5;
    double p = 2.0, q = 2.0;
    std::string pairs = "2:2,3:2,2:4";
    double T = 1.0;
    int N = 128;
    double L = 8.0;
    int steps = 64;
    std::size_t samples = 50;
    std::uint64_t seed = 1;
    std::string out;
};

int cmd_norms(const HarnessArgs& h) {
    const GridSpec g{1, h.L, h.N};
    HarnessOptions opts;
    opts.samples = h.samples;
    opts.seed = h.seed;
    opts.workers = worker_budget();
    const auto r = homogeneous_besov_ratio(parse_bernstein(h.phi), h.alpha, h.p, h.q, h.T, g, opts);
    emit(h.out, sample_json(r).dump(2) + "\n");
    return r.passed() ? 0 : 1;
}

int cmd_verify(const HarnessArgs& h) {
    const GridSpec g{1, h.L, h.N};
    HarnessOptions opts;
    opts.samples = h.samples;
    opts.seed = h.seed;
    opts.steps = static_cast<std::size_t>(h.steps);
    opts.workers = worker_budget();
    const auto reps = maximal_reg_ratios(parse_bernstein(h.phi), h.alpha, parse_pairs(h.pairs), h.T, g, opts);
    json a = json::array();
    bool ok = true;
    for (const auto& r : reps) {
        a.push_back(sample_json(r));
        ok = ok && r.passed();
    }
    emit(h.out, a.dump(2) + "\n");
    return ok ? 0 : 1;
}

int cmd_mc(MCConfig cfg, const std::string& xi, const std::string& hist, const std::string& json_out) {
    cfg.workers = worker_budget();
    const auto y = sample_y(cfg);
    const auto r = y.magnitudes();
    std::vector<double> sorted = r;
    std::sort(sorted.begin(), sorted.end());
    auto quantile = [&](double p) { return sorted[static_cast<std::size_t>(p * static_cast<double>(sorted.size() - 1))]; };
    std::cout << "n=" << cfg.n << " alpha=" << cfg.alpha << " beta=" << cfg.beta << " d=" << cfg.dim << " t=" << cfg.t
              << " seed=" << cfg.seed << "\n|Y| quantiles: 10%=" << quantile(0.1) << " 50%=" << quantile(0.5)
              << " 90%=" << quantile(0.9) << "\n";
    const auto chk = check_characteristic(y, cfg, Range::parse(xi).points());
    const auto prof = reference_profile(cfg);
    const auto d = compare_density(y, prof);
    std::cout << "characteristic function max z=" << chk.max_z << "\nhistogram " << d.str() << "\n";
    if (!hist.empty()) {
        const auto table = DensityTable::from_profile(prof);
        std::ostringstream csv;
        csv.precision(17);
        csv << "lo,hi,empirical,analytic\n";
        const double total = static_cast<double>(sorted.size());
        for (std::size_t b = 0; b < d.bins; ++b) {
            const double lo = d.bin_width * static_cast<double>(b), hi = std::min(d.range_hi, lo + d.bin_width);
            const auto count = std::lower_bound(sorted.begin(), sorted.end(), hi) - std::lower_bound(sorted.begin(), sorted.end(), lo);
            csv << lo << "," << hi << "," << static_cast<double>(count) / total << "," << table.cdf(hi) - table.cdf(lo) << "\n";
        }
        const auto tail = sorted.end() - std::lower_bound(sorted.begin(), sorted.end(), d.range_hi);
        csv << d.range_hi << ",inf," << static_cast<double>(tail) / total << "," << 1.0 - table.cdf(d.range_hi) << "\n";
        emit(hist, csv.str());
    }
    if (!json_out.empty()) {
        std::vector<double> est, se;
        for (const auto& e : chk.empirical) {
            est.push_back(e.mean);
            se.push_back(e.se);
        }
        json j{{"alpha", cfg.alpha},
               {"beta", cfg.beta},
               {"dim", cfg.dim},
               {"t", cfg.t},
               {"n", cfg.n},
               {"seed", cfg.seed},
               {"characteristic", {{"xi", chk.xi}, {"estimate", est}, {"standard_error", se}, {"exact", chk.exact},
                                   {"max_z", chk.max_z}, {"threshold", chk.z_threshold}, {"pass", chk.passed()}}},
               {"histogram", {{"bins", d.bins}, {"bin_width", d.bin_width}, {"range_hi", d.range_hi}, {"l1", d.l1},
                              {"ks", d.ks}, {"noise_floor", d.noise_floor}, {"threshold", tol::histogram_l1},
                              {"pass", d.l1 < tol::histogram_l1}}}};
        emit(json_out, j.dump(2) + "\n");
    }
    return chk.passed() && d.l1 < tol::histogram_l1 ? 0 : 1;
}

int cmd_run(const std::string& path, const std::string& output, const std::vector<std::string>& sets, bool dump) {
    auto c = ExperimentConfig::load(path);
    for (const auto& s : sets) {
        const auto eq = s.find('='), dot = s.find('.');
        if (eq == std::string::npos || dot == std::string::npos || dot > eq)
            throw ConfigError("--set expects section.key=value, got '" + s + "'");
        c.set(s.substr(0, dot), s.substr(dot + 1, eq - dot - 1), s.substr(eq + 1));
    }
    if (!output.empty()) c.set("run", "output", output);
    if (dump) {
        std::cout << c.resolved().serialize();
        return 0;
    }
    const auto bundle = run(c, worker_budget(), [](const HarnessReport& r) {
        std::cout << (r.passed() ? "PASS " : "FAIL ") << r.harness << " (" << r.pass_count() << "/" << r.verdicts.size()
                  << " checks, " << format_double(r.runtime) << " s)" << (r.error.empty() ? "" : " error: " + r.error)
                  << std::endl;
    });
    std::cout << "config hash " << bundle.config_hash << ", " << bundle.reports.size() << " harnesses, "
              << (bundle.passed() ? "all passed" : "failures") << "\n";
    return bundle.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fraclab: numerical lab for time-fractional equations with phi(Delta)"};
    app.require_subcommand(1);
    int status = 0;

    std::string alphas = "0.5", betas = "1", xs = "lin:-10:0:11", out;
    bool derivative = false;
    auto* sf = app.add_subcommand("specfun", "Mittag-Leffler tables as CSV (alpha, beta, x, value, flag)");
    sf->add_option("--alpha", alphas, "comma-separated alpha values")->capture_default_str();
    sf->add_option("--beta", betas, "comma-separated beta values")->capture_default_str();
    sf->add_option("--x", xs, "argument range lin:a:b:n or log:a:b:n")->capture_default_str();
    sf->add_flag("--derivative", derivative, "tabulate d/dx E_{alpha,beta}");
    sf->add_option("-o,--out", out, "CSV file (default stdout)");
    sf->callback([&] { status = cmd_specfun(alphas, betas, xs, derivative, out); });

    KernelArgs k;
    auto kernel_options = [&](CLI::App* s) {
        s->add_option("--phi", k.phi, "Bernstein function, e.g. stable:0.5")->capture_default_str();
        s->add_option("--alpha", k.alpha, "time order in (0,1)")->capture_default_str();
        s->add_option("--beta", k.beta, "kernel order beta_ord (default alpha)");
        s->add_option("--dim", k.dim, "dimension 1, 2 or 3")->capture_default_str();
        s->add_option("--radii", k.radii, "radius range")->capture_default_str();
        s->add_option("--t-grid", k.t_grid, "time range of the bound reports")->capture_default_str();
    };
    auto* kn = app.add_subcommand("kernel", "radial kernel profile q_{alpha,beta}(t, r) as CSV");
    kernel_options(kn);
    kn->add_option("--t", k.t, "time")->capture_default_str();
    kn->add_option("--route", k.route, "fourier, subordination or both")->capture_default_str();
    kn->add_option("-o,--out", k.out, "CSV file (default stdout)");
    kn->add_option("--json", k.json_out, "JSON file with route agreement and p/q bound reports");
    kn->callback([&] { status = cmd_kernel(k); });

    std::string which = "p,q,tail,tailint,deriv1,deriv2", lambda_grid = "log:1e-6:1e6:64";
    auto* bd = app.add_subcommand("bounds", "bound reports as JSON");
    kernel_options(bd);
    bd->add_option("--which", which, "reports: p, q, mass, tail, tailint, derivN")->capture_default_str();
    bd->add_option("--lambda-grid", lambda_grid, "lambda range of the derivative bound")->capture_default_str();
    bd->add_option("-o,--out", k.out, "JSON file (default stdout)");
    bd->callback([&] { status = cmd_bounds(k, which, lambda_grid); });

    SolveArgs s;
    auto* sv = app.add_subcommand("solve", "solve the equation on a periodic grid");
    sv->add_option("--phi", s.phi, "Bernstein function")->capture_default_str();
    sv->add_option("--alpha", s.alpha, "time order in (0,1)")->capture_default_str();
    sv->add_option("--dim", s.dim, "dimension")->capture_default_str();
    sv->add_option("--L", s.L, "half period (default 8)");
    sv->add_option("--N", s.N, "points per axis (default 512/128/48 by dimension)");
    sv->add_option("--T", s.T, "horizon")->capture_default_str();
    sv->add_option("--Nt", s.Nt, "time steps (default 256/128/64 by dimension)");
    sv->add_option("--u0", s.u0, "gauss, mode:k or file:path")->capture_default_str();
    sv->add_option("--f", s.f, "zero, noise:seed or mode:k")->capture_default_str();
    sv->add_option("--slices", s.slices, "number of time slices in the CSV")->capture_default_str();
    sv->add_option("-o,--out", s.out, "CSV file (default stdout)");
    sv->add_option("--json", s.json_out, "JSON residual report");
    sv->callback([&] { status = cmd_solve(s); });

    HarnessArgs h;
    auto harness_options = [&](CLI::App* a) {
        a->add_option("--phi", h.phi, "Bernstein function")->capture_default_str();
        a->add_option("--alpha", h.alpha, "time order in (0,1)")->capture_default_str();
        a->add_option("--T", h.T, "horizon")->capture_default_str();
        a->add_option("--N", h.N, "grid points")->capture_default_str();
        a->add_option("--L", h.L, "half period")->capture_default_str();
        a->add_option("--samples", h.samples, "seeded samples")->capture_default_str();
        a->add_option("--seed", h.seed, "first seed")->capture_default_str();
        a->add_option("-o,--out", h.out, "JSON file (default stdout)");
    };
    auto* nm = app.add_subcommand("norms", "homogeneous Besov ratio harness (JSON)");
    harness_options(nm);
    nm->add_option("--p", h.p, "space exponent")->capture_default_str();
    nm->add_option("--q", h.q, "time exponent")->capture_default_str();
    nm->callback([&] { status = cmd_norms(h); });

    auto* vf = app.add_subcommand("verify", "maximal regularity harness, T versus 4T (JSON)");
    harness_options(vf);
    vf->add_option("--pairs", h.pairs, "(p,q) pairs p:q,...")->capture_default_str();
    vf->add_option("--steps", h.steps, "time steps on [0,T]")->capture_default_str();
    vf->callback([&] { status = cmd_verify(h); });

    MCConfig mc;
    std::string xi = "lin:0.25:2:8", hist, mc_json;
    auto* m = app.add_subcommand("mc", "Monte Carlo samples of Y_t against the analytic kernel");
    m->add_option("--alpha", mc.alpha, "time order")->capture_default_str();
    m->add_option("--beta", mc.beta, "stable index of phi")->capture_default_str();
    m->add_option("--dim", mc.dim, "dimension")->capture_default_str();
    m->add_option("--t", mc.t, "time")->capture_default_str();
    m->add_option("--n", mc.n, "samples")->capture_default_str();
    m->add_option("--seed", mc.seed, "seed")->capture_default_str();
    m->add_option("--xi", xi, "characteristic-function grid")->capture_default_str();
    m->add_option("--hist", hist, "histogram CSV file");
    m->add_option("--json", mc_json, "comparison JSON file");
    m->callback([&] { status = cmd_mc(mc, xi, hist, mc_json); });

    std::string config_path, output;
    std::vector<std::string> sets;
    bool dump = false;
    auto* rn = app.add_subcommand("run", "run the harnesses selected by a config file");
    rn->add_option("config", config_path, "INI config file")->required();
    rn->add_option("--output", output, "override [run] output");
    rn->add_option("--set", sets, "override section.key=value (repeatable)");
    rn->add_flag("--dump-config", dump, "print the resolved config and exit");
    rn->callback([&] { status = cmd_run(config_path, output, sets, dump); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return status;
}
