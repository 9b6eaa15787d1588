#pragma once

#include <algorithm>
#include <cstdint>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "bernstein.hpp"
#include "errors.hpp"
#include "numerics.hpp"

namespace fraclab {

/// Harness names, in acceptance-criterion order.
inline const std::vector<std::string>& harness_names() {
    static const std::vector<std::string> names{"specfun", "normalization", "two_route", "bounds", "solver",
                                                "maxreg",  "besov",         "montecarlo", "fraccalc"};
    return names;
}

enum class ParamKind { real, integer, text, phi, phi_list, real_list, int_list, range, pair_list, harness_list };

/// One configuration key: its type, default, and the admissible interval of its numeric values.
struct ParamDef {
    std::string section;
    std::string key;
    ParamKind kind;
    std::string fallback;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    bool open = false;  // (lo, hi) instead of [lo, hi]
    std::string doc;
};

namespace detail {

constexpr double inf = std::numeric_limits<double>::infinity();

inline std::vector<ParamDef> make_schema() {
    const std::string catalog = "stable:0.5; sum:0.3,0.7; logcorr:0.5,0.2; relativistic:0.5,1; conjgeom:1";
    const std::string alphas = "0.3, 0.5, 0.8";
    using K = ParamKind;
    return {
        {"run", "harnesses", K::harness_list, "", -inf, inf, false, "harnesses to run, comma separated"},
        {"run", "output", K::text, "reports", -inf, inf, false, "output directory"},

        {"specfun", "recurrence_alpha", K::range, "lin:0.1:0.95:10", 0.0, 1.0, false, "alpha axis"},
        {"specfun", "recurrence_beta", K::range, "lin:-0.5:3:10", -inf, inf, false, "beta axis"},
        {"specfun", "recurrence_y", K::range, "log:0.001:1000:12", 0.0, inf, true, "x = -y axis"},
        {"specfun", "exp_x", K::range, "lin:0:10:201", 0.0, inf, false, "E_{1,1}(-x) against e^-x"},
        {"specfun", "laplace_alphas", K::real_list, alphas, 0.0, 1.0, true, "alpha values of the Laplace identity"},
        {"specfun", "laplace_sigma", K::range, "log:0.01:100:9", 0.0, inf, true, "s t^alpha grid"},

        {"normalization", "phis", K::phi_list, catalog, -inf, inf, false, "Bernstein functions"},
        {"normalization", "dims", K::int_list, "1, 3", 1, 3, false, "dimensions"},
        {"normalization", "times", K::real_list, "0.1, 1, 10", 0.0, inf, true, "times"},
        {"normalization", "alphas", K::real_list, alphas, 0.0, 1.0, true, "time orders"},

        {"two_route", "phis", K::phi_list, catalog, -inf, inf, false, "Bernstein functions"},
        {"two_route", "dims", K::int_list, "1, 3", 1, 3, false, "dimensions"},
        {"two_route", "alphas", K::real_list, alphas, 0.0, 1.0, true, "time orders; beta_ord runs over {alpha, 1}"},
        {"two_route", "t", K::real, "1", 0.0, inf, true, "time"},
        {"two_route", "radii", K::range, "log:0.01:100:17", 0.0, inf, true, "radii"},

        {"bounds", "phis", K::phi_list, catalog, -inf, inf, false, "Bernstein functions"},
        {"bounds", "dims", K::int_list, "1, 3", 1, 3, false, "dimensions of the kernel bounds"},
        {"bounds", "alpha", K::real, "0.5", 0.0, 1.0, true, "time order"},
        {"bounds", "t_grid", K::range, "log:0.01:100:9", 0.0, inf, true, "time grid"},
        {"bounds", "r_grid", K::range, "log:0.01:100:64", 0.0, inf, true, "radius (and tail cut-off) grid"},
        {"bounds", "lambda_grid", K::range, "log:1e-06:1e+06:64", 0.0, inf, true, "derivative bound grid"},
        {"bounds", "deriv_orders", K::int_list, "1, 2", 1, 6, false, "derivative orders n"},
        {"bounds", "mass_phis", K::phi_list, "stable:0.5; sum:0.3,0.7", -inf, inf, false,
         "Bernstein functions of the beta_ord = 1 mass bound"},

        {"solver", "phi", K::phi, "stable:0.5", -inf, inf, false, "Bernstein function"},
        {"solver", "alphas", K::real_list, alphas, 0.0, 1.0, true, "time orders"},
        {"solver", "N", K::integer, "64", 4, 4096, false, "grid points"},
        {"solver", "L", K::real, "8", 0.0, inf, true, "half period"},
        {"solver", "T", K::real, "1", 0.0, inf, true, "horizon"},
        {"solver", "base_steps", K::integer, "32", 2, 1 << 20, false, "coarsest Nt"},
        {"solver", "levels", K::integer, "4", 2, 10, false, "dyadic levels"},
        {"solver", "seed", K::integer, "7", 0, 9.0e15, false, "seed of the manufactured profile"},

        {"maxreg", "phi", K::phi, "stable:0.5", -inf, inf, false, "Bernstein function"},
        {"maxreg", "alphas", K::real_list, alphas, 0.0, 1.0, true, "time orders"},
        {"maxreg", "pairs", K::pair_list, "2:2, 3:2, 2:4", 1.0, inf, false, "(p, q) pairs"},
        {"maxreg", "samples", K::integer, "50", 1, 1e6, false, "random forcings"},
        {"maxreg", "seed", K::integer, "1", 0, 9.0e15, false, "first seed"},
        {"maxreg", "N", K::integer, "128", 4, 4096, false, "grid points"},
        {"maxreg", "L", K::real, "8", 0.0, inf, true, "half period"},
        {"maxreg", "T", K::real, "1", 0.0, inf, true, "horizon"},
        {"maxreg", "steps", K::integer, "64", 2, 1 << 20, false, "time steps on [0, T]"},

        {"besov", "phi", K::phi, "stable:0.5", -inf, inf, false, "Bernstein function"},
        {"besov", "alphas", K::real_list, alphas, 0.0, 1.0, true, "time orders"},
        {"besov", "p", K::real, "2", 1.0, inf, false, "space exponent"},
        {"besov", "q", K::real, "2", 1.0, inf, false, "time exponent"},
        {"besov", "samples", K::integer, "50", 1, 1e6, false, "initial data (doubled for the comparison)"},
        {"besov", "seed", K::integer, "1", 0, 9.0e15, false, "first seed"},
        {"besov", "N", K::integer, "128", 4, 4096, false, "grid points"},
        {"besov", "L", K::real, "8", 0.0, inf, true, "half period"},
        {"besov", "T", K::real, "1", 0.0, inf, true, "horizon"},
        {"besov", "band_levels", K::integer, "3", 1, 20, false, "highest band of the band bound"},
        {"besov", "band_t", K::range, "log:0.01:100:9", 0.0, inf, true, "times of the band bound"},

        {"montecarlo", "pairs", K::pair_list, "0.5:0.5, 0.5:1, 0.8:0.5", 0.0, 1.0, false, "(alpha, beta) pairs"},
        {"montecarlo", "dim", K::integer, "1", 1, 3, false, "dimension"},
        {"montecarlo", "t", K::real, "1", 0.0, inf, true, "time"},
        {"montecarlo", "n", K::integer, "100000", 1, 1e9, false, "samples"},
        {"montecarlo", "seed", K::integer, "1", 0, 9.0e15, false, "seed"},
        {"montecarlo", "xi", K::range, "lin:0.25:2:8", 0.0, inf, true, "characteristic-function grid"},

        {"fraccalc", "semigroup_pairs", K::pair_list, "0.3:0.7, 0.5:0.5, 0.5:0.8", 0.0, 1.0, true,
         "(a, b) orders of I^a I^b = I^(a+b)"},
        {"fraccalc", "inversion_alphas", K::real_list, alphas, 0.0, 1.0, true, "orders of D^a I^a u = u"},
        {"fraccalc", "base_steps", K::integer, "64", 2, 1 << 20, false, "coarsest number of steps"},
        {"fraccalc", "levels", K::integer, "4", 2, 12, false, "dyadic levels"},
    };
}

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) {
        cur = trim(cur);
        if (!cur.empty()) out.push_back(cur);
    }
    return out;
}

inline double parse_real(const std::string& s, const std::string& where) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size() || !std::isfinite(v)) throw ConfigError(where + ": '" + s + "' is not a number");
    return v;
}

inline long long parse_integer(const std::string& s, const std::string& where) {
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size()) throw ConfigError(where + ": '" + s + "' is not an integer");
    return v;
}

inline void check_interval(double v, const ParamDef& def, const std::string& where) {
    const bool ok = def.open ? (v > def.lo && v < def.hi) : (v >= def.lo && v <= def.hi);
    if (ok) return;
    throw ConfigError(where + " = " + format_double(v) + " violates " + (def.open ? "(" : "[") + format_double(def.lo) +
                      ", " + format_double(def.hi) + (def.open ? ")" : "]"));
}

}  // namespace detail

inline const std::vector<ParamDef>& config_schema() {
    static const std::vector<ParamDef> schema = detail::make_schema();
    return schema;
}

inline const ParamDef* find_param(const std::string& section, const std::string& key) {
    for (const auto& d : config_schema())
        if (d.section == section && d.key == key) return &d;
    return nullptr;
}

/// Experiment configuration: INI sections of key = value pairs checked against config_schema().
/// Only explicitly given keys are stored; absent keys read their schema default.
class ExperimentConfig {
public:
    using Table = std::map<std::string, std::map<std::string, std::string>>;

    ExperimentConfig() = default;
    explicit ExperimentConfig(Table values) : values_(std::move(values)) { validate(); }

    static ExperimentConfig parse(const std::string& text) {
        std::istringstream in(text);
        boost::property_tree::ptree tree;
        try {
            boost::property_tree::ini_parser::read_ini(in, tree);
        } catch (const boost::property_tree::ini_parser_error& e) {
            throw ConfigError(std::string("config syntax: ") + e.message() + " at line " + std::to_string(e.line()));
        }
        Table t;
        for (const auto& [section, body] : tree) {
            if (body.empty()) throw ConfigError("config: key '" + section + "' outside a section");
            for (const auto& [key, node] : body) t[section][key] = detail::trim(node.data());
        }
        return ExperimentConfig(std::move(t));
    }

    static ExperimentConfig load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot read config file '" + path + "'");
        std::stringstream buf;
        buf << in.rdbuf();
        return parse(buf.str());
    }

    /// Canonical text: sections and keys sorted, one "key = value" per line.
    [[nodiscard]] std::string serialize() const {
        std::string out;
        for (const auto& [section, body] : values_) {
            if (!out.empty()) out += "\n";
            out += "[" + section + "]\n";
            for (const auto& [key, value] : body) out += key + " = " + value + "\n";
        }
        return out;
    }

    /// Every schema key with its effective value.
    [[nodiscard]] ExperimentConfig resolved() const {
        Table t;
        for (const auto& d : config_schema()) t[d.section][d.key] = text(d.section, d.key);
        return ExperimentConfig(std::move(t));
    }

    /// FNV-1a over the canonical text of the resolved configuration without [run] output, as 16 hex digits.
    [[nodiscard]] std::string hash() const {
        auto t = resolved().values_;
        t["run"].erase("output");
        std::uint64_t h = 1469598103934665603ull;
        for (unsigned char c : ExperimentConfig(std::move(t)).serialize()) {
            h ^= c;
            h *= 1099511628211ull;
        }
        std::ostringstream os;
        os << std::hex;
        os.width(16);
        os.fill('0');
        os << h;
        return os.str();
    }

    void set(const std::string& section, const std::string& key, const std::string& value) {
        auto t = values_;
        t[section][key] = detail::trim(value);
        values_ = ExperimentConfig(std::move(t)).values_;
    }

    [[nodiscard]] const Table& values() const { return values_; }
    bool operator==(const ExperimentConfig& o) const { return values_ == o.values_; }

    [[nodiscard]] std::string text(const std::string& section, const std::string& key) const {
        const auto* def = require(section, key);
        const auto s = values_.find(section);
        if (s != values_.end()) {
            const auto k = s->second.find(key);
            if (k != s->second.end()) return k->second;
        }
        return def->fallback;
    }
    [[nodiscard]] double real(const std::string& section, const std::string& key) const {
        return detail::parse_real(text(section, key), where(section, key));
    }
    [[nodiscard]] long long integer(const std::string& section, const std::string& key) const {
        return detail::parse_integer(text(section, key), where(section, key));
    }
    [[nodiscard]] BernsteinSpec phi(const std::string& section, const std::string& key) const {
        return parse_bernstein(text(section, key));
    }
    [[nodiscard]] std::vector<BernsteinSpec> phis(const std::string& section, const std::string& key) const {
        std::vector<BernsteinSpec> out;
        for (const auto& s : detail::split(text(section, key), ';')) out.push_back(parse_bernstein(s));
        return out;
    }
    [[nodiscard]] std::vector<double> reals(const std::string& section, const std::string& key) const {
        std::vector<double> out;
        for (const auto& s : detail::split(text(section, key), ','))
            out.push_back(detail::parse_real(s, where(section, key)));
        return out;
    }
    [[nodiscard]] std::vector<int> ints(const std::string& section, const std::string& key) const {
        std::vector<int> out;
        for (const auto& s : detail::split(text(section, key), ','))
            out.push_back(static_cast<int>(detail::parse_integer(s, where(section, key))));
        return out;
    }
    [[nodiscard]] Range range(const std::string& section, const std::string& key) const {
        return Range::parse(text(section, key));
    }
    [[nodiscard]] std::vector<std::pair<double, double>> pairs(const std::string& section, const std::string& key) const {
        std::vector<std::pair<double, double>> out;
        for (const auto& s : detail::split(text(section, key), ',')) {
            const auto parts = detail::split(s, ':');
            if (parts.size() != 2) throw ConfigError(where(section, key) + ": '" + s + "' is not a pair a:b");
            out.emplace_back(detail::parse_real(parts[0], where(section, key)),
                             detail::parse_real(parts[1], where(section, key)));
        }
        return out;
    }
    [[nodiscard]] std::vector<std::string> harnesses() const { return detail::split(text("run", "harnesses"), ','); }

private:
    Table values_;

    static std::string where(const std::string& section, const std::string& key) { return "[" + section + "] " + key; }

    static const ParamDef* require(const std::string& section, const std::string& key) {
        const auto* def = find_param(section, key);
        if (!def) throw ConfigError("unknown config key " + where(section, key));
        return def;
    }

    void validate() const {
        for (const auto& [section, body] : values_)
            for (const auto& [key, value] : body) check(*require(section, key), value);
    }

    void check(const ParamDef& def, const std::string& value) const {
        const auto w = where(def.section, def.key);
        auto wrap = [&](auto&& parse) {
            try {
                parse();
            } catch (const std::exception& e) {
                throw ConfigError(w + ": " + e.what());
            }
        };
        switch (def.kind) {
            case ParamKind::real: detail::check_interval(detail::parse_real(value, w), def, w); break;
            case ParamKind::integer:
                detail::check_interval(static_cast<double>(detail::parse_integer(value, w)), def, w);
                break;
            case ParamKind::text:
                if (value.empty()) throw ConfigError(w + " must not be empty");
                break;
            case ParamKind::phi: wrap([&] { parse_bernstein(value); }); break;
            case ParamKind::phi_list: {
                const auto items = detail::split(value, ';');
                if (items.empty()) throw ConfigError(w + " must list at least one Bernstein function");
                wrap([&] {
                    for (const auto& s : items) parse_bernstein(s);
                });
                break;
            }
            case ParamKind::real_list: {
                const auto items = detail::split(value, ',');
                if (items.empty()) throw ConfigError(w + " must list at least one value");
                for (const auto& s : items) detail::check_interval(detail::parse_real(s, w), def, w);
                break;
            }
            case ParamKind::int_list: {
                const auto items = detail::split(value, ',');
                if (items.empty()) throw ConfigError(w + " must list at least one value");
                for (const auto& s : items) detail::check_interval(static_cast<double>(detail::parse_integer(s, w)), def, w);
                break;
            }
            case ParamKind::range: {
                Range r;
                try {
                    r = Range::parse(value);
                } catch (const ConfigError& e) {
                    throw ConfigError(w + ": " + e.what());
                }
                detail::check_interval(r.lo, def, w);
                detail::check_interval(r.hi, def, w);
                break;
            }
            case ParamKind::pair_list: {
                const auto items = detail::split(value, ',');
                if (items.empty()) throw ConfigError(w + " must list at least one pair");
                for (const auto& s : items) {
                    const auto parts = detail::split(s, ':');
                    if (parts.size() != 2) throw ConfigError(w + ": '" + s + "' is not a pair a:b");
                    for (const auto& x : parts) detail::check_interval(detail::parse_real(x, w), def, w);
                }
                break;
            }
            case ParamKind::harness_list:
                for (const auto& h : detail::split(value, ',')) {
                    const auto& names = harness_names();
                    if (std::find(names.begin(), names.end(), h) == names.end())
                        throw ConfigError(w + ": unknown harness '" + h + "'");
                }
                break;
        }
    }
};

}  // namespace fraclab
