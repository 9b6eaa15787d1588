#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fraclab.hpp"

using namespace fraclab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("fraclab_test_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

// Exit status of the CLI with stdout and stderr captured to files in `dir`.
int cli(const std::string& args, const fs::path& dir) {
    const std::string cmd = std::string(FRACLAB_CLI_PATH) + " " + args + " > " + (dir / "stdout").string() + " 2> " +
                            (dir / "stderr").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Report JSON without wall-clock fields.
json strip_runtime(json j) {
    if (j.is_object()) {
        j.erase("runtime");
        for (auto& [k, v] : j.items()) v = strip_runtime(v);
    } else if (j.is_array()) {
        for (auto& v : j) v = strip_runtime(v);
    }
    return j;
}

const char* small_campaign = R"(
[run]
harnesses = fraccalc, specfun

[fraccalc]
levels = 3
base_steps = 32

[specfun]
recurrence_alpha = lin:0.2:0.9:10
recurrence_beta = lin:0.5:2:10
recurrence_y = log:0.01:100:10
laplace_alphas = 0.5
)";

}  // namespace

TEST_CASE("config round-trips through its canonical text", "[cli]") {
    const auto c = ExperimentConfig::parse(small_campaign);
    CHECK(ExperimentConfig::parse(c.serialize()) == c);
    CHECK(ExperimentConfig::parse(c.serialize()).serialize() == c.serialize());
    const auto r = c.resolved();
    CHECK(ExperimentConfig::parse(r.serialize()) == r);
    CHECK(r.resolved() == r);
    CHECK(c.harnesses() == std::vector<std::string>{"fraccalc", "specfun"});
    CHECK(c.integer("fraccalc", "levels") == 3);
    CHECK(c.integer("fraccalc", "base_steps") == 32);
    // defaults for absent keys
    CHECK(c.integer("maxreg", "samples") == 50);
    CHECK(c.pairs("maxreg", "pairs") == std::vector<std::pair<double, double>>{{2, 2}, {3, 2}, {2, 4}});
    CHECK(c.phis("two_route", "phis").size() == 5);
    CHECK(c.range("specfun", "recurrence_y").points().size() == 10);
}

TEST_CASE("config hash", "[cli]") {
    const auto a = ExperimentConfig::parse(small_campaign);
    CHECK(a.hash().size() == 16);
    CHECK(a.hash() == ExperimentConfig::parse(a.serialize()).hash());
    // explicit defaults, whitespace and the output directory do not change the hash
    auto b = a;
    b.set("maxreg", "samples", "  50 ");
    b.set("run", "output", "elsewhere");
    CHECK(b.hash() == a.hash());
    b.set("maxreg", "samples", "51");
    CHECK(b.hash() != a.hash());
    CHECK(ExperimentConfig().hash() == ExperimentConfig::parse("").hash());
}

TEST_CASE("invalid configs name the offending field", "[cli]") {
    auto message = [](const std::string& text) {
        try {
            ExperimentConfig::parse(text);
        } catch (const ConfigError& e) {
            return std::string(e.what());
        }
        return std::string("accepted");
    };
    CHECK_THAT(message("[bounds]\nalpha = 1.5\n"), Catch::Matchers::ContainsSubstring("[bounds] alpha"));
    CHECK_THAT(message("[solver]\nalphas = 0.3, 1.5\n"), Catch::Matchers::ContainsSubstring("[solver] alphas"));
    CHECK_THAT(message("[bounds]\nphis = stable:1.5\n"), Catch::Matchers::ContainsSubstring("[bounds] phis"));
    CHECK_THAT(message("[bounds]\nspeed = 3\n"), Catch::Matchers::ContainsSubstring("unknown config key [bounds] speed"));
    CHECK_THAT(message("[nothing]\nx = 1\n"), Catch::Matchers::ContainsSubstring("[nothing] x"));
    CHECK_THAT(message("[run]\nharnesses = specfun, warp\n"), Catch::Matchers::ContainsSubstring("warp"));
    CHECK_THAT(message("[bounds]\nt_grid = log:0:1:3\n"), Catch::Matchers::ContainsSubstring("[bounds] t_grid"));
    CHECK_THAT(message("[maxreg]\nsamples = many\n"), Catch::Matchers::ContainsSubstring("[maxreg] samples"));
    CHECK_THAT(message("[maxreg]\npairs = 2:2:2\n"), Catch::Matchers::ContainsSubstring("[maxreg] pairs"));
    CHECK_THAT(message("[run\nharnesses = specfun\n"), Catch::Matchers::ContainsSubstring("syntax"));
    CHECK_THAT(message("loose = 1\n"), Catch::Matchers::ContainsSubstring("outside a section"));
    CHECK_THROWS_AS(ExperimentConfig::load("/nonexistent/config.cfg"), ConfigError);
    // module preconditions are checked before any computation
    const auto mc = ExperimentConfig::parse("[run]\nharnesses = montecarlo\n[montecarlo]\npairs = 1:0.5\n");
    CHECK_THROWS_AS(run(mc), ConfigError);
    const auto besov = ExperimentConfig::parse("[run]\nharnesses = besov\n[besov]\nband_levels = 9\n");
    CHECK_THROWS_WITH(check_preconditions(besov), Catch::Matchers::ContainsSubstring("band_levels"));
}

TEST_CASE("shipped acceptance config selects every harness at the default sizes", "[cli]") {
    const auto c = ExperimentConfig::load(std::string(FRACLAB_SOURCE_DIR) + "/config/acceptance.cfg");
    CHECK(c.harnesses() == harness_names());
    auto defaults = ExperimentConfig::parse("[run]\nharnesses = " + c.text("run", "harnesses") + "\n");
    CHECK(c.hash() == defaults.hash());
    CHECK_NOTHROW(check_preconditions(c));
}

TEST_CASE("worker budget comes from the environment", "[cli]") {
    ::unsetenv("FRACLAB_WORKERS");
    CHECK(worker_budget() == 1);
    ::setenv("FRACLAB_WORKERS", "3", 1);
    CHECK(worker_budget() == 3);
    ::setenv("FRACLAB_WORKERS", "zero", 1);
    CHECK_THROWS_AS(worker_budget(), ConfigError);
    ::unsetenv("FRACLAB_WORKERS");
}

TEST_CASE("verdict decisions", "[cli]") {
    Verdict v{"r", "q", "c", 0.5, 1.0};
    v.decide();
    CHECK(v.pass);
    v.value = std::numeric_limits<double>::quiet_NaN();
    v.decide();
    CHECK_FALSE(v.pass);
    v.value = 2.0;
    v.upper = false;
    v.decide();
    CHECK(v.pass);
    v.decide(false);
    CHECK_FALSE(v.pass);
}

TEST_CASE("empty harness list gives an empty bundle", "[cli]") {
    const auto dir = scratch("empty");
    auto c = ExperimentConfig::parse("[run]\nharnesses =\n");
    c.set("run", "output", dir.string());
    const auto b = run(c, 1);
    CHECK(b.reports.empty());
    CHECK(b.passed());
    const auto summary = json::parse(slurp(dir / "summary.json"));
    CHECK(summary["harnesses"].empty());
    CHECK(summary["pass"] == true);
    CHECK(summary["config_hash"] == c.hash());
}

TEST_CASE("run writes one report per harness and is deterministic", "[cli]") {
    auto c = ExperimentConfig::parse(small_campaign);
    const auto d1 = scratch("run1"), d2 = scratch("run2");
    c.set("run", "output", d1.string());
    const auto b = run(c, 1);
    REQUIRE(b.reports.size() == 2);
    CHECK(b.passed());
    for (const auto& name : {"fraccalc", "specfun"}) {
        const auto j = json::parse(slurp(d1 / (std::string(name) + ".json")));
        CHECK(j["config_hash"] == c.hash());
        CHECK(j["harness"] == name);
        for (const auto& v : j["verdicts"]) {
            CHECK(v.contains("ref"));
            CHECK(v.contains("quote"));
            CHECK(v.contains("sup_or_error"));
            CHECK(v.contains("threshold"));
            CHECK(v.contains("pass"));
            CHECK(v.contains("runtime"));
        }
    }
    CHECK(fs::exists(d1 / "specfun_recurrence.csv"));
    CHECK(ExperimentConfig::parse(slurp(d1 / "config.ini")) == c);
    // concurrent harnesses, different output directory: same numbers
    c.set("run", "output", d2.string());
    run(c, 2);
    for (const auto& f : {"fraccalc.json", "specfun.json", "summary.json"})
        CHECK(strip_runtime(json::parse(slurp(d1 / f))) == strip_runtime(json::parse(slurp(d2 / f))));
    CHECK(slurp(d1 / "specfun_recurrence.csv") == slurp(d2 / "specfun_recurrence.csv"));
    for (const auto& e : fs::directory_iterator(d1)) CHECK(e.path().extension() != ".tmp");
}

TEST_CASE("harness dispatch", "[cli]") {
    auto c = ExperimentConfig::parse("[solver]\nlevels = 2\nbase_steps = 8\nN = 16\n");
    const auto h = run_harness("solver", c);
    CHECK(h.error.empty());
    CHECK(h.harness == "solver");
    CHECK(h.verdicts.size() == 6);
    CHECK_THROWS_AS(run_harness("warp", c), ConfigError);
}

TEST_CASE("cli run subcommand", "[cli]") {
    const auto dir = scratch("cli_run");
    std::ofstream(dir / "empty.cfg") << "[run]\nharnesses =\n";
    CHECK(cli("run " + (dir / "empty.cfg").string() + " --output " + (dir / "out").string(), dir) == 0);
    CHECK(fs::exists(dir / "out" / "summary.json"));

    std::ofstream(dir / "bad.cfg") << "[run]\nharnesses = bounds\n[bounds]\nalpha = 1.5\n";
    CHECK(cli("run " + (dir / "bad.cfg").string() + " --output " + (dir / "bad").string(), dir) == 2);
    CHECK_THAT(slurp(dir / "stderr"), Catch::Matchers::ContainsSubstring("[bounds] alpha"));
    CHECK_FALSE(fs::exists(dir / "bad"));

    std::ofstream(dir / "small.cfg") << small_campaign;
    CHECK(cli("run " + (dir / "small.cfg").string() + " --output " + (dir / "small").string(), dir) == 0);
    CHECK_THAT(slurp(dir / "stdout"), Catch::Matchers::ContainsSubstring("PASS fraccalc"));
    CHECK(cli("run " + (dir / "small.cfg").string() + " --set specfun.laplace_alphas=1.5", dir) == 2);
    CHECK(cli("run " + (dir / "small.cfg").string() + " --dump-config", dir) == 0);
    CHECK(ExperimentConfig::parse(slurp(dir / "stdout")).hash() == ExperimentConfig::parse(small_campaign).hash());
    // a failing verdict sets the exit status
    CHECK(cli("run " + (dir / "small.cfg").string() + " --output " + (dir / "fail").string() +
                  " --set run.harnesses=fraccalc --set fraccalc.semigroup_pairs=0.2:0.3",
              dir) == 1);
    CHECK(cli("frobnicate", dir) != 0);
}

TEST_CASE("cli ad hoc subcommands", "[cli]") {
    const auto dir = scratch("cli_sub");
    CHECK(cli("specfun --alpha 0.5 --beta 1 --x lin:-1:0:3", dir) == 0);
    const auto csv = slurp(dir / "stdout");
    CHECK(csv.rfind("alpha,beta,x,value,flag\n", 0) == 0);
    CHECK_THAT(csv, Catch::Matchers::ContainsSubstring("0.5,1,0,1,0"));

    CHECK(cli("kernel --phi stable:1 --alpha 0.5 --radii log:0.1:10:5 --route both --t-grid log:0.1:10:3 --json " +
                  (dir / "k.json").string(),
              dir) == 0);
    const auto k = json::parse(slurp(dir / "k.json"));
    CHECK(k["two_route_max_rel_error"].get<double>() < 1e-3);
    CHECK(k["bounds"].size() == 2);
    CHECK(cli("kernel --route sideways", dir) == 2);

    CHECK(cli("bounds --phi stable:0.5 --which p,deriv1,tailint --radii log:0.01:100:16 --t-grid log:0.1:10:3", dir) == 0);
    CHECK(json::parse(slurp(dir / "stdout")).size() == 3);

    CHECK(cli("solve --N 16 --Nt 8 --u0 mode:1 --f mode:2 --slices 2 --json " + (dir / "s.json").string(), dir) == 0);
    CHECK(json::parse(slurp(dir / "s.json"))["residual_sup"].get<double>() < 1.0);
    {
        std::ofstream u0(dir / "u0.txt");
        for (int i = 0; i < 16; ++i) u0 << std::sin(i) << "\n";
    }
    CHECK(cli("solve --N 16 --Nt 4 --u0 file:" + (dir / "u0.txt").string(), dir) == 0);
    CHECK(cli("solve --N 32 --Nt 4 --u0 file:" + (dir / "u0.txt").string(), dir) == 2);

    CHECK(cli("norms --alpha 0.8 --N 64 --samples 4", dir) <= 1);
    CHECK(json::parse(slurp(dir / "stdout"))["seeds"].size() == 4);
    CHECK(cli("verify --alpha 0.5 --N 32 --samples 2 --steps 16 --pairs 2:2", dir) <= 1);
    CHECK(json::parse(slurp(dir / "stdout")).size() == 1);

    CHECK(cli("mc --n 100000 --hist " + (dir / "h.csv").string() + " --json " + (dir / "m.json").string(), dir) == 0);
    const auto m = json::parse(slurp(dir / "m.json"));
    CHECK(m["characteristic"]["pass"] == true);
    CHECK(slurp(dir / "h.csv").rfind("lo,hi,empirical,analytic\n", 0) == 0);
    CHECK(cli("mc --alpha 1.5", dir) == 2);
}
