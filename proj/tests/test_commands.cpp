#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "zenopure/commands.hpp"

using namespace zenopure;

namespace {

const std::string kData = ZENOPURE_TEST_DATA_DIR;

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(const std::string& name, const ExperimentConfig& cfg, const RunOptions& opts = {}) {
    std::ostringstream out, err;
    const int code = run_command(name, cfg, opts, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

// first column -> second column, for key,value style reports
std::map<std::string, std::string> keyed(const std::string& text) {
    std::map<std::string, std::string> m;
    for (const auto& r : csv_rows(text))
        if (r.size() >= 2) m.emplace(r[0], r[1]);
    return m;
}

struct EnvGuard {
    explicit EnvGuard(const char* value) { setenv("ZENOPURE_TOL", value, 1); }
    ~EnvGuard() { unsetenv("ZENOPURE_TOL"); }
};

}  // namespace

TEST_CASE("spectrum") {
    SUBCASE("reference configuration") {
        const Run r = run("spectrum", figure1_config());
        CHECK(r.code == kExitOk);
        const auto k = keyed(r.out);
        CHECK(std::abs(std::stod(k.at("lambda0")) - 1.0) < 1e-6);
        CHECK(k.at("condition_I_met") == "true");
        CHECK(k.at("degenerate") == "false");
        CHECK(std::stod(k.at("gap_ratio")) == doctest::Approx(0.5).epsilon(1e-5));
        CHECK(std::stod(k.at("closed_form_abs_exp_c")) == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("uncoupled oscillators are degenerate") {
        auto cfg = figure1_config();
        cfg.oscillator.g = 0.0;
        cfg.oscillator.cutoff_a = cfg.oscillator.cutoff_b = 10;
        const Run r = run("spectrum", cfg);
        CHECK(r.code == kExitDegenerate);
        CHECK(keyed(r.out).at("degenerate") == "true");
    }
    SUBCASE("explicit diagonal propagator") {
        const Run r = run("spectrum", load_config(kData + "/diag_propagator.cfg"));
        CHECK(r.code == kExitOk);
        const auto k = keyed(r.out);
        CHECK(std::stod(k.at("gap_ratio")) == doctest::Approx(0.5 / 0.9).epsilon(1e-10));
        CHECK(std::stod(k.at("lambda0")) == doctest::Approx(0.9).epsilon(1e-10));
        CHECK(std::stod(k.at("yield_plateau_coefficient")) == doctest::Approx(0.5).epsilon(1e-10));
    }
}

TEST_CASE("purify") {
    SUBCASE("reference golden file") {
        const Run r = run("purify", figure1_config());
        REQUIRE(r.code == kExitOk);
        std::ifstream in(kData + "/figure1_golden.csv");
        REQUIRE(in.good());
        std::stringstream golden;
        golden << in.rdbuf();
        const auto got = csv_rows(r.out);
        const auto want = csv_rows(golden.str());
        REQUIRE(got.size() == want.size());
        REQUIRE(got.size() == 12);
        CHECK(got[0] == want[0]);
        for (std::size_t i = 1; i < got.size(); ++i) {
            REQUIRE(got[i].size() == 6);
            CHECK(got[i][0] == want[i][0]);
            for (std::size_t c = 1; c < 6; ++c) {
                const double a = std::stod(got[i][c]);
                const double b = std::stod(want[i][c]);
                CHECK_MESSAGE(std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)), "row ", i, " col ", c);
            }
        }
        double prev_yield = 2.0;
        for (std::size_t i = 1; i < got.size(); ++i) {
            const double y = std::stod(got[i][2]);
            CHECK(y <= prev_yield);
            prev_yield = y;
        }
        CHECK(std::stod(got.back()[3]) > 0.999);
    }
    SUBCASE("identity propagator gives constant rows") {
        std::ofstream(std::string("identity_v.txt")) << "1 2\n1 0 0 0\n0 0 1 0\n";
        const auto cfg = parse_config(
            "n_steps = 4\n[model]\nkind = explicit-matrix\nmatrix_file = identity_v.txt\n"
            "matrix_kind = propagator\nprobe = 1 0\n");
        const Run r = run("purify", cfg);
        CHECK(r.code == kExitOk);
        const auto rows = csv_rows(r.out);
        REQUIRE(rows.size() == 6);
        for (std::size_t i = 1; i < rows.size(); ++i) {
            CHECK(rows[i][1] == "1");
            CHECK(rows[i][2] == "1");
            CHECK(rows[i][4] == "0.5");
        }
    }
    SUBCASE("near-ground start already overlaps the target") {
        auto cfg = figure1_config();
        cfg.oscillator.beta = 100.0;
        cfg.n_steps = 1;
        const Run r = run("purify", cfg);
        CHECK(r.code == kExitOk);
        const auto rows = csv_rows(r.out);
        CHECK(std::stod(rows[1][3]) == doctest::Approx(std::exp(-0.25)).epsilon(1e-12));
    }
    SUBCASE("extinct branch is a comment line") {
        std::ofstream(std::string("projector_v.txt")) << "1 2\n1 0 0 0\n0 0 0 0\n";
        const auto cfg = parse_config(
            "n_steps = 4\ninitial_state = fock:1\n[model]\nkind = explicit-matrix\n"
            "matrix_file = projector_v.txt\nmatrix_kind = propagator\nprobe = 1 0\n");
        const Run r = run("purify", cfg);
        CHECK(r.code == kExitOk);
        CHECK(r.out.find("# extinct branch at N=1") != std::string::npos);
    }
}

TEST_CASE("compare") {
    SUBCASE("reference configuration passes") {
        const Run r = run("compare", figure1_config());
        CHECK_MESSAGE(r.code == kExitOk, r.out);
        const auto k = keyed(r.out);
        CHECK(std::stod(k.at("gap_ratio_numeric")) == doctest::Approx(0.5).epsilon(1e-5));
        CHECK(std::stod(k.at("gap_ratio_closed_form")) == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(k.count("gap_ratio_reference_unasserted") == 1);
    }
    SUBCASE("small cutoff breaches") {
        RunOptions o;
        o.cutoff = 6;
        const Run r = run("compare", figure1_config(), o);
        CHECK(r.code == kExitToleranceBreach);
        CHECK(r.out.find("breach") != std::string::npos);
    }
    SUBCASE("uncoupled detuned oscillators agree exactly") {
        auto full = figure1_config();
        full.oscillator.g = 0.0;
        full.oscillator.big_omega = 2.0;
        full.tau = 1.3;
        const Run r = run("compare", full);
        CHECK(r.code == kExitOk);
        for (const auto& row : csv_rows(r.out)) {
            if (row.size() == 4 && row[0] != "check" && row[3] == "ok") {
                CHECK_MESSAGE(std::stod(row[1]) <= 1e-12, row[0]);
            }
        }
        CHECK(r.out.find("skipped") != std::string::npos);
    }
    SUBCASE("explicit model is a config error") {
        const Run r = run("compare", load_config(kData + "/diag_propagator.cfg"));
        CHECK(r.code == kExitConfigError);
    }
    SUBCASE("degenerate interval") {
        auto cfg = figure1_config();
        cfg.tau = M_PI / 0.2;
        cfg.oscillator.cutoff_a = cfg.oscillator.cutoff_b = 8;
        CHECK(run("compare", cfg).code == kExitDegenerate);
    }
}

TEST_CASE("tolerance override") {
    RunOptions o;
    {
        EnvGuard env("1e-300");
        CHECK(run("compare", figure1_config(), o).code == kExitToleranceBreach);
    }
    {
        EnvGuard env("1.0");
        CHECK(run("compare", figure1_config(), o).code == kExitOk);
    }
    o.cutoff = 6;
    {
        EnvGuard env("not-a-number");
        CHECK(run("compare", figure1_config(), o).code == kExitConfigError);
    }
    o.tol = 1e-300;
    CHECK(run("compare", figure1_config(), o).code == kExitToleranceBreach);
}

TEST_CASE("zeno") {
    SUBCASE("decoupled model has unit yield") {
        std::ofstream(std::string("decoupled_h.txt")) << "1 3\n0 0 0 0 0 0\n0 0 1 0 0 0\n0 0 0 0 2.5 0\n";
        const auto cfg = parse_config(
            "total_time = 3\nzeno_n = 1,2,4\n[model]\nkind = explicit-matrix\n"
            "matrix_file = decoupled_h.txt\nprobe = 1 0\n");
        const Run r = run("zeno", cfg);
        CHECK(r.code == kExitOk);
        const auto rows = csv_rows(r.out);
        REQUIRE(rows.size() == 4);
        for (std::size_t i = 1; i < rows.size(); ++i) {
            CHECK(std::stod(rows[i][2]) == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(std::stod(rows[i][3]) < 1e-12);
        }
    }
    SUBCASE("missing scan settings") {
        auto cfg = figure1_config();
        cfg.total_time.reset();
        CHECK(run("zeno", cfg).code == kExitConfigError);
    }
    SUBCASE("jobs do not change the output") {
        RunOptions one, two;
        one.cutoff = two.cutoff = 12;
        two.jobs = 2;
        const Run a = run("zeno", figure1_config(), one);
        const Run b = run("zeno", figure1_config(), two);
        CHECK(a.code == kExitOk);
        CHECK(a.out == b.out);
    }
}

TEST_CASE("figure1 and determinism") {
    RunOptions o;
    o.cutoff = 20;
    o.steps = 4;
    o.seed = 17;
    const Run a = run("figure1", ExperimentConfig{}, o);
    const Run b = run("figure1", ExperimentConfig{}, o);
    CHECK(a.code == kExitOk);
    CHECK(a.out == b.out);
    CHECK(csv_rows(a.out).size() == 6);

    const Run s1 = run("spectrum", figure1_config(), o);
    const Run s2 = run("spectrum", figure1_config(), o);
    CHECK(s1.out == s2.out);
}

TEST_CASE("overrides and dispatch errors") {
    RunOptions o;
    o.steps = 0;
    CHECK(run("purify", figure1_config(), o).code == kExitConfigError);
    CHECK(run("bogus", figure1_config()).code == kExitConfigError);
    RunOptions c;
    c.cutoff = 4;
    CHECK_THROWS_AS(apply_overrides(load_config(kData + "/diag_propagator.cfg"), c), ConfigError);
    const auto cfg = apply_overrides(figure1_config(), c);
    CHECK(cfg.oscillator.cutoff_a == 4);
    // below the cutoff floor for |alpha| = 0.5
    CHECK(run("spectrum", cfg).code == kExitConfigError);
}
