#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
    int exit_code;
    std::string out;
    std::string err;
};

fs::path scratch_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "gsc_cli_test";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

RunResult run_cli(const std::string& args, const std::string& stdin_text = "") {
    const fs::path dir = scratch_dir();
    const fs::path out = dir / "stdout.txt";
    const fs::path err = dir / "stderr.txt";
    std::string cmd = std::string(GSC_CLI_PATH) + " " + args;
    if (!stdin_text.empty()) {
        const fs::path in = dir / "stdin.json";
        std::ofstream(in) << stdin_text;
        cmd += " < " + in.string();
    }
    cmd += " > " + out.string() + " 2> " + err.string();
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WEXITSTATUS(status);
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

fs::path write_config(const char* name, const json& cfg) {
    const fs::path p = scratch_dir() / name;
    std::ofstream(p) << cfg.dump();
    return p;
}

json bec_model(double eps) {
    return {{"type", "regular_bec"}, {"l", 3}, {"r", 6}, {"eps", eps}};
}

}  // namespace

TEST_CASE("fixed-points writes a report and a profile with headers") {
    const fs::path cfg = write_config("fp.json", {{"model", bec_model(0.45)}});
    const fs::path out = scratch_dir() / "fp_out";
    const RunResult r =
        run_cli("fixed-points --config " + cfg.string() + " --out " + out.string());
    CHECK(r.exit_code == 0);

    const json summary = json::parse(slurp(out / "summary.json"));
    CHECK(summary["command"] == "fixed-points");
    CHECK(summary["config"]["model"]["eps"] == 0.45);
    CHECK(summary["results"]["points"].size() == 3);
    CHECK(summary["results"]["good"] == 0);

    std::ifstream profile(out / "potential_profile.csv");
    std::string header;
    std::getline(profile, header);
    CHECK(header == "u0,V");
}

TEST_CASE("threshold accepts the compact flag form") {
    const fs::path out = scratch_dir() / "th_out";
    const RunResult r = run_cli(
        "threshold --kind bp --model regular_bec:3,6 --tol 1e-3 --out " + out.string());
    CHECK(r.exit_code == 0);
    const json summary = json::parse(slurp(out / "summary.json"));
    const double th = summary["results"]["threshold"].get<double>();
    CHECK(std::abs(th - 0.4294) < 2e-3);
}

TEST_CASE("config errors name the offending key and exit 2") {
    SUBCASE("negative window") {
        const fs::path cfg = write_config(
            "bad_w.json", {{"model", bec_model(0.46)}, {"k", 1}, {"l_size", 8}, {"w", -1}});
        const RunResult r =
            run_cli("gsc-run --config " + cfg.string() + " --out " +
                    (scratch_dir() / "w_out").string());
        CHECK(r.exit_code == 2);
        CHECK(r.err.find("`w`") != std::string::npos);
    }
    SUBCASE("unknown key") {
        const fs::path cfg = write_config(
            "bad_key.json",
            {{"model", bec_model(0.46)}, {"k", 1}, {"l_size", 8}, {"w", 1}, {"wprime", 2}});
        const RunResult r =
            run_cli("gsc-run --config " + cfg.string() + " --out " +
                    (scratch_dir() / "k_out").string());
        CHECK(r.exit_code == 2);
        CHECK(r.err.find("wprime") != std::string::npos);
    }
    SUBCASE("unknown model type") {
        const fs::path cfg = write_config(
            "bad_model.json", {{"model", {{"type", "mystery"}}}});
        const RunResult r =
            run_cli("fixed-points --config " + cfg.string() + " --out " +
                    (scratch_dir() / "m_out").string());
        CHECK(r.exit_code == 2);
        CHECK(r.err.find("mystery") != std::string::npos);
    }
    SUBCASE("invalid json") {
        const fs::path p = scratch_dir() / "broken.json";
        std::ofstream(p) << "{ not json";
        const RunResult r = run_cli("fixed-points --config " + p.string() + " --out " +
                                    (scratch_dir() / "j_out").string());
        CHECK(r.exit_code == 2);
    }
}

TEST_CASE("config can come from standard input") {
    const fs::path out = scratch_dir() / "stdin_out";
    const RunResult r = run_cli("fixed-points --config - --out " + out.string(),
                                json({{"model", bec_model(0.40)}}).dump());
    CHECK(r.exit_code == 0);
    const json summary = json::parse(slurp(out / "summary.json"));
    CHECK(summary["results"]["points"].size() == 1);
}

TEST_CASE("identical config and seed give byte-identical summaries") {
    const fs::path cfg = write_config("det.json", {{"model", bec_model(0.47)}});
    const fs::path out1 = scratch_dir() / "det1";
    const fs::path out2 = scratch_dir() / "det2";
    CHECK(run_cli("fixed-points --config " + cfg.string() + " --seed 99 --out " +
                  out1.string())
              .exit_code == 0);
    CHECK(run_cli("fixed-points --config " + cfg.string() + " --seed 99 --out " +
                  out2.string())
              .exit_code == 0);
    CHECK(slurp(out1 / "summary.json") == slurp(out2 / "summary.json"));
    CHECK(slurp(out1 / "potential_profile.csv") == slurp(out2 / "potential_profile.csv"));
}

TEST_CASE("gsc-run emits history and per-axis profiles") {
    const fs::path cfg = write_config("run.json", {{"model", bec_model(0.46)},
                                                   {"k", 2},
                                                   {"l_size", 6},
                                                   {"w", 1},
                                                   {"boundary", {0.0}},
                                                   {"init", "all_bad"},
                                                   {"snapshot_every", 5}});
    const fs::path out = scratch_dir() / "run_out";
    const RunResult r = run_cli("gsc-run --config " + cfg.string() + " --out " + out.string());
    CHECK(r.exit_code == 0);

    const json summary = json::parse(slurp(out / "summary.json"));
    CHECK(summary["results"]["converged"] == true);
    CHECK(summary["results"]["final_max_perf"].get<double>() < 1e-6);

    std::ifstream history(out / "history.csv");
    std::string header;
    std::getline(history, header);
    CHECK(header == "iter,linf_change,max_perf,mean_perf");

    CHECK(fs::exists(out / "profile_axis0.csv"));
    CHECK(fs::exists(out / "profile_axis1.csv"));
    CHECK(fs::exists(out / "snapshot_000005.bin"));
}

TEST_CASE("pde-run emits energy, profile and conservation files") {
    const fs::path cfg = write_config("pde.json", {{"model", bec_model(0.46)},
                                                   {"k", 1},
                                                   {"n", 33},
                                                   {"m", 1e-2},
                                                   {"boundary", {0.0}},
                                                   {"init", "all_bad"},
                                                   {"steps", 100000}});
    const fs::path out = scratch_dir() / "pde_out";
    const RunResult r = run_cli("pde-run --config " + cfg.string() + " --out " + out.string());
    CHECK(r.exit_code == 0);

    const json summary = json::parse(slurp(out / "summary.json"));
    CHECK(summary["results"]["converged"] == true);
    CHECK(summary["results"]["max_energy_increase"].get<double>() <= 1e-9);

    std::ifstream energy(out / "energy.csv");
    std::string header;
    std::getline(energy, header);
    CHECK(header == "step,H,max_residual");

    std::ifstream profile(out / "profile_axis0.csv");
    std::getline(profile, header);
    CHECK(header == "x,v_tilde0,u0,perf");

    std::ifstream cons(out / "conservation.csv");
    std::getline(cons, header);
    CHECK(header == "x,E");
}

TEST_CASE("conservation-check reports drift for the stationary dual profile") {
    const fs::path cfg = write_config(
        "cons.json",
        {{"model", bec_model(0.50)}, {"n", 65}, {"m", 1e-3}, {"steps", 500000}});
    const fs::path out = scratch_dir() / "cons_out";
    const RunResult r =
        run_cli("conservation-check --config " + cfg.string() + " --out " + out.string());
    CHECK(r.exit_code == 0);
    const json summary = json::parse(slurp(out / "summary.json"));
    CHECK(summary["results"]["converged"] == true);
    CHECK(summary["results"]["conservation_max_drift"].get<double>() < 0.01);
    CHECK(summary["results"]["bvp_residual_sup"].get<double>() < 1e-8);
}

TEST_CASE("missing subcommand or config fails cleanly") {
    const RunResult r = run_cli("fixed-points --out " + (scratch_dir() / "none").string());
    CHECK(r.exit_code == 2);  // empty config lacks `model`
    CHECK(r.err.find("model") != std::string::npos);
}

TEST_CASE("vector models get one profile column per component") {
    const json product = {{"type", "product"},
                          {"components", {bec_model(0.45), bec_model(0.50)}}};
    const fs::path cfg = write_config("prod.json", {{"model", product}});
    const fs::path out = scratch_dir() / "prod_out";
    const RunResult r =
        run_cli("fixed-points --config " + cfg.string() + " --out " + out.string());
    CHECK(r.exit_code == 0);
    std::ifstream profile(out / "potential_profile.csv");
    std::string header;
    std::getline(profile, header);
    CHECK(header == "u0,u1,V");
    const json summary = json::parse(slurp(out / "summary.json"));
    CHECK(summary["results"]["points"].size() == 9);
}

TEST_CASE("results are byte-identical across worker counts") {
    const fs::path cfg = write_config("workers.json", {{"model", bec_model(0.46)},
                                                       {"k", 2},
                                                       {"l_size", 8},
                                                       {"w", 2},
                                                       {"boundary", {0.0}},
                                                       {"init", "all_bad"}});
    const fs::path out1 = scratch_dir() / "w1";
    const fs::path out2 = scratch_dir() / "w2";
    CHECK(run_cli("gsc-run --config " + cfg.string() + " --workers 1 --out " +
                  out1.string())
              .exit_code == 0);
    CHECK(run_cli("gsc-run --config " + cfg.string() + " --workers 2 --out " +
                  out2.string())
              .exit_code == 0);
    CHECK(slurp(out1 / "history.csv") == slurp(out2 / "history.csv"));
    CHECK(slurp(out1 / "profile_axis0.csv") == slurp(out2 / "profile_axis0.csv"));
    CHECK(slurp(out1 / "summary.json") == slurp(out2 / "summary.json"));
}

TEST_CASE("quick verify passes and lists measured slack per check") {
    const fs::path out = scratch_dir() / "verify_out";
    const RunResult r = run_cli("verify --quick --seed 20250801 --out " + out.string());
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("PASS") != std::string::npos);
    CHECK(r.out.find("FAIL") == std::string::npos);
    const json summary = json::parse(slurp(out / "summary.json"));
    CHECK(summary["results"]["pass"] == true);
    CHECK(summary["checks"].size() > 40);
    for (const auto& c : summary["checks"]) {
        CHECK(c.contains("measured"));
        CHECK(c.contains("bound"));
    }
}
