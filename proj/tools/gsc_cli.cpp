// Batch front-end: parses a JSON experiment configuration, dispatches to the
// core modules, and writes machine-readable reports (summary.json + CSVs).
//
// Exit codes: 0 success, 1 invariant violation or runtime failure,
// 2 configuration error.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "gsc/continuum.hpp"
#include "gsc/io.hpp"
#include "gsc/lattice.hpp"
#include "gsc/model.hpp"
#include "gsc/model_config.hpp"
#include "gsc/potential.hpp"
#include "gsc/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace gsc;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = ".";
    int workers = 0;
    std::uint64_t seed = 20250801;
};

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::string text;
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        text = ss.str();
    } else {
        std::ifstream is(path);
        if (!is) throw ConfigError("config: cannot open " + path);
        std::ostringstream ss;
        ss << is.rdbuf();
        text = ss.str();
    }
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
}

void write_summary(const fs::path& out_dir, const json& summary) {
    fs::create_directories(out_dir);
    std::ofstream os(out_dir / "summary.json");
    if (!os) throw std::runtime_error("cannot write summary.json");
    os << summary.dump(2) << "\n";
}

json point_to_json(const FixedPoint& p) {
    json j;
    j["u"] = p.u.values;
    j["v"] = p.v.values;
    j["V"] = p.potential_value;
    j["perf"] = p.perf;
    j["classification"] = fixed_point_class_name(p.cls);
    j["spectral_radius"] = p.spectral_radius;
    return j;
}

json report_to_json(const FixedPointReport& report) {
    json j;
    j["points"] = json::array();
    for (const FixedPoint& p : report.points) j["points"].push_back(point_to_json(p));
    j["good"] = report.good ? json(*report.good) : json(nullptr);
    j["bad"] = report.bad ? json(*report.bad) : json(nullptr);
    j["has_stable"] = report.has_stable();
    return j;
}

void write_potential_profile(const fs::path& out_dir, const SystemModel& model,
                             int samples) {
    const Box& box = model.domain_D();
    const std::size_t n = model.dim();
    std::vector<std::string> header;
    for (std::size_t c = 0; c < n; ++c) header.push_back("u" + std::to_string(c));
    header.push_back("V");
    CsvWriter csv((out_dir / "potential_profile.csv").string(), header);
    const Vec center = box.center();
    for (int i = 0; i < samples; ++i) {
        Vec u = center;
        u[0] = box.lo[0] + box.width(0) * static_cast<double>(i) / (samples - 1);
        std::vector<double> row(u.begin(), u.end());
        row.push_back(potential(model, u));
        csv.row(row);
    }
}

Vec parse_state(const json& cfg, const std::string& path, const char* key,
                std::size_t dim) {
    const auto it = cfg.find(key);
    if (it == cfg.end()) throw ConfigError(path + ": missing key `" + std::string(key) + "`");
    if (!it->is_array())
        throw ConfigError(path + ": key `" + std::string(key) + "` must be an array");
    Vec out;
    for (const auto& v : *it) {
        if (!v.is_number())
            throw ConfigError(path + ": key `" + std::string(key) + "` must hold numbers");
        out.push_back(v.get<double>());
    }
    if (out.size() != dim)
        throw ConfigError(path + ": key `" + std::string(key) + "` has wrong dimension");
    return out;
}

Vec resolve_good_state(const SystemModel& model) {
    const FixedPointReport report = find_fixed_points(model);
    const auto best = report.best_perf_stable();
    if (!best)
        throw std::runtime_error("no stable fixed point to use as the good state");
    return report.points[*best].u.values;
}

Vec resolve_bad_state(const SystemModel& model) {
    const FixedPointReport report = find_fixed_points(model);
    return report.bad ? report.points[*report.bad].u.values : model.domain_D().hi;
}

// ---- fixed-points ----

int cmd_fixed_points(const CommonArgs& common, json cfg) {
    check_allowed_keys(cfg, "$", {"model", "grid_resolution", "profile_points"});
    if (!cfg.contains("model")) throw ConfigError("$: missing key `model`");
    const ModelPtr model = model_from_json(cfg["model"], "$.model");
    const long grid = integer_or(cfg, "$", "grid_resolution", 257);
    const long samples = integer_or(cfg, "$", "profile_points", 513);
    if (grid < 3) throw ConfigError("$: key `grid_resolution` must be >= 3");
    if (samples < 2) throw ConfigError("$: key `profile_points` must be >= 2");

    const FixedPointReport report = find_fixed_points(*model, static_cast<int>(grid));
    write_potential_profile(common.out_dir, *model, static_cast<int>(samples));

    json summary;
    summary["command"] = "fixed-points";
    summary["config"] = {{"model", cfg["model"]},
                         {"grid_resolution", grid},
                         {"profile_points", samples},
                         {"seed", common.seed}};
    summary["results"] = report_to_json(report);
    write_summary(common.out_dir, summary);
    return 0;
}

// ---- threshold ----

int cmd_threshold(const CommonArgs& common, json cfg) {
    check_allowed_keys(cfg, "$",
                       {"family", "kind", "tol", "de_iters", "grid_resolution"});
    if (!cfg.contains("family")) throw ConfigError("$: missing key `family`");
    const ModelFamily family = family_from_json(cfg["family"], "$.family");
    const std::string kind_s = require_string(cfg, "$", "kind");
    ThresholdKind kind;
    if (kind_s == "bp")
        kind = ThresholdKind::BP;
    else if (kind_s == "potential")
        kind = ThresholdKind::Potential;
    else
        throw ConfigError("$: key `kind` must be \"bp\" or \"potential\"");
    const double tol = number_or(cfg, "$", "tol", 1e-3);
    if (!(tol > 0.0)) throw ConfigError("$: key `tol` must be positive");

    ThresholdOptions opts;
    opts.de_iters = static_cast<int>(integer_or(cfg, "$", "de_iters", 10000));
    opts.grid_resolution = static_cast<int>(integer_or(cfg, "$", "grid_resolution", 513));
    const double threshold = threshold_scan(family, kind, tol, opts);

    const ModelPtr at_threshold = family.build(threshold);
    write_potential_profile(common.out_dir, *at_threshold, 513);

    json summary;
    summary["command"] = "threshold";
    summary["config"] = {{"family", cfg["family"]}, {"kind", kind_s},
                         {"tol", tol},             {"de_iters", opts.de_iters},
                         {"grid_resolution", opts.grid_resolution},
                         {"seed", common.seed}};
    summary["results"] = {{"threshold", threshold},
                          {"kind", kind_s},
                          {"fixed_points_at_threshold",
                           report_to_json(find_fixed_points(*at_threshold))}};
    write_summary(common.out_dir, summary);
    return 0;
}

// ---- gsc-run ----

int cmd_gsc_run(const CommonArgs& common, json cfg) {
    check_allowed_keys(cfg, "$",
                       {"model", "k", "l_size", "w", "boundary", "init", "max_iters",
                        "stop_eps", "snapshot_every"});
    if (!cfg.contains("model")) throw ConfigError("$: missing key `model`");
    const ModelPtr model = model_from_json(cfg["model"], "$.model");
    const long k = require_integer(cfg, "$", "k");
    const long l_size = require_integer(cfg, "$", "l_size");
    const long w = require_integer(cfg, "$", "w");
    if (k < 1 || k > kMaxCouplingDim) throw ConfigError("$: key `k` must lie in [1,3]");
    if (l_size < 2) throw ConfigError("$: key `l_size` must be >= 2");
    if (w < 0) throw ConfigError("$: key `w` must be >= 0");

    json boundary_echo = "good";
    Vec boundary;
    if (!cfg.contains("boundary") || (cfg["boundary"].is_string() &&
                                      cfg["boundary"].get<std::string>() == "good")) {
        boundary = resolve_good_state(*model);
    } else if (cfg["boundary"].is_array()) {
        boundary = parse_state(cfg, "$", "boundary", model->dim());
        boundary_echo = cfg["boundary"];
    } else {
        throw ConfigError("$: key `boundary` must be \"good\" or an array");
    }

    GscRunOptions opts;
    json init_echo = "all_bad";
    if (cfg.contains("init") && cfg["init"].is_array()) {
        opts.init = GscInit::Custom;
        opts.custom_init = parse_state(cfg, "$", "init", model->dim());
        init_echo = cfg["init"];
    } else {
        const std::string init_s = string_or(cfg, "$", "init", "all_bad");
        init_echo = init_s;
        if (init_s == "all_bad")
            opts.init = GscInit::AllBad;
        else if (init_s == "all_good")
            opts.init = GscInit::AllGood;
        else
            throw ConfigError("$: key `init` must be \"all_bad\", \"all_good\" or an array");
    }
    opts.max_iters = integer_or(cfg, "$", "max_iters", 100000);
    opts.stop_eps = number_or(cfg, "$", "stop_eps", 1e-10);
    opts.snapshot_every = integer_or(cfg, "$", "snapshot_every", 0);
    if (opts.max_iters < 1) throw ConfigError("$: key `max_iters` must be >= 1");
    if (!(opts.stop_eps >= 0)) throw ConfigError("$: key `stop_eps` must be >= 0");
    if (opts.snapshot_every < 0) throw ConfigError("$: key `snapshot_every` must be >= 0");

    const fs::path out_dir(common.out_dir);
    fs::create_directories(out_dir);
    if (opts.snapshot_every > 0) {
        opts.snapshot = [&](const LatticeField& f) {
            char name[32];
            std::snprintf(name, sizeof(name), "snapshot_%06ld.bin", f.t);
            write_lattice_snapshot((out_dir / name).string(), f);
        };
    }

    const CouplingConfig config = make_coupling_config(
        static_cast<int>(k), static_cast<int>(l_size), static_cast<int>(w),
        VectorState{boundary, Chart::U});
    const GscRunResult run = run_gsc(*model, config, opts);

    CsvWriter history((out_dir / "history.csv").string(),
                      {"iter", "linf_change", "max_perf", "mean_perf"});
    for (const GscHistoryRow& row : run.history)
        history.row({static_cast<double>(row.iter), row.linf_change, row.max_perf,
                     row.mean_perf});

    for (int axis = 0; axis < config.k; ++axis) {
        std::vector<std::string> header{"x", "perf"};
        for (std::size_t c = 0; c < model->dim(); ++c)
            header.push_back("u" + std::to_string(c));
        CsvWriter profile(
            (out_dir / ("profile_axis" + std::to_string(axis) + ".csv")).string(), header);
        for (const ProfileSample& s : profile_extract(*model, run.field, axis)) {
            std::vector<double> row{s.x, s.perf};
            row.insert(row.end(), s.u.begin(), s.u.end());
            profile.row(row);
        }
    }

    json summary;
    summary["command"] = "gsc-run";
    summary["config"] = {{"model", cfg["model"]},
                         {"k", k},
                         {"l_size", l_size},
                         {"w", w},
                         {"boundary", boundary_echo},
                         {"init", init_echo},
                         {"max_iters", opts.max_iters},
                         {"stop_eps", opts.stop_eps},
                         {"snapshot_every", opts.snapshot_every},
                         {"seed", common.seed}};
    summary["results"] = {
        {"converged", run.converged},
        {"iters", run.iters},
        {"m_coeff", config.m_coeff},
        {"final_max_perf", run.history.empty() ? 0.0 : run.history.back().max_perf},
        {"final_mean_perf", run.history.empty() ? 0.0 : run.history.back().mean_perf},
    };
    write_summary(out_dir, summary);
    return 0;
}

// ---- pde-run / conservation-check ----

struct PdeSetup {
    ModelPtr model;
    Chart chart = Chart::VAffine;
    ContinuumField field;
    PdeRunOptions opts;
};

ContinuumField build_pde_field(const SystemModel& model, Chart chart, int k, int n,
                               double m_coeff, const Vec& init_u, const Vec& boundary_u) {
    const Vec interior = chart == Chart::VAffine ? model.grad_G(init_u) : init_u;
    const Vec boundary = chart == Chart::VAffine ? model.grad_G(boundary_u) : boundary_u;
    return ContinuumField(k, n, model.dim(), chart, m_coeff, interior, boundary);
}

int cmd_pde_run(const CommonArgs& common, json cfg, bool conservation_mode) {
    const char* cmd = conservation_mode ? "conservation-check" : "pde-run";
    if (conservation_mode)
        check_allowed_keys(cfg, "$", {"model", "n", "m", "steps", "stop_eps", "dt"});
    else
        check_allowed_keys(cfg, "$",
                           {"model", "k", "n", "m", "chart", "dt", "init", "boundary",
                            "steps", "stop_eps", "snapshot_every", "energy_every"});
    if (!cfg.contains("model")) throw ConfigError("$: missing key `model`");
    const ModelPtr model = model_from_json(cfg["model"], "$.model");

    const long k = conservation_mode ? 1 : require_integer(cfg, "$", "k");
    const long n = require_integer(cfg, "$", "n");
    const double m_coeff = require_number(cfg, "$", "m");
    if (k < 1 || k > kMaxCouplingDim) throw ConfigError("$: key `k` must lie in [1,3]");
    if (n < 3) throw ConfigError("$: key `n` must be >= 3");
    if (!(m_coeff > 0.0)) throw ConfigError("$: key `m` must be positive");

    Chart chart = Chart::VAffine;
    std::string chart_s = "v_affine";
    if (conservation_mode) {
        chart = Chart::UAffine;
        chart_s = "u_affine";
    } else {
        chart_s = string_or(cfg, "$", "chart", "v_affine");
        if (chart_s == "v_affine")
            chart = Chart::VAffine;
        else if (chart_s == "u_affine")
            chart = Chart::UAffine;
        else
            throw ConfigError("$: key `chart` must be \"v_affine\" or \"u_affine\"");
    }

    json boundary_echo = "good";
    Vec boundary_u;
    if (!cfg.contains("boundary") || (cfg.contains("boundary") && cfg["boundary"].is_string() &&
                                      cfg["boundary"].get<std::string>() == "good")) {
        boundary_u = resolve_good_state(*model);
    } else if (cfg.contains("boundary") && cfg["boundary"].is_array()) {
        boundary_u = parse_state(cfg, "$", "boundary", model->dim());
        boundary_echo = cfg["boundary"];
    } else {
        throw ConfigError("$: key `boundary` must be \"good\" or an array");
    }

    json init_echo = "all_bad";
    Vec init_u;
    if (cfg.contains("init") && cfg["init"].is_array()) {
        init_u = parse_state(cfg, "$", "init", model->dim());
        init_echo = cfg["init"];
    } else {
        const std::string init_s = string_or(cfg, "$", "init", "all_bad");
        init_echo = init_s;
        if (init_s == "all_bad")
            init_u = resolve_bad_state(*model);
        else if (init_s == "all_good")
            init_u = boundary_u;
        else
            throw ConfigError("$: key `init` must be \"all_bad\", \"all_good\" or an array");
    }

    PdeRunOptions opts;
    opts.dt = number_or(cfg, "$", "dt", 0.0);
    opts.max_steps = integer_or(cfg, "$", "steps", 500000);
    opts.stop_eps = number_or(cfg, "$", "stop_eps", 1e-12);
    opts.energy_every = conservation_mode ? 1 : integer_or(cfg, "$", "energy_every", 1);
    opts.monitor_energy = !conservation_mode;
    const long snapshot_every =
        conservation_mode ? 0 : integer_or(cfg, "$", "snapshot_every", 0);
    if (opts.max_steps < 1) throw ConfigError("$: key `steps` must be >= 1");
    if (opts.dt < 0.0) throw ConfigError("$: key `dt` must be positive");
    if (opts.energy_every < 1) throw ConfigError("$: key `energy_every` must be >= 1");
    if (snapshot_every < 0) throw ConfigError("$: key `snapshot_every` must be >= 0");

    const fs::path out_dir(common.out_dir);
    fs::create_directories(out_dir);
    if (snapshot_every > 0) {
        opts.snapshot_every = snapshot_every;
        opts.snapshot = [&](const ContinuumField& f, long step) {
            char name[32];
            std::snprintf(name, sizeof(name), "snapshot_%06ld.bin", step);
            write_grid_snapshot((out_dir / name).string(), f);
        };
    }

    ContinuumField field = build_pde_field(*model, chart, static_cast<int>(k),
                                           static_cast<int>(n), m_coeff, init_u,
                                           boundary_u);
    const PdeRunResult run = run_pde(*model, std::move(field), opts);

    if (!conservation_mode) {
        CsvWriter energy((out_dir / "energy.csv").string(),
                         {"step", "H", "max_residual"});
        for (const PdeHistoryRow& row : run.history)
            energy.row({static_cast<double>(row.step), row.energy, row.max_residual});

        for (int axis = 0; axis < run.field.k(); ++axis) {
            std::vector<std::string> header{"x"};
            const char* vname = chart == Chart::VAffine ? "v_tilde" : "u_tilde";
            const char* pname = chart == Chart::VAffine ? "u" : "v";
            for (std::size_t c = 0; c < model->dim(); ++c)
                header.push_back(std::string(vname) + std::to_string(c));
            for (std::size_t c = 0; c < model->dim(); ++c)
                header.push_back(std::string(pname) + std::to_string(c));
            header.push_back("perf");
            CsvWriter profile(
                (out_dir / ("profile_axis" + std::to_string(axis) + ".csv")).string(),
                header);
            for (const ContinuumProfileSample& s :
                 continuum_profile(*model, run.field, axis)) {
                std::vector<double> row{s.x};
                row.insert(row.end(), s.value.begin(), s.value.end());
                row.insert(row.end(), s.preimage.begin(), s.preimage.end());
                row.push_back(s.perf);
                profile.row(row);
            }
        }
    }

    json results;
    results["converged"] = run.converged;
    results["steps"] = run.steps;
    results["dt"] = run.dt;
    results["final_energy"] = run.final_energy;
    if (!conservation_mode) results["max_energy_increase"] = run.max_energy_increase;

    if (run.field.k() == 1) {
        const ContinuumField* u_field = &run.field;
        ContinuumField transformed = run.field;
        if (run.field.chart() == Chart::VAffine) {
            transformed = transform_to_u_chart(*model, run.field);
            u_field = &transformed;
        }
        const ConservationResult cons = conservation_check(*model, *u_field);
        CsvWriter ccsv((out_dir / "conservation.csv").string(), {"x", "E"});
        for (std::size_t i = 0; i < cons.energy.size(); ++i)
            ccsv.row({u_field->x_of(static_cast<int>(i)), cons.energy[i]});
        results["conservation_max_drift"] = cons.max_drift;
        results["boundary_energy"] = cons.boundary_energy;
        results["bvp_residual_sup"] = linf_norm(bvp_residual(*model, *u_field));
    }

    json summary;
    summary["command"] = cmd;
    json config_echo = {{"model", cfg["model"]}, {"n", n},
                        {"m", m_coeff},          {"steps", opts.max_steps},
                        {"stop_eps", opts.stop_eps}, {"dt", opts.dt},
                        {"seed", common.seed}};
    if (!conservation_mode) {
        config_echo["k"] = k;
        config_echo["chart"] = chart_s;
        config_echo["init"] = init_echo;
        config_echo["boundary"] = boundary_echo;
        config_echo["snapshot_every"] = snapshot_every;
        config_echo["energy_every"] = opts.energy_every;
    }
    summary["config"] = config_echo;
    summary["results"] = results;
    write_summary(out_dir, summary);
    return 0;
}

// ---- verify ----

int cmd_verify(const CommonArgs& common, json cfg, bool quick_flag) {
    check_allowed_keys(cfg, "$", {"quick"});
    VerifyOptions opts;
    opts.seed = common.seed;
    opts.quick = quick_flag || (cfg.contains("quick") && cfg["quick"].is_boolean() &&
                                cfg["quick"].get<bool>());
    const std::vector<Check> checks = run_verify(opts);

    json summary;
    summary["command"] = "verify";
    summary["config"] = {{"quick", opts.quick}, {"seed", common.seed}};
    summary["checks"] = json::array();
    for (const Check& c : checks) {
        summary["checks"].push_back({{"name", c.name},
                                     {"measured", c.measured},
                                     {"bound", c.bound},
                                     {"comparison", c.cmp == CheckCmp::LE ? "<=" : ">="},
                                     {"pass", c.pass}});
    }
    const bool ok = all_pass(checks);
    summary["results"] = {{"pass", ok},
                          {"total", checks.size()},
                          {"failed", std::count_if(checks.begin(), checks.end(),
                                                   [](const Check& c) { return !c.pass; })}};
    write_summary(common.out_dir, summary);

    for (const Check& c : checks) {
        std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << "  measured="
                  << format_double(c.measured)
                  << (c.cmp == CheckCmp::LE ? " <= " : " >= ") << format_double(c.bound)
                  << "\n";
    }
    return ok ? 0 : 1;
}

json family_from_compact(const std::string& compact) {
    // "regular_bec:3,6" convenience form
    const auto colon = compact.find(':');
    if (colon == std::string::npos)
        throw ConfigError("--model: expected form regular_bec:L,R");
    const std::string type = compact.substr(0, colon);
    const std::string rest = compact.substr(colon + 1);
    const auto comma = rest.find(',');
    if (type != "regular_bec" || comma == std::string::npos)
        throw ConfigError("--model: expected form regular_bec:L,R");
    json fam;
    fam["type"] = type;
    try {
        fam["l"] = std::stol(rest.substr(0, comma));
        fam["r"] = std::stol(rest.substr(comma + 1));
    } catch (const std::exception&) {
        throw ConfigError("--model: bad degree pair in `" + compact + "`");
    }
    return fam;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spatially-coupled density-evolution toolkit"};
    app.require_subcommand(1);

    CommonArgs common;
    std::string threshold_kind, threshold_model;
    double threshold_tol = 0.0;
    bool verify_quick = false;

    const auto add_common = [&common](CLI::App* sub) {
        sub->add_option("--config", common.config_path,
                        "JSON config file ('-' for stdin)");
        sub->add_option("--out", common.out_dir, "output directory");
        sub->add_option("--workers", common.workers, "cap on parallel workers");
        sub->add_option("--seed", common.seed, "seed for sampling-based checks");
    };

    CLI::App* fixed_points = app.add_subcommand("fixed-points", "scan for DE fixed points");
    add_common(fixed_points);
    CLI::App* threshold = app.add_subcommand("threshold", "bisection threshold scan");
    add_common(threshold);
    threshold->add_option("--kind", threshold_kind, "bp or potential");
    threshold->add_option("--model", threshold_model, "family, e.g. regular_bec:3,6");
    threshold->add_option("--tol", threshold_tol, "bisection tolerance");
    CLI::App* gsc_run = app.add_subcommand("gsc-run", "coupled lattice simulation");
    add_common(gsc_run);
    CLI::App* pde_run = app.add_subcommand("pde-run", "continuum gradient-flow run");
    add_common(pde_run);
    CLI::App* conservation =
        app.add_subcommand("conservation-check", "stationary profile conservation law");
    add_common(conservation);
    CLI::App* verify = app.add_subcommand("verify", "run the invariant suite");
    add_common(verify);
    verify->add_flag("--quick", verify_quick, "skip the minutes-scale experiments");

    CLI11_PARSE(app, argc, argv);

    try {
        set_worker_count(common.workers);
        json cfg = load_config(common.config_path);
        fs::create_directories(common.out_dir);

        if (threshold->parsed()) {
            if (!threshold_kind.empty()) cfg["kind"] = threshold_kind;
            if (!threshold_model.empty()) cfg["family"] = family_from_compact(threshold_model);
            if (threshold_tol > 0.0) cfg["tol"] = threshold_tol;
            return cmd_threshold(common, std::move(cfg));
        }
        if (fixed_points->parsed()) return cmd_fixed_points(common, std::move(cfg));
        if (gsc_run->parsed()) return cmd_gsc_run(common, std::move(cfg));
        if (pde_run->parsed()) return cmd_pde_run(common, std::move(cfg), false);
        if (conservation->parsed()) return cmd_pde_run(common, std::move(cfg), true);
        if (verify->parsed()) return cmd_verify(common, std::move(cfg), verify_quick);
        std::cerr << "error: no subcommand\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
