#include "tdscha/cli_runner.hpp"

#include "tdscha/config.hpp"
#include "tdscha/errors.hpp"
#include "tdscha/minimal_model.hpp"
#include "tdscha/scha.hpp"
#include "tdscha/tensor_io.hpp"
#include "tdscha/toy_model.hpp"
#include "tdscha/trajectory_io.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <memory>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <thread>

namespace tdscha {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using clock_type = std::chrono::steady_clock;

int log_level() {
    static const int level = [] {
        const char* env = std::getenv("TDSCHA_SIM_LOG");
        if (!env)
            return 1;
        const std::string v(env);
        if (v == "quiet" || v == "0")
            return 0;
        if (v == "debug" || v == "2")
            return 2;
        return 1;
    }();
    return level;
}

void log_info(const std::string& msg) {
    if (log_level() >= 1)
        std::cerr << "[tdscha-sim] " << msg << "\n";
}

void log_debug(const std::string& msg) {
    if (log_level() >= 2)
        std::cerr << "[tdscha-sim] " << msg << "\n";
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_short(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

struct Ctx {
    json config;
    ConfigView cfg;
    UnitSystem units;
    bool physical = true;
    fs::path out_dir;
    int workers = 1;
    std::uint64_t seed = 0;
    bool seed_set = false;

    json tasks = json::array();
    std::vector<std::string> outputs;
    std::mutex mtx;

    explicit Ctx(json c) : config(std::move(c)), cfg(config) {}

    double time_in(double v) const { return physical ? units.time_from_fs(v) : v; }

    void record_task(const std::string& name, bool ok, double wall_ms,
                     const std::string& error) {
        std::lock_guard<std::mutex> lock(mtx);
        json t;
        t["name"] = name;
        t["status"] = ok ? "ok" : "failed";
        t["wall_ms"] = wall_ms;
        if (!ok)
            t["error"] = error;
        tasks.push_back(t);
    }

    void record_output(const fs::path& p) {
        std::lock_guard<std::mutex> lock(mtx);
        outputs.push_back(p.string());
    }
};

UnitSystem units_from_config(const ConfigView& cfg, bool& physical) {
    const std::string preset = cfg.str("units.preset", "physical");
    if (preset == "physical") {
        physical = true;
        return physical_units();
    }
    if (preset == "natural") {
        physical = false;
        return natural_units(cfg.num("units.hbar", 1.0), cfg.num("units.kB", 1.0));
    }
    throw InputError("units.preset must be 'physical' or 'natural'");
}

// ---- model handling -------------------------------------------------------

struct ModelBundle {
    QuarticPES pes{1};
    ModeBasis basis;
    std::optional<ToyModel> toy;
    double x0_scale = 0.0; // displacement scale for summaries when known
};

ToyModelParams toy_params_from_config(const Ctx& ctx) {
    ToyModelParams p = default_toy_params(ctx.units);
    const ConfigView& cfg = ctx.cfg;
    p.n_bath = cfg.integer("toy.n_bath", p.n_bath);
    p.x0 = cfg.num("toy.x0", p.x0);
    p.v0 = cfg.num("toy.v0", p.v0);
    p.omega_fe_bare = cfg.num("toy.omega_fe_bare", 2.0 * std::sqrt(p.v0) / p.x0);
    p.omega_ir = cfg.num("toy.omega_ir", p.omega_ir);
    p.omega_afd = cfg.num("toy.omega_afd", p.omega_afd);
    p.band_lo = cfg.num("toy.band_lo", p.band_lo);
    p.band_hi = cfg.num("toy.band_hi", p.band_hi);
    p.chi_ir = cfg.num("toy.chi_ir", p.chi_ir);
    p.chi_fe = cfg.num("toy.chi_fe", p.chi_fe);
    p.beta = cfg.num("toy.beta", p.beta);
    p.stab_ir = cfg.num("toy.stab_ir", p.stab_ir);
    p.stab_bath = cfg.num("toy.stab_bath", p.stab_bath);
    p.zeff_ir = cfg.num("toy.zeff_ir", p.zeff_ir);
    p.seed_fe = cfg.num("toy.seed_fe", p.seed_fe);
    p.detune = cfg.num("toy.detune", p.detune);
    p.fe_band_lo = cfg.num("toy.fe_band_lo", p.fe_band_lo);
    p.fe_band_hi = cfg.num("toy.fe_band_hi", p.fe_band_hi);
    if (ctx.cfg.has("toy.seed"))
        p.seed = static_cast<std::uint64_t>(cfg.integer("toy.seed", 0));
    else if (ctx.seed_set)
        p.seed = ctx.seed;
    return p;
}

ModelBundle make_model(const Ctx& ctx) {
    const bool has_file = ctx.cfg.has("model.file");
    const bool is_toy = ctx.cfg.flag("model.toy", false);
    if (has_file == is_toy)
        throw InputError("exactly one of model.file and model.toy = true is required");

    ModelBundle out;
    if (is_toy) {
        const ToyModelParams params = toy_params_from_config(ctx);
        out.toy = build_toy_sto(params, ctx.units);
        out.pes = out.toy->pes;
        out.basis = out.toy->basis;
        out.x0_scale = params.x0;
        return out;
    }

    const PesFile file = load_pes(ctx.cfg.req_str("model.file"));
    out.pes = file.pes;
    const int n = out.pes.dim();
    out.basis.eigvecs = Eigen::MatrixXd::Identity(n, n);
    out.basis.freqs = Eigen::VectorXd::Zero(n);
    if (ctx.cfg.has("model.labels")) {
        const json* labels = &ctx.cfg.root()["model"]["labels"];
        if (!labels->is_array())
            throw InputError("model.labels must be a string list");
        for (const auto& l : *labels)
            out.basis.labels.push_back(l.get<std::string>());
        if (static_cast<int>(out.basis.labels.size()) != n)
            throw InputError("model.labels length must equal the model dimension");
    }
    const std::vector<double> zeff = ctx.cfg.num_list("model.zeff");
    if (!zeff.empty()) {
        if (static_cast<int>(zeff.size()) != n)
            throw InputError("model.zeff length must equal the model dimension");
        out.basis.zeff = Eigen::Map<const Eigen::VectorXd>(zeff.data(), n);
    }
    out.basis.validate();
    out.x0_scale = ctx.cfg.num("summary.x0", 0.0);
    return out;
}

std::optional<Pulse> make_pulse(const Ctx& ctx) {
    if (!ctx.cfg.has("pulse"))
        return std::nullopt;
    Pulse p;
    if (ctx.physical) {
        p.amplitude = ctx.units.force_from_field(ctx.cfg.req_num("pulse.amplitude"));
        p.omega = ctx.units.omega_from_thz(ctx.cfg.req_num("pulse.freq_thz"));
        p.sigma = ctx.units.time_from_fs(ctx.cfg.req_num("pulse.sigma"));
        p.t0 = ctx.units.time_from_fs(ctx.cfg.req_num("pulse.t0"));
    } else {
        p.amplitude = ctx.cfg.req_num("pulse.amplitude");
        p.omega = ctx.cfg.req_num("pulse.omega");
        p.sigma = ctx.cfg.req_num("pulse.sigma");
        p.t0 = ctx.cfg.req_num("pulse.t0");
    }
    p.tilt_rad = ctx.cfg.num("pulse.tilt_deg", 0.0) * M_PI / 180.0;
    p.tilt_mode = ctx.cfg.integer("pulse.tilt_mode", p.tilt_rad != 0.0 ? 0 : -1);
    p.validate();
    return p;
}

GaussianState initial_state(const Ctx& ctx, const ModelBundle& model,
                            double temperature) {
    GaussianState s;
    if (model.toy && temperature == 0.0) {
        s = toy_initial_state(*model.toy);
    } else {
        RelaxOptions ropts;
        ropts.temperature = temperature;
        if (model.toy)
            ropts.A0 = model.toy->ground.state.A;
        const RelaxResult r =
            scha_relax(model.pes, Eigen::VectorXd::Zero(model.pes.dim()), ropts,
                       ctx.units);
        if (!r.converged)
            throw NumericsError("initial state relaxation did not converge");
        s = r.state;
        if (model.toy)
            s.R[0] += model.toy->params.seed_fe;
    }
    const int seed_mode = ctx.cfg.integer("initial.seed_mode", -1);
    if (seed_mode >= 0) {
        if (seed_mode >= s.dim())
            throw InputError("initial.seed_mode out of range");
        s.R += ctx.cfg.req_num("initial.seed_value") *
               model.basis.mode_vector(seed_mode);
    }
    s.t = 0.0;
    return s;
}

SummarizeOptions summary_options(const Ctx& ctx, const ModelBundle& model) {
    SummarizeOptions opts;
    opts.x0 = ctx.cfg.num("summary.x0", model.x0_scale);
    opts.sustain =
        ctx.time_in(ctx.cfg.num("summary.sustain", ctx.physical ? 1000.0 : 100.0));
    opts.fe_label = ctx.cfg.str("summary.fe_label", "FE");
    opts.ir_label = ctx.cfg.str("summary.ir_label", "IR");
    return opts;
}

json summary_to_json(const TrajectorySummary& s) {
    json j;
    j["transition"] = s.transition;
    j["t_transition"] = s.t_transition;
    j["min_a_fe"] = s.min_a_fe;
    j["max_r_ir"] = s.max_r_ir;
    j["min_uncertainty"] = s.min_uncertainty;
    j["relaxed_back"] = s.relaxed_back;
    j["t_relax_back"] = s.t_relax_back;
    j["final_r_fe"] = s.final_r_fe;
    return j;
}

// ---- dynamics -------------------------------------------------------------

json run_dynamics_once(Ctx& ctx, const ModelBundle& model,
                       const std::optional<Pulse>& pulse, double temperature,
                       const fs::path& dir) {
    fs::create_directories(dir);
    const GaussianState init = initial_state(ctx, model, temperature);

    IntegrateOptions opts;
    opts.stride = ctx.time_in(ctx.cfg.num("stride", ctx.physical ? 20.0 : 1.0));
    opts.ode.rel_tol = ctx.cfg.num("rel_tol", opts.ode.rel_tol);
    opts.ode.abs_tol = ctx.cfg.num("abs_tol", opts.ode.abs_tol);
    opts.target_mode = ctx.cfg.integer("target_mode", 0);
    opts.snapshot_every = ctx.cfg.integer("snapshot_every", 0);
    const double t_span =
        ctx.time_in(ctx.cfg.num("t_span", ctx.physical ? 4000.0 : 400.0));

    const bool frozen = ctx.cfg.flag("frozen_a", false);
    const Trajectory traj =
        frozen ? integrate_frozen_a(model.pes, init, model.basis, pulse, t_span, opts,
                                    ctx.units)
               : integrate(model.pes, init, model.basis, pulse, t_span, opts,
                           ctx.units);

    const fs::path csv = dir / "trajectory.csv";
    write_trajectory_csv(csv.string(), traj, model.basis, opts.obs_modes);
    ctx.record_output(csv);
    if (opts.snapshot_every > 0) {
        const fs::path snap = dir / "snapshots.jsonl";
        write_snapshots_jsonl(snap.string(), traj.snapshots);
        ctx.record_output(snap);
    }

    json out;
    out["steps_accepted"] = traj.stats.accepted;
    out["steps_rejected"] = traj.stats.rejected;
    out["rhs_calls"] = traj.stats.rhs_calls;
    const SummarizeOptions sopts = summary_options(ctx, model);
    const bool have_fe =
        std::find(model.basis.labels.begin(), model.basis.labels.end(),
                  sopts.fe_label) != model.basis.labels.end();
    if (sopts.x0 > 0.0 && have_fe) {
        const TrajectorySummary summary =
            summarize_records(traj.obs, model.basis, {}, sopts);
        out["summary"] = summary_to_json(summary);
        const fs::path sj = dir / "summary.json";
        std::ofstream sf(sj);
        sf << out["summary"].dump(2) << "\n";
        ctx.record_output(sj);
    }
    return out;
}

// ---- commands -------------------------------------------------------------

int cmd_relax(Ctx& ctx) {
    const ModelBundle model = make_model(ctx);
    RelaxOptions ropts;
    ropts.temperature = ctx.cfg.num("temperature", 0.0);
    const RelaxResult r = scha_relax(
        model.pes, Eigen::VectorXd::Zero(model.pes.dim()), ropts, ctx.units);

    const fs::path state_path = ctx.out_dir / "state.jsonl";
    write_snapshots_jsonl(state_path.string(), {r.state});
    ctx.record_output(state_path);

    json rep;
    rep["converged"] = r.converged;
    rep["iterations"] = r.iterations;
    rep["free_energy"] = r.free_energy;
    rep["freqs"] = std::vector<double>(r.freqs.data(), r.freqs.data() + r.freqs.size());
    const fs::path rep_path = ctx.out_dir / "relax.json";
    std::ofstream out(rep_path);
    out << rep.dump(2) << "\n";
    ctx.record_output(rep_path);
    log_info("relax: F = " + fmt(r.free_energy) +
             (r.converged ? "" : " (not converged)"));
    if (!r.converged)
        throw NumericsError("relaxation did not converge");
    return 0;
}

int cmd_dynamics(Ctx& ctx) {
    const ModelBundle model = make_model(ctx);
    const std::optional<Pulse> pulse = make_pulse(ctx);
    const double temperature = ctx.cfg.num("temperature", 0.0);
    const json result =
        run_dynamics_once(ctx, model, pulse, temperature, ctx.out_dir);
    log_info("dynamics: " + std::to_string(result["steps_accepted"].get<long>()) +
             " accepted steps");
    return 0;
}

int cmd_toy_build(Ctx& ctx) {
    Ctx& c = ctx;
    const ToyModelParams params = toy_params_from_config(c);
    const ToyModel model = build_toy_sto(params, c.units);

    PesFile file;
    file.pes = model.pes;
    file.hbar = c.units.hbar;
    const fs::path pes_path = c.out_dir / "surface.pes";
    save_pes(file, pes_path.string());
    c.record_output(pes_path);

    json basis;
    basis["fe_omega"] = model.fe_omega;
    basis["labels"] = model.basis.labels;
    basis["freqs"] = std::vector<double>(model.basis.freqs.data(),
                                         model.basis.freqs.data() +
                                             model.basis.freqs.size());
    basis["zeff"] = std::vector<double>(model.basis.zeff.data(),
                                        model.basis.zeff.data() +
                                            model.basis.zeff.size());
    const fs::path basis_path = c.out_dir / "basis.json";
    std::ofstream bf(basis_path);
    bf << basis.dump(2) << "\n";
    c.record_output(basis_path);

    const fs::path ground_path = c.out_dir / "ground.jsonl";
    write_snapshots_jsonl(ground_path.string(), {model.ground.state});
    c.record_output(ground_path);
    log_info("toy-build: F0 = " + fmt(model.ground.free_energy));
    return 0;
}

int cmd_minimal(Ctx& ctx) {
    MinimalModelParams p;
    p.omega = ctx.cfg.req_num("minimal.omega");
    p.psi = ctx.cfg.req_num("minimal.psi");
    p.a_eq = ctx.cfg.req_num("minimal.a_eq");
    p.alpha = ctx.cfg.req_num("minimal.alpha");
    p.tau = ctx.cfg.req_num("minimal.tau");
    MinimalOptions mopts;
    mopts.stride = ctx.cfg.num("minimal.stride", 0.05);
    mopts.a_eq_only = ctx.cfg.flag("minimal.a_eq_only", false);
    mopts.blow_up = ctx.cfg.num("minimal.blow_up", 0.0);
    const double t_span = ctx.cfg.req_num("minimal.t_span");

    auto r = [&p](double t) { return p.alpha * std::exp(t / p.tau); };
    auto r_rate = [&p, r](double t) { return r(t) / p.tau; };
    const MinimalResult res = minimal_model_integrate(p, r, r_rate, t_span, mopts);

    const fs::path csv = ctx.out_dir / "minimal.csv";
    std::ofstream out(csv);
    if (!out)
        throw InputError("cannot write " + csv.string());
    out << "t,a_numeric,a_closed_form\n";
    for (std::size_t i = 0; i < res.t.size(); ++i)
        out << fmt(res.t[i]) << "," << fmt(res.a_fe[i]) << ","
            << fmt(quench_closed_form(p, res.t[i])) << "\n";
    ctx.record_output(csv);
    if (res.truncated)
        log_info("minimal: truncated at the blow-up bound");
    return 0;
}

struct ScanTask {
    std::string name;
    fs::path dir;
    double axis_value = 0.0;
    json result;
    bool ok = false;
    std::string error;
};

int cmd_scan(Ctx& ctx) {
    const std::string axis = ctx.cfg.req_str("scan.axis");

    if (axis == "well") {
        const std::vector<double> x0s = ctx.cfg.num_list("scan.x0s");
        const std::vector<double> v0s = ctx.cfg.num_list("scan.v0s");
        if (x0s.empty() || v0s.empty())
            throw InputError("scan.x0s and scan.v0s are required for axis = well");
        PhaseMapOptions popts;
        popts.temperature = ctx.cfg.num("temperature", 0.0);
        popts.band_lo_thz = ctx.cfg.num("scan.band_lo_thz", popts.band_lo_thz);
        popts.band_hi_thz = ctx.cfg.num("scan.band_hi_thz", popts.band_hi_thz);
        popts.n_scan = ctx.cfg.integer("scan.n_scan", popts.n_scan);
        popts.workers = ctx.workers;

        // base model whose soft-mode well each cell rewrites; without a model
        // the map covers the bare one dimensional well
        QuarticPES base(1);
        Eigen::VectorXd dir = Eigen::VectorXd::Ones(1);
        if (ctx.cfg.flag("model.toy", false)) {
            ToyModelParams params = toy_params_from_config(ctx);
            params.fe_band_lo = params.fe_band_hi = 0.0; // cells carry the band mask
            const ToyModel toy = build_toy_sto(params, ctx.units);
            base = toy.pes;
            dir = Eigen::VectorXd::Unit(base.dim(), 0);
        } else if (ctx.cfg.has("model.file")) {
            const ModelBundle bundle = make_model(ctx);
            base = bundle.pes;
            const int target = ctx.cfg.integer("target_mode", 0);
            if (target < 0 || target >= base.dim())
                throw InputError("target_mode is out of range for the model");
            dir = Eigen::VectorXd::Unit(base.dim(), target);
        }

        const auto t0 = clock_type::now();
        const std::vector<PhaseCell> cells =
            phase_map(base, dir, x0s, v0s, popts, ctx.units);
        const double ms =
            std::chrono::duration<double, std::milli>(clock_type::now() - t0).count();

        const fs::path csv = ctx.out_dir / "phase_map.csv";
        std::ofstream out(csv);
        if (!out)
            throw InputError("cannot write " + csv.string());
        out << "x0,V0,region,omega_fe,delta_F,in_band,error_code\n";
        int failed = 0;
        for (const PhaseCell& c : cells) {
            out << fmt(c.x0) << "," << fmt(c.v0) << "," << c.region << ","
                << fmt(c.omega_fe) << "," << fmt(c.delta_F) << ","
                << (c.in_band ? 1 : 0) << "," << c.error_code << "\n";
            if (c.error_code == 3)
                ++failed;
        }
        ctx.record_output(csv);
        ctx.record_task("phase_map", failed == 0, ms,
                        failed ? std::to_string(failed) + " cells failed" : "");
        if (failed == static_cast<int>(cells.size()))
            return 3;
        return failed > 0 ? 2 : 0;
    }

    if (axis != "field" && axis != "temperature")
        throw InputError("scan.axis must be field, temperature or well");

    const ModelBundle model = make_model(ctx);
    std::vector<double> values;
    if (axis == "field") {
        values = ctx.cfg.num_list("scan.fields");
        if (values.empty())
            throw InputError("scan.fields is required for axis = field");
    } else {
        values = ctx.cfg.num_list("scan.temperatures");
        if (values.empty())
            throw InputError("scan.temperatures is required for axis = temperature");
    }
    const std::optional<Pulse> base_pulse = make_pulse(ctx);
    if (axis == "field" && !base_pulse)
        throw InputError("field scans need a pulse block");
    const double base_temperature = ctx.cfg.num("temperature", 0.0);

    std::vector<ScanTask> tasks(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        tasks[i].axis_value = values[i];
        tasks[i].name = (axis == "field" ? "field_" : "T_") + fmt_short(values[i]);
        tasks[i].dir = ctx.out_dir / tasks[i].name;
    }

    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size())
                return;
            ScanTask& task = tasks[i];
            const auto t0 = clock_type::now();
            try {
                std::optional<Pulse> pulse = base_pulse;
                double temperature = base_temperature;
                if (axis == "field" && pulse) {
                    pulse->amplitude = ctx.physical
                                           ? ctx.units.force_from_field(task.axis_value)
                                           : task.axis_value;
                } else if (axis == "temperature") {
                    temperature = task.axis_value;
                }
                task.result = run_dynamics_once(ctx, model, pulse, temperature,
                                                task.dir);
                task.ok = true;
            } catch (const std::exception& e) {
                task.error = e.what();
            }
            const double ms = std::chrono::duration<double, std::milli>(
                                  clock_type::now() - t0)
                                  .count();
            ctx.record_task(task.name, task.ok, ms, task.error);
            log_debug(task.name + (task.ok ? " done" : " failed: " + task.error));
        }
    };
    const int n_workers =
        std::max(1, std::min<int>(ctx.workers, static_cast<int>(tasks.size())));
    if (n_workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < n_workers; ++i)
            pool.emplace_back(work);
        for (std::thread& t : pool)
            t.join();
    }

    // deterministic merge in task order regardless of completion order
    const fs::path csv = ctx.out_dir / "scan_summary.csv";
    std::ofstream out(csv);
    if (!out)
        throw InputError("cannot write " + csv.string());
    out << (axis == "field" ? "field" : "temperature")
        << ",status,transition,t_transition,min_a_fe,max_r_ir,min_uncertainty,"
           "relaxed_back,t_relax_back,final_r_fe\n";
    for (const ScanTask& task : tasks) {
        out << fmt(task.axis_value) << "," << (task.ok ? "ok" : "failed");
        if (task.ok && task.result.contains("summary")) {
            const json& s = task.result["summary"];
            out << "," << (s["transition"].get<bool>() ? 1 : 0) << ","
                << fmt(s["t_transition"].get<double>()) << ","
                << fmt(s["min_a_fe"].get<double>()) << ","
                << fmt(s["max_r_ir"].get<double>()) << ","
                << fmt(s["min_uncertainty"].get<double>()) << ","
                << (s["relaxed_back"].get<bool>() ? 1 : 0) << ","
                << fmt(s["t_relax_back"].get<double>()) << ","
                << fmt(s["final_r_fe"].get<double>());
        } else {
            out << ",,,,,,,,";
        }
        out << "\n";
    }
    ctx.record_output(csv);

    std::size_t n_failed = 0;
    for (const ScanTask& task : tasks)
        if (!task.ok)
            ++n_failed;
    if (n_failed == tasks.size())
        return 3;
    return n_failed > 0 ? 2 : 0;
}

// ---- schema ---------------------------------------------------------------

std::vector<std::string> allowed_keys(const std::string& command, bool physical) {
    std::vector<std::string> keys = {"command",   "units.preset", "units.hbar",
                                     "units.kB",  "workers",      "seed",
                                     "temperature"};
    auto add = [&keys](std::initializer_list<const char*> more) {
        for (const char* k : more)
            keys.push_back(k);
    };
    const bool wants_model =
        command == "relax" || command == "dynamics" || command == "scan";
    if (wants_model || command == "toy-build")
        add({"toy.n_bath", "toy.x0", "toy.v0", "toy.omega_fe_bare", "toy.omega_ir",
             "toy.omega_afd", "toy.band_lo", "toy.band_hi", "toy.chi_ir",
             "toy.chi_fe", "toy.beta", "toy.stab_ir", "toy.stab_bath",
             "toy.zeff_ir", "toy.seed_fe", "toy.detune", "toy.seed",
             "toy.fe_band_lo", "toy.fe_band_hi"});
    if (wants_model)
        add({"model.file", "model.toy", "model.zeff", "model.labels"});
    if (command == "dynamics" || command == "scan") {
        add({"t_span", "stride", "rel_tol", "abs_tol", "frozen_a", "snapshot_every",
             "target_mode", "initial.seed_mode", "initial.seed_value", "summary.x0",
             "summary.sustain", "summary.fe_label", "summary.ir_label",
             "pulse.amplitude", "pulse.sigma", "pulse.t0", "pulse.tilt_deg",
             "pulse.tilt_mode"});
        keys.push_back(physical ? "pulse.freq_thz" : "pulse.omega");
    }
    if (command == "scan")
        add({"scan.axis", "scan.fields", "scan.temperatures", "scan.x0s",
             "scan.v0s", "scan.n_scan", "scan.band_lo_thz", "scan.band_hi_thz"});
    if (command == "minimal")
        add({"minimal.omega", "minimal.psi", "minimal.a_eq", "minimal.alpha",
             "minimal.tau", "minimal.t_span", "minimal.stride",
             "minimal.a_eq_only", "minimal.blow_up"});
    return keys;
}

void write_manifest(Ctx& ctx, const std::string& command, int exit_code,
                    double wall_ms, const std::string& top_error) {
    json m;
    m["command"] = command;
    char hash[24];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(config_hash(ctx.config)));
    m["config_hash"] = hash;
    m["seed"] = ctx.seed;
    m["workers"] = ctx.workers;
    m["units"] = ctx.physical ? "physical" : "natural";
    m["tasks"] = ctx.tasks;
    m["outputs"] = ctx.outputs;
    m["exit_code"] = exit_code;
    m["wall_ms"] = wall_ms;
    if (!top_error.empty())
        m["error"] = top_error;
    std::error_code ec;
    fs::create_directories(ctx.out_dir, ec);
    std::ofstream out(ctx.out_dir / "manifest.json");
    if (out)
        out << m.dump(2) << "\n";
}

} // namespace

int run_cli(const CliArgs& args) {
    const auto t_start = clock_type::now();
    std::unique_ptr<Ctx> ctx;
    std::string command = args.command;
    int code = 0;
    std::string top_error;

    try {
        json config = load_config(args.config_path);
        ctx = std::make_unique<Ctx>(std::move(config));
        ctx->out_dir = args.out_dir;
        ctx->units = units_from_config(ctx->cfg, ctx->physical);
        ctx->workers = args.workers > 0
                           ? args.workers
                           : std::max(1, ctx->cfg.integer("workers", 1));
        ctx->seed_set = args.seed_set || ctx->cfg.has("seed");
        ctx->seed = args.seed_set
                        ? args.seed
                        : static_cast<std::uint64_t>(ctx->cfg.integer("seed", 0));
        if (command.empty())
            command = ctx->cfg.str("command", "");
        if (command.empty())
            throw InputError("no command given on the command line or in the config");
        const std::string cfg_command = ctx->cfg.str("command", command);
        if (cfg_command != command)
            throw InputError("config command '" + cfg_command +
                             "' disagrees with the command line");
        ctx->cfg.check_known(allowed_keys(command, ctx->physical));
        fs::create_directories(ctx->out_dir);

        if (command == "relax")
            code = cmd_relax(*ctx);
        else if (command == "dynamics")
            code = cmd_dynamics(*ctx);
        else if (command == "scan")
            code = cmd_scan(*ctx);
        else if (command == "minimal")
            code = cmd_minimal(*ctx);
        else if (command == "toy-build")
            code = cmd_toy_build(*ctx);
        else
            throw InputError("unknown command '" + command + "'");
    } catch (const InputError& e) {
        top_error = e.what();
        std::cerr << "config error: " << e.what() << "\n";
        code = 1;
    } catch (const NumericsError& e) {
        top_error = e.what();
        std::cerr << "numerical failure: " << e.what() << "\n";
        code = 3;
    } catch (const std::exception& e) {
        top_error = e.what();
        std::cerr << "error: " << e.what() << "\n";
        code = 3;
    }

    if (ctx) {
        const double wall_ms = std::chrono::duration<double, std::milli>(
                                   clock_type::now() - t_start)
                                   .count();
        if (ctx->tasks.empty())
            ctx->record_task(command, code == 0, wall_ms, top_error);
        write_manifest(*ctx, command, code, wall_ms, top_error);
    }
    return code;
}

} // namespace tdscha
