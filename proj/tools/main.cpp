// spikelab command-line front end: spike self-replication and nucleation
// thresholds for the Schnakenberg, Brusselator and Gierer-Meinhardt models,
// with direct PDE simulation and steady-state continuation for validation.

#include <cstdio>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"

#include "spikelab/errors.hpp"
#include "spikelab/io.hpp"
#include "spikelab/models.hpp"
#include "spikelab/parallel.hpp"
#include "spikelab/scenario.hpp"
#include "verify.hpp"

using namespace spikelab;

namespace {

struct ModelFlags {
    std::string kind;
    double a = 0, b = 0, f = 0, kappa = -1, tau = 1;
    double eps = 0.01, D = 2.0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--model", kind, "schnakenberg | brusselator | gm")->required();
        cmd->add_option("--a", a, "feed rate a");
        cmd->add_option("--b", b, "Schnakenberg substrate feed b");
        cmd->add_option("--f", f, "Brusselator f in (0,1)");
        cmd->add_option("--kappa", kappa, "GM activator background");
        cmd->add_option("--tau", tau, "GM time constant");
        cmd->add_option("--eps", eps, "inner width epsilon");
        cmd->add_option("--D", D, "inhibitor diffusivity D");
    }

    models::ModelSpec build() const {
        auto k = models::model_kind_from_string(kind);
        switch (k) {
            case models::ModelKind::Schnakenberg:
                return models::ModelSpec::schnakenberg_spec(a, b, eps, D);
            case models::ModelKind::Brusselator:
                return models::ModelSpec::brusselator_spec(a, f, eps, D);
            case models::ModelKind::GM:
                return models::ModelSpec::gm_spec(kappa, eps, D, tau);
        }
        throw config_error("bad model kind");
    }
};

int finish(const scenario::RunResult& rr) {
    if (rr.exit_code != 0) {
        nlohmann::json err{{"error", {{"kind", rr.error_kind}, {"message", rr.error_message}}}};
        std::cerr << err.dump() << "\n";
    }
    return rr.exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spikelab: spike replication/nucleation thresholds for 1-D RD models"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "worker pool size (default: SPIKELAB_THREADS or hardware)");

    std::string out_dir = "out";
    app.add_option_function<std::string>(
        "--out", [&](const std::string& v) { out_dir = v; }, "output directory");

    // scenario file path (any subcommand settings can come from JSON instead)
    std::string scenario_file;
    auto* run_cmd = app.add_subcommand("run", "execute a scenario JSON file");
    run_cmd->add_option("file", scenario_file, "scenario JSON")->required();

    ModelFlags core_m, spec_m, thr_m, phase_m, sim_m, cont_m, atlas_m;

    auto* core_cmd = app.add_subcommand("core", "solve the inner core problem / trace its branch");
    core_m.attach(core_cmd);
    double target_B = 0, target_beta = 0;
    bool core_branch = false, core_bc_table = false;
    core_cmd->add_option("--target-B", target_B, "pin the far-field slope B");
    core_cmd->add_option("--target-beta", target_beta, "pin beta = U0(0)V0(0)");
    core_cmd->add_flag("--branch", core_branch, "trace the full branch with its fold");
    core_cmd->add_flag("--bc-table", core_bc_table, "Brusselator fold table B_c(f)");

    auto* spec_cmd = app.add_subcommand("spectrum", "linearized core eigenvalues and modes");
    spec_m.attach(spec_cmd);
    double spec_B = 0, spec_beta = 0;
    int n_eigs = 4;
    bool spec_scan = false;
    spec_cmd->add_option("--B", spec_B, "evaluate at far-field slope B");
    spec_cmd->add_option("--beta", spec_beta, "evaluate at beta");
    spec_cmd->add_option("--n-eigs", n_eigs, "rightmost eigenvalue count");
    spec_cmd->add_flag("--scan", spec_scan, "Re(lambda_max) along the branch");

    auto* thr_cmd = app.add_subcommand("thresholds", "replication/nucleation critical lengths");
    thr_m.attach(thr_cmd);
    int thr_K = 1;
    std::string thr_kind = "auto";
    bool thr_small = false;
    thr_cmd->add_option("--K", thr_K, "spike count");
    thr_cmd->add_option("--kind", thr_kind, "replication | nucleation | auto");
    thr_cmd->add_flag("--small-param", thr_small, "closed-form small-a threshold");

    auto* phase_cmd = app.add_subcommand("phase-diagram", "regime map with boundary curves");
    phase_m.attach(phase_cmd);
    std::string grid = "50x50";
    phase_cmd->add_option("--grid", grid, "cells, e.g. 50x50");

    auto* sim_cmd = app.add_subcommand("simulate", "growing-domain PDE simulation");
    sim_m.attach(sim_cmd);
    double rho = -1, L0 = 1.0, L_end = 4.0, t_end = 0;
    int sim_n = 4096;
    bool dilution = false;
    std::string init = "composite_one_spike";
    sim_cmd->add_option("--rho", rho, "growth rate (default eps^2; 0 = static with --t-end)");
    sim_cmd->add_option("--L0", L0, "initial half-length");
    sim_cmd->add_option("--L-end", L_end, "stop half-length");
    sim_cmd->add_option("--t-end", t_end, "stop time for static runs");
    sim_cmd->add_option("--n", sim_n, "spatial intervals");
    sim_cmd->add_flag("--dilution", dilution, "include the -rho v dilution terms");
    sim_cmd->add_option("--init", init, "composite_one_spike | gaussian_seed");

    auto* cont_cmd = app.add_subcommand("continue", "steady-state continuation in L");
    cont_m.attach(cont_cmd);
    double cont_L = 1.0, cont_Lmin = 0.5, cont_Lmax = 6.0;
    int cont_n = 2048, half_spikes = 2;
    bool boundary_phase = false, cont_stab = true;
    cont_cmd->add_option("--L", cont_L, "start half-length");
    cont_cmd->add_option("--L-min", cont_Lmin);
    cont_cmd->add_option("--L-max", cont_Lmax);
    cont_cmd->add_option("--n", cont_n, "spatial intervals");
    cont_cmd->add_option("--half-spikes", half_spikes, "pattern half-spike count");
    cont_cmd->add_flag("--boundary-phase", boundary_phase, "boundary-anchored even pattern");
    cont_cmd->add_flag("--no-stability", [&cont_stab](std::int64_t) { cont_stab = false; },
                       "skip eigenvalue flags");

    auto* atlas_cmd = app.add_subcommand("atlas", "branch ladder over half-spike counts");
    atlas_m.attach(atlas_cmd);
    double at_Lmin = 1.0, at_Lmax = 6.0;
    int at_n = 2048, max_half = 8;
    atlas_cmd->add_option("--L-min", at_Lmin);
    atlas_cmd->add_option("--L-max", at_Lmax);
    atlas_cmd->add_option("--n", at_n, "spatial intervals");
    atlas_cmd->add_option("--max-half-spikes", max_half);

    auto* ov_cmd = app.add_subcommand("overlay", "merge a trajectory with an atlas");
    std::string traj_dir, atlas_dir;
    ov_cmd->add_option("--trajectory", traj_dir, "simulate output directory")->required();
    ov_cmd->add_option("--atlas", atlas_dir, "atlas output directory")->required();

    auto* verify_cmd = app.add_subcommand("verify", "run the acceptance suite");
    std::string suite = "paper-goldens";
    bool quick = false;
    verify_cmd->add_option("--suite", suite, "suite name (paper-goldens)");
    verify_cmd->add_flag("--quick", quick, "skip the long continuation/simulation criteria");

    for (auto* sc : app.get_subcommands({})) sc->fallthrough(); // --out/--threads after subcommands
    CLI11_PARSE(app, argc, argv);
    if (threads > 0) set_num_threads(threads);

    try {
        scenario::Scenario s;
        s.out = out_dir;
        if (run_cmd->parsed()) {
            s = scenario::Scenario::from_json(io::read_json(scenario_file));
            if (s.out.empty()) s.out = out_dir;
            auto rr = scenario::run(s);
            if (rr.exit_code == 0)
                std::cout << "wrote " << rr.outputs.size() << " artifact(s) under " << s.out << "\n";
            return finish(rr);
        }
        if (verify_cmd->parsed()) {
            if (suite != "paper-goldens") throw config_error("unknown suite '" + suite + "'");
            verify::Options vo;
            vo.long_runs = !quick;
            auto results = verify::run_acceptance(vo, &std::cerr);
            verify::print_matrix(results, std::cout);
            return verify::all_passed(results) ? 0 : 3;
        }
        if (core_cmd->parsed()) {
            s.command = "core";
            s.model = core_m.build();
            s.has_model = true;
            if (target_B > 0) s.options["target_B"] = target_B;
            if (target_beta > 0) s.options["target_beta"] = target_beta;
            if (core_branch) s.options["branch"] = true;
            if (core_bc_table) s.options["bc_table"] = true;
        } else if (spec_cmd->parsed()) {
            s.command = "spectrum";
            s.model = spec_m.build();
            s.has_model = true;
            if (spec_B > 0) s.options["B"] = spec_B;
            if (spec_beta > 0) s.options["beta"] = spec_beta;
            s.options["n_eigs"] = n_eigs;
            if (spec_scan) s.options["scan"] = true;
        } else if (thr_cmd->parsed()) {
            s.command = "thresholds";
            s.model = thr_m.build();
            s.has_model = true;
            s.options["K"] = thr_K;
            s.options["kind"] = thr_kind;
            if (thr_small) s.options["small_param"] = true;
        } else if (phase_cmd->parsed()) {
            s.command = "phase-diagram";
            s.model = phase_m.build();
            s.has_model = true;
            auto xpos = grid.find('x');
            if (xpos == std::string::npos) throw config_error("--grid must look like 50x50");
            s.options["nx"] = std::stoi(grid.substr(0, xpos));
            s.options["ny"] = std::stoi(grid.substr(xpos + 1));
        } else if (sim_cmd->parsed()) {
            s.command = "simulate";
            s.model = sim_m.build();
            s.has_model = true;
            s.options["rho"] = rho;
            s.options["L0"] = L0;
            s.options["L_end"] = L_end;
            if (t_end > 0) s.options["t_end"] = t_end;
            s.options["n"] = sim_n;
            s.options["dilution"] = dilution;
            s.options["init"] = init;
        } else if (cont_cmd->parsed()) {
            s.command = "continue";
            s.model = cont_m.build();
            s.has_model = true;
            s.options["L"] = cont_L;
            s.options["L_min"] = cont_Lmin;
            s.options["L_max"] = cont_Lmax;
            s.options["n"] = cont_n;
            s.options["half_spikes"] = half_spikes;
            s.options["boundary_phase"] = boundary_phase;
            s.options["stability"] = cont_stab;
        } else if (atlas_cmd->parsed()) {
            s.command = "atlas";
            s.model = atlas_m.build();
            s.has_model = true;
            s.options["L_min"] = at_Lmin;
            s.options["L_max"] = at_Lmax;
            s.options["n"] = at_n;
            s.options["max_half_spikes"] = max_half;
        } else if (ov_cmd->parsed()) {
            s.command = "overlay";
            s.options["trajectory_dir"] = traj_dir;
            s.options["atlas_dir"] = atlas_dir;
        }
        auto rr = scenario::run(s);
        if (rr.exit_code == 0) {
            std::cout << "wrote " << rr.outputs.size() << " artifact(s) under " << s.out << "\n";
            // print the main JSON result inline for quick consumption
            for (const auto& f : rr.outputs)
                if (f.size() > 5 && f.substr(f.size() - 5) == ".json") {
                    std::cout << io::read_json(s.out + "/" + f).dump(2) << "\n";
                    break;
                }
        }
        return finish(rr);
    } catch (const error& e) {
        nlohmann::json err{{"error", {{"kind", e.kind()}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return scenario::exit_code_for(e.kind());
    } catch (const std::exception& e) {
        nlohmann::json err{{"error", {{"kind", "Unexpected"}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return 3;
    }
}
