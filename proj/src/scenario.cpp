#include "spikelab/scenario.hpp"
#include "spikelab/continuation.hpp"
#include "spikelab/core.hpp"
#include "spikelab/errors.hpp"
#include "spikelab/io.hpp"
#include "spikelab/outer.hpp"
#include "spikelab/pde.hpp"
#include "spikelab/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace spikelab::scenario {

using models::ModelKind;
using models::ModelSpec;

namespace {

void check_known(const nlohmann::json& j, const std::vector<std::string>& known,
                 const std::string& what) {
    for (auto& [k, _] : j.items())
        if (std::find(known.begin(), known.end(), k) == known.end())
            throw config_error("unknown " + what + " field '" + k + "'");
}

std::optional<double> brusselator_f(const ModelSpec& m) {
    if (m.kind == ModelKind::Brusselator) return m.brusselator().f;
    return std::nullopt;
}

struct Outputs {
    std::string dir;
    std::vector<std::string> files;
    std::string path(const std::string& rel) {
        files.push_back(rel);
        return dir + "/" + rel;
    }
};

void run_core(const Scenario& s, Outputs& out) {
    check_known(s.options, {"target_B", "target_beta", "branch", "bc_table", "f_grid", "y_max", "n"},
                "core options");
    core::GridSpec grid{s.options.value("y_max", 0.0), s.options.value("n", 0)};
    if (s.options.value("bc_table", false)) {
        std::vector<double> fg = s.options.value("f_grid", std::vector<double>{});
        if (fg.empty())
            for (double f = 0.55; f < 0.96; f += 0.05) fg.push_back(f);
        auto table = core::bc_table(fg, grid);
        core::save_bc_table_csv(table, out.path("bc_table.csv"));
        return;
    }
    if (s.options.value("branch", false)) {
        auto br = core::continue_core_branch(s.model.kind, brusselator_f(s.model), {0, 0}, {}, grid);
        core::save_branch_csv(br, out.path("core_branch.csv"));
        if (br.fold) core::save_solution_csv(*br.fold->solution, out.path("core_fold_solution.csv"));
        return;
    }
    core::CoreTarget target = s.options.contains("target_beta")
                                  ? core::CoreTarget::pin_beta(s.options["target_beta"].get<double>())
                                  : core::CoreTarget::pin_B(s.options.value("target_B", 0.5));
    auto sol = core::solve_core(s.model.kind, brusselator_f(s.model), target, grid);
    core::save_solution_csv(sol, out.path("core_solution.csv"));
    io::write_json({{"B", sol.B},
                    {"beta", sol.beta},
                    {"C", sol.C},
                    {"residual_norm", sol.residual_norm},
                    {"tail_deviation", sol.tail_deviation}},
                   out.path("core_solution.json"));
}

void run_spectrum(const Scenario& s, Outputs& out) {
    check_known(s.options, {"B", "beta", "n_eigs", "scan", "y_max", "n"}, "spectrum options");
    core::GridSpec grid{s.options.value("y_max", 0.0), s.options.value("n", 801)};
    if (s.options.value("scan", false)) {
        auto br = core::continue_core_branch(s.model.kind, brusselator_f(s.model), {0, 0}, {}, grid);
        auto scan = spectrum::stability_scan(br);
        io::CsvWriter csv(out.path("stability_scan.csv"));
        csv.header("beta,B,re_lambda_max");
        for (const auto& p : scan) csv.row({p.beta, p.B, p.re_lambda_max});
        return;
    }
    core::CoreTarget target = s.options.contains("beta")
                                  ? core::CoreTarget::pin_beta(s.options["beta"].get<double>())
                                  : core::CoreTarget::pin_B(s.options.value("B", 0.5));
    auto sol = core::solve_core(s.model.kind, brusselator_f(s.model), target, grid);
    auto r = spectrum::core_spectrum(sol, s.options.value("n_eigs", 4));
    io::write_json(spectrum::eigenresult_to_json(r), out.path("spectrum.json"));
    spectrum::save_modes_csv(r, sol.y, out.path("modes.csv"));
}

void run_thresholds(const Scenario& s, Outputs& out) {
    check_known(s.options, {"K", "kind", "small_param"}, "thresholds options");
    int K = s.options.value("K", 1);
    if (K < 1) throw config_error("K must be >= 1");
    std::string kind = s.options.value("kind", "auto");
    nlohmann::json j;
    if (s.options.value("small_param", false)) {
        if (s.model.kind == ModelKind::GM) {
            throw config_error("GM small-parameter form needs L; use the library call");
        }
        j = outer::small_param_threshold(s.model, K).to_json();
    } else if (kind == "replication") {
        j = outer::replication_threshold(s.model, K).to_json();
    } else if (kind == "nucleation") {
        j = outer::nucleation_threshold(s.model, K).to_json();
    } else if (kind == "auto") {
        auto regime = outer::classify(s.model);
        if (regime == models::Regime::Replication)
            j = outer::replication_threshold(s.model, K).to_json();
        else if (regime == models::Regime::Nucleation)
            j = outer::nucleation_threshold(s.model, K).to_json();
        else
            throw regime_mismatch("no spike-generating instability in this regime (" +
                                  models::to_string(regime) + ")");
    } else {
        throw config_error("kind must be replication|nucleation|auto");
    }
    j["regime"] = models::to_string(outer::classify(s.model));
    io::write_json(j, out.path("thresholds.json"));
    io::CsvWriter csv(out.path("thresholds.csv"));
    csv.header("kind,K,L_crit,D_L_crit,mu_at_crit,B_at_crit,method");
    csv.raw(j.value("kind", std::string{}) + "," + std::to_string(K) + "," +
            io::format_double(j.value("L_crit", 0.0)) + "," +
            io::format_double(j.value("D_L_crit", 0.0)) + "," +
            io::format_double(j.value("mu_at_crit", 0.0)) + "," +
            io::format_double(j.value("B_at_crit", 0.0)) + "," +
            j.value("method", std::string{}));
}

void run_phase_diagram(const Scenario& s, Outputs& out) {
    check_known(s.options, {"nx", "ny", "x_lo", "x_hi", "y_lo", "y_hi"}, "phase-diagram options");
    int nx = s.options.value("nx", 50), ny = s.options.value("ny", 50);
    double x_lo, x_hi, y_lo, y_hi;
    if (s.model.kind == ModelKind::Schnakenberg) {
        x_lo = s.options.value("x_lo", 0.2);
        x_hi = s.options.value("x_hi", 2.0);
        y_lo = s.options.value("y_lo", 0.02);
        y_hi = s.options.value("y_hi", 2.2);
    } else {
        x_lo = s.options.value("x_lo", 0.2);
        x_hi = s.options.value("x_hi", 3.0);
        y_lo = s.options.value("y_lo", 0.05);
        y_hi = s.options.value("y_hi", 0.99);
    }
    auto pd = outer::phase_diagram(s.model.kind, nx, ny, x_lo, x_hi, y_lo, y_hi,
                                   s.model.eps_over_sqrtD());
    outer::save_phase_diagram_csv(pd, out.path("phase_diagram.csv"));
    outer::save_phase_diagram_svg(pd, out.path("phase_diagram.svg"));
    nlohmann::json bj = nlohmann::json::array();
    for (const auto& c : pd.boundaries) {
        nlohmann::json pts = nlohmann::json::array();
        for (auto [x, y] : c.points) pts.push_back({x, y});
        bj.push_back({{"name", c.name}, {"points", pts}});
    }
    io::write_json({{"boundaries", bj}}, out.path("phase_boundaries.json"));
}

void run_simulate(const Scenario& s, Outputs& out) {
    auto opt = s.options;
    opt["model"] = s.model.to_json();
    auto cfg = pde::SimConfig::from_json(opt);
    if (cfg.checkpoint_path.empty()) cfg.checkpoint_path = out.dir + "/checkpoint.json";
    auto traj = pde::simulate_growing(cfg);
    pde::save_events_csv(traj.events, out.path("events.csv"));
    pde::export_heatmap_csv(traj, out.path("heatmap.csv"));
    pde::export_heatmap_svg(traj, out.path("heatmap.svg"));
    io::ensure_directory(out.dir + "/snapshots");
    for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
        char name[64];
        std::snprintf(name, sizeof name, "snapshots/snapshot_%04zu.csv", k);
        pde::save_snapshot_csv(traj.snapshots[k], out.path(name));
    }
    io::CsvWriter csv(out.path("trajectory.csv"));
    csv.header("t,L,l2norm_v");
    for (const auto& row : traj.l2_series) csv.row({row[0], row[1], row[2]});
    io::write_json({{"steps", traj.steps},
                    {"newton_iterations", traj.newton_iterations},
                    {"min_v", traj.min_v},
                    {"min_u", traj.min_u},
                    {"max_step_residual", traj.max_step_residual},
                    {"events", traj.events.entries.size()}},
                   out.path("simulation.json"));
}

void run_continue(const Scenario& s, Outputs& out) {
    check_known(s.options,
                {"n", "L", "half_spikes", "boundary_phase", "L_min", "L_max", "stability",
                 "max_points", "richardson"},
                "continue options");
    int n = s.options.value("n", 2048);
    int m = s.options.value("half_spikes", 2);
    bool bp = s.options.value("boundary_phase", false);
    double L = s.options.value("L", 1.0);
    continuation::ContinueOptions opts;
    opts.L_min = s.options.value("L_min", 0.5);
    opts.L_max = s.options.value("L_max", 6.0);
    opts.compute_stability = s.options.value("stability", true);
    opts.max_points = s.options.value("max_points", 400);
    auto start = continuation::steady_solve_pattern(s.model, L, n, m, bp);
    auto up = continuation::continue_in_L(s.model, start, +1, opts);
    auto down = continuation::continue_in_L(s.model, start, -1, opts);
    up.branch_id = "m" + std::to_string(m) + "_up";
    down.branch_id = "m" + std::to_string(m) + "_down";
    continuation::save_branch_csv(up, out.path("branch_up.csv"));
    continuation::save_branch_csv(down, out.path("branch_down.csv"));
    nlohmann::json folds = nlohmann::json::array();
    for (const auto& f : up.folds) folds.push_back({{"L", f.L}, {"direction", "up"}});
    for (const auto& f : down.folds) folds.push_back({{"L", f.L}, {"direction", "down"}});
    nlohmann::json cj{{"folds", folds}, {"notes_up", up.notes}, {"notes_down", down.notes}};
    if (s.options.value("richardson", false) && !up.folds.empty()) {
        auto fe = continuation::fold_richardson(s.model, m, bp, n, up.folds[0].L);
        cj["fold_richardson"] = {{"L_half", fe.L_half},
                                 {"L_n", fe.L_n},
                                 {"L_extrapolated", fe.L_extrapolated}};
    }
    io::write_json(cj, out.path("continuation.json"));
}

void run_atlas(const Scenario& s, Outputs& out) {
    check_known(s.options, {"n", "L_min", "L_max", "max_half_spikes", "stability"}, "atlas options");
    continuation::ContinueOptions opts;
    opts.compute_stability = s.options.value("stability", true);
    auto atlas = continuation::multi_branch_atlas(
        s.model, s.options.value("L_min", 1.0), s.options.value("L_max", 6.0),
        s.options.value("max_half_spikes", 8), s.options.value("n", 2048), opts);
    continuation::save_atlas(atlas, out.dir);
    for (const auto& br : atlas.branches)
        if (!br.points.empty()) out.files.push_back(br.branch_id + ".csv");
    out.files.push_back("atlas.json");
}

// file-based overlay: trajectory.csv + events.csv from a simulate run merged
// with the branch CSVs of an atlas directory
void run_overlay(const Scenario& s, Outputs& out) {
    check_known(s.options, {"trajectory_dir", "atlas_dir"}, "overlay options");
    std::string tdir = s.options.at("trajectory_dir").get<std::string>();
    std::string adir = s.options.at("atlas_dir").get<std::string>();
    io::CsvWriter csv(out.path("overlay.csv"));
    csv.header("source,L,l2norm_v,event");
    // events: L -> kind
    std::vector<std::pair<double, std::string>> events;
    {
        std::ifstream ev(tdir + "/events.csv");
        if (!ev) throw io_error("cannot open " + tdir + "/events.csv");
        std::string line;
        std::getline(ev, line);
        while (std::getline(ev, line)) {
            std::stringstream ss(line);
            std::string t, L, kind;
            std::getline(ss, t, ',');
            std::getline(ss, L, ',');
            std::getline(ss, kind, ',');
            events.push_back({std::stod(L), kind});
        }
    }
    {
        std::ifstream tr(tdir + "/trajectory.csv");
        if (!tr) throw io_error("cannot open " + tdir + "/trajectory.csv");
        std::string line;
        std::getline(tr, line);
        while (std::getline(tr, line)) {
            std::stringstream ss(line);
            std::string t, L, l2;
            std::getline(ss, t, ',');
            std::getline(ss, L, ',');
            std::getline(ss, l2, ',');
            double Lv = std::stod(L);
            std::string tag;
            for (auto& [eL, kind] : events)
                if (std::fabs(eL - Lv) < 1e-9) tag = kind;
            csv.raw("trajectory," + L + "," + l2 + "," + tag);
        }
    }
    auto manifest = io::read_json(adir + "/atlas.json");
    for (const auto& br : manifest.at("branches")) {
        std::string id = br.at("id").get<std::string>();
        std::ifstream bcsv(adir + "/" + id + ".csv");
        if (!bcsv) continue;
        std::string line;
        std::getline(bcsv, line);
        while (std::getline(bcsv, line)) {
            std::stringstream ss(line);
            std::string bid, L, mu, u0v0, l2;
            std::getline(ss, bid, ',');
            std::getline(ss, L, ',');
            std::getline(ss, mu, ',');
            std::getline(ss, u0v0, ',');
            std::getline(ss, l2, ',');
            csv.raw(bid + "," + L + "," + l2 + ",");
        }
    }
}

} // namespace

nlohmann::json Scenario::to_json() const {
    nlohmann::json j{{"name", name}, {"command", command}, {"options", options}, {"out", out}};
    if (has_model) j["model"] = model.to_json();
    return j;
}

Scenario Scenario::from_json(const nlohmann::json& j) {
    check_known(j, {"name", "command", "model", "options", "out"}, "scenario");
    Scenario s;
    s.name = j.value("name", "");
    s.command = j.at("command").get<std::string>();
    if (j.contains("model")) {
        s.model = ModelSpec::from_json(j.at("model"));
        s.has_model = true;
    }
    s.options = j.value("options", nlohmann::json::object());
    s.out = j.value("out", "out");
    return s;
}

int exit_code_for(const std::string& kind) {
    if (kind == "ConfigError" || kind == "IoError") return 2;
    if (kind == "RegimeMismatch") return 4;
    return 3;
}

RunResult run(const Scenario& s) {
    RunResult rr;
    Outputs out{s.out, {}};
    io::ensure_directory(s.out);
    try {
        static const std::vector<std::string> with_model{"core",      "spectrum", "thresholds",
                                                         "phase-diagram", "simulate", "continue",
                                                         "atlas"};
        bool needs_model = std::find(with_model.begin(), with_model.end(), s.command) != with_model.end();
        if (needs_model && !s.has_model) throw config_error("command '" + s.command + "' needs a model");
        if (s.command == "core") run_core(s, out);
        else if (s.command == "spectrum") run_spectrum(s, out);
        else if (s.command == "thresholds") run_thresholds(s, out);
        else if (s.command == "phase-diagram") run_phase_diagram(s, out);
        else if (s.command == "simulate") run_simulate(s, out);
        else if (s.command == "continue") run_continue(s, out);
        else if (s.command == "atlas") run_atlas(s, out);
        else if (s.command == "overlay") run_overlay(s, out);
        else if (s.command == "verify")
            throw config_error("verify runs through the CLI front end");
        else
            throw config_error("unknown command '" + s.command + "'");
    } catch (const error& e) {
        rr.exit_code = exit_code_for(e.kind());
        rr.error_kind = e.kind();
        rr.error_message = e.what();
    } catch (const std::exception& e) {
        rr.exit_code = 3;
        rr.error_kind = "Unexpected";
        rr.error_message = e.what();
    }
    rr.outputs = out.files;
    nlohmann::json manifest{{"scenario", s.to_json()},
                            {"outputs", rr.outputs},
                            {"status", rr.exit_code == 0 ? "ok" : "error"}};
    if (rr.exit_code != 0)
        manifest["error"] = {{"kind", rr.error_kind}, {"message", rr.error_message}};
    io::write_json(manifest, s.out + "/manifest.json");
    return rr;
}

} // namespace spikelab::scenario
