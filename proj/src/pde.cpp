#include "spikelab/pde.hpp"
#include "spikelab/rd_system.hpp"
#include "spikelab/core.hpp"
#include "spikelab/errors.hpp"
#include "spikelab/io.hpp"
#include "spikelab/numerics/block_tridiag.hpp"
#include "spikelab/numerics/interp.hpp"
#include "spikelab/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>

namespace spikelab::pde {

using numerics::BlockTridiag;
using numerics::BlockTridiagLU;

namespace {

using rd::x_grid;

void composite_initial(const ModelSpec& model, double L, int n, std::vector<double>& z) {
    z = rd::composite_state(model, L, n, {0.0}, 1.0);
}

void gaussian_initial(const ModelSpec& model, double L, int n, std::vector<double>& z) {
    auto xs = x_grid(n);
    int N = n + 1;
    z.assign(2 * N, 0.0);
    double eps_L = model.epsilon / L;
    double D_L = model.bigD / (L * L);
    double amp = std::sqrt(D_L) / eps_L;
    switch (model.kind) {
        case ModelKind::Schnakenberg:
        case ModelKind::Brusselator: {
            double a = model.kind == ModelKind::Brusselator ? model.brusselator().a
                                                             : model.schnakenberg().a;
            double fc = model.kind == ModelKind::Brusselator ? model.brusselator().f : 1.0;
            for (int i = 0; i < N; ++i) {
                double bump = amp * std::exp(-xs[i] * xs[i] / (2.0 * 4.0 * eps_L * eps_L));
                z[2 * i] = a + bump;
                z[2 * i + 1] = 3.0 / (fc * amp);
            }
            break;
        }
        case ModelKind::GM: {
            double kappa = model.gm().kappa;
            for (int i = 0; i < N; ++i) {
                double bump = amp * std::exp(-xs[i] * xs[i] / (2.0 * 4.0 * eps_L * eps_L));
                z[2 * i] = kappa + 0.1 + bump;
                z[2 * i + 1] = std::max(0.5 * amp, 1.0);
            }
            break;
        }
    }
}

double outer_scale(const ModelSpec& model) {
    switch (model.kind) {
        case ModelKind::Schnakenberg: return 2.0 * model.schnakenberg().a;
        case ModelKind::Brusselator: return 2.0 * model.brusselator().a;
        case ModelKind::GM: return std::max(2.0 * model.gm().kappa, 0.5);
    }
    return 1.0;
}

} // namespace

double SimConfig::growth_rate() const { return rho < 0 ? model.epsilon * model.epsilon : rho; }

std::vector<std::string> SimConfig::validate() const {
    auto warnings = model.validate();
    // rho < 0 selects the default growth rate eps^2; rho == 0 freezes the domain
    if (!(L0 > 0)) throw config_error("L0 must be positive");
    if (n < 16) throw config_error("need at least 16 spatial intervals");
    if (rho == 0 && !(t_end > 0)) throw config_error("static run (rho=0) needs t_end > 0");
    if (rho > 0 && !(L_end > L0)) throw config_error("L_end must exceed L0");
    if (init == InitKind::FromState &&
        (init_v.size() != static_cast<std::size_t>(n + 1) || init_u.size() != init_v.size()))
        throw config_error("FromState initial data must have n+1 nodes per field");
    double L_max = rho > 0 ? L_end : L0;
    double cells = model.epsilon / L_max * n; // cells per inner width 2 eps_L
    if (cells < 10)
        warnings.push_back("inner width resolved by " + std::to_string(cells) +
                           " cells at L_end (want >= 10; hard stop below 6)");
    if (!(track_dL > 0) || !(snapshot_dL > 0)) throw config_error("sampling strides must be positive");
    return warnings;
}

nlohmann::json SimConfig::to_json() const {
    return {{"model", model.to_json()},
            {"rho", rho},
            {"L0", L0},
            {"L_end", L_end},
            {"t_end", t_end},
            {"n", n},
            {"dilution", dilution},
            {"init", init == InitKind::CompositeOneSpike ? "composite_one_spike"
                     : init == InitKind::GaussianSeed    ? "gaussian_seed"
                                                         : "from_state"},
            {"snapshot_dL", snapshot_dL},
            {"track_dL", track_dL},
            {"rtol", rtol},
            {"atol", atol},
            {"amp_factor", amp_factor}};
}

SimConfig SimConfig::from_json(const nlohmann::json& j) {
    static const std::vector<std::string> known{"model", "rho", "L0", "L_end", "t_end", "n",
                                               "dilution", "init", "snapshot_dL", "track_dL",
                                               "rtol", "atol", "amp_factor", "checkpoint_path"};
    for (auto& [k, _] : j.items())
        if (std::find(known.begin(), known.end(), k) == known.end())
            throw config_error("unknown SimConfig field '" + k + "'");
    SimConfig c;
    c.model = ModelSpec::from_json(j.at("model"));
    c.rho = j.value("rho", -1.0);
    c.L0 = j.value("L0", 1.0);
    c.L_end = j.value("L_end", 4.0);
    c.t_end = j.value("t_end", 0.0);
    c.n = j.value("n", 4096);
    c.dilution = j.value("dilution", false);
    std::string init = j.value("init", "composite_one_spike");
    if (init == "composite_one_spike") c.init = InitKind::CompositeOneSpike;
    else if (init == "gaussian_seed") c.init = InitKind::GaussianSeed;
    else if (init == "from_state") c.init = InitKind::FromState;
    else throw config_error("unknown init kind '" + init + "'");
    c.snapshot_dL = j.value("snapshot_dL", 0.04);
    c.track_dL = j.value("track_dL", 0.005);
    c.rtol = j.value("rtol", 1e-6);
    c.atol = j.value("atol", 1e-9);
    c.amp_factor = j.value("amp_factor", 3.0);
    c.checkpoint_path = j.value("checkpoint_path", std::string{});
    return c;
}

std::string to_string(EventKind k) {
    switch (k) {
        case EventKind::Replication: return "replication";
        case EventKind::NucleationBoundary: return "nucleation_boundary";
        case EventKind::NucleationInterior: return "nucleation_interior";
        case EventKind::Ambiguous: return "ambiguous";
    }
    return "?";
}

SpikeCount count_spikes(const std::vector<double>& v, const ModelSpec& model, double L, int n,
                        double amp_factor) {
    int N = n + 1;
    if (static_cast<int>(v.size()) != N) throw config_error("count_spikes: field size != n+1");
    for (double x : v)
        if (!std::isfinite(x)) throw config_error("count_spikes: field not finite");
    double eps_L = model.epsilon / L;
    double threshold = amp_factor * outer_scale(model);

    // candidate local maxima (boundaries included via one-sided test)
    std::vector<int> peaks;
    if (v[0] > v[1]) peaks.push_back(0);
    for (int i = 1; i + 1 < N; ++i)
        if (v[i] > v[i - 1] && v[i] >= v[i + 1]) peaks.push_back(i);
    if (v[N - 1] > v[N - 2]) peaks.push_back(N - 1);

    // prominence: drop to the highest saddle toward a higher peak or the edge
    auto prominence = [&](int p) {
        double peak = v[p];
        double left_min = peak, right_min = peak;
        for (int i = p - 1; i >= 0; --i) {
            if (v[i] > peak) break;
            left_min = std::min(left_min, v[i]);
            if (i == 0) left_min = std::min(left_min, v[0]);
        }
        for (int i = p + 1; i < N; ++i) {
            if (v[i] > peak) break;
            right_min = std::min(right_min, v[i]);
        }
        return peak - std::max(std::min(left_min, right_min), 0.0);
    };

    struct P {
        double x, value;
        bool boundary;
    };
    std::vector<P> accepted;
    for (int p : peaks) {
        if (v[p] <= threshold) continue;
        if (prominence(p) <= 0.5 * v[p]) continue;
        double x = -1.0 + 2.0 * double(p) / n;
        bool boundary = p <= 3 || p >= N - 4; // within 3 cells of x = +-1
        accepted.push_back({x, v[p], boundary});
    }
    // merge humps closer than 10 eps_L (volcano transients count once)
    std::sort(accepted.begin(), accepted.end(), [](const P& a, const P& b) { return a.x < b.x; });
    std::vector<P> merged;
    for (const auto& p : accepted) {
        if (!merged.empty() && p.x - merged.back().x < 10.0 * eps_L) {
            if (p.value > merged.back().value)
                merged.back() = {p.x, p.value, merged.back().boundary || p.boundary};
            else
                merged.back().boundary = merged.back().boundary || p.boundary;
        } else {
            merged.push_back(p);
        }
    }
    SpikeCount out;
    for (const auto& p : merged) {
        out.locations.push_back(p.x);
        out.at_boundary.push_back(p.boundary);
        out.count += p.boundary ? 0.5 : 1.0;
    }
    return out;
}

EventLog detect_events(const SimTrajectory& traj) {
    const auto& track = traj.spike_track;
    EventLog log;
    if (track.size() < 2) return log;
    double max_dL = 0;
    for (std::size_t i = 1; i < track.size(); ++i)
        max_dL = std::max(max_dL, track[i].L - track[i - 1].L);
    if (max_dL > 0.02 + 1e-12)
        throw config_error("detect_events needs spike samples with dL < 0.02 (got " +
                           std::to_string(max_dL) + ")");

    for (std::size_t i = 1; i < track.size(); ++i) {
        const auto& prev = track[i - 1];
        const auto& cur = track[i];
        if (cur.count <= prev.count + 1e-9) continue;
        // debounce: the higher count must persist at the next sample too
        if (i + 1 < track.size() && track[i + 1].count < cur.count - 1e-9) continue;
        double eps_L = traj.config.model.epsilon / cur.L;
        bool any_rep = false, any_bdry = false, any_int = false;
        for (std::size_t p = 0; p < cur.locations.size(); ++p) {
            double d = 1e9;
            for (double q : prev.locations) d = std::min(d, std::fabs(cur.locations[p] - q));
            if (d <= 5.0 * eps_L) continue; // matched to an existing spike
            if (cur.at_boundary[p])
                any_bdry = true;
            else if (d <= 15.0 * eps_L)
                any_rep = true;
            else
                any_int = true;
        }
        Event e;
        e.t = cur.t;
        e.L = cur.L;
        e.count_before = prev.count;
        e.count_after = cur.count;
        int kinds = int(any_rep) + int(any_bdry) + int(any_int);
        if (kinds > 1)
            e.kind = EventKind::Ambiguous;
        else if (any_bdry)
            e.kind = EventKind::NucleationBoundary;
        else if (any_int)
            e.kind = EventKind::NucleationInterior;
        else
            e.kind = EventKind::Replication;
        // replications can re-trigger while children separate; collapse entries
        // at nearly the same L
        if (!log.entries.empty() && cur.L - log.entries.back().L < 0.04 &&
            e.kind == log.entries.back().kind) {
            log.entries.back().count_after = cur.count;
            continue;
        }
        log.entries.push_back(e);
    }
    return log;
}

namespace {

struct Checkpoint {
    double t, dt, dt_prev;
    std::vector<double> z, z_prev;
    double next_track_L, next_snap_L;
    SimTrajectory traj;
};

void save_checkpoint(const Checkpoint& c, const std::string& path) {
    nlohmann::json snaps = nlohmann::json::array();
    for (const auto& s : c.traj.snapshots)
        snaps.push_back({{"t", s.t}, {"L", s.L}, {"v", s.v}, {"u", s.u}});
    nlohmann::json track = nlohmann::json::array();
    for (const auto& s : c.traj.spike_track) {
        std::vector<int> bd(s.at_boundary.begin(), s.at_boundary.end());
        track.push_back({{"t", s.t}, {"L", s.L}, {"count", s.count}, {"locations", s.locations},
                         {"boundary", bd}});
    }
    nlohmann::json l2 = nlohmann::json::array();
    for (const auto& e : c.traj.l2_series) l2.push_back({e[0], e[1], e[2]});
    nlohmann::json j{{"t", c.t},
                     {"dt", c.dt},
                     {"dt_prev", c.dt_prev},
                     {"z", c.z},
                     {"z_prev", c.z_prev},
                     {"next_track_L", c.next_track_L},
                     {"next_snap_L", c.next_snap_L},
                     {"steps", c.traj.steps},
                     {"newton_iterations", c.traj.newton_iterations},
                     {"min_v", c.traj.min_v},
                     {"min_u", c.traj.min_u},
                     {"max_step_residual", c.traj.max_step_residual},
                     {"snapshots", snaps},
                     {"spike_track", track},
                     {"l2_series", l2}};
    io::write_json(j, path + ".tmp");
    std::filesystem::rename(path + ".tmp", path);
}

bool load_checkpoint(Checkpoint& c, const std::string& path) {
    if (!std::filesystem::exists(path)) return false;
    auto j = io::read_json(path);
    c.t = j.at("t").get<double>();
    c.dt = j.at("dt").get<double>();
    c.dt_prev = j.at("dt_prev").get<double>();
    c.z = j.at("z").get<std::vector<double>>();
    c.z_prev = j.at("z_prev").get<std::vector<double>>();
    c.next_track_L = j.at("next_track_L").get<double>();
    c.next_snap_L = j.at("next_snap_L").get<double>();
    c.traj.steps = j.at("steps").get<long>();
    c.traj.newton_iterations = j.at("newton_iterations").get<long>();
    c.traj.min_v = j.at("min_v").get<double>();
    c.traj.min_u = j.at("min_u").get<double>();
    c.traj.max_step_residual = j.at("max_step_residual").get<double>();
    for (const auto& s : j.at("snapshots")) {
        Snapshot snap;
        snap.t = s.at("t").get<double>();
        snap.L = s.at("L").get<double>();
        snap.v = s.at("v").get<std::vector<double>>();
        snap.u = s.at("u").get<std::vector<double>>();
        c.traj.snapshots.push_back(std::move(snap));
    }
    for (const auto& s : j.at("spike_track")) {
        SpikeSample sample;
        sample.t = s.at("t").get<double>();
        sample.L = s.at("L").get<double>();
        sample.count = s.at("count").get<double>();
        sample.locations = s.at("locations").get<std::vector<double>>();
        for (int b : s.at("boundary").get<std::vector<int>>()) sample.at_boundary.push_back(b != 0);
        c.traj.spike_track.push_back(std::move(sample));
    }
    for (const auto& e : j.at("l2_series"))
        c.traj.l2_series.push_back({e[0].get<double>(), e[1].get<double>(), e[2].get<double>()});
    return true;
}

} // namespace

SimTrajectory simulate_growing(const SimConfig& cfg) {
    cfg.validate();
    double rho = cfg.growth_rate();
    bool growing = rho > 0;
    double t_end = growing ? std::log(cfg.L_end / cfg.L0) / rho : cfg.t_end;
    rd::Assembly disc(cfg.model, cfg.n, cfg.dilution, growing ? rho : 0.0);
    int N = disc.N;
    auto L_of = [&](double t) { return growing ? cfg.L0 * std::exp(rho * t) : cfg.L0; };

    SimTrajectory traj;
    traj.config = cfg;

    // state and one history level for BDF2 + linear predictor
    std::vector<double> z, z_prev;
    double t = 0, dt = 1e-5, dt_prev = 0;
    double next_track_L, next_snap_L;

    Checkpoint ck;
    bool resumed = !cfg.checkpoint_path.empty() && load_checkpoint(ck, cfg.checkpoint_path);
    if (resumed) {
        t = ck.t;
        dt = ck.dt;
        dt_prev = ck.dt_prev;
        z = ck.z;
        z_prev = ck.z_prev;
        next_track_L = ck.next_track_L;
        next_snap_L = ck.next_snap_L;
        traj = std::move(ck.traj);
        traj.config = cfg;
    } else {
        switch (cfg.init) {
            case InitKind::CompositeOneSpike: composite_initial(cfg.model, cfg.L0, cfg.n, z); break;
            case InitKind::GaussianSeed: gaussian_initial(cfg.model, cfg.L0, cfg.n, z); break;
            case InitKind::FromState: {
                z.resize(2 * N);
                for (int i = 0; i < N; ++i) {
                    z[2 * i] = cfg.init_v[i];
                    z[2 * i + 1] = cfg.init_u[i];
                }
                break;
            }
        }
        z_prev = z;
        traj.min_v = 1e300;
        traj.min_u = 1e300;
        next_track_L = growing ? cfg.L0 : -1;
        next_snap_L = cfg.L0;
    }

    std::vector<double> F(2 * N), G(2 * N), step(2 * N), zpred(2 * N);
    BlockTridiag J(N);

    auto weighted_rms = [&](const std::vector<double>& d, const std::vector<double>& ref) {
        double acc = 0;
        for (std::size_t i = 0; i < d.size(); ++i) {
            double w = 1.0 / (cfg.atol + cfg.rtol * std::fabs(ref[i]));
            acc += (d[i] * w) * (d[i] * w);
        }
        return std::sqrt(acc / d.size());
    };

    auto record_track = [&](double tt, double LL) {
        std::vector<double> v(N);
        for (int i = 0; i < N; ++i) v[i] = z[2 * i];
        auto sc = count_spikes(v, cfg.model, LL, cfg.n, cfg.amp_factor);
        SpikeSample s;
        s.t = tt;
        s.L = LL;
        s.count = sc.count;
        s.locations = sc.locations;
        s.at_boundary = sc.at_boundary;
        traj.spike_track.push_back(std::move(s));
        double l2 = 0;
        for (int i = 0; i < N; ++i) {
            double wq = (i == 0 || i == N - 1) ? 0.5 : 1.0;
            l2 += wq * v[i] * v[i];
        }
        traj.l2_series.push_back({tt, LL, std::sqrt(l2 * disc.h)});
    };
    auto record_snapshot = [&](double tt, double LL) {
        Snapshot s;
        s.t = tt;
        s.L = LL;
        s.v.resize(N);
        s.u.resize(N);
        for (int i = 0; i < N; ++i) {
            s.v[i] = z[2 * i];
            s.u[i] = z[2 * i + 1];
        }
        traj.snapshots.push_back(std::move(s));
    };
    if (!resumed) {
        record_track(0, cfg.L0);
        record_snapshot(0, cfg.L0);
        if (growing) {
            next_track_L = cfg.L0 + cfg.track_dL;
            next_snap_L = cfg.L0 + cfg.snapshot_dL;
        }
    }

    auto wall_start = std::chrono::steady_clock::now();
    double last_ckpt = 0;
    int accepted_since_start = resumed ? 3 : 0; // >=2 enables BDF2
    double track_t_next = cfg.t_end > 0 && !growing ? cfg.t_end / 400.0 : 0;

    while (t < t_end - 1e-12 * t_end) {
        double L_now = L_of(t);
        if (cfg.model.epsilon / L_now * cfg.n < 6.0)
            throw resolution_exceeded("inner width below 6 grid cells at L=" + std::to_string(L_now) +
                                      " (n=" + std::to_string(cfg.n) + "; increase n)");
        // cap dt so L-marks are not skipped
        if (growing) dt = std::min(dt, 0.95 * cfg.track_dL / (rho * L_now));
        dt = std::min(dt, t_end - t);

        double t_new = t + dt;
        double L_new = L_of(t_new);
        bool bdf2 = accepted_since_start >= 2;
        double r = bdf2 ? dt / dt_prev : 0.0;
        double a0 = bdf2 ? (1 + 2 * r) / (1 + r) : 1.0;
        double a1 = bdf2 ? -(1 + r) : -1.0;
        double a2 = bdf2 ? r * r / (1 + r) : 0.0;

        // linear predictor; its gap to the corrector drives a conservative
        // (order-2) error controller
        if (dt_prev > 0) {
            double s1 = dt / dt_prev;
            for (int i = 0; i < 2 * N; ++i) zpred[i] = z[i] + s1 * (z[i] - z_prev[i]);
        } else {
            zpred = z;
        }

        // Newton on G(w) = M(a0 w + a1 z + a2 z_prev)/dt - F(w, t_new)
        std::vector<double> w = zpred;
        bool ok = false;
        double res_w = 0;
        for (int it = 0; it < 8; ++it) {
            disc.rhs(w, L_new, F);
            for (int i = 0; i < 2 * N; ++i)
                G[i] = disc.mass(i) * (a0 * w[i] + a1 * z[i] + a2 * z_prev[i]) / dt - F[i];
            disc.newton_matrix(w, L_new, a0 / dt, J);
            BlockTridiagLU lu(J);
            for (int i = 0; i < 2 * N; ++i) step[i] = -G[i];
            lu.solve(step);
            bool finite = true;
            for (int i = 0; i < 2 * N; ++i) {
                w[i] += step[i];
                if (!std::isfinite(w[i])) finite = false;
            }
            ++traj.newton_iterations;
            if (!finite) break;
            double ds = weighted_rms(step, w);
            if (ds < 0.02) {
                disc.rhs(w, L_new, F);
                for (int i = 0; i < 2 * N; ++i)
                    G[i] = disc.mass(i) * (a0 * w[i] + a1 * z[i] + a2 * z_prev[i]) / dt - F[i];
                res_w = weighted_rms(G, w) * dt; // scaled back to state units
                ok = true;
                break;
            }
        }

        double err = ok ? 0.0 : 2.0;
        if (ok) {
            std::vector<double> d(2 * N);
            for (int i = 0; i < 2 * N; ++i) d[i] = w[i] - zpred[i];
            err = weighted_rms(d, w) * 0.5;
        }
        if (!ok || err > 1.0) {
            dt *= ok ? std::max(0.2, 0.85 / std::sqrt(err)) : 0.3;
            if (dt < 1e-11) throw step_size_underflow("time step underflow at t=" + std::to_string(t));
            continue;
        }

        // accept
        z_prev = z;
        z = w;
        dt_prev = dt;
        t = t_new;
        ++traj.steps;
        ++accepted_since_start;
        traj.max_step_residual = std::max(traj.max_step_residual, res_w);
        for (int i = 0; i < N; ++i) {
            traj.min_v = std::min(traj.min_v, z[2 * i]);
            traj.min_u = std::min(traj.min_u, z[2 * i + 1]);
        }
        double growth = err > 1e-10 ? 0.9 / std::sqrt(err) : 2.5;
        dt *= std::clamp(growth, 0.3, 2.5);

        double L_cur = L_of(t);
        if (growing) {
            while (L_cur >= next_track_L - 1e-12) {
                record_track(t, L_cur);
                next_track_L += cfg.track_dL;
            }
            if (L_cur >= next_snap_L - 1e-12) {
                record_snapshot(t, L_cur);
                while (next_snap_L <= L_cur + 1e-12) next_snap_L += cfg.snapshot_dL;
            }
        } else if (track_t_next > 0 && t >= track_t_next - 1e-12) {
            record_track(t, L_cur);
            record_snapshot(t, L_cur);
            track_t_next += cfg.t_end / 400.0;
        }

        if (!cfg.checkpoint_path.empty()) {
            double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
            if (wall - last_ckpt > cfg.checkpoint_every_s) {
                last_ckpt = wall;
                Checkpoint c{t, dt, dt_prev, z, z_prev, next_track_L, next_snap_L, traj};
                save_checkpoint(c, cfg.checkpoint_path);
            }
        }
    }

    // final state snapshot + track point
    record_track(t, L_of(t));
    record_snapshot(t, L_of(t));
    if (growing) traj.events = detect_events(traj);
    return traj;
}

void save_events_csv(const EventLog& log, const std::string& path) {
    io::CsvWriter csv(path);
    csv.header("t,L,kind,count_before,count_after");
    for (const auto& e : log.entries)
        csv.raw(io::format_double(e.t) + "," + io::format_double(e.L) + "," + to_string(e.kind) +
                "," + io::format_double(e.count_before) + "," + io::format_double(e.count_after));
}

void export_heatmap_csv(const SimTrajectory& traj, const std::string& path, int max_cols) {
    if (traj.snapshots.empty()) throw config_error("empty trajectory");
    io::CsvWriter csv(path);
    int N = static_cast<int>(traj.snapshots[0].v.size());
    int stride = std::max(1, (N + max_cols - 1) / max_cols);
    std::string hdr = "L";
    for (int i = 0; i < N; i += stride)
        hdr += ",x=" + io::format_double(-1.0 + 2.0 * double(i) / (N - 1));
    csv.header(hdr);
    for (const auto& s : traj.snapshots) {
        std::vector<double> row{s.L};
        for (int i = 0; i < N; i += stride) row.push_back(s.v[i]);
        csv.row(row);
    }
}

void export_heatmap_svg(const SimTrajectory& traj, const std::string& path, int max_cols,
                        int max_rows) {
    if (traj.snapshots.empty()) throw config_error("empty trajectory");
    int N = static_cast<int>(traj.snapshots[0].v.size());
    int cstride = std::max(1, (N + max_cols - 1) / max_cols);
    int rstride = std::max<std::size_t>(1, (traj.snapshots.size() + max_rows - 1) / max_rows);
    std::vector<std::vector<double>> rows;
    for (std::size_t j = 0; j < traj.snapshots.size(); j += rstride) {
        std::vector<double> row;
        for (int i = 0; i < N; i += cstride) row.push_back(traj.snapshots[j].v[i]);
        rows.push_back(std::move(row));
    }
    io::write_matrix_svg(rows, path);
}

void save_snapshot_csv(const Snapshot& snap, const std::string& path) {
    io::CsvWriter csv(path);
    csv.header("x,v,u");
    int N = static_cast<int>(snap.v.size());
    for (int i = 0; i < N; ++i)
        csv.row({-1.0 + 2.0 * double(i) / (N - 1), snap.v[i], snap.u[i]});
}

} // namespace spikelab::pde
