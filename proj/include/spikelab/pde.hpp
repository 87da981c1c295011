#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "spikelab/models.hpp"
#include "spikelab/outer.hpp"

namespace spikelab::pde {

using models::ModelKind;
using models::ModelSpec;

enum class InitKind { CompositeOneSpike, GaussianSeed, FromState };

struct SimConfig {
    ModelSpec model;
    double rho = -1;   // <0: default growth rate eps^2; 0: static domain (needs t_end)
    double L0 = 1.0;
    double L_end = 4.0;
    double t_end = 0;  // used instead of L_end when rho == 0 (static domain)
    int n = 4096;      // spatial intervals on [-1,1] (n+1 nodes)
    bool dilution = false;
    InitKind init = InitKind::CompositeOneSpike;
    std::vector<double> init_v, init_u; // FromState fields on the n+1 grid

    double snapshot_dL = 0.04; // full-field snapshots (heatmap rows)
    double track_dL = 0.005;   // spike-count sampling; events quantize to this
    double rtol = 1e-6;
    double atol = 1e-9;
    double amp_factor = 3.0;   // spike amplitude threshold over the outer scale
    std::string checkpoint_path;
    double checkpoint_every_s = 60.0;

    double growth_rate() const; // rho, defaulted to eps^2
    /// Throws config_error on hard violations; returns warnings (resolution
    /// margins and similar).
    std::vector<std::string> validate() const;
    nlohmann::json to_json() const;
    static SimConfig from_json(const nlohmann::json& j);
};

struct Snapshot {
    double t = 0, L = 0;
    std::vector<double> v, u;
};

struct SpikeSample {
    double t = 0, L = 0;
    double count = 0; // boundary spikes weigh 1/2
    std::vector<double> locations;
    std::vector<bool> at_boundary;
};

enum class EventKind { Replication, NucleationBoundary, NucleationInterior, Ambiguous };

std::string to_string(EventKind k);

struct Event {
    double t = 0, L = 0;
    double count_before = 0, count_after = 0;
    EventKind kind = EventKind::Replication;
};

struct EventLog {
    std::vector<Event> entries;
};

struct SimTrajectory {
    SimConfig config;
    std::vector<Snapshot> snapshots;
    std::vector<SpikeSample> spike_track;
    std::vector<std::array<double, 3>> l2_series; // (t, L, ||v||_2 on [-1,1])
    EventLog events;
    long steps = 0;
    long newton_iterations = 0;
    double min_v = 0, min_u = 0;      // field minima over the whole run
    double max_step_residual = 0;     // worst accepted implicit-step residual (weighted)
};

struct SpikeCount {
    double count = 0;
    std::vector<double> locations;
    std::vector<bool> at_boundary;
};

/// Local maxima of v filtered by amplitude (> amp_factor x outer scale) and
/// prominence (> 50% of peak value); peaks closer than 10 eps_L merge;
/// maxima within 3 cells of x = +-1 count as boundary spikes with weight 1/2.
SpikeCount count_spikes(const std::vector<double>& v, const ModelSpec& model, double L, int n,
                        double amp_factor = 3.0);

/// Classifies count increases along the spike track: new peaks within
/// 15 eps_L of an existing one are a replication, new boundary peaks a
/// boundary nucleation, anything farther an interior nucleation.
EventLog detect_events(const SimTrajectory& traj);

/// Stiff method-of-lines integration of the Lagrangian system on x in [-1,1]
/// with L(t) = L0 e^{rho t}: second-order central differences, adaptive
/// variable-step BDF2 with a full Newton and block-tridiagonal solves.
SimTrajectory simulate_growing(const SimConfig& cfg);

void save_events_csv(const EventLog& log, const std::string& path);
void export_heatmap_csv(const SimTrajectory& traj, const std::string& path, int max_cols = 512);
void export_heatmap_svg(const SimTrajectory& traj, const std::string& path, int max_cols = 400,
                        int max_rows = 300);
void save_snapshot_csv(const Snapshot& snap, const std::string& path);

} // namespace spikelab::pde
