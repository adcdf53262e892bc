#pragma once

#include "tdscha/dynamics.hpp"

#include <string>
#include <vector>

namespace tdscha {

// CSV with one row per sample: t, centroid and fluctuation columns for the
// observed modes (named from the basis labels), the four force channels on
// the target mode, energies and the minimum uncertainty product.  Values are
// printed with %.17g so a reread is bit exact.
void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          const ModeBasis& basis, const std::vector<int>& obs_modes);

// One JSON object per line: {"t":..,"R":[..],"P":[..],"A":[[..]],"B":..,"G":..}
void write_snapshots_jsonl(const std::string& path,
                           const std::vector<GaussianState>& snapshots);
std::vector<GaussianState> load_snapshots_jsonl(const std::string& path);

struct SummarizeOptions {
    double x0 = 0.0;           // displacement scale defining the trapped state
    double sustain = 0.0;      // how long |R| must stay above x0/2 to count
    std::string fe_label = "FE";
    std::string ir_label = "IR";
};

struct TrajectorySummary {
    bool transition = false;
    double t_transition = 0.0; // start of the first sustained excursion
    double min_a_fe = 0.0;
    double max_r_ir = 0.0;     // largest centroid swing on the pumped mode
    double min_uncertainty = 0.0;
    bool relaxed_back = false; // came back below x0/4 after the peak and stayed
    double t_relax_back = 0.0;
    double final_r_fe = 0.0;
};

// Reads a trajectory CSV produced by write_trajectory_csv and reduces it.
TrajectorySummary summarize_csv(const std::string& path, const SummarizeOptions& opts);

// Same reduction on in-memory records (obs_modes gives the column meaning).
TrajectorySummary summarize_records(const std::vector<ObsRecord>& obs,
                                    const ModeBasis& basis,
                                    const std::vector<int>& obs_modes,
                                    const SummarizeOptions& opts);

} // namespace tdscha
