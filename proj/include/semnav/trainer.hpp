#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "semnav/agent.hpp"
#include "semnav/checkpoint.hpp"
#include "semnav/config.hpp"
#include "semnav/experiment.hpp"
#include "semnav/store.hpp"
#include "semnav/tensor.hpp"

namespace semnav {

struct TrajectoryStep {
    Observation obs;
    int action = 0;
    double reward = 0.0;
};

struct Trajectory {
    std::vector<TrajectoryStep> steps;
    int target = -1;
    bool terminal = false;    // success/stop ended the episode; bootstrap 0
    Observation final_obs;    // state after the last step, for bootstrapping
};

// R_t = r_t + gamma * R_{t+1}, seeded with the bootstrap value.
std::vector<double> compute_returns(const std::vector<double>& rewards, double bootstrap_value,
                                    double gamma);

// Sum over steps of  -log pi(a_t|s_t) * (R_t - V(s_t))  (advantage frozen)
//                    + value_weight * (R_t - V(s_t))^2
//                    - entropy_beta * H(pi(.|s_t)).
Tensor a3c_loss(const NavAgent& agent, const Trajectory& traj, const std::vector<double>& returns,
                double value_weight, double entropy_beta);

// Same loss with the per-step advantages supplied by the caller instead of
// recomputed from V. The primary entry point computes R_t - V(s_t) and
// delegates here; supplying them explicitly keeps the policy term's
// stop-gradient boundary visible to numerical checks.
Tensor a3c_loss(const NavAgent& agent, const Trajectory& traj, const std::vector<double>& returns,
                const std::vector<double>& advantages, double value_weight, double entropy_beta);

double learning_rate_at(double lr0, long long frame, long long total_frames);

struct MetricsRow {
    long long frame = 0;
    std::string split;
    double success_rate = 0.0;
    double spl = 0.0;
    double mean_reward = 0.0;
    std::uint64_t seed = 0;
};

std::string metrics_to_csv(const std::vector<MetricsRow>& rows);
std::vector<MetricsRow> metrics_from_csv(const std::string& path);

struct TrainResult {
    std::string run_dir;
    std::vector<MetricsRow> metrics;
    double best_val_spl = -1.0;
    long long frames_done = 0;
    std::string final_checkpoint;  // paths
    std::string best_checkpoint;
};

// Spawns cfg.workers A3C workers against one shared store, validates at the
// cadence marks, and leaves config.txt, metrics.csv, final.ckpt and
// best.ckpt under run_dir.
TrainResult train(const TrainConfig& cfg, const World& world, const std::string& run_dir);

}  // namespace semnav
