#pragma once

#include <memory>
#include <string>
#include <vector>

#include "semnav/config.hpp"
#include "semnav/experiment.hpp"
#include "semnav/trainer.hpp"

namespace semnav {

// Builds the world for cfg, trains under out_root/<run_dir_name>, and
// returns the result. The one-stop entry used by the CLI and the ablation
// grid.
TrainResult train_run(const TrainConfig& cfg, const std::string& out_root);

// Reconstructs an agent of cfg's architecture and loads the checkpoint
// (parameters, embeddings, and adjacency all come from the file).
std::unique_ptr<NavAgent> load_agent(const TrainConfig& cfg, const World& world,
                                     const std::string& checkpoint_path);

// Pooled SPL percentage on unseen scenes with known targets.
double eval_spl_unseen_known(const TrainConfig& cfg, const World& world, const NavAgent& agent);

struct AblationCell {
    std::string kind;   // objects | relations | fully_connected | random
    double fraction = 0.0;
    double spl_mean_pct = 0.0;
    double spl_std_pct = 0.0;  // nonzero only for the multi-seed random cell
    int seeds = 1;
};

struct AblationTable {
    std::vector<AblationCell> cells;
    std::string to_csv() const;
};

// Graph-degradation grid: object and relation drops at {0,.2,.4,.6,.8} (the
// 0% cell reuses the base run's number in both rows), a fully connected
// variant, and a random variant averaged over 3 graph seeds. Every cell
// retrains from scratch.
AblationTable ablation_suite(const TrainConfig& base, const std::string& out_root);

}  // namespace semnav
