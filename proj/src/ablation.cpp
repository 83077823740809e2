#include "semnav/ablation.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "semnav/checkpoint.hpp"
#include "semnav/errors.hpp"
#include "semnav/evaluator.hpp"
#include "semnav/rng.hpp"

namespace semnav {

TrainResult train_run(const TrainConfig& cfg, const std::string& out_root) {
    World world = build_world(cfg);
    return train(cfg, world, out_root + "/" + cfg.run_dir_name());
}

std::unique_ptr<NavAgent> load_agent(const TrainConfig& cfg, const World& world,
                                     const std::string& checkpoint_path) {
    auto agent = std::make_unique<NavAgent>(agent_config(cfg, world.vocab.size()),
                                            world.embeddings, world.adj_norm);
    agent->load_checkpoint(Checkpoint::load(checkpoint_path));
    return agent;
}

double eval_spl_unseen_known(const TrainConfig& cfg, const World& world, const NavAgent& agent) {
    std::vector<Scene> unseen;
    for (const auto& set : world.test_scenes) unseen.insert(unseen.end(), set.begin(), set.end());
    EvalResult res = run_episodes(&agent, PolicyKind::Greedy, unseen, world.vocab,
                                  /*novel_targets=*/false, cfg.with_stop, cfg.eval_episodes,
                                  derive_seed(cfg.seed, "ablate-eval", 0), cfg.noise_sigma);
    if (res.records.empty()) throw ContractError("eval_spl_unseen_known: no evaluable episodes");
    return std::round(spl(res.records) * 1000.0) / 10.0;
}

std::string AblationTable::to_csv() const {
    std::ostringstream out;
    out << "kind,fraction,spl_mean_pct,spl_std_pct,seeds\n";
    char buf[96];
    for (const AblationCell& c : cells) {
        std::snprintf(buf, sizeof buf, "%s,%.2f,%.1f,%.1f,%d", c.kind.c_str(), c.fraction,
                      c.spl_mean_pct, c.spl_std_pct, c.seeds);
        out << buf << '\n';
    }
    return out.str();
}

namespace {

double train_and_measure(const TrainConfig& cfg, const std::string& out_root) {
    World world = build_world(cfg);
    TrainResult r = train(cfg, world, out_root + "/" + cfg.run_dir_name());
    std::unique_ptr<NavAgent> agent = load_agent(cfg, world, r.best_checkpoint);
    return eval_spl_unseen_known(cfg, world, *agent);
}

}  // namespace

AblationTable ablation_suite(const TrainConfig& base, const std::string& out_root) {
    base.validate();
    AblationTable table;

    TrainConfig zero = base;
    zero.graph_variant = GraphVariant::Real;
    zero.drop_fraction = 0.0;
    double base_spl = train_and_measure(zero, out_root);

    const double fractions[4] = {0.2, 0.4, 0.6, 0.8};
    for (const char* kind : {"objects", "relations"}) {
        table.cells.push_back({kind, 0.0, base_spl, 0.0, 1});
        for (double f : fractions) {
            TrainConfig cfg = base;
            cfg.graph_variant = std::string(kind) == "objects" ? GraphVariant::DroppedObjects
                                                               : GraphVariant::DroppedRelations;
            cfg.drop_fraction = f;
            table.cells.push_back({kind, f, train_and_measure(cfg, out_root), 0.0, 1});
        }
    }

    TrainConfig dense = base;
    dense.graph_variant = GraphVariant::Dense;
    dense.drop_fraction = 0.0;
    table.cells.push_back({"fully_connected", 0.0, train_and_measure(dense, out_root), 0.0, 1});

    std::vector<double> random_spls;
    for (int s = 0; s < 3; ++s) {
        TrainConfig cfg = base;
        cfg.graph_variant = GraphVariant::Random;
        cfg.drop_fraction = 0.0;
        cfg.seed = base.seed + static_cast<std::uint64_t>(s);
        random_spls.push_back(train_and_measure(cfg, out_root));
    }
    double mean = (random_spls[0] + random_spls[1] + random_spls[2]) / 3.0;
    double var = 0.0;
    for (double v : random_spls) var += (v - mean) * (v - mean);
    var /= 3.0;  // population std over the full 3-run protocol
    table.cells.push_back({"random", 0.0, mean, std::sqrt(var), 3});
    return table;
}

}  // namespace semnav
