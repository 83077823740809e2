#include "semnav/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "semnav/errors.hpp"
#include "semnav/evaluator.hpp"
#include "semnav/rng.hpp"

namespace semnav {

std::vector<double> compute_returns(const std::vector<double>& rewards, double bootstrap_value,
                                    double gamma) {
    if (rewards.empty()) throw ContractError("compute_returns: empty rollout");
    std::vector<double> out(rewards.size());
    double r = bootstrap_value;
    for (size_t i = rewards.size(); i-- > 0;) {
        r = rewards[i] + gamma * r;
        out[i] = r;
    }
    return out;
}

namespace {

Tensor step_loss_term(const PolicyOutput& out, int action, double ret, double advantage,
                      double value_weight, double entropy_beta) {
    Tensor logp = log_softmax(out.logits);
    Tensor probs = softmax(out.logits);
    Tensor logp_a = select(logp, 0, action);

    Tensor policy_term = scale(logp_a, -advantage);
    Tensor diff = sub(Tensor::scalar(ret), out.value);
    Tensor value_term = scale(mul(diff, diff), value_weight);
    // -beta * H = +beta * sum(p * log p)
    Tensor entropy_term = scale(sum(mul(probs, logp)), entropy_beta);
    return add(add(policy_term, value_term), entropy_term);
}

}  // namespace

Tensor a3c_loss(const NavAgent& agent, const Trajectory& traj, const std::vector<double>& returns,
                double value_weight, double entropy_beta) {
    if (traj.steps.empty()) throw ContractError("a3c_loss: empty trajectory");
    if (returns.size() != traj.steps.size())
        throw ShapeError("a3c_loss: returns/steps length mismatch");

    Tensor total;
    for (size_t t = 0; t < traj.steps.size(); ++t) {
        const TrajectoryStep& step = traj.steps[t];
        PolicyOutput out = agent.forward(step.obs, traj.target);
        // Plain double: the policy term must not differentiate through V.
        double advantage = returns[t] - out.value.item();
        Tensor step_loss =
            step_loss_term(out, step.action, returns[t], advantage, value_weight, entropy_beta);
        total = total.defined() ? add(total, step_loss) : step_loss;
    }
    return total;
}

Tensor a3c_loss(const NavAgent& agent, const Trajectory& traj, const std::vector<double>& returns,
                const std::vector<double>& advantages, double value_weight, double entropy_beta) {
    if (traj.steps.empty()) throw ContractError("a3c_loss: empty trajectory");
    if (returns.size() != traj.steps.size() || advantages.size() != traj.steps.size())
        throw ShapeError("a3c_loss: returns/advantages/steps length mismatch");

    Tensor total;
    for (size_t t = 0; t < traj.steps.size(); ++t) {
        const TrajectoryStep& step = traj.steps[t];
        PolicyOutput out = agent.forward(step.obs, traj.target);
        Tensor step_loss = step_loss_term(out, step.action, returns[t], advantages[t],
                                          value_weight, entropy_beta);
        total = total.defined() ? add(total, step_loss) : step_loss;
    }
    return total;
}

double learning_rate_at(double lr0, long long frame, long long total_frames) {
    if (total_frames <= 0) return 0.0;
    double f = 1.0 - static_cast<double>(frame) / static_cast<double>(total_frames);
    return lr0 * std::max(0.0, f);
}

std::string metrics_to_csv(const std::vector<MetricsRow>& rows) {
    std::ostringstream out;
    out << "frame,split,success_rate,spl,mean_reward,seed\n";
    char buf[128];
    for (const MetricsRow& r : rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g", r.success_rate, r.spl, r.mean_reward);
        out << r.frame << ',' << r.split << ',' << buf << ',' << r.seed << '\n';
    }
    return out.str();
}

std::vector<MetricsRow> metrics_from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open metrics file '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path + ": empty metrics file");
    if (line != "frame,split,success_rate,spl,mean_reward,seed")
        throw ParseError(path + ": unexpected metrics header");
    std::vector<MetricsRow> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string field;
        MetricsRow row;
        try {
            std::getline(ls, field, ',');
            row.frame = std::stoll(field);
            std::getline(ls, row.split, ',');
            std::getline(ls, field, ',');
            row.success_rate = std::stod(field);
            std::getline(ls, field, ',');
            row.spl = std::stod(field);
            std::getline(ls, field, ',');
            row.mean_reward = std::stod(field);
            std::getline(ls, field, ',');
            row.seed = std::stoull(field);
        } catch (const std::exception&) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": bad metrics row");
        }
        rows.push_back(row);
    }
    return rows;
}

namespace {

struct TrainShared {
    const TrainConfig* cfg = nullptr;
    const World* world = nullptr;
    SharedParameterStore* store = nullptr;

    long long cadence_frames = 0;
    long long last_mark = 0;
    std::atomic<long long> next_mark{0};

    std::mutex results_lock;
    std::vector<MetricsRow> metrics;
    double best_val_spl = -1.0;
    Checkpoint best_ckpt;
    bool have_best = false;

    std::mutex error_lock;
    std::exception_ptr error;
    std::atomic<bool> abort{false};

    void fail(std::exception_ptr e) {
        std::lock_guard<std::mutex> g(error_lock);
        if (!error) error = e;
        abort.store(true);
    }
};

int sample_action(const NavAgent& agent, const Observation& obs, int target, Rng& rng) {
    NoGradGuard ng;
    PolicyOutput out = agent.forward(obs, target);
    Tensor probs = softmax(out.logits);
    std::vector<double> w(static_cast<size_t>(probs.cols()));
    for (int j = 0; j < probs.cols(); ++j) w[static_cast<size_t>(j)] = probs.at(0, j);
    return rng.categorical(w);
}

// Runs one validation pass at `mark` on a params snapshot already loaded into
// `agent`, records the row, and refreshes the best checkpoint.
void validate_at(TrainShared& sh, const NavAgent& agent, const std::vector<Scene>& val_scenes,
                 long long mark) {
    const TrainConfig& cfg = *sh.cfg;
    EvalResult res =
        run_episodes(&agent, PolicyKind::Greedy, val_scenes, sh.world->vocab,
                     /*novel_targets=*/false, cfg.with_stop, cfg.val_episodes,
                     derive_seed(cfg.seed, "validation", static_cast<std::uint64_t>(mark)),
                     cfg.noise_sigma);
    MetricsRow row;
    row.frame = mark;
    row.split = "val";
    row.seed = cfg.seed;
    if (!res.records.empty()) {
        row.success_rate = success_rate(res.records);
        row.spl = spl(res.records);
        row.mean_reward = mean_total_reward(res.records);
    }
    std::lock_guard<std::mutex> g(sh.results_lock);
    sh.metrics.push_back(row);
    if (row.spl > sh.best_val_spl) {
        sh.best_val_spl = row.spl;
        sh.best_ckpt = agent.to_checkpoint();
        sh.have_best = true;
    }
}

void claim_marks(TrainShared& sh, const NavAgent& agent, const std::vector<Scene>& val_scenes,
                 long long frames_now) {
    for (;;) {
        long long mark = sh.next_mark.load(std::memory_order_relaxed);
        if (mark > sh.last_mark || mark > frames_now) return;
        if (sh.next_mark.compare_exchange_strong(mark, mark + sh.cadence_frames))
            validate_at(sh, agent, val_scenes, mark);
    }
}

void run_worker(int worker_id, TrainShared& sh) {
    const TrainConfig& cfg = *sh.cfg;
    const World& world = *sh.world;
    try {
        NavAgent agent(agent_config(cfg, world.vocab.size()), world.embeddings, world.adj_norm);
        std::vector<Tensor> params = agent.parameter_tensors();
        std::vector<Scene> train_scenes = world.all_train();
        std::vector<Scene> val_scenes = world.all_val();
        if (train_scenes.empty()) throw ContractError("run_worker: no training scenes");

        GridEnv env(world.vocab, cfg.with_stop, cfg.noise_sigma);
        std::uint64_t wseed = derive_seed(cfg.seed, "worker", static_cast<std::uint64_t>(worker_id));
        Rng rng(wseed);
        std::uint64_t episode_counter = 0;
        bool episode_live = false;
        Observation obs;
        int target = -1;

        while (!sh.abort.load(std::memory_order_relaxed) &&
               sh.store->frames() < cfg.total_frames) {
            sh.store->snapshot(params);

            if (!episode_live) {
                const Scene* scene = nullptr;
                std::vector<int> targets;
                while (targets.empty()) {
                    scene = &train_scenes[static_cast<size_t>(
                        rng.uniform_int(0, static_cast<int>(train_scenes.size()) - 1))];
                    targets = eligible_targets(*scene, world.vocab, /*novel=*/false);
                }
                target = targets[static_cast<size_t>(
                    rng.uniform_int(0, static_cast<int>(targets.size()) - 1))];
                obs = env.reset(*scene, target, derive_seed(wseed, "reset", episode_counter++));
                if (env.done()) continue;  // spawned on the goal; costs no frames
                episode_live = true;
            }

            Trajectory traj;
            traj.target = target;
            {
                NoGradGuard ng;
                for (int t = 0; t < cfg.rollout && !env.done(); ++t) {
                    int action = sample_action(agent, obs, target, rng);
                    StepResult sr = env.step(static_cast<Action>(action));
                    traj.steps.push_back({obs, action, sr.reward});
                    obs = sr.obs;
                }
            }
            traj.final_obs = obs;
            traj.terminal = env.done() && !env.ended_by_budget();
            if (env.done()) episode_live = false;

            double bootstrap = 0.0;
            if (!traj.terminal) {
                NoGradGuard ng;
                bootstrap = agent.forward(traj.final_obs, target).value.item();
            }
            std::vector<double> rewards;
            rewards.reserve(traj.steps.size());
            for (const TrajectoryStep& s : traj.steps) rewards.push_back(s.reward);
            std::vector<double> returns = compute_returns(rewards, bootstrap, cfg.gamma);

            for (Tensor& p : params) p.zero_grad();
            Tensor loss = a3c_loss(agent, traj, returns, cfg.value_weight, cfg.entropy_beta);
            loss.backward();

            std::vector<std::vector<double>*> grads;
            grads.reserve(params.size());
            for (Tensor& p : params) grads.push_back(&p.grad());
            clip_global_norm(grads, cfg.grad_clip);

            long long frames_now = sh.store->add_frames(static_cast<long long>(traj.steps.size()));
            double lr = learning_rate_at(cfg.lr0, frames_now, cfg.total_frames);
            std::vector<const std::vector<double>*> cgrads(grads.begin(), grads.end());
            sh.store->apply_update(cgrads, lr);

            claim_marks(sh, agent, val_scenes, frames_now);
        }
    } catch (...) {
        sh.fail(std::current_exception());
    }
}

}  // namespace

TrainResult train(const TrainConfig& cfg, const World& world, const std::string& run_dir) {
    cfg.validate();
    std::filesystem::create_directories(run_dir);
    cfg.save(run_dir + "/config.txt");

    NavAgent agent(agent_config(cfg, world.vocab.size()), world.embeddings, world.adj_norm);
    agent.init_weights(cfg.seed);
    SharedParameterStore store(agent.parameters(), cfg.strict);
    const std::uint64_t shapes_before = store.shape_checksum();

    TrainShared sh;
    sh.cfg = &cfg;
    sh.world = &world;
    sh.store = &store;
    if (cfg.total_frames > 0) {
        sh.cadence_frames = std::max<long long>(
            1, static_cast<long long>(cfg.val_cadence * static_cast<double>(cfg.total_frames) + 0.5));
        long long rows = (cfg.total_frames + sh.cadence_frames - 1) / sh.cadence_frames;
        sh.last_mark = rows * sh.cadence_frames;
        sh.next_mark.store(sh.cadence_frames);
    } else {
        sh.cadence_frames = 0;
        sh.last_mark = -1;  // no marks
        sh.next_mark.store(0);
    }

    std::vector<std::thread> threads;
    for (int w = 0; w < cfg.workers; ++w) threads.emplace_back(run_worker, w, std::ref(sh));
    for (std::thread& t : threads) t.join();
    if (sh.error) std::rethrow_exception(sh.error);

    store.snapshot(agent.parameter_tensors());

    // Marks the workers ran past without claiming (coarse rollout granularity
    // near the end) are evaluated here with the final parameters.
    if (sh.cadence_frames > 0) {
        std::vector<Scene> val_scenes = world.all_val();
        for (;;) {
            long long mark = sh.next_mark.load();
            if (mark > sh.last_mark) break;
            sh.next_mark.store(mark + sh.cadence_frames);
            validate_at(sh, agent, val_scenes, mark);
        }
    }
    if (store.shape_checksum() != shapes_before)
        throw ContractError("train: parameter shapes changed during training");

    std::sort(sh.metrics.begin(), sh.metrics.end(),
              [](const MetricsRow& a, const MetricsRow& b) { return a.frame < b.frame; });

    TrainResult result;
    result.run_dir = run_dir;
    result.metrics = sh.metrics;
    result.best_val_spl = sh.best_val_spl;
    result.frames_done = store.frames();

    std::ofstream mfile(run_dir + "/metrics.csv");
    if (!mfile) throw LoadError("cannot write metrics under '" + run_dir + "'");
    mfile << metrics_to_csv(sh.metrics);
    mfile.close();

    Checkpoint final_ckpt = agent.to_checkpoint();
    store.export_opt(final_ckpt);
    result.final_checkpoint = run_dir + "/final.ckpt";
    final_ckpt.save(result.final_checkpoint);

    result.best_checkpoint = run_dir + "/best.ckpt";
    if (sh.have_best) {
        sh.best_ckpt.save(result.best_checkpoint);
    } else {
        agent.to_checkpoint().save(result.best_checkpoint);
    }
    return result;
}

}  // namespace semnav
