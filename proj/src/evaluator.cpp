#include "semnav/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "semnav/errors.hpp"
#include "semnav/rng.hpp"

namespace semnav {

std::vector<int> eligible_targets(const Scene& scene, const Vocabulary& vocab, bool novel) {
    std::vector<int> out;
    for (int c = 0; c < vocab.size(); ++c)
        if (vocab.category(c).novel == novel && scene.has_category(c)) out.push_back(c);
    return out;
}

static int greedy_action(const NavAgent& agent, const Observation& obs, int target) {
    NoGradGuard ng;
    PolicyOutput out = agent.forward(obs, target);
    int best = 0;
    for (int j = 1; j < out.logits.cols(); ++j)
        if (out.logits.at(0, j) > out.logits.at(0, best)) best = j;
    return best;
}

EvalResult run_episodes(const NavAgent* agent, PolicyKind kind, const std::vector<Scene>& scenes,
                        const Vocabulary& vocab, bool novel_targets, bool with_stop,
                        int episodes_per_scene, std::uint64_t seed, double noise_sigma) {
    if (kind == PolicyKind::Greedy && agent == nullptr)
        throw ContractError("run_episodes: greedy policy requires an agent");
    if (episodes_per_scene <= 0) throw ValueError("run_episodes: episodes_per_scene must be positive");

    EvalResult result;
    GridEnv env(vocab, with_stop, noise_sigma);
    for (size_t si = 0; si < scenes.size(); ++si) {
        const Scene& scene = scenes[si];
        std::vector<int> targets = eligible_targets(scene, vocab, novel_targets);
        if (targets.empty()) {
            result.excluded += episodes_per_scene;
            continue;
        }
        for (int e = 0; e < episodes_per_scene; ++e) {
            std::uint64_t ep_seed =
                derive_seed(seed, "episode", si * static_cast<std::uint64_t>(episodes_per_scene) + e);
            Rng ep_rng(derive_seed(ep_seed, "policy", 0));
            int target = targets[ep_rng.uniform_int(0, static_cast<int>(targets.size()) - 1)];
            env.reset(scene, target, derive_seed(ep_seed, "env", 0));

            std::optional<std::vector<Action>> oracle =
                shortest_path_actions(scene, env.pose(), target);
            if (!oracle) {
                ++result.excluded;
                continue;
            }
            int L = static_cast<int>(oracle->size());

            int stop_actions = 0;
            if (!env.done()) {
                size_t oracle_at = 0;
                while (!env.done()) {
                    Action a = Action::MoveForward;
                    switch (kind) {
                        case PolicyKind::Greedy:
                            a = static_cast<Action>(greedy_action(*agent, env.observation(), target));
                            break;
                        case PolicyKind::UniformRandom:
                            a = static_cast<Action>(ep_rng.uniform_int(0, env.action_count() - 1));
                            break;
                        case PolicyKind::Oracle:
                            if (oracle_at < oracle->size())
                                a = (*oracle)[oracle_at++];
                            else
                                a = with_stop ? Action::Stop : Action::MoveForward;
                            break;
                    }
                    if (a == Action::Stop) ++stop_actions;
                    env.step(a);
                }
            }

            EpisodeRecord rec;
            rec.scene_id = scene.scene_id;
            rec.target = target;
            rec.success = env.success();
            rec.agent_steps = env.steps_taken() - stop_actions;
            rec.oracle_steps = L;
            rec.total_reward = env.total_reward();
            result.records.push_back(rec);
        }
    }
    return result;
}

double success_rate(const std::vector<EpisodeRecord>& records) {
    if (records.empty()) throw ContractError("success_rate: empty record set");
    double s = 0.0;
    for (const EpisodeRecord& r : records) s += r.success ? 1.0 : 0.0;
    return s / static_cast<double>(records.size());
}

double spl(const std::vector<EpisodeRecord>& records) {
    if (records.empty()) throw ContractError("spl: empty record set");
    double total = 0.0;
    for (const EpisodeRecord& r : records) {
        if (!r.success) continue;
        if (r.oracle_steps < 0 || r.agent_steps < 0) throw ValueError("spl: negative path length");
        double denom = std::max(r.agent_steps, r.oracle_steps);
        total += denom == 0.0 ? 1.0 : static_cast<double>(r.oracle_steps) / denom;
    }
    return total / static_cast<double>(records.size());
}

double mean_total_reward(const std::vector<EpisodeRecord>& records) {
    if (records.empty()) throw ContractError("mean_total_reward: empty record set");
    double total = 0.0;
    for (const EpisodeRecord& r : records) total += r.total_reward;
    return total / static_cast<double>(records.size());
}

std::string report_to_csv(const std::vector<ReportRow>& rows) {
    std::ostringstream out;
    out << "room_type,scene_split,object_split,method,spl_pct,success_pct\n";
    char buf[64];
    for (const ReportRow& r : rows) {
        std::snprintf(buf, sizeof buf, "%.1f,%.1f", r.spl_pct, r.success_pct);
        out << r.room_type << ',' << r.scene_split << ',' << r.object_split << ',' << r.method
            << ',' << buf << '\n';
    }
    return out.str();
}

void write_episode_log(const std::string& path, const std::vector<EpisodeRecord>& records) {
    std::ofstream out(path);
    if (!out) throw LoadError("cannot write episode log '" + path + "'");
    out << "scene_id\ttarget\tS\tP\tL\n";
    for (const EpisodeRecord& r : records)
        out << r.scene_id << '\t' << r.target << '\t' << (r.success ? 1 : 0) << '\t' << r.agent_steps
            << '\t' << r.oracle_steps << '\n';
}

std::vector<ReportRow> split_report(const NavAgent* agent, const std::string& method,
                                    const SplitScenes& scenes, const Vocabulary& vocab,
                                    bool with_stop, int episodes_per_scene, std::uint64_t seed,
                                    double noise_sigma) {
    if (scenes.rooms.size() != scenes.seen.size() || scenes.rooms.size() != scenes.unseen.size())
        throw ShapeError("split_report: scene lists misaligned with rooms");
    std::vector<ReportRow> rows;
    const char* scene_splits[2] = {"seen", "unseen"};
    const char* object_splits[2] = {"known", "novel"};
    struct MethodSpec {
        std::string name;
        PolicyKind kind;
    };
    std::vector<MethodSpec> methods = {{"random", PolicyKind::UniformRandom},
                                       {method, PolicyKind::Greedy}};
    if (agent == nullptr) methods.pop_back();

    for (const MethodSpec& m : methods) {
        for (int ss = 0; ss < 2; ++ss) {
            for (int os = 0; os < 2; ++os) {
                double spl_sum = 0.0, succ_sum = 0.0;
                int room_count = 0;
                for (size_t ri = 0; ri < scenes.rooms.size(); ++ri) {
                    const std::vector<Scene>& set = ss == 0 ? scenes.seen[ri] : scenes.unseen[ri];
                    std::uint64_t cell_seed = derive_seed(
                        seed, m.name + "/" + scene_splits[ss] + "/" + object_splits[os], ri);
                    EvalResult res = run_episodes(agent, m.kind, set, vocab, os == 1, with_stop,
                                                  episodes_per_scene, cell_seed, noise_sigma);
                    ReportRow row;
                    row.room_type = room_name(scenes.rooms[ri]);
                    row.scene_split = scene_splits[ss];
                    row.object_split = object_splits[os];
                    row.method = m.name;
                    if (!res.records.empty()) {
                        row.spl_pct = std::round(spl(res.records) * 1000.0) / 10.0;
                        row.success_pct = std::round(success_rate(res.records) * 1000.0) / 10.0;
                    }
                    spl_sum += row.spl_pct;
                    succ_sum += row.success_pct;
                    ++room_count;
                    rows.push_back(row);
                }
                if (room_count > 0) {
                    ReportRow avg;
                    avg.room_type = "average";
                    avg.scene_split = scene_splits[ss];
                    avg.object_split = object_splits[os];
                    avg.method = m.name;
                    avg.spl_pct = std::round(spl_sum / room_count * 10.0) / 10.0;
                    avg.success_pct = std::round(succ_sum / room_count * 10.0) / 10.0;
                    rows.push_back(avg);
                }
            }
        }
    }
    return rows;
}

}  // namespace semnav
