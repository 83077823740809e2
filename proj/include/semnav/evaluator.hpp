#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "semnav/agent.hpp"
#include "semnav/env.hpp"
#include "semnav/scene.hpp"
#include "semnav/vocabulary.hpp"

namespace semnav {

// S_i, P_i (agent steps, stop excluded), L_i (BFS oracle steps from the
// start pose) for one evaluation episode.
struct EpisodeRecord {
    std::string scene_id;
    int target = -1;
    bool success = false;
    int agent_steps = 0;
    int oracle_steps = 0;
    double total_reward = 0.0;
};

enum class PolicyKind { Greedy, UniformRandom, Oracle };

struct EvalResult {
    std::vector<EpisodeRecord> records;
    int excluded = 0;  // unreachable targets and scenes with no eligible target
};

// Category ids present in the scene whose novelty flag matches `novel`.
std::vector<int> eligible_targets(const Scene& scene, const Vocabulary& vocab, bool novel);

// Rolls episodes_per_scene episodes on every scene: sample an eligible
// target, randomize the start pose, measure L by BFS, then act greedily
// (argmax logits), uniformly at random, or along the BFS path. `agent` may be
// null except for Greedy.
EvalResult run_episodes(const NavAgent* agent, PolicyKind kind, const std::vector<Scene>& scenes,
                        const Vocabulary& vocab, bool novel_targets, bool with_stop,
                        int episodes_per_scene, std::uint64_t seed,
                        double noise_sigma = kDefaultObsNoise);

double success_rate(const std::vector<EpisodeRecord>& records);
double spl(const std::vector<EpisodeRecord>& records);
double mean_total_reward(const std::vector<EpisodeRecord>& records);

struct ReportRow {
    std::string room_type;    // kitchen/living_room/bedroom/bathroom/average
    std::string scene_split;  // seen|unseen
    std::string object_split; // known|novel
    std::string method;
    double spl_pct = 0.0;
    double success_pct = 0.0;
};

std::string report_to_csv(const std::vector<ReportRow>& rows);
void write_episode_log(const std::string& path, const std::vector<EpisodeRecord>& records);

// One scene list per room type, used by split_report to emit per-room rows.
struct SplitScenes {
    std::vector<RoomType> rooms;
    std::vector<std::vector<Scene>> seen;    // indexed like rooms
    std::vector<std::vector<Scene>> unseen;
};

// Full four-way report (seen/unseen x known/novel) for the given method plus
// a uniform-random baseline, per room type with an average row appended for
// every (split, method) combination. Percentages rounded to one decimal.
std::vector<ReportRow> split_report(const NavAgent* agent, const std::string& method,
                                    const SplitScenes& scenes, const Vocabulary& vocab,
                                    bool with_stop, int episodes_per_scene, std::uint64_t seed,
                                    double noise_sigma = kDefaultObsNoise);

}  // namespace semnav
