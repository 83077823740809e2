#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "semnav/rng.hpp"
#include "semnav/scene.hpp"

namespace semnav {

enum class Heading { North = 0, East = 1, South = 2, West = 3 };

struct AgentPose {
    Cell cell;
    Heading heading = Heading::North;
    bool operator==(const AgentPose&) const = default;
};

enum class Action { MoveForward = 0, MoveBack = 1, RotateLeft = 2, RotateRight = 3, Stop = 4 };
const char* action_name(Action a);

inline constexpr int kFrameStack = 4;
inline constexpr double kStepPenalty = -0.01;
inline constexpr double kSuccessReward = 10.0;
inline constexpr double kVisibilityTau = 3.0;        // cells
inline constexpr double kSuccessDistance = 2.0;      // cells; 1 m at 0.5 m per cell
inline constexpr double kDefaultObsNoise = 0.05;

// Egocentric per-category visibility scores in [0,1]; the stack holds the
// current frame first, then the three previous ones, zero padded early in an
// episode.
struct Observation {
    std::vector<double> current;  // |V|
    std::vector<double> stack;    // 4*|V|
};

Cell heading_vec(Heading h);
Heading rotate(Heading h, bool left);

// 90-degree forward cone; the agent's own cell counts as in view.
bool in_fov(const AgentPose& pose, Cell target);

// Grid DDA over the segment between cell centers; blocked if any crossed
// cell other than the endpoints is a wall. Corner-grazing diagonal steps are
// treated conservatively (both adjacent cells checked).
bool line_of_sight(const Scene& scene, Cell from, Cell to);

bool cell_visible(const Scene& scene, const AgentPose& pose, Cell target);

// True iff an instance of `target` is inside the FOV cone, unoccluded, and
// within kSuccessDistance (Euclidean, inclusive).
bool success_predicate(const Scene& scene, const AgentPose& pose, int target,
                       double distance_threshold = kSuccessDistance);

// Per-category max over visible instances of exp(-d / tau); additive Gaussian
// noise, clamped to [0,1]. Visibility has unlimited range.
std::vector<double> visible_scores(const Scene& scene, const AgentPose& pose, int vocab_size,
                                   Rng& noise, double sigma = kDefaultObsNoise);
std::vector<double> visible_scores_raw(const Scene& scene, const AgentPose& pose, int vocab_size);

int step_budget(RoomType room);  // 100, or 200 for living rooms

struct StepResult {
    Observation obs;
    double reward = 0.0;
    bool done = false;
};

// One episode at a time. Without the stop action the environment terminates
// (and pays the success reward) as soon as the predicate holds, including at
// reset time, in which case the episode records zero steps.
class GridEnv {
public:
    GridEnv(const Vocabulary& vocab, bool with_stop, double noise_sigma = kDefaultObsNoise);

    Observation reset(const Scene& scene, int target, std::uint64_t seed, bool allow_absent = false);
    StepResult step(Action a);

    bool done() const { return done_; }
    bool success() const { return success_; }
    bool ended_by_budget() const { return ended_by_budget_; }
    const Observation& observation() const { return last_obs_; }
    int steps_taken() const { return steps_; }
    int penalized_steps() const { return penalized_; }
    double total_reward() const { return total_reward_; }
    const AgentPose& pose() const { return pose_; }
    int target() const { return target_; }
    bool with_stop() const { return with_stop_; }
    int action_count() const { return with_stop_ ? 5 : 4; }
    const Scene& scene() const { return *scene_; }

private:
    Observation observe();
    void push_frame(std::vector<double> frame);

    const Vocabulary* vocab_;
    const Scene* scene_ = nullptr;
    bool with_stop_;
    double noise_sigma_;
    Rng rng_{0};
    AgentPose pose_;
    int target_ = -1;
    int steps_ = 0;
    int penalized_ = 0;
    int budget_ = 0;
    bool done_ = true;
    bool success_ = false;
    bool ended_by_budget_ = false;
    double total_reward_ = 0.0;
    std::vector<std::vector<double>> frames_;  // newest first
    Observation last_obs_;
};

// Minimum number of actions (moves and rotations) from the start pose to any
// pose satisfying the predicate, by BFS over (cell, heading) states. Returns
// nullopt when no satisfying pose is reachable.
std::optional<int> shortest_path_length(const Scene& scene, const AgentPose& start, int target);

// Action sequence realizing that minimum; empty when the start already
// satisfies the predicate.
std::optional<std::vector<Action>> shortest_path_actions(const Scene& scene, const AgentPose& start,
                                                         int target);

}  // namespace semnav
