#include "semnav/env.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <queue>

#include "semnav/errors.hpp"

namespace semnav {

const char* action_name(Action a) {
    switch (a) {
        case Action::MoveForward: return "move_forward";
        case Action::MoveBack: return "move_back";
        case Action::RotateLeft: return "rotate_left";
        case Action::RotateRight: return "rotate_right";
        case Action::Stop: return "stop";
    }
    return "?";
}

Cell heading_vec(Heading h) {
    switch (h) {
        case Heading::North: return {0, -1};
        case Heading::East: return {1, 0};
        case Heading::South: return {0, 1};
        case Heading::West: return {-1, 0};
    }
    return {0, 0};
}

Heading rotate(Heading h, bool left) {
    int i = static_cast<int>(h);
    return static_cast<Heading>(((left ? i + 3 : i + 1) & 3));
}

bool in_fov(const AgentPose& pose, Cell target) {
    int dx = target.x - pose.cell.x;
    int dy = target.y - pose.cell.y;
    if (dx == 0 && dy == 0) return true;
    Cell fwd = heading_vec(pose.heading);
    int forward = dx * fwd.x + dy * fwd.y;
    int perp = dx * fwd.y - dy * fwd.x;  // signed cross; magnitude only matters
    return forward > 0 && forward >= std::abs(perp);
}

bool line_of_sight(const Scene& scene, Cell from, Cell to) {
    if (from == to) return true;
    // DDA in continuous coordinates between cell centers.
    double x0 = from.x + 0.5, y0 = from.y + 0.5;
    double x1 = to.x + 0.5, y1 = to.y + 0.5;
    double dx = x1 - x0, dy = y1 - y0;
    int steps = std::max(std::abs(to.x - from.x), std::abs(to.y - from.y)) * 2;
    int px = from.x, py = from.y;
    for (int i = 1; i < steps; ++i) {
        double t = static_cast<double>(i) / steps;
        double fx = x0 + dx * t, fy = y0 + dy * t;
        int cx = static_cast<int>(std::floor(fx));
        int cy = static_cast<int>(std::floor(fy));
        if ((cx == from.x && cy == from.y) || (cx == to.x && cy == to.y)) {
            px = cx;
            py = cy;
            continue;
        }
        if (!scene.in_bounds(cx, cy)) return false;
        if (scene.wall(cx, cy)) return false;
        if (cx != px && cy != py) {
            // Diagonal cell change: refuse to squeeze between two wall corners.
            bool a = scene.in_bounds(px, cy) && scene.wall(px, cy);
            bool b = scene.in_bounds(cx, py) && scene.wall(cx, py);
            if (a && b) return false;
        }
        px = cx;
        py = cy;
    }
    return true;
}

bool cell_visible(const Scene& scene, const AgentPose& pose, Cell target) {
    return in_fov(pose, target) && line_of_sight(scene, pose.cell, target);
}

static double cell_distance(Cell a, Cell b) {
    double dx = a.x - b.x, dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

bool success_predicate(const Scene& scene, const AgentPose& pose, int target,
                       double distance_threshold) {
    for (const ObjectInstance& obj : scene.objects) {
        if (obj.category != target) continue;
        if (cell_distance(pose.cell, obj.cell) > distance_threshold) continue;
        if (!cell_visible(scene, pose, obj.cell)) continue;
        return true;
    }
    return false;
}

std::vector<double> visible_scores_raw(const Scene& scene, const AgentPose& pose, int vocab_size) {
    std::vector<double> out(static_cast<size_t>(vocab_size), 0.0);
    for (const ObjectInstance& obj : scene.objects) {
        if (obj.category < 0 || obj.category >= vocab_size)
            throw ContractError("visible_scores: object category out of range");
        if (!cell_visible(scene, pose, obj.cell)) continue;
        double score = std::exp(-cell_distance(pose.cell, obj.cell) / kVisibilityTau);
        out[static_cast<size_t>(obj.category)] =
            std::max(out[static_cast<size_t>(obj.category)], score);
    }
    return out;
}

std::vector<double> visible_scores(const Scene& scene, const AgentPose& pose, int vocab_size,
                                   Rng& noise, double sigma) {
    std::vector<double> out = visible_scores_raw(scene, pose, vocab_size);
    for (double& v : out) {
        if (sigma > 0.0) v += noise.gaussian(0.0, sigma);
        v = std::clamp(v, 0.0, 1.0);
    }
    return out;
}

int step_budget(RoomType room) { return room == RoomType::LivingRoom ? 200 : 100; }

GridEnv::GridEnv(const Vocabulary& vocab, bool with_stop, double noise_sigma)
    : vocab_(&vocab), with_stop_(with_stop), noise_sigma_(noise_sigma) {}

void GridEnv::push_frame(std::vector<double> frame) {
    frames_.insert(frames_.begin(), std::move(frame));
    if (frames_.size() > kFrameStack) frames_.resize(kFrameStack);
}

Observation GridEnv::observe() {
    Observation obs;
    obs.current = frames_.front();
    size_t n = frames_.front().size();
    obs.stack.assign(kFrameStack * n, 0.0);
    for (size_t f = 0; f < frames_.size(); ++f)
        std::copy(frames_[f].begin(), frames_[f].end(), obs.stack.begin() + f * n);
    last_obs_ = obs;
    return obs;
}

Observation GridEnv::reset(const Scene& scene, int target, std::uint64_t seed, bool allow_absent) {
    if (target < 0 || target >= vocab_->size()) throw ValueError("reset: target out of range");
    if (!allow_absent && !scene.has_category(target))
        throw ValueError("reset: target category absent from scene");
    scene_ = &scene;
    target_ = target;
    rng_ = Rng(seed);
    std::vector<Cell> spawns = scene.spawn_cells();
    if (spawns.empty()) throw ValueError("reset: scene has no spawn cells");
    Cell cell = spawns[rng_.uniform_int(0, static_cast<int>(spawns.size()) - 1)];
    Heading heading = static_cast<Heading>(rng_.uniform_int(0, 3));
    pose_ = {cell, heading};
    steps_ = 0;
    penalized_ = 0;
    budget_ = step_budget(scene.room_type);
    total_reward_ = 0.0;
    ended_by_budget_ = false;
    frames_.clear();
    push_frame(visible_scores(scene, pose_, vocab_->size(), rng_, noise_sigma_));
    if (!with_stop_ && success_predicate(scene, pose_, target_)) {
        // Started at the goal: episode is over before any action is taken.
        done_ = true;
        success_ = true;
        total_reward_ = kSuccessReward;
    } else {
        done_ = false;
        success_ = false;
    }
    return observe();
}

StepResult GridEnv::step(Action a) {
    if (done_) throw ContractError("step called on finished episode");
    if (!with_stop_ && a == Action::Stop)
        throw ContractError("stop action unavailable in this mode");

    ++steps_;
    bool moved_pose = false;
    if (a == Action::RotateLeft || a == Action::RotateRight) {
        pose_.heading = rotate(pose_.heading, a == Action::RotateLeft);
        moved_pose = true;
    } else if (a == Action::MoveForward || a == Action::MoveBack) {
        Cell d = heading_vec(pose_.heading);
        if (a == Action::MoveBack) d = {-d.x, -d.y};
        Cell next{pose_.cell.x + d.x, pose_.cell.y + d.y};
        if (scene_->in_bounds(next.x, next.y) && !scene_->wall(next.x, next.y)) {
            pose_.cell = next;
            moved_pose = true;
        }
        // Blocked moves burn a step and pay the penalty but change nothing.
    }
    (void)moved_pose;

    bool predicate = success_predicate(*scene_, pose_, target_);
    double reward;
    if (with_stop_) {
        if (a == Action::Stop) {
            done_ = true;
            success_ = predicate;
            reward = success_ ? kSuccessReward : kStepPenalty;
        } else {
            reward = kStepPenalty;
        }
    } else {
        if (predicate) {
            done_ = true;
            success_ = true;
            reward = kSuccessReward;
        } else {
            reward = kStepPenalty;
        }
    }
    if (reward < 0.0) ++penalized_;
    if (!done_ && steps_ >= budget_) {  // budget expiry: failure, no extra penalty
        done_ = true;
        ended_by_budget_ = true;
    }
    total_reward_ += reward;

    push_frame(visible_scores(*scene_, pose_, vocab_->size(), rng_, noise_sigma_));
    return {observe(), reward, done_};
}

namespace {

struct BfsNode {
    int x, y, h;
};

int pose_index(const Scene& s, int x, int y, int h) { return (y * s.width + x) * 4 + h; }

}  // namespace

static std::optional<std::vector<Action>> bfs_path(const Scene& scene, const AgentPose& start,
                                                   int target, bool want_actions) {
    if (!scene.in_bounds(start.cell.x, start.cell.y) || scene.wall(start.cell.x, start.cell.y))
        throw ValueError("shortest path: start pose is not a free cell");
    if (success_predicate(scene, start, target)) return std::vector<Action>{};

    const int total = scene.width * scene.height * 4;
    std::vector<int> prev(static_cast<size_t>(total), -1);
    std::vector<int8_t> prev_action(static_cast<size_t>(total), -1);
    std::vector<uint8_t> seen(static_cast<size_t>(total), 0);

    int s0 = pose_index(scene, start.cell.x, start.cell.y, static_cast<int>(start.heading));
    seen[static_cast<size_t>(s0)] = 1;
    std::deque<BfsNode> frontier{{start.cell.x, start.cell.y, static_cast<int>(start.heading)}};

    const Action kActions[4] = {Action::MoveForward, Action::MoveBack, Action::RotateLeft,
                                Action::RotateRight};
    while (!frontier.empty()) {
        BfsNode cur = frontier.front();
        frontier.pop_front();
        int ci = pose_index(scene, cur.x, cur.y, cur.h);
        for (Action a : kActions) {
            int nx = cur.x, ny = cur.y, nh = cur.h;
            if (a == Action::RotateLeft || a == Action::RotateRight) {
                nh = static_cast<int>(
                    rotate(static_cast<Heading>(cur.h), a == Action::RotateLeft));
            } else {
                Cell d = heading_vec(static_cast<Heading>(cur.h));
                if (a == Action::MoveBack) d = {-d.x, -d.y};
                nx = cur.x + d.x;
                ny = cur.y + d.y;
                if (!scene.in_bounds(nx, ny) || scene.wall(nx, ny)) continue;  // no-op move
            }
            int ni = pose_index(scene, nx, ny, nh);
            if (seen[static_cast<size_t>(ni)]) continue;
            seen[static_cast<size_t>(ni)] = 1;
            prev[static_cast<size_t>(ni)] = ci;
            prev_action[static_cast<size_t>(ni)] = static_cast<int8_t>(a);
            AgentPose pose{{nx, ny}, static_cast<Heading>(nh)};
            if (success_predicate(scene, pose, target)) {
                std::vector<Action> path;
                for (int at = ni; prev[static_cast<size_t>(at)] != -1;
                     at = prev[static_cast<size_t>(at)])
                    path.push_back(static_cast<Action>(prev_action[static_cast<size_t>(at)]));
                std::reverse(path.begin(), path.end());
                if (!want_actions) return std::vector<Action>(path.size());
                return path;
            }
            frontier.push_back({nx, ny, nh});
        }
    }
    return std::nullopt;
}

std::optional<int> shortest_path_length(const Scene& scene, const AgentPose& start, int target) {
    auto path = bfs_path(scene, start, target, false);
    if (!path) return std::nullopt;
    return static_cast<int>(path->size());
}

std::optional<std::vector<Action>> shortest_path_actions(const Scene& scene, const AgentPose& start,
                                                         int target) {
    return bfs_path(scene, start, target, true);
}

}  // namespace semnav
