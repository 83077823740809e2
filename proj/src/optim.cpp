#include "semnav/optim.hpp"

#include <cmath>

namespace semnav {

void rmsprop_step(std::vector<double>& params, const std::vector<double>& grads, RmsPropState& state) {
    if (params.size() != grads.size()) {
        throw ShapeError("rmsprop_step: parameter/gradient size mismatch");
    }
    if (state.accumulator.size() != params.size()) {
        if (state.accumulator.empty()) {
            state.accumulator.assign(params.size(), 0.0);
        } else {
            throw ShapeError("rmsprop_step: accumulator size mismatch");
        }
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        double& acc = state.accumulator[i];
        acc = state.decay * acc + (1.0 - state.decay) * g * g;
        params[i] -= state.learning_rate * g / (std::sqrt(acc) + state.epsilon);
    }
}

double global_norm(const std::vector<std::vector<double>*>& grads) {
    double sq = 0.0;
    for (const auto* g : grads) {
        for (double v : *g) sq += v * v;
    }
    return std::sqrt(sq);
}

double clip_global_norm(std::vector<std::vector<double>*>& grads, double max_norm) {
    const double pre = global_norm(grads);
    double norm = pre;
    // one rescale is enough in exact arithmetic; repeat to absorb rounding so
    // the post-clip norm never lands above the threshold
    for (int iter = 0; iter < 4 && norm > max_norm; ++iter) {
        const double s = max_norm / norm;
        for (auto* g : grads) {
            for (double& v : *g) v *= s;
        }
        norm = global_norm(grads);
    }
    return pre;
}

}  // namespace semnav
