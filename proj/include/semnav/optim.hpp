#pragma once

#include <vector>

#include "semnav/errors.hpp"

namespace semnav {

// Per-parameter RMSProp state. The accumulator tracks a decayed mean of
// squared gradients and stays element-wise non-negative.
struct RmsPropState {
    std::vector<double> accumulator;
    double decay = 0.99;
    double epsilon = 1e-8;
    double learning_rate = 7e-4;
};

// acc <- decay*acc + (1-decay)*g^2 ; p <- p - lr*g/(sqrt(acc)+eps)
void rmsprop_step(std::vector<double>& params, const std::vector<double>& grads, RmsPropState& state);

// Scales the whole gradient set so the global L2 norm does not exceed
// max_norm. Returns the pre-clip norm.
double clip_global_norm(std::vector<std::vector<double>*>& grads, double max_norm);

double global_norm(const std::vector<std::vector<double>*>& grads);

}  // namespace semnav
