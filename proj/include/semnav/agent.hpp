#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "semnav/checkpoint.hpp"
#include "semnav/env.hpp"
#include "semnav/gcn.hpp"
#include "semnav/policy.hpp"
#include "semnav/tensor.hpp"
#include "semnav/vocabulary.hpp"

namespace semnav {

struct AgentConfig {
    int vocab_size = 0;
    int word_dim = 16;
    int gcn_hidden = 32;
    int graph_hidden = 64;
    int fused_dim = 64;
    int num_actions = 4;
    bool use_graph = true;
    bool gcn_final_relu = false;
};

// Full navigation model: frozen word embeddings, the graph encoder over a
// fixed normalized adjacency, and the actor-critic trunk. The embedding
// matrix and adjacency ride along in checkpoints so a saved model is
// self-contained.
class NavAgent {
public:
    NavAgent(const AgentConfig& cfg, Tensor embeddings, Tensor adj_norm);

    void init_weights(std::uint64_t seed);

    // obs.stack is the 4|V| stacked visibility vector; the graph encoder sees
    // only the current frame.
    PolicyOutput forward(const Observation& obs, int target) const;

    // Graph node outputs for the current frame, |V| x 1 (inspection helper).
    Tensor graph_output(const std::vector<double>& current_scores) const;

    std::vector<std::pair<std::string, Tensor>> parameters() const;
    std::vector<Tensor> parameter_tensors() const;

    Checkpoint to_checkpoint() const;
    void load_checkpoint(const Checkpoint& ckpt);

    const AgentConfig& config() const { return cfg_; }
    const Tensor& embeddings() const { return embeddings_; }
    const Tensor& adjacency() const { return adj_norm_; }
    void set_adjacency(Tensor adj_norm);

    GcnEncoder gcn;
    PolicyNetwork policy;

private:
    AgentConfig cfg_;
    Tensor embeddings_;  // |V| x word_dim, no grad
    Tensor adj_norm_;    // |V| x |V|, no grad
};

// Copy values (not gradients) between identically shaped parameter lists.
void copy_parameters(const std::vector<Tensor>& from, const std::vector<Tensor>& to);

}  // namespace semnav
