#pragma once

#include <string>
#include <vector>

#include "semnav/tensor.hpp"

namespace semnav {

struct PolicyOutput {
    Tensor logits;  // 1 x |A|
    Tensor value;   // 1 x 1
};

// Actor-critic trunk: three fully connected input branches (stacked visual
// scores, target word embedding, graph output) fused into a shared hidden
// layer feeding separate policy and value heads. Branch and head layers all
// carry biases. With use_graph off, the graph branch and its fusion columns
// are absent entirely.
class PolicyNetwork {
public:
    PolicyNetwork(int vocab_size, int word_dim, int hidden, int fused_dim, int num_actions,
                  bool use_graph);

    // visual: 1 x 4|V|, word: 1 x d_w, graph: 1 x |V| (ignored when graph branch absent).
    PolicyOutput forward(const Tensor& visual, const Tensor& word, const Tensor& graph) const;

    std::vector<std::pair<std::string, Tensor>> parameters() const;

    bool use_graph() const { return use_graph_; }
    int num_actions() const { return num_actions_; }
    int hidden() const { return hidden_; }
    int fused_dim() const { return fused_dim_; }

    Tensor w_visual, b_visual;
    Tensor w_word, b_word;
    Tensor w_graph, b_graph;
    Tensor w_fuse, b_fuse;
    Tensor w_policy, b_policy;
    Tensor w_value, b_value;

private:
    int vocab_size_, word_dim_, hidden_, fused_dim_, num_actions_;
    bool use_graph_;
};

}  // namespace semnav
