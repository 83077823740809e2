#include "semnav/policy.hpp"

#include "semnav/errors.hpp"

namespace semnav {

PolicyNetwork::PolicyNetwork(int vocab_size, int word_dim, int hidden, int fused_dim,
                             int num_actions, bool use_graph)
    : w_visual(Tensor::zeros(4 * vocab_size, hidden, true)),
      b_visual(Tensor::zeros(1, hidden, true)),
      w_word(Tensor::zeros(word_dim, hidden, true)),
      b_word(Tensor::zeros(1, hidden, true)),
      w_graph(Tensor::zeros(use_graph ? vocab_size : 1, use_graph ? hidden : 1, use_graph)),
      b_graph(Tensor::zeros(1, use_graph ? hidden : 1, use_graph)),
      w_fuse(Tensor::zeros((use_graph ? 3 : 2) * hidden, fused_dim, true)),
      b_fuse(Tensor::zeros(1, fused_dim, true)),
      w_policy(Tensor::zeros(fused_dim, num_actions, true)),
      b_policy(Tensor::zeros(1, num_actions, true)),
      w_value(Tensor::zeros(fused_dim, 1, true)),
      b_value(Tensor::zeros(1, 1, true)),
      vocab_size_(vocab_size),
      word_dim_(word_dim),
      hidden_(hidden),
      fused_dim_(fused_dim),
      num_actions_(num_actions),
      use_graph_(use_graph) {
    if (vocab_size <= 0 || word_dim <= 0 || hidden <= 0 || fused_dim <= 0 || num_actions <= 0)
        throw ValueError("PolicyNetwork: dimensions must be positive");
}

PolicyOutput PolicyNetwork::forward(const Tensor& visual, const Tensor& word,
                                    const Tensor& graph) const {
    if (visual.rows() != 1 || visual.cols() != 4 * vocab_size_)
        throw ShapeError("policy: visual input must be 1 x 4|V|");
    if (word.rows() != 1 || word.cols() != word_dim_)
        throw ShapeError("policy: word input must be 1 x word_dim");

    Tensor hv = relu(add_row_bias(matmul(visual, w_visual), b_visual));
    Tensor hw = relu(add_row_bias(matmul(word, w_word), b_word));
    Tensor fused_in = concat(hv, hw, 1);
    if (use_graph_) {
        if (graph.rows() != 1 || graph.cols() != vocab_size_)
            throw ShapeError("policy: graph input must be 1 x |V|");
        Tensor hg = relu(add_row_bias(matmul(graph, w_graph), b_graph));
        fused_in = concat(fused_in, hg, 1);
    }
    Tensor h = relu(add_row_bias(matmul(fused_in, w_fuse), b_fuse));
    PolicyOutput out{add_row_bias(matmul(h, w_policy), b_policy),
                     add_row_bias(matmul(h, w_value), b_value)};
    return out;
}

std::vector<std::pair<std::string, Tensor>> PolicyNetwork::parameters() const {
    std::vector<std::pair<std::string, Tensor>> out = {
        {"policy/w_visual", w_visual}, {"policy/b_visual", b_visual},
        {"policy/w_word", w_word},     {"policy/b_word", b_word},
    };
    if (use_graph_) {
        out.emplace_back("policy/w_graph", w_graph);
        out.emplace_back("policy/b_graph", b_graph);
    }
    out.emplace_back("policy/w_fuse", w_fuse);
    out.emplace_back("policy/b_fuse", b_fuse);
    out.emplace_back("policy/w_policy", w_policy);
    out.emplace_back("policy/b_policy", b_policy);
    out.emplace_back("policy/w_value", w_value);
    out.emplace_back("policy/b_value", b_value);
    return out;
}

}  // namespace semnav
