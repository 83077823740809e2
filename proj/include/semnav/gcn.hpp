#pragma once

#include <string>
#include <vector>

#include "semnav/tensor.hpp"

namespace semnav {

// Three-layer graph convolution over the normalized adjacency. Node inputs
// are word embeddings plus the current per-category visibility score; the
// output is one scalar per node. All projections are bias-free; the final
// layer is linear unless final_relu is set.
class GcnEncoder {
public:
    GcnEncoder(int word_dim, int hidden, int graph_hidden, bool final_relu = false);

    // embeddings: |V| x word_dim (constant), scores: |V| x 1, adj_norm: |V| x |V|.
    Tensor forward(const Tensor& adj_norm, const Tensor& embeddings, const Tensor& scores) const;

    std::vector<std::pair<std::string, Tensor>> parameters() const;
    int word_dim() const { return word_dim_; }
    int hidden() const { return hidden_; }
    int graph_hidden() const { return graph_hidden_; }
    bool final_relu() const { return final_relu_; }

    Tensor w_word, w_score, w0, w1, w2;

private:
    int word_dim_, hidden_, graph_hidden_;
    bool final_relu_;
};

}  // namespace semnav
