#include "semnav/gcn.hpp"

#include "semnav/errors.hpp"

namespace semnav {

GcnEncoder::GcnEncoder(int word_dim, int hidden, int graph_hidden, bool final_relu)
    : w_word(Tensor::zeros(word_dim, hidden, true)),
      w_score(Tensor::zeros(1, hidden, true)),
      w0(Tensor::zeros(2 * hidden, graph_hidden, true)),
      w1(Tensor::zeros(graph_hidden, graph_hidden, true)),
      w2(Tensor::zeros(graph_hidden, 1, true)),
      word_dim_(word_dim),
      hidden_(hidden),
      graph_hidden_(graph_hidden),
      final_relu_(final_relu) {
    if (word_dim <= 0 || hidden <= 0 || graph_hidden <= 0)
        throw ValueError("GcnEncoder: dimensions must be positive");
}

Tensor GcnEncoder::forward(const Tensor& adj_norm, const Tensor& embeddings,
                           const Tensor& scores) const {
    const int n = adj_norm.rows();
    if (adj_norm.cols() != n) throw ShapeError("gcn: adjacency must be square");
    if (embeddings.rows() != n || embeddings.cols() != word_dim_)
        throw ShapeError("gcn: embedding shape mismatch");
    if (scores.rows() != n || scores.cols() != 1) throw ShapeError("gcn: scores must be |V| x 1");

    Tensor x = concat(relu(matmul(embeddings, w_word)), relu(matmul(scores, w_score)), 1);
    Tensor h1 = relu(matmul(matmul(adj_norm, x), w0));
    Tensor h2 = relu(matmul(matmul(adj_norm, h1), w1));
    Tensor z = matmul(matmul(adj_norm, h2), w2);
    return final_relu_ ? relu(z) : z;
}

std::vector<std::pair<std::string, Tensor>> GcnEncoder::parameters() const {
    return {{"gcn/w_word", w_word},
            {"gcn/w_score", w_score},
            {"gcn/w0", w0},
            {"gcn/w1", w1},
            {"gcn/w2", w2}};
}

}  // namespace semnav
