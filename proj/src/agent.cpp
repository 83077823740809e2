#include "semnav/agent.hpp"

#include <cmath>

#include "semnav/errors.hpp"
#include "semnav/rng.hpp"

namespace semnav {

NavAgent::NavAgent(const AgentConfig& cfg, Tensor embeddings, Tensor adj_norm)
    : gcn(cfg.word_dim, cfg.gcn_hidden, cfg.graph_hidden, cfg.gcn_final_relu),
      policy(cfg.vocab_size, cfg.word_dim, cfg.gcn_hidden, cfg.fused_dim, cfg.num_actions,
             cfg.use_graph),
      cfg_(cfg),
      embeddings_(std::move(embeddings)),
      adj_norm_(std::move(adj_norm)) {
    if (cfg.vocab_size <= 0) throw ValueError("NavAgent: vocab_size must be positive");
    if (embeddings_.rows() != cfg.vocab_size || embeddings_.cols() != cfg.word_dim)
        throw ShapeError("NavAgent: embedding matrix shape mismatch");
    if (adj_norm_.rows() != cfg.vocab_size || adj_norm_.cols() != cfg.vocab_size)
        throw ShapeError("NavAgent: adjacency shape mismatch");
}

void NavAgent::set_adjacency(Tensor adj_norm) {
    if (adj_norm.rows() != cfg_.vocab_size || adj_norm.cols() != cfg_.vocab_size)
        throw ShapeError("NavAgent: adjacency shape mismatch");
    adj_norm_ = std::move(adj_norm);
}

void NavAgent::init_weights(std::uint64_t seed) {
    std::uint64_t index = 0;
    for (auto& [name, p] : parameters()) {
        Rng rng(derive_seed(seed, "init", index++));
        // Zero heads: the initial policy is exactly uniform and the initial
        // value estimate 0, so early exploration carries no arbitrary
        // directional bias from the init draw.
        const bool head = name.find("w_policy") != std::string::npos ||
                          name.find("w_value") != std::string::npos;
        if (head || name.find("/b_") != std::string::npos) {
            for (int i = 0; i < p.rows(); ++i)
                for (int j = 0; j < p.cols(); ++j) p.at(i, j) = 0.0;
            continue;
        }
        double limit = std::sqrt(6.0 / (p.rows() + p.cols()));
        for (int i = 0; i < p.rows(); ++i)
            for (int j = 0; j < p.cols(); ++j) p.at(i, j) = rng.uniform(-limit, limit);
    }
}

Tensor NavAgent::graph_output(const std::vector<double>& current_scores) const {
    if (static_cast<int>(current_scores.size()) != cfg_.vocab_size)
        throw ShapeError("NavAgent: score vector length mismatch");
    Tensor scores = Tensor::column(current_scores, false);
    return gcn.forward(adj_norm_, embeddings_, scores);
}

PolicyOutput NavAgent::forward(const Observation& obs, int target) const {
    if (target < 0 || target >= cfg_.vocab_size) throw ValueError("NavAgent: target out of range");
    if (static_cast<int>(obs.stack.size()) != 4 * cfg_.vocab_size)
        throw ShapeError("NavAgent: observation stack length mismatch");

    Tensor visual = Tensor::row(obs.stack, false);
    std::vector<double> word_row(static_cast<size_t>(cfg_.word_dim));
    for (int j = 0; j < cfg_.word_dim; ++j) word_row[static_cast<size_t>(j)] = embeddings_.at(target, j);
    Tensor word = Tensor::row(word_row, false);

    Tensor graph = Tensor::zeros(1, 1, false);
    if (cfg_.use_graph) graph = transpose(graph_output(obs.current));
    return policy.forward(visual, word, graph);
}

std::vector<std::pair<std::string, Tensor>> NavAgent::parameters() const {
    std::vector<std::pair<std::string, Tensor>> out;
    if (cfg_.use_graph)
        for (auto& p : gcn.parameters()) out.push_back(p);
    for (auto& p : policy.parameters()) out.push_back(p);
    return out;
}

std::vector<Tensor> NavAgent::parameter_tensors() const {
    std::vector<Tensor> out;
    for (auto& [name, p] : parameters()) out.push_back(p);
    return out;
}

Checkpoint NavAgent::to_checkpoint() const {
    Checkpoint ckpt;
    auto add = [&ckpt](const std::string& name, const Tensor& t) {
        std::vector<double> values(static_cast<size_t>(t.rows()) * t.cols());
        for (int i = 0; i < t.rows(); ++i)
            for (int j = 0; j < t.cols(); ++j)
                values[static_cast<size_t>(i) * t.cols() + j] = t.at(i, j);
        ckpt.add(name, t.rows(), t.cols(), std::move(values));
    };
    for (auto& [name, p] : parameters()) add(name, p);
    add("embeddings", embeddings_);
    add("adjacency", adj_norm_);
    return ckpt;
}

void NavAgent::load_checkpoint(const Checkpoint& ckpt) {
    auto fill = [](Tensor& t, const CheckpointEntry& e) {
        if (e.rows != t.rows() || e.cols != t.cols())
            throw LoadError("checkpoint entry '" + e.name + "' has unexpected shape");
        for (int i = 0; i < t.rows(); ++i)
            for (int j = 0; j < t.cols(); ++j)
                t.at(i, j) = e.values[static_cast<size_t>(i) * t.cols() + j];
    };
    for (auto& [name, p] : parameters()) fill(p, ckpt.require(name));
    fill(embeddings_, ckpt.require("embeddings"));
    fill(adj_norm_, ckpt.require("adjacency"));
}

void copy_parameters(const std::vector<Tensor>& from, const std::vector<Tensor>& to) {
    if (from.size() != to.size()) throw ShapeError("copy_parameters: list size mismatch");
    for (size_t k = 0; k < from.size(); ++k) {
        const Tensor& src = from[k];
        Tensor dst = to[k];  // handle copy; payload is shared
        if (src.rows() != dst.rows() || src.cols() != dst.cols())
            throw ShapeError("copy_parameters: shape mismatch");
        dst.values() = src.values();
    }
}

}  // namespace semnav
