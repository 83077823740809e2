#pragma once

#include <string>
#include <vector>

#include "semnav/agent.hpp"
#include "semnav/config.hpp"
#include "semnav/evaluator.hpp"
#include "semnav/knowledge_graph.hpp"
#include "semnav/scene.hpp"
#include "semnav/tensor.hpp"
#include "semnav/vocabulary.hpp"

namespace semnav {

// Twelve desk categories over four room types; each room carries one novel
// (held-out) category embedded near a known group member.
Vocabulary default_vocabulary();
CooccurrencePrior default_prior(const Vocabulary& vocab);

// Relation-count corpus sampled from the prior: linked pairs get two relation
// labels with counts far above the edge threshold; unlinked pairs get
// sub-threshold noise (rarely above). Deterministic per seed.
std::string synthesize_corpus(const Vocabulary& vocab, const CooccurrencePrior& prior,
                              std::uint64_t seed);

Tensor adjacency_tensor(const KnowledgeGraph& graph);

// Everything a run needs besides parameters: vocabulary, prior, the
// (possibly ablated) graph with its normalized adjacency, embeddings, and
// the per-room scene sets split into train/val/test. Built by build_world.
struct World {
    Vocabulary vocab;
    CooccurrencePrior prior;
    KnowledgeGraph base_graph;  // before any variant surgery
    KnowledgeGraph graph;       // what the agent actually sees
    Tensor adj_norm;
    Tensor embeddings;
    std::vector<RoomType> rooms;
    std::vector<std::vector<Scene>> train_scenes;  // indexed like rooms
    std::vector<std::vector<Scene>> val_scenes;
    std::vector<std::vector<Scene>> test_scenes;

    std::vector<Scene> all_train() const;
    std::vector<Scene> all_val() const;
    SplitScenes split_scenes() const;  // seen = train, unseen = test
};

World build_world(const TrainConfig& cfg);

AgentConfig agent_config(const TrainConfig& cfg, int vocab_size);

}  // namespace semnav
