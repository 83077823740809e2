#include "semnav/experiment.hpp"

#include <algorithm>
#include <sstream>

#include "semnav/embeddings.hpp"
#include "semnav/errors.hpp"
#include "semnav/rng.hpp"
#include "semnav/scene_gen.hpp"

namespace semnav {

Vocabulary default_vocabulary() {
    return Vocabulary({
        {"coffee_machine", "appliance", RoomType::Kitchen, false},
        {"mug", "container", RoomType::Kitchen, false},
        {"fridge", "appliance", RoomType::Kitchen, false},
        {"apple", "fruit", RoomType::Kitchen, false},
        {"mango", "fruit", RoomType::Kitchen, true},
        {"sofa", "furniture", RoomType::LivingRoom, false},
        {"tv", "electronics", RoomType::LivingRoom, false},
        {"remote", "electronics", RoomType::LivingRoom, true},
        {"bed", "furniture", RoomType::Bedroom, false},
        {"alarm_clock", "electronics", RoomType::Bedroom, true},
        {"sink", "fixture", RoomType::Bathroom, false},
        {"towel", "textile", RoomType::Bathroom, true},
    });
}

CooccurrencePrior default_prior(const Vocabulary& vocab) {
    CooccurrencePrior prior;
    auto link = [&](const char* a, const char* b, double s) {
        vocab.index_of(a);  // validate the names against the vocabulary
        vocab.index_of(b);
        prior.set(a, b, s);
    };
    link("mug", "coffee_machine", 0.9);
    link("apple", "fridge", 0.85);
    link("mango", "fridge", 0.85);
    link("mango", "apple", 0.9);
    link("mug", "fridge", 0.6);
    link("tv", "sofa", 0.9);
    link("remote", "tv", 0.9);
    link("remote", "sofa", 0.7);
    link("bed", "alarm_clock", 0.85);
    link("sink", "towel", 0.85);
    return prior;
}

std::string synthesize_corpus(const Vocabulary& vocab, const CooccurrencePrior& prior,
                              std::uint64_t seed) {
    static const char* kRelations[2] = {"next_to", "near"};
    std::ostringstream out;
    out << "# subject\trelation\tobject\tcount\n";
    for (int i = 0; i < vocab.size(); ++i) {
        for (int j = i + 1; j < vocab.size(); ++j) {
            double strength = prior.strength(vocab.category(i).name, vocab.category(j).name);
            Rng rng(derive_seed(seed, "pair", static_cast<std::uint64_t>(i) * vocab.size() + j));
            for (int r = 0; r < 2; ++r) {
                long long count;
                if (strength > 0.0) {
                    count = rng.poisson(12.0 * strength);
                } else {
                    // background co-mentions; very rarely cross the threshold
                    count = rng.bernoulli(0.01) ? rng.uniform_int(4, 5) : rng.uniform_int(0, 3);
                }
                if (count > 0)
                    out << vocab.category(i).name << '\t' << kRelations[r] << '\t'
                        << vocab.category(j).name << '\t' << count << '\n';
            }
        }
    }
    return out.str();
}

Tensor adjacency_tensor(const KnowledgeGraph& graph) {
    const int n = graph.node_count();
    Tensor t = Tensor::zeros(n, n, false);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) t.at(i, j) = graph.normalized_at(i, j);
    return t;
}

std::vector<Scene> World::all_train() const {
    std::vector<Scene> out;
    for (const auto& set : train_scenes) out.insert(out.end(), set.begin(), set.end());
    return out;
}

std::vector<Scene> World::all_val() const {
    std::vector<Scene> out;
    for (const auto& set : val_scenes) out.insert(out.end(), set.begin(), set.end());
    return out;
}

SplitScenes World::split_scenes() const {
    SplitScenes s;
    s.rooms = rooms;
    s.seen = train_scenes;
    s.unseen = test_scenes;
    return s;
}

AgentConfig agent_config(const TrainConfig& cfg, int vocab_size) {
    AgentConfig a;
    a.vocab_size = vocab_size;
    a.word_dim = cfg.word_dim;
    a.gcn_hidden = cfg.gcn_hidden;
    a.graph_hidden = cfg.graph_hidden;
    a.fused_dim = cfg.fused_dim;
    a.num_actions = cfg.with_stop ? 5 : 4;
    a.use_graph = cfg.use_graph;
    a.gcn_final_relu = cfg.gcn_final_relu;
    return a;
}

World build_world(const TrainConfig& cfg) {
    cfg.validate();
    Vocabulary vocab = cfg.vocab_file.empty() ? default_vocabulary() : Vocabulary::load(cfg.vocab_file);
    if (vocab.size() < 6) throw ValueError("build_world: vocabulary needs at least 6 categories");
    CooccurrencePrior prior =
        cfg.prior_file.empty() ? default_prior(vocab) : CooccurrencePrior::load(cfg.prior_file);

    RelationCounts counts;
    if (cfg.corpus_file.empty()) {
        std::istringstream corpus(synthesize_corpus(vocab, prior, cfg.corpus_seed));
        counts = ingest_triples(corpus, vocab, "<synthesized>");
    } else {
        counts = ingest_triples_file(cfg.corpus_file, vocab);
    }
    KnowledgeGraph base = build_graph(counts, vocab, cfg.graph_threshold);

    KnowledgeGraph graph = base;
    switch (cfg.graph_variant) {
        case GraphVariant::Real:
            break;
        case GraphVariant::DroppedObjects:
            graph = base.drop_nodes(cfg.drop_fraction,
                                    derive_seed(cfg.scene_seed, "drop-nodes",
                                                static_cast<std::uint64_t>(cfg.drop_fraction * 100)));
            break;
        case GraphVariant::DroppedRelations:
            graph = base.drop_edges(cfg.drop_fraction,
                                    derive_seed(cfg.scene_seed, "drop-edges",
                                                static_cast<std::uint64_t>(cfg.drop_fraction * 100)));
            break;
        case GraphVariant::Random:
            graph = variant_graph(SyntheticGraphKind::Random, vocab, cfg.random_edge_prob,
                                  derive_seed(cfg.seed, "random-graph", 0));
            break;
        case GraphVariant::Dense:
            graph = variant_graph(SyntheticGraphKind::FullyConnected, vocab, 1.0, 0);
            break;
    }

    std::vector<RoomType> rooms;
    if (cfg.room_type == "all") {
        rooms = {RoomType::Kitchen, RoomType::LivingRoom, RoomType::Bedroom, RoomType::Bathroom};
    } else {
        rooms = {room_from_name(cfg.room_type)};
    }

    World w{std::move(vocab),
            std::move(prior),
            std::move(base),
            std::move(graph),
            Tensor(),
            Tensor(),
            rooms,
            {},
            {},
            {}};
    w.adj_norm = adjacency_tensor(w.graph);
    w.embeddings = make_embeddings(w.vocab, cfg.word_dim, derive_seed(cfg.scene_seed, "embeddings", 0));

    SceneGenParams params;
    params.min_size = cfg.min_size;
    params.max_size = cfg.max_size;
    const int n = cfg.scenes_per_room;
    const int val_n = std::max(1, n / 6);
    const int test_n = std::max(1, n / 6);
    const int train_n = n - val_n - test_n;
    if (train_n < 1) throw ValueError("build_world: scenes_per_room too small to split");

    for (size_t ri = 0; ri < w.rooms.size(); ++ri) {
        RoomType room = w.rooms[ri];
        std::vector<Scene> scenes;
        for (int i = 0; i < n; ++i) {
            std::uint64_t s = derive_seed(cfg.scene_seed, std::string("scene-") + room_name(room),
                                          static_cast<std::uint64_t>(i));
            scenes.push_back(generate_scene(room, params, w.vocab, w.prior, s,
                                            std::string(room_name(room)) + "-" + std::to_string(i)));
        }
        w.train_scenes.emplace_back(scenes.begin(), scenes.begin() + train_n);
        w.val_scenes.emplace_back(scenes.begin() + train_n, scenes.begin() + train_n + val_n);
        w.test_scenes.emplace_back(scenes.begin() + train_n + val_n, scenes.end());
    }
    return w;
}

}  // namespace semnav
