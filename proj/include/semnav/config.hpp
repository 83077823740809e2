#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

namespace semnav {

enum class GraphVariant { Real, DroppedObjects, DroppedRelations, Random, Dense };
const char* graph_variant_name(GraphVariant v);
GraphVariant graph_variant_from_name(const std::string& name);

// Flat key=value configuration covering training, the environment build, and
// evaluation. Every field serializes under its own name; unknown keys are
// rejected on parse.
struct TrainConfig {
    // Core training loop.
    int workers = 4;
    long long total_frames = 200000;
    double lr0 = 7e-4;  // decays linearly to 0 over total_frames
    int rollout = 20;
    double gamma = 0.99;
    double entropy_beta = 0.01;
    double value_weight = 0.5;
    double grad_clip = 40.0;
    bool with_stop = false;
    std::uint64_t seed = 1;

    // Store behaviour.
    bool strict = false;  // serialize updates; required for bit-reproducibility

    // World construction.
    std::string room_type = "all";  // kitchen|living_room|bedroom|bathroom|all
    std::string vocab_file;         // empty: built-in desk vocabulary
    std::string prior_file;         // empty: built-in co-occurrence prior
    std::string corpus_file;        // empty: synthesize from the prior (seeded)
    std::uint64_t corpus_seed = 7;
    int scenes_per_room = 12;       // split 2/3 train, 1/6 val, 1/6 test
    std::uint64_t scene_seed = 77;  // shared across methods and training seeds
    int min_size = 13;
    int max_size = 15;
    double noise_sigma = 0.05;

    // Graph.
    bool use_graph = true;
    GraphVariant graph_variant = GraphVariant::Real;
    double drop_fraction = 0.0;
    int graph_threshold = 3;
    double random_edge_prob = 0.2;

    // Model dims.
    int word_dim = 16;
    int gcn_hidden = 32;
    int graph_hidden = 64;
    int fused_dim = 64;
    bool gcn_final_relu = false;

    // Evaluation and logging.
    int eval_episodes = 50;   // per scene, final reports
    int val_episodes = 10;    // per scene, cadence validation
    double val_cadence = 0.05;  // fraction of total_frames between validations
    std::string out_dir = "runs";

    void validate() const;  // throws ValueError on any violated invariant

    std::string serialize() const;
    static TrainConfig parse(std::istream& in, const std::string& origin);
    static TrainConfig load(const std::string& path);
    void save(const std::string& path) const;

    // FNV-1a over the serialized text with the seed and out_dir lines removed,
    // so sibling seeds of one experiment share a hash. Hex, 16 digits.
    std::string hash() const;
    std::string run_dir_name() const;  // cfg-<hash>-seed<seed>

    bool set_field(const std::string& key, const std::string& value);  // false: unknown key
};

}  // namespace semnav
