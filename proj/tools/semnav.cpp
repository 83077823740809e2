#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "semnav/ablation.hpp"
#include "semnav/config.hpp"
#include "semnav/errors.hpp"
#include "semnav/evaluator.hpp"
#include "semnav/experiment.hpp"
#include "semnav/plots.hpp"
#include "semnav/rng.hpp"
#include "semnav/scene_gen.hpp"
#include "semnav/trainer.hpp"

namespace fs = std::filesystem;
using namespace semnav;

namespace {

struct StageGuard {
    std::string current = "startup";
};

void write_file(const std::string& path, const std::string& text) {
    if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
    std::ofstream out(path);
    if (!out) throw LoadError("cannot write '" + path + "'");
    out << text;
    if (!out) throw LoadError("failed writing '" + path + "'");
}

Vocabulary load_vocab_or_default(const std::string& path) {
    return path.empty() ? default_vocabulary() : Vocabulary::load(path);
}

CooccurrencePrior load_prior_or_default(const std::string& path, const Vocabulary& vocab) {
    return path.empty() ? default_prior(vocab) : CooccurrencePrior::load(path);
}

// --graph real | dropped:objects:0.4 | dropped:relations:0.4 | random | dense
void apply_graph_spec(TrainConfig& cfg, const std::string& spec) {
    if (spec == "real") {
        cfg.graph_variant = GraphVariant::Real;
        cfg.drop_fraction = 0.0;
        return;
    }
    if (spec == "random") {
        cfg.graph_variant = GraphVariant::Random;
        return;
    }
    if (spec == "dense") {
        cfg.graph_variant = GraphVariant::Dense;
        return;
    }
    if (spec.rfind("dropped:", 0) == 0) {
        std::string rest = spec.substr(8);
        size_t colon = rest.find(':');
        if (colon != std::string::npos) {
            std::string kind = rest.substr(0, colon);
            std::string frac = rest.substr(colon + 1);
            cfg.graph_variant = kind == "objects"    ? GraphVariant::DroppedObjects
                                : kind == "relations" ? GraphVariant::DroppedRelations
                                                      : throw ValueError("--graph: unknown drop kind '" + kind + "'");
            try {
                size_t pos = 0;
                cfg.drop_fraction = std::stod(frac, &pos);
                if (pos != frac.size()) throw std::invalid_argument("");
            } catch (const std::exception&) {
                throw ValueError("--graph: bad drop fraction '" + frac + "'");
            }
            return;
        }
    }
    throw ValueError("--graph: unknown spec '" + spec + "'");
}

void cap_workers_from_env(TrainConfig& cfg) {
    const char* env = std::getenv("SEMNAV_THREADS");
    if (!env) return;
    try {
        int cap = std::stoi(env);
        if (cap > 0 && cfg.workers > cap) cfg.workers = cap;
    } catch (const std::exception&) {
        throw ValueError(std::string("SEMNAV_THREADS is not a number: '") + env + "'");
    }
}

struct CommonOpts {
    std::string config_path;
    std::string graph_spec;
    bool with_stop_flag = false;
    bool no_stop_flag = false;

    bool seed_set = false, workers_set = false, frames_set = false, room_set = false,
         out_set = false;
    std::uint64_t seed = 0;
    int workers = 0;
    long long frames = 0;
    std::string room_type;
    std::string out_dir;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "config file (key=value lines)");
        cmd->add_option("--seed", seed, "training seed")->each([this](const std::string&) { seed_set = true; });
        cmd->add_option("--workers", workers, "worker thread count")
            ->each([this](const std::string&) { workers_set = true; });
        cmd->add_option("--frames", frames, "total training frames")
            ->each([this](const std::string&) { frames_set = true; });
        cmd->add_option("--room-type", room_type, "kitchen|living_room|bedroom|bathroom|all")
            ->each([this](const std::string&) { room_set = true; });
        cmd->add_flag("--with-stop", with_stop_flag, "terminate episodes only on an explicit stop action");
        cmd->add_flag("--no-stop", no_stop_flag, "terminate as soon as the target is visible (default)");
        cmd->add_option("--graph", graph_spec,
                        "real | dropped:objects:F | dropped:relations:F | random | dense");
        cmd->add_option("--out", out_dir, "output root directory")
            ->each([this](const std::string&) { out_set = true; });
    }

    TrainConfig resolve() const {
        TrainConfig cfg;
        if (!config_path.empty()) cfg = TrainConfig::load(config_path);
        if (seed_set) cfg.seed = seed;
        if (workers_set) cfg.workers = workers;
        if (frames_set) cfg.total_frames = frames;
        if (room_set) cfg.room_type = room_type;
        if (with_stop_flag && no_stop_flag)
            throw ValueError("--with-stop and --no-stop are mutually exclusive");
        if (with_stop_flag) cfg.with_stop = true;
        if (no_stop_flag) cfg.with_stop = false;
        if (!graph_spec.empty()) apply_graph_spec(cfg, graph_spec);
        if (out_set) cfg.out_dir = out_dir;
        cap_workers_from_env(cfg);
        cfg.validate();
        return cfg;
    }
};

int run_cli(int argc, char** argv) {
    CLI::App app{"knowledge-graph-conditioned semantic navigation"};
    app.require_subcommand(1);
    StageGuard stage;

    // gen-corpus
    auto* gen_corpus = app.add_subcommand("gen-corpus", "sample a relation-count corpus from the prior");
    std::string gc_vocab, gc_prior, gc_out = "corpus.tsv";
    std::uint64_t gc_seed = 7;
    gen_corpus->add_option("--vocab", gc_vocab, "vocabulary TSV (default: built-in)");
    gen_corpus->add_option("--prior", gc_prior, "co-occurrence prior TSV (default: built-in)");
    gen_corpus->add_option("--seed", gc_seed, "corpus seed");
    gen_corpus->add_option("--out", gc_out, "output TSV path");
    gen_corpus->callback([&] {
        stage.current = "gen-corpus";
        Vocabulary vocab = load_vocab_or_default(gc_vocab);
        CooccurrencePrior prior = load_prior_or_default(gc_prior, vocab);
        write_file(gc_out, synthesize_corpus(vocab, prior, gc_seed));
        std::cout << "wrote " << gc_out << "\n";
    });

    // gen-scenes
    auto* gen_scenes = app.add_subcommand("gen-scenes", "generate grid scenes for each room type");
    std::string gs_vocab, gs_prior, gs_out = "scenes", gs_room = "all";
    std::uint64_t gs_seed = 77;
    int gs_count = 12, gs_min = 11, gs_max = 13;
    gen_scenes->add_option("--vocab", gs_vocab, "vocabulary TSV (default: built-in)");
    gen_scenes->add_option("--prior", gs_prior, "co-occurrence prior TSV (default: built-in)");
    gen_scenes->add_option("--seed", gs_seed, "scene seed");
    gen_scenes->add_option("--count", gs_count, "scenes per room type");
    gen_scenes->add_option("--room-type", gs_room, "kitchen|living_room|bedroom|bathroom|all");
    gen_scenes->add_option("--min-size", gs_min, "minimum grid side");
    gen_scenes->add_option("--max-size", gs_max, "maximum grid side");
    gen_scenes->add_option("--out", gs_out, "output directory");
    gen_scenes->callback([&] {
        stage.current = "gen-scenes";
        Vocabulary vocab = load_vocab_or_default(gs_vocab);
        CooccurrencePrior prior = load_prior_or_default(gs_prior, vocab);
        SceneGenParams params;
        params.min_size = gs_min;
        params.max_size = gs_max;
        std::vector<RoomType> rooms;
        if (gs_room == "all")
            rooms = {RoomType::Kitchen, RoomType::LivingRoom, RoomType::Bedroom, RoomType::Bathroom};
        else
            rooms = {room_from_name(gs_room)};
        fs::create_directories(gs_out);
        int written = 0;
        for (size_t ri = 0; ri < rooms.size(); ++ri) {
            for (int i = 0; i < gs_count; ++i) {
                std::uint64_t s = derive_seed(gs_seed, std::string("scene-") + room_name(rooms[ri]),
                                              static_cast<std::uint64_t>(i));
                std::string stem = std::string(room_name(rooms[ri])) + "-" + std::to_string(i);
                Scene scene = generate_scene(rooms[ri], params, vocab, prior, s, stem);
                scene.save(gs_out + "/" + stem + ".txt", vocab);
                ++written;
            }
        }
        std::cout << "wrote " << written << " scenes under " << gs_out << "\n";
    });

    // build-graph
    auto* build_graph_cmd = app.add_subcommand("build-graph", "threshold a corpus into a category graph");
    std::string bg_vocab, bg_corpus, bg_out = "graph.txt";
    long long bg_threshold = 3;
    build_graph_cmd->add_option("--vocab", bg_vocab, "vocabulary TSV (default: built-in)");
    build_graph_cmd->add_option("--corpus", bg_corpus, "relation corpus TSV")->required();
    build_graph_cmd->add_option("--threshold", bg_threshold, "edge requires any relation count > threshold");
    build_graph_cmd->add_option("--out", bg_out, "output graph text path");
    build_graph_cmd->callback([&] {
        stage.current = "build-graph";
        Vocabulary vocab = load_vocab_or_default(bg_vocab);
        RelationCounts counts = ingest_triples_file(bg_corpus, vocab);
        KnowledgeGraph graph = build_graph(counts, vocab, bg_threshold);
        if (fs::path(bg_out).has_parent_path())
            fs::create_directories(fs::path(bg_out).parent_path());
        graph.save(bg_out);
        std::cout << "wrote " << bg_out << " (" << graph.edge_count() << " edges, "
                  << counts.skipped_unknown << " skipped triples)\n";
    });

    // train
    auto* train_cmd = app.add_subcommand("train", "run A3C training and leave artifacts in a run directory");
    CommonOpts train_opts;
    train_opts.attach(train_cmd);
    train_cmd->callback([&] {
        stage.current = "train: configuration";
        TrainConfig cfg = train_opts.resolve();
        stage.current = "train: world construction";
        World world = build_world(cfg);
        stage.current = "train: optimization";
        TrainResult result = train(cfg, world, cfg.out_dir + "/" + cfg.run_dir_name());
        std::cout << "run dir: " << result.run_dir << "\n"
                  << "frames: " << result.frames_done << "\n"
                  << "best validation spl: " << result.best_val_spl << "\n";
    });

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint across the generalization splits");
    CommonOpts eval_opts;
    eval_opts.attach(eval_cmd);
    std::string ev_ckpt, ev_split = "all", ev_method;
    int ev_episodes = 0;
    eval_cmd->add_option("--checkpoint", ev_ckpt, "checkpoint path (default: run dir best.ckpt)");
    eval_cmd->add_option("--split", ev_split, "seen-known|seen-novel|unseen-known|unseen-novel|all");
    eval_cmd->add_option("--episodes", ev_episodes, "episodes per scene (default: config eval_episodes)");
    eval_cmd->add_option("--method", ev_method, "method label in the report (default from config)");
    eval_cmd->callback([&] {
        stage.current = "eval: configuration";
        TrainConfig cfg = eval_opts.resolve();
        std::string run_dir = cfg.out_dir + "/" + cfg.run_dir_name();
        std::string ckpt = ev_ckpt.empty() ? run_dir + "/best.ckpt" : ev_ckpt;
        stage.current = "eval: world construction";
        World world = build_world(cfg);
        stage.current = "eval: checkpoint load";
        std::unique_ptr<NavAgent> agent = load_agent(cfg, world, ckpt);
        stage.current = "eval: rollouts";
        std::string method = ev_method.empty() ? (cfg.use_graph ? "gcn" : "no_graph") : ev_method;
        int episodes = ev_episodes > 0 ? ev_episodes : cfg.eval_episodes;
        std::vector<ReportRow> rows =
            split_report(agent.get(), method, world.split_scenes(), world.vocab, cfg.with_stop,
                         episodes, derive_seed(cfg.seed, "final-eval", 0), cfg.noise_sigma);
        if (ev_split != "all") {
            size_t dash = ev_split.find('-');
            if (dash == std::string::npos)
                throw ValueError("--split: expected <scene>-<object> or all");
            std::string ss = ev_split.substr(0, dash), os = ev_split.substr(dash + 1);
            std::vector<ReportRow> filtered;
            for (const ReportRow& r : rows)
                if (r.scene_split == ss && r.object_split == os) filtered.push_back(r);
            if (filtered.empty()) throw ValueError("--split: unknown split '" + ev_split + "'");
            rows = std::move(filtered);
        }
        fs::create_directories(run_dir);
        write_file(run_dir + "/report.csv", report_to_csv(rows));
        std::cout << report_to_csv(rows);
        std::cout << "wrote " << run_dir << "/report.csv\n";
    });

    // ablate
    auto* ablate_cmd = app.add_subcommand("ablate", "train and score the graph-surgery grid");
    CommonOpts ab_opts;
    ab_opts.attach(ablate_cmd);
    ablate_cmd->callback([&] {
        stage.current = "ablate: configuration";
        TrainConfig cfg = ab_opts.resolve();
        stage.current = "ablate: grid";
        AblationTable table = ablation_suite(cfg, cfg.out_dir);
        write_file(cfg.out_dir + "/ablation.csv", table.to_csv());
        std::cout << table.to_csv();
        std::cout << "wrote " << cfg.out_dir << "/ablation.csv\n";
    });

    // inspect-graph
    auto* inspect = app.add_subcommand("inspect-graph", "print nodes, edges and normalization of a graph");
    std::string ig_vocab, ig_corpus, ig_graph_spec = "real";
    long long ig_threshold = 3;
    std::uint64_t ig_seed = 7;
    inspect->add_option("--vocab", ig_vocab, "vocabulary TSV (default: built-in)");
    inspect->add_option("--corpus", ig_corpus, "relation corpus TSV (default: synthesized)");
    inspect->add_option("--threshold", ig_threshold, "edge count threshold");
    inspect->add_option("--seed", ig_seed, "corpus/variant seed");
    inspect->add_option("--graph", ig_graph_spec, "real | dropped:objects:F | dropped:relations:F | random | dense");
    inspect->callback([&] {
        stage.current = "inspect-graph";
        Vocabulary vocab = load_vocab_or_default(ig_vocab);
        RelationCounts counts;
        if (ig_corpus.empty()) {
            std::istringstream corpus(synthesize_corpus(vocab, default_prior(vocab), ig_seed));
            counts = ingest_triples(corpus, vocab, "<synthesized>");
        } else {
            counts = ingest_triples_file(ig_corpus, vocab);
        }
        KnowledgeGraph graph = build_graph(counts, vocab, ig_threshold);
        TrainConfig tmp;
        apply_graph_spec(tmp, ig_graph_spec);
        switch (tmp.graph_variant) {
            case GraphVariant::Real: break;
            case GraphVariant::DroppedObjects:
                graph = graph.drop_nodes(tmp.drop_fraction, derive_seed(ig_seed, "drop-nodes", 0));
                break;
            case GraphVariant::DroppedRelations:
                graph = graph.drop_edges(tmp.drop_fraction, derive_seed(ig_seed, "drop-edges", 0));
                break;
            case GraphVariant::Random:
                graph = variant_graph(SyntheticGraphKind::Random, vocab, 0.2,
                                      derive_seed(ig_seed, "random-graph", 0));
                break;
            case GraphVariant::Dense:
                graph = variant_graph(SyntheticGraphKind::FullyConnected, vocab, 1.0, 0);
                break;
        }
        std::cout << graph.to_text();
        std::cout << "edges: " << graph.edge_count() << "  density: " << graph.density() << "\n";
        for (int i = 0; i < graph.node_count(); ++i)
            std::cout << vocab.category(i).name << ": degree " << graph.degree(i)
                      << "  a_hat[i][i] " << graph.normalized_at(i, i) << "\n";
    });

    // export-plots
    auto* plots_cmd = app.add_subcommand("export-plots", "aggregate metrics CSVs into band plots");
    std::vector<std::string> ep_inputs;
    std::string ep_out = "plots";
    plots_cmd->add_option("csvs", ep_inputs, "metrics.csv files, one per seed")->required();
    plots_cmd->add_option("--out", ep_out, "output directory");
    plots_cmd->callback([&] {
        stage.current = "export-plots";
        export_plots(ep_inputs, ep_out);
        std::cout << "wrote plots under " << ep_out << "\n";
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "semnav: " << stage.current << ": " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) { return run_cli(argc, argv); }
