#include "semnav/config.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "semnav/errors.hpp"

namespace semnav {

const char* graph_variant_name(GraphVariant v) {
    switch (v) {
        case GraphVariant::Real: return "real";
        case GraphVariant::DroppedObjects: return "dropped_objects";
        case GraphVariant::DroppedRelations: return "dropped_relations";
        case GraphVariant::Random: return "random";
        case GraphVariant::Dense: return "dense";
    }
    return "?";
}

GraphVariant graph_variant_from_name(const std::string& name) {
    if (name == "real") return GraphVariant::Real;
    if (name == "dropped_objects") return GraphVariant::DroppedObjects;
    if (name == "dropped_relations") return GraphVariant::DroppedRelations;
    if (name == "random") return GraphVariant::Random;
    if (name == "dense") return GraphVariant::Dense;
    throw ValueError("unknown graph variant '" + name + "'");
}

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

bool parse_bool(const std::string& s, const std::string& key) {
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    throw ParseError("config: bad boolean for " + key + ": '" + s + "'");
}

long long parse_ll(const std::string& s, const std::string& key) {
    try {
        size_t pos = 0;
        long long v = std::stoll(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw ParseError("config: bad integer for " + key + ": '" + s + "'");
    }
}

std::uint64_t parse_u64(const std::string& s, const std::string& key) {
    try {
        size_t pos = 0;
        std::uint64_t v = std::stoull(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw ParseError("config: bad unsigned integer for " + key + ": '" + s + "'");
    }
}

double parse_double(const std::string& s, const std::string& key) {
    try {
        size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw ParseError("config: bad number for " + key + ": '" + s + "'");
    }
}

}  // namespace

bool TrainConfig::set_field(const std::string& key, const std::string& value) {
    if (key == "workers") workers = static_cast<int>(parse_ll(value, key));
    else if (key == "total_frames") total_frames = parse_ll(value, key);
    else if (key == "lr0") lr0 = parse_double(value, key);
    else if (key == "rollout") rollout = static_cast<int>(parse_ll(value, key));
    else if (key == "gamma") gamma = parse_double(value, key);
    else if (key == "entropy_beta") entropy_beta = parse_double(value, key);
    else if (key == "value_weight") value_weight = parse_double(value, key);
    else if (key == "grad_clip") grad_clip = parse_double(value, key);
    else if (key == "with_stop") with_stop = parse_bool(value, key);
    else if (key == "seed") seed = parse_u64(value, key);
    else if (key == "strict") strict = parse_bool(value, key);
    else if (key == "room_type") room_type = value;
    else if (key == "vocab_file") vocab_file = value;
    else if (key == "prior_file") prior_file = value;
    else if (key == "corpus_file") corpus_file = value;
    else if (key == "corpus_seed") corpus_seed = parse_u64(value, key);
    else if (key == "scenes_per_room") scenes_per_room = static_cast<int>(parse_ll(value, key));
    else if (key == "scene_seed") scene_seed = parse_u64(value, key);
    else if (key == "min_size") min_size = static_cast<int>(parse_ll(value, key));
    else if (key == "max_size") max_size = static_cast<int>(parse_ll(value, key));
    else if (key == "noise_sigma") noise_sigma = parse_double(value, key);
    else if (key == "use_graph") use_graph = parse_bool(value, key);
    else if (key == "graph_variant") graph_variant = graph_variant_from_name(value);
    else if (key == "drop_fraction") drop_fraction = parse_double(value, key);
    else if (key == "graph_threshold") graph_threshold = static_cast<int>(parse_ll(value, key));
    else if (key == "random_edge_prob") random_edge_prob = parse_double(value, key);
    else if (key == "word_dim") word_dim = static_cast<int>(parse_ll(value, key));
    else if (key == "gcn_hidden") gcn_hidden = static_cast<int>(parse_ll(value, key));
    else if (key == "graph_hidden") graph_hidden = static_cast<int>(parse_ll(value, key));
    else if (key == "fused_dim") fused_dim = static_cast<int>(parse_ll(value, key));
    else if (key == "gcn_final_relu") gcn_final_relu = parse_bool(value, key);
    else if (key == "eval_episodes") eval_episodes = static_cast<int>(parse_ll(value, key));
    else if (key == "val_episodes") val_episodes = static_cast<int>(parse_ll(value, key));
    else if (key == "val_cadence") val_cadence = parse_double(value, key);
    else if (key == "out_dir") out_dir = value;
    else return false;
    return true;
}

std::string TrainConfig::serialize() const {
    std::ostringstream out;
    out << "workers=" << workers << '\n';
    out << "total_frames=" << total_frames << '\n';
    out << "lr0=" << fmt_double(lr0) << '\n';
    out << "rollout=" << rollout << '\n';
    out << "gamma=" << fmt_double(gamma) << '\n';
    out << "entropy_beta=" << fmt_double(entropy_beta) << '\n';
    out << "value_weight=" << fmt_double(value_weight) << '\n';
    out << "grad_clip=" << fmt_double(grad_clip) << '\n';
    out << "with_stop=" << (with_stop ? "true" : "false") << '\n';
    out << "seed=" << seed << '\n';
    out << "strict=" << (strict ? "true" : "false") << '\n';
    out << "room_type=" << room_type << '\n';
    out << "vocab_file=" << vocab_file << '\n';
    out << "prior_file=" << prior_file << '\n';
    out << "corpus_file=" << corpus_file << '\n';
    out << "corpus_seed=" << corpus_seed << '\n';
    out << "scenes_per_room=" << scenes_per_room << '\n';
    out << "scene_seed=" << scene_seed << '\n';
    out << "min_size=" << min_size << '\n';
    out << "max_size=" << max_size << '\n';
    out << "noise_sigma=" << fmt_double(noise_sigma) << '\n';
    out << "use_graph=" << (use_graph ? "true" : "false") << '\n';
    out << "graph_variant=" << graph_variant_name(graph_variant) << '\n';
    out << "drop_fraction=" << fmt_double(drop_fraction) << '\n';
    out << "graph_threshold=" << graph_threshold << '\n';
    out << "random_edge_prob=" << fmt_double(random_edge_prob) << '\n';
    out << "word_dim=" << word_dim << '\n';
    out << "gcn_hidden=" << gcn_hidden << '\n';
    out << "graph_hidden=" << graph_hidden << '\n';
    out << "fused_dim=" << fused_dim << '\n';
    out << "gcn_final_relu=" << (gcn_final_relu ? "true" : "false") << '\n';
    out << "eval_episodes=" << eval_episodes << '\n';
    out << "val_episodes=" << val_episodes << '\n';
    out << "val_cadence=" << fmt_double(val_cadence) << '\n';
    out << "out_dir=" << out_dir << '\n';
    return out.str();
}

TrainConfig TrainConfig::parse(std::istream& in, const std::string& origin) {
    TrainConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string trimmed = line;
        size_t first = trimmed.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        if (trimmed[first] == '#') continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError(origin + ":" + std::to_string(lineno) + ": expected key=value");
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        // keys never contain spaces; values are taken verbatim
        size_t ke = key.find_last_not_of(" \t");
        size_t ks = key.find_first_not_of(" \t");
        key = (ks == std::string::npos) ? "" : key.substr(ks, ke - ks + 1);
        try {
            if (!cfg.set_field(key, value))
                throw ParseError("unknown config key '" + key + "'");
        } catch (const ParseError& e) {
            throw ParseError(origin + ":" + std::to_string(lineno) + ": " + e.what());
        } catch (const ValueError& e) {
            throw ParseError(origin + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return cfg;
}

TrainConfig TrainConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open config file '" + path + "'");
    return parse(in, path);
}

void TrainConfig::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw LoadError("cannot write config file '" + path + "'");
    out << serialize();
    if (!out) throw LoadError("failed writing config file '" + path + "'");
}

void TrainConfig::validate() const {
    if (workers <= 0) throw ValueError("config: workers must be positive");
    if (total_frames < 0) throw ValueError("config: total_frames must be non-negative");
    if (lr0 < 0) throw ValueError("config: lr0 must be non-negative");
    if (rollout <= 0) throw ValueError("config: rollout must be positive");
    if (gamma <= 0.0 || gamma > 1.0) throw ValueError("config: gamma must be in (0,1]");
    if (entropy_beta < 0) throw ValueError("config: entropy_beta must be non-negative");
    if (value_weight < 0) throw ValueError("config: value_weight must be non-negative");
    if (grad_clip <= 0) throw ValueError("config: grad_clip must be positive");
    if (scenes_per_room < 3) throw ValueError("config: scenes_per_room must be at least 3");
    if (min_size < 5 || max_size < min_size) throw ValueError("config: bad scene size range");
    if (noise_sigma < 0) throw ValueError("config: noise_sigma must be non-negative");
    if (drop_fraction < 0.0 || drop_fraction > 1.0)
        throw ValueError("config: drop_fraction must be in [0,1]");
    if (graph_threshold < 0) throw ValueError("config: graph_threshold must be non-negative");
    if (random_edge_prob < 0.0 || random_edge_prob > 1.0)
        throw ValueError("config: random_edge_prob must be in [0,1]");
    if (word_dim <= 0 || gcn_hidden <= 0 || graph_hidden <= 0 || fused_dim <= 0)
        throw ValueError("config: model dims must be positive");
    if (eval_episodes <= 0 || val_episodes <= 0)
        throw ValueError("config: episode counts must be positive");
    if (val_cadence <= 0.0 || val_cadence > 1.0)
        throw ValueError("config: val_cadence must be in (0,1]");
    if (room_type != "all" && room_type != "kitchen" && room_type != "living_room" &&
        room_type != "bedroom" && room_type != "bathroom")
        throw ValueError("config: unknown room_type '" + room_type + "'");
}

std::string TrainConfig::hash() const {
    std::istringstream in(serialize());
    std::string line;
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a 64
    while (std::getline(in, line)) {
        if (line.rfind("seed=", 0) == 0 || line.rfind("out_dir=", 0) == 0) continue;
        for (char c : line) {
            h ^= static_cast<unsigned char>(c);
            h *= 1099511628211ull;
        }
        h ^= static_cast<unsigned char>('\n');
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string TrainConfig::run_dir_name() const {
    return "cfg-" + hash() + "-seed" + std::to_string(seed);
}

}  // namespace semnav
