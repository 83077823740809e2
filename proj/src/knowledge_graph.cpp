#include "semnav/knowledge_graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

namespace semnav {

RelationCounts ingest_triples(std::istream& in, const Vocabulary& vocab, const std::string& origin) {
    RelationCounts rc;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string subject, relation, object, count_str;
        if (!std::getline(ls, subject, '\t') || !std::getline(ls, relation, '\t') ||
            !std::getline(ls, object, '\t') || !std::getline(ls, count_str)) {
            throw ParseError(origin + ":" + std::to_string(lineno) +
                             ": expected subject<TAB>relation<TAB>object<TAB>count");
        }
        long long count = 0;
        try {
            std::size_t pos = 0;
            count = std::stoll(count_str, &pos);
            if (pos != count_str.size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw ParseError(origin + ":" + std::to_string(lineno) + ": bad count '" + count_str + "'");
        }
        if (count < 0) {
            throw ValueError(origin + ":" + std::to_string(lineno) + ": negative count");
        }
        if (!vocab.contains(subject) || !vocab.contains(object)) {
            ++rc.skipped_unknown;
            continue;
        }
        rc.counts[{subject, relation, object}] += count;
    }
    return rc;
}

RelationCounts ingest_triples_file(const std::string& path, const Vocabulary& vocab) {
    std::ifstream in(path);
    if (!in) throw LoadError("corpus: cannot open " + path);
    return ingest_triples(in, vocab, path);
}

std::vector<double> normalize_adjacency(const std::vector<std::uint8_t>& adj, int n) {
    std::vector<double> dinv(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        int deg = 1;  // self-loop
        for (int j = 0; j < n; ++j) deg += adj[static_cast<std::size_t>(i) * n + j];
        dinv[static_cast<std::size_t>(i)] = 1.0 / std::sqrt(static_cast<double>(deg));
    }
    std::vector<double> a_hat(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double aij = (i == j) ? 1.0 : static_cast<double>(adj[static_cast<std::size_t>(i) * n + j]);
            if (aij != 0.0) {
                a_hat[static_cast<std::size_t>(i) * n + j] =
                    dinv[static_cast<std::size_t>(i)] * aij * dinv[static_cast<std::size_t>(j)];
            }
        }
    }
    return a_hat;
}

KnowledgeGraph::KnowledgeGraph(Vocabulary vocab, std::vector<std::uint8_t> adjacency)
    : vocab_(std::move(vocab)), adj_(std::move(adjacency)) {
    const int n = vocab_.size();
    if (n == 0) throw ContractError("knowledge graph: empty vocabulary");
    if (adj_.size() != static_cast<std::size_t>(n) * n) {
        throw ShapeError("knowledge graph: adjacency size mismatch");
    }
    for (int i = 0; i < n; ++i) {
        if (adj_[idx(i, i)] != 0) throw ValueError("knowledge graph: nonzero diagonal");
        for (int j = 0; j < n; ++j) {
            if (adj_[idx(i, j)] != adj_[idx(j, i)]) {
                throw ValueError("knowledge graph: adjacency not symmetric");
            }
        }
    }
    a_hat_ = normalize_adjacency(adj_, n);
}

int KnowledgeGraph::degree(int i) const {
    int d = 0;
    for (int j = 0; j < node_count(); ++j) d += adj_[idx(i, j)];
    return d;
}

int KnowledgeGraph::edge_count() const {
    int m = 0;
    const int n = node_count();
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) m += adj_[idx(i, j)];
    }
    return m;
}

double KnowledgeGraph::density() const {
    const int n = node_count();
    if (n < 2) return 0.0;
    return static_cast<double>(edge_count()) / (0.5 * n * (n - 1));
}

KnowledgeGraph build_graph(const RelationCounts& counts, const Vocabulary& vocab, long long threshold) {
    if (vocab.size() == 0) throw ContractError("build_graph: empty vocabulary");
    if (threshold < 0) throw ValueError("build_graph: negative threshold");
    const int n = vocab.size();
    std::vector<std::uint8_t> adj(static_cast<std::size_t>(n) * n, 0);
    for (const auto& [key, count] : counts.counts) {
        if (count <= threshold) continue;  // strictly greater than threshold
        const int i = vocab.index_of(std::get<0>(key));
        const int j = vocab.index_of(std::get<2>(key));
        if (i == j) continue;
        adj[static_cast<std::size_t>(i) * n + j] = 1;
        adj[static_cast<std::size_t>(j) * n + i] = 1;
    }
    return KnowledgeGraph(vocab, std::move(adj));
}

KnowledgeGraph KnowledgeGraph::drop_nodes(double fraction, std::uint64_t seed,
                                          const std::vector<int>& protected_nodes) const {
    if (fraction < 0.0 || fraction > 1.0) throw ValueError("drop_nodes: fraction out of [0,1]");
    const int n = node_count();
    const int k = static_cast<int>(fraction * n);
    std::vector<std::uint8_t> is_protected(static_cast<std::size_t>(n), 0);
    for (int p : protected_nodes) is_protected[static_cast<std::size_t>(p)] = 1;
    std::vector<int> candidates;
    for (int i = 0; i < n; ++i) {
        if (!is_protected[static_cast<std::size_t>(i)]) candidates.push_back(i);
    }
    if (k > static_cast<int>(candidates.size())) {
        throw ValueError("drop_nodes: not enough unprotected nodes to drop");
    }
    if (n - k < 1) throw ValueError("drop_nodes: would remove every node");
    Rng rng(seed);
    rng.shuffle(candidates);
    std::vector<std::uint8_t> adj = adj_;
    for (int t = 0; t < k; ++t) {
        const int v = candidates[static_cast<std::size_t>(t)];
        for (int j = 0; j < n; ++j) {
            adj[static_cast<std::size_t>(v) * n + j] = 0;
            adj[static_cast<std::size_t>(j) * n + v] = 0;
        }
    }
    return KnowledgeGraph(vocab_, std::move(adj));
}

KnowledgeGraph KnowledgeGraph::drop_edges(double fraction, std::uint64_t seed) const {
    if (fraction < 0.0 || fraction > 1.0) throw ValueError("drop_edges: fraction out of [0,1]");
    const int n = node_count();
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (adj_[idx(i, j)]) edges.emplace_back(i, j);
        }
    }
    const int k = static_cast<int>(fraction * static_cast<double>(edges.size()));
    Rng rng(seed);
    rng.shuffle(edges);
    std::vector<std::uint8_t> adj = adj_;
    for (int t = 0; t < k; ++t) {
        const auto [i, j] = edges[static_cast<std::size_t>(t)];
        adj[static_cast<std::size_t>(i) * n + j] = 0;
        adj[static_cast<std::size_t>(j) * n + i] = 0;
    }
    return KnowledgeGraph(vocab_, std::move(adj));
}

KnowledgeGraph variant_graph(SyntheticGraphKind kind, const Vocabulary& vocab,
                             double edge_probability, std::uint64_t seed) {
    const int n = vocab.size();
    std::vector<std::uint8_t> adj(static_cast<std::size_t>(n) * n, 0);
    if (kind == SyntheticGraphKind::FullyConnected) {
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (i != j) adj[static_cast<std::size_t>(i) * n + j] = 1;
            }
        }
    } else {
        if (edge_probability < 0.0 || edge_probability > 1.0) {
            throw ValueError("variant_graph: edge probability out of [0,1]");
        }
        Rng rng(seed);
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                if (rng.bernoulli(edge_probability)) {
                    adj[static_cast<std::size_t>(i) * n + j] = 1;
                    adj[static_cast<std::size_t>(j) * n + i] = 1;
                }
            }
        }
    }
    return KnowledgeGraph(vocab, std::move(adj));
}

std::string KnowledgeGraph::to_text() const {
    std::ostringstream os;
    os << "semnav-graph 1\n";
    os << "nodes " << node_count() << "\n";
    for (int i = 0; i < node_count(); ++i) {
        const auto& c = vocab_.category(i);
        os << i << " " << c.name << " " << c.group << " " << room_name(c.room) << " "
           << (c.novel ? "novel" : "known") << "\n";
    }
    os << "edges " << edge_count() << "\n";
    for (int i = 0; i < node_count(); ++i) {
        for (int j = i + 1; j < node_count(); ++j) {
            if (edge(i, j)) os << vocab_.category(i).name << " " << vocab_.category(j).name << "\n";
        }
    }
    return os.str();
}

void KnowledgeGraph::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw LoadError("graph export: cannot open " + path);
    out << to_text();
}

}  // namespace semnav
