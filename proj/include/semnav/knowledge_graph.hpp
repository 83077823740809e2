#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "semnav/rng.hpp"
#include "semnav/vocabulary.hpp"

namespace semnav {

// Aggregated (subject, relation, object) -> count triples. Directionality is
// kept here; edge construction discards it.
struct RelationCounts {
    std::map<std::tuple<std::string, std::string, std::string>, long long> counts;
    long long skipped_unknown = 0;  // lines naming categories outside the vocabulary
};

struct IngestReport {
    long long triples = 0;
    long long skipped_unknown = 0;
};

// Parses a TSV corpus stream: subject TAB relation TAB object TAB count,
// '#' comment lines allowed. Unknown categories are tallied, not fatal.
RelationCounts ingest_triples(std::istream& in, const Vocabulary& vocab,
                              const std::string& origin = "<stream>");
RelationCounts ingest_triples_file(const std::string& path, const Vocabulary& vocab);

// Undirected category graph plus its symmetric normalization. The adjacency
// A is binary with zero diagonal; a_hat = D^(-1/2) (A+I) D^(-1/2) where D is
// the degree matrix of A+I.
class KnowledgeGraph {
public:
    KnowledgeGraph(Vocabulary vocab, std::vector<std::uint8_t> adjacency);

    const Vocabulary& vocab() const { return vocab_; }
    int node_count() const { return vocab_.size(); }
    bool edge(int i, int j) const { return adj_[idx(i, j)] != 0; }
    int degree(int i) const;
    int edge_count() const;  // undirected
    double density() const;

    const std::vector<std::uint8_t>& adjacency() const { return adj_; }
    const std::vector<double>& normalized() const { return a_hat_; }
    double normalized_at(int i, int j) const { return a_hat_[idx(i, j)]; }

    // Graph surgery. All variants keep the vocabulary (and hence every
    // feature dimension) intact; removed nodes simply become isolated.
    KnowledgeGraph drop_nodes(double fraction, std::uint64_t seed,
                              const std::vector<int>& protected_nodes = {}) const;
    KnowledgeGraph drop_edges(double fraction, std::uint64_t seed) const;

    std::string to_text() const;  // vocabulary listing then edge list
    void save(const std::string& path) const;

private:
    std::size_t idx(int i, int j) const {
        return static_cast<std::size_t>(i) * vocab_.size() + j;
    }
    Vocabulary vocab_;
    std::vector<std::uint8_t> adj_;
    std::vector<double> a_hat_;
};

// Edge (i,j) exists iff any single relation label between the two categories,
// in either direction, has count strictly greater than threshold.
KnowledgeGraph build_graph(const RelationCounts& counts, const Vocabulary& vocab, long long threshold = 3);

enum class SyntheticGraphKind { FullyConnected, Random };

KnowledgeGraph variant_graph(SyntheticGraphKind kind, const Vocabulary& vocab,
                             double edge_probability, std::uint64_t seed);

// D^(-1/2) (A+I) D^(-1/2) for a symmetric binary zero-diagonal adjacency.
std::vector<double> normalize_adjacency(const std::vector<std::uint8_t>& adj, int n);

}  // namespace semnav
