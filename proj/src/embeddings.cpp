#include "semnav/embeddings.hpp"

#include <cmath>
#include <map>
#include <string>

#include "semnav/errors.hpp"
#include "semnav/rng.hpp"

namespace semnav {

Tensor make_embeddings(const Vocabulary& vocab, int dim, std::uint64_t seed) {
    if (dim <= 0) throw ValueError("make_embeddings: dim must be positive");
    const int n = vocab.size();
    Tensor e = Tensor::zeros(n, dim, /*requires_grad=*/false);

    std::map<std::string, std::vector<double>> centroids;
    for (int i = 0; i < n; ++i) {
        const std::string& group = vocab.category(i).group;
        auto it = centroids.find(group);
        if (it == centroids.end()) {
            Rng rng(derive_seed(seed, "embed-group", std::hash<std::string>{}(group) & 0xffffffff));
            std::vector<double> c(static_cast<size_t>(dim));
            for (double& v : c) v = rng.gaussian(0.0, 1.0);
            it = centroids.emplace(group, std::move(c)).first;
        }
        Rng rng(derive_seed(seed, "embed-cat", static_cast<std::uint64_t>(i)));
        double norm = 0.0;
        std::vector<double> row(static_cast<size_t>(dim));
        for (int j = 0; j < dim; ++j) {
            row[static_cast<size_t>(j)] =
                it->second[static_cast<size_t>(j)] + 0.25 * rng.gaussian(0.0, 1.0);
            norm += row[static_cast<size_t>(j)] * row[static_cast<size_t>(j)];
        }
        norm = std::sqrt(norm);
        if (norm == 0.0) norm = 1.0;
        for (int j = 0; j < dim; ++j) e.at(i, j) = row[static_cast<size_t>(j)] / norm;
    }
    return e;
}

}  // namespace semnav
