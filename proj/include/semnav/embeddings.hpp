#pragma once

#include <cstdint>
#include <vector>

#include "semnav/tensor.hpp"
#include "semnav/vocabulary.hpp"

namespace semnav {

// Deterministic stand-in for pretrained word vectors: each category gets its
// group's centroid plus a small per-category offset, rows unit-normalized so
// same-group categories are close and distinct groups are well separated.
Tensor make_embeddings(const Vocabulary& vocab, int dim, std::uint64_t seed);

}  // namespace semnav
