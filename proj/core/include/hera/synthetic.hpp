#pragma once

#include "hera/types.hpp"

#include <cstdint>

namespace hera {

// Gaussian blobs with unit within-class noise: class c is centered at
// (separation / sqrt(2)) * e_c, so class means are pairwise `separation`
// apart (requires num_labels <= dim). Classes are assigned round-robin.
// Candidate sets are singletons matching the ground truth.
PartialLabelDataset make_blobs(int n, int dim, int num_labels, double separation,
                               std::uint64_t seed);

}  // namespace hera
