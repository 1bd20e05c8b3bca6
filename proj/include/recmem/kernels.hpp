#pragma once

#include <vector>

#include "recmem/matrix.hpp"

namespace recmem {

// Data-parallel inner loops of the recommender stack. Each kernel comes in
// two flavors: *_serial is the straightforward reference used by the tests
// and the benchmark; the unsuffixed variant parallelizes the independent
// outer loop with OpenMP. Serial and parallel results agree to 1e-12 (the
// parallel versions use an inverted-index accumulation, so the floating-point
// summation order differs).

enum class Axis { Users, Items };

struct Neighbor {
  int index;
  double sim;
};

// Top-k cosine neighbors per row along the chosen axis. Only strictly
// positive similarities are kept; ties break toward the lower index.
std::vector<std::vector<Neighbor>> topk_cosine_neighbors_serial(
    const InteractionMatrix& m, Axis axis, int k);
std::vector<std::vector<Neighbor>> topk_cosine_neighbors(const InteractionMatrix& m,
                                                         Axis axis, int k);

// Item-item Gram matrix G = X^T X, row-major n_items x n_items. With
// binarize, ratings are replaced by 1.
std::vector<double> gram_matrix_serial(const InteractionMatrix& m, bool binarize);
std::vector<double> gram_matrix(const InteractionMatrix& m, bool binarize);

}  // namespace recmem
