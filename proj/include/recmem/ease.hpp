#pragma once

#include <vector>

#include "recmem/baselines.hpp"
#include "recmem/matrix.hpp"

namespace recmem {

struct EaseConfig {
  double lambda = 300.0;
};

// Closed-form item-item weight matrix with an exactly zero diagonal.
// Scores for a user are that user's (binarized) row times B.
class EaseModel : public Ranker {
 public:
  EaseModel(const InteractionMatrix& train, std::vector<double> b, double lambda);

  std::vector<double> score(int user_index) const override;
  std::string name() const override { return "ease"; }

  int n_items() const { return n_items_; }
  double lambda() const { return lambda_; }
  const std::vector<double>& weights() const { return b_; }
  double weight(int i, int j) const {
    return b_[static_cast<std::size_t>(i) * n_items_ + static_cast<std::size_t>(j)];
  }

 private:
  const InteractionMatrix& train_;
  std::vector<double> b_;  // row-major n_items x n_items
  int n_items_;
  double lambda_;
};

// P = (X^T X + lambda I)^-1, B = I - P * diag(1 / diag(P)), diag(B) := 0.
// X is the binarized training matrix; the system is solved with a dense
// Cholesky factorization.
EaseModel solve_ease(const InteractionMatrix& train, const EaseConfig& cfg);

}  // namespace recmem
