#include "recmem/ease.hpp"

#include <Eigen/Dense>

#include "recmem/errors.hpp"
#include "recmem/kernels.hpp"

namespace recmem {

EaseModel::EaseModel(const InteractionMatrix& train, std::vector<double> b, double lambda)
    : train_(train), b_(std::move(b)), n_items_(train.n_items()), lambda_(lambda) {}

std::vector<double> EaseModel::score(int user_index) const {
  std::vector<double> scores(static_cast<std::size_t>(n_items_), 0.0);
  for (const auto& [j, rating] : train_.user_row(user_index)) {
    (void)rating;  // implicit-feedback scoring
    const double* row = b_.data() + static_cast<std::size_t>(j) * n_items_;
    for (int i = 0; i < n_items_; ++i) scores[static_cast<std::size_t>(i)] += row[i];
  }
  return scores;
}

EaseModel solve_ease(const InteractionMatrix& train, const EaseConfig& cfg) {
  if (cfg.lambda <= 0.0) throw ConfigError("ease lambda must be positive");
  const int n = train.n_items();
  if (n == 0) throw ConfigError("ease requires a non-empty training set");

  std::vector<double> gram = gram_matrix(train, /*binarize=*/true);
  Eigen::MatrixXd g = Eigen::Map<Eigen::MatrixXd>(gram.data(), n, n);  // symmetric
  for (int i = 0; i < n; ++i) g(i, i) += cfg.lambda;

  Eigen::LLT<Eigen::MatrixXd> llt(g);
  if (llt.info() != Eigen::Success) {
    throw NumericError("ease: Cholesky factorization failed");
  }
  Eigen::MatrixXd p = llt.solve(Eigen::MatrixXd::Identity(n, n));

  std::vector<double> b(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      b[static_cast<std::size_t>(i) * n + j] = -p(i, j) / p(j, j);
    }
  }
  return EaseModel(train, std::move(b), cfg.lambda);
}

}  // namespace recmem
