#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "recmem/baselines.hpp"
#include "recmem/matrix.hpp"
#include "recmem/rng.hpp"

namespace recmem {

struct BprmfConfig {
  int factors = 64;
  double learning_rate = 0.05;
  double reg = 0.0025;       // L2 on latent factors
  double bias_reg = 0.0025;  // L2 on item biases
  int epochs = 30;
  std::uint64_t seed = 42;
  bool use_biases = true;
};

// Per-triple BPR objective, exposed separately so the trainer's gradients can
// be checked against finite differences. The loss is
//   -ln sigmoid(x_pos - x_neg) + 0.5*reg*(|p|^2+|q+|^2+|q-|^2)
//                              + 0.5*bias_reg*(b+^2 + b-^2)
// with x = bias + <p, q>.
double bpr_triple_loss(std::span<const double> user, std::span<const double> pos,
                       std::span<const double> neg, double bias_pos, double bias_neg,
                       double reg, double bias_reg);

// Analytic gradients of bpr_triple_loss. Output spans must match the factor
// dimension.
void bpr_triple_gradient(std::span<const double> user, std::span<const double> pos,
                         std::span<const double> neg, double bias_pos, double bias_neg,
                         double reg, double bias_reg, std::span<double> d_user,
                         std::span<double> d_pos, std::span<double> d_neg,
                         double& d_bias_pos, double& d_bias_neg);

// Deterministic SGD schedule shared by the BPR-family trainers: users in
// ascending index order, each positive in row order, one uniform negative
// redrawn until unseen. Users with no unseen items are skipped.
template <typename Fn>
void for_each_bpr_triple(const InteractionMatrix& train, Rng& rng, Fn&& fn) {
  for (int u = 0; u < train.n_users(); ++u) {
    const auto& row = train.user_row(u);
    if (row.empty() || static_cast<int>(row.size()) >= train.n_items()) continue;
    for (const auto& [pos, rating] : row) {
      (void)rating;
      int neg;
      do {
        neg = static_cast<int>(rng.bounded(static_cast<std::uint64_t>(train.n_items())));
      } while (train.user_has_item(u, neg));
      fn(u, pos, neg);
    }
  }
}

class BprmfModel : public Ranker {
 public:
  BprmfModel(int n_users, int n_items, BprmfConfig cfg);

  std::vector<double> score(int user_index) const override;
  std::string name() const override { return "bprmf"; }

  std::span<double> user_factor(int u);
  std::span<double> item_factor(int i);
  std::span<const double> user_factor(int u) const;
  std::span<const double> item_factor(int i) const;

  int n_users() const { return n_users_; }
  int n_items() const { return n_items_; }
  const BprmfConfig& config() const { return cfg_; }
  std::vector<double>& user_factors() { return user_factors_; }
  std::vector<double>& item_factors() { return item_factors_; }
  std::vector<double>& item_biases() { return item_biases_; }
  const std::vector<double>& user_factors() const { return user_factors_; }
  const std::vector<double>& item_factors() const { return item_factors_; }
  const std::vector<double>& item_biases() const { return item_biases_; }

  // Mean per-triple loss recorded after each training epoch.
  const std::vector<double>& epoch_losses() const { return epoch_losses_; }
  std::vector<double>& epoch_losses() { return epoch_losses_; }

 private:
  int n_users_;
  int n_items_;
  BprmfConfig cfg_;
  std::vector<double> user_factors_;
  std::vector<double> item_factors_;
  std::vector<double> item_biases_;
  std::vector<double> epoch_losses_;
};

// Seeded factor initialization (normal, stddev 0.1), then `epochs` SGD sweeps
// over the triple schedule. Deterministic for a fixed seed; throws
// NumericError if the loss stops being finite.
BprmfModel train_bprmf(const InteractionMatrix& train, const BprmfConfig& cfg);

}  // namespace recmem
