#pragma once

#include <cstdint>
#include <vector>

#include "recmem/baselines.hpp"
#include "recmem/matrix.hpp"

namespace recmem {

struct LightGcnConfig {
  int factors = 64;
  int layers = 2;
  double learning_rate = 0.05;
  double reg = 0.0025;
  int epochs = 30;
  std::uint64_t seed = 42;
};

// One round of symmetric-normalized bipartite propagation: every user
// embedding becomes the 1/sqrt(deg_u*deg_i)-weighted sum of its items'
// embeddings and vice versa. No nonlinearity, no feature transform.
// Embeddings are row-major (n x factors).
void lightgcn_propagate(const InteractionMatrix& train,
                        const std::vector<double>& user_emb,
                        const std::vector<double>& item_emb, int factors,
                        std::vector<double>& out_user, std::vector<double>& out_item);

class LightGcnModel : public Ranker {
 public:
  LightGcnModel(int n_users, int n_items, LightGcnConfig cfg);

  std::vector<double> score(int user_index) const override;
  std::string name() const override { return "lightgcn"; }

  const LightGcnConfig& config() const { return cfg_; }
  std::vector<double>& base_user() { return base_user_; }
  std::vector<double>& base_item() { return base_item_; }
  std::vector<double>& final_user() { return final_user_; }
  std::vector<double>& final_item() { return final_item_; }
  const std::vector<double>& final_user() const { return final_user_; }
  const std::vector<double>& final_item() const { return final_item_; }
  const std::vector<double>& epoch_losses() const { return epoch_losses_; }
  std::vector<double>& epoch_losses() { return epoch_losses_; }

  // final = mean of propagation layers 0..L computed from the base embeddings.
  void refresh_final(const InteractionMatrix& train);

 private:
  int n_users_;
  int n_items_;
  LightGcnConfig cfg_;
  std::vector<double> base_user_, base_item_;
  std::vector<double> final_user_, final_item_;
  std::vector<double> epoch_losses_;
};

// BPR training over the propagated embeddings. The propagation is refreshed
// at every epoch start and gradients are applied to the base embeddings of
// the triple's rows; with layers == 0 this degenerates to bias-free BPRMF
// with live updates (identical given identical seed and dimensions).
LightGcnModel train_lightgcn(const InteractionMatrix& train, const LightGcnConfig& cfg);

}  // namespace recmem
