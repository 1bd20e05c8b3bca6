#include "recmem/lightgcn.hpp"

#include <cmath>

#include "recmem/bprmf.hpp"
#include "recmem/errors.hpp"
#include "recmem/rng.hpp"

namespace recmem {

void lightgcn_propagate(const InteractionMatrix& train,
                        const std::vector<double>& user_emb,
                        const std::vector<double>& item_emb, int factors,
                        std::vector<double>& out_user, std::vector<double>& out_item) {
  const std::size_t dim = static_cast<std::size_t>(factors);
  out_user.assign(static_cast<std::size_t>(train.n_users()) * dim, 0.0);
  out_item.assign(static_cast<std::size_t>(train.n_items()) * dim, 0.0);
#pragma omp parallel for schedule(static)
  for (int u = 0; u < train.n_users(); ++u) {
    const auto& row = train.user_row(u);
    if (row.empty()) continue;
    double du = static_cast<double>(row.size());
    double* out = out_user.data() + static_cast<std::size_t>(u) * dim;
    for (const auto& [i, r] : row) {
      (void)r;
      double w = 1.0 / std::sqrt(du * static_cast<double>(train.item_col(i).size()));
      const double* e = item_emb.data() + static_cast<std::size_t>(i) * dim;
      for (std::size_t d = 0; d < dim; ++d) out[d] += w * e[d];
    }
  }
#pragma omp parallel for schedule(static)
  for (int i = 0; i < train.n_items(); ++i) {
    const auto& col = train.item_col(i);
    if (col.empty()) continue;
    double di = static_cast<double>(col.size());
    double* out = out_item.data() + static_cast<std::size_t>(i) * dim;
    for (const auto& [u, r] : col) {
      (void)r;
      double w = 1.0 / std::sqrt(di * static_cast<double>(train.user_row(u).size()));
      const double* e = user_emb.data() + static_cast<std::size_t>(u) * dim;
      for (std::size_t d = 0; d < dim; ++d) out[d] += w * e[d];
    }
  }
}

LightGcnModel::LightGcnModel(int n_users, int n_items, LightGcnConfig cfg)
    : n_users_(n_users), n_items_(n_items), cfg_(cfg),
      base_user_(static_cast<std::size_t>(n_users) * cfg.factors, 0.0),
      base_item_(static_cast<std::size_t>(n_items) * cfg.factors, 0.0),
      final_user_(base_user_), final_item_(base_item_) {
  if (cfg.factors < 1) throw ConfigError("lightgcn requires at least one factor");
  if (cfg.layers < 0) throw ConfigError("lightgcn layer count must be >= 0");
}

void LightGcnModel::refresh_final(const InteractionMatrix& train) {
  if (cfg_.layers == 0) {
    final_user_ = base_user_;
    final_item_ = base_item_;
    return;
  }
  final_user_ = base_user_;
  final_item_ = base_item_;
  std::vector<double> cur_u = base_user_, cur_i = base_item_;
  std::vector<double> next_u, next_i;
  for (int layer = 1; layer <= cfg_.layers; ++layer) {
    lightgcn_propagate(train, cur_u, cur_i, cfg_.factors, next_u, next_i);
    for (std::size_t d = 0; d < final_user_.size(); ++d) final_user_[d] += next_u[d];
    for (std::size_t d = 0; d < final_item_.size(); ++d) final_item_[d] += next_i[d];
    cur_u.swap(next_u);
    cur_i.swap(next_i);
  }
  double scale = 1.0 / static_cast<double>(cfg_.layers + 1);
  for (double& v : final_user_) v *= scale;
  for (double& v : final_item_) v *= scale;
}

std::vector<double> LightGcnModel::score(int user_index) const {
  const std::size_t dim = static_cast<std::size_t>(cfg_.factors);
  std::vector<double> scores(static_cast<std::size_t>(n_items_), 0.0);
  const double* p = final_user_.data() + static_cast<std::size_t>(user_index) * dim;
  for (int i = 0; i < n_items_; ++i) {
    const double* q = final_item_.data() + static_cast<std::size_t>(i) * dim;
    double s = 0.0;
    for (std::size_t d = 0; d < dim; ++d) s += p[d] * q[d];
    scores[static_cast<std::size_t>(i)] = s;
  }
  return scores;
}

LightGcnModel train_lightgcn(const InteractionMatrix& train, const LightGcnConfig& cfg) {
  if (train.nnz() == 0) throw ConfigError("lightgcn requires a non-empty training set");
  LightGcnModel model(train.n_users(), train.n_items(), cfg);
  Rng rng(cfg.seed);
  for (double& v : model.base_user()) v = rng.normal(0.0, 0.1);
  for (double& v : model.base_item()) v = rng.normal(0.0, 0.1);

  const std::size_t dim = static_cast<std::size_t>(cfg.factors);
  const bool live = cfg.layers == 0;  // exact BPRMF-without-biases semantics
  std::vector<double> d_user(dim), d_pos(dim), d_neg(dim);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    model.refresh_final(train);
    // Forward scores read the propagated embeddings (live base views when
    // layers == 0); updates always land on the base embeddings.
    const std::vector<double>& fwd_u = live ? model.base_user() : model.final_user();
    const std::vector<double>& fwd_i = live ? model.base_item() : model.final_item();
    double loss_sum = 0.0;
    std::size_t triples = 0;
    for_each_bpr_triple(train, rng, [&](int u, int pos, int neg) {
      std::span<const double> p{fwd_u.data() + static_cast<std::size_t>(u) * dim, dim};
      std::span<const double> qp{fwd_i.data() + static_cast<std::size_t>(pos) * dim, dim};
      std::span<const double> qn{fwd_i.data() + static_cast<std::size_t>(neg) * dim, dim};
      loss_sum += bpr_triple_loss(p, qp, qn, 0.0, 0.0, cfg.reg, cfg.reg);
      ++triples;
      double d_bp = 0.0, d_bn = 0.0;
      bpr_triple_gradient(p, qp, qn, 0.0, 0.0, cfg.reg, cfg.reg, d_user, d_pos, d_neg,
                          d_bp, d_bn);
      double* bu = model.base_user().data() + static_cast<std::size_t>(u) * dim;
      double* bp_ = model.base_item().data() + static_cast<std::size_t>(pos) * dim;
      double* bn_ = model.base_item().data() + static_cast<std::size_t>(neg) * dim;
      for (std::size_t d = 0; d < dim; ++d) {
        bu[d] -= cfg.learning_rate * d_user[d];
        bp_[d] -= cfg.learning_rate * d_pos[d];
        bn_[d] -= cfg.learning_rate * d_neg[d];
      }
    });
    double mean_loss = triples > 0 ? loss_sum / static_cast<double>(triples) : 0.0;
    if (!std::isfinite(mean_loss)) {
      throw NumericError("lightgcn training diverged at epoch " + std::to_string(epoch));
    }
    model.epoch_losses().push_back(mean_loss);
  }
  model.refresh_final(train);
  return model;
}

}  // namespace recmem
