#include "recmem/bprmf.hpp"

#include <cmath>

#include "recmem/errors.hpp"

namespace recmem {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double sq_norm(std::span<const double> a) { return dot(a, a); }

}  // namespace

double bpr_triple_loss(std::span<const double> user, std::span<const double> pos,
                       std::span<const double> neg, double bias_pos, double bias_neg,
                       double reg, double bias_reg) {
  double z = bias_pos - bias_neg;
  for (std::size_t d = 0; d < user.size(); ++d) z += user[d] * (pos[d] - neg[d]);
  // -ln sigmoid(z) written as log1p(exp(-z)) for stability
  double nll = z > 0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
  double l2 = 0.5 * reg * (sq_norm(user) + sq_norm(pos) + sq_norm(neg)) +
              0.5 * bias_reg * (bias_pos * bias_pos + bias_neg * bias_neg);
  return nll + l2;
}

void bpr_triple_gradient(std::span<const double> user, std::span<const double> pos,
                         std::span<const double> neg, double bias_pos, double bias_neg,
                         double reg, double bias_reg, std::span<double> d_user,
                         std::span<double> d_pos, std::span<double> d_neg,
                         double& d_bias_pos, double& d_bias_neg) {
  double z = bias_pos - bias_neg;
  for (std::size_t d = 0; d < user.size(); ++d) z += user[d] * (pos[d] - neg[d]);
  // d(-ln sigmoid(z))/dz = -sigmoid(-z)
  double g = 1.0 / (1.0 + std::exp(z));  // sigmoid(-z)
  for (std::size_t d = 0; d < user.size(); ++d) {
    d_user[d] = -g * (pos[d] - neg[d]) + reg * user[d];
    d_pos[d] = -g * user[d] + reg * pos[d];
    d_neg[d] = g * user[d] + reg * neg[d];
  }
  d_bias_pos = -g + bias_reg * bias_pos;
  d_bias_neg = g + bias_reg * bias_neg;
}

BprmfModel::BprmfModel(int n_users, int n_items, BprmfConfig cfg)
    : n_users_(n_users), n_items_(n_items), cfg_(cfg),
      user_factors_(static_cast<std::size_t>(n_users) * cfg.factors, 0.0),
      item_factors_(static_cast<std::size_t>(n_items) * cfg.factors, 0.0),
      item_biases_(static_cast<std::size_t>(n_items), 0.0) {
  if (cfg.factors < 1) throw ConfigError("bprmf requires at least one factor");
}

std::span<double> BprmfModel::user_factor(int u) {
  return {user_factors_.data() + static_cast<std::size_t>(u) * cfg_.factors,
          static_cast<std::size_t>(cfg_.factors)};
}

std::span<double> BprmfModel::item_factor(int i) {
  return {item_factors_.data() + static_cast<std::size_t>(i) * cfg_.factors,
          static_cast<std::size_t>(cfg_.factors)};
}

std::span<const double> BprmfModel::user_factor(int u) const {
  return {user_factors_.data() + static_cast<std::size_t>(u) * cfg_.factors,
          static_cast<std::size_t>(cfg_.factors)};
}

std::span<const double> BprmfModel::item_factor(int i) const {
  return {item_factors_.data() + static_cast<std::size_t>(i) * cfg_.factors,
          static_cast<std::size_t>(cfg_.factors)};
}

std::vector<double> BprmfModel::score(int user_index) const {
  std::vector<double> scores(static_cast<std::size_t>(n_items_));
  auto p = user_factor(user_index);
  for (int i = 0; i < n_items_; ++i) {
    double s = cfg_.use_biases ? item_biases_[static_cast<std::size_t>(i)] : 0.0;
    scores[static_cast<std::size_t>(i)] = s + dot(p, item_factor(i));
  }
  return scores;
}

BprmfModel train_bprmf(const InteractionMatrix& train, const BprmfConfig& cfg) {
  if (train.nnz() == 0) throw ConfigError("bprmf requires a non-empty training set");
  BprmfModel model(train.n_users(), train.n_items(), cfg);
  Rng rng(cfg.seed);
  for (double& v : model.user_factors()) v = rng.normal(0.0, 0.1);
  for (double& v : model.item_factors()) v = rng.normal(0.0, 0.1);

  const std::size_t dim = static_cast<std::size_t>(cfg.factors);
  std::vector<double> d_user(dim), d_pos(dim), d_neg(dim);
  const double lr = cfg.learning_rate;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    double loss_sum = 0.0;
    std::size_t triples = 0;
    for_each_bpr_triple(train, rng, [&](int u, int pos, int neg) {
      auto p = model.user_factor(u);
      auto qp = model.item_factor(pos);
      auto qn = model.item_factor(neg);
      double& bp = model.item_biases()[static_cast<std::size_t>(pos)];
      double& bn = model.item_biases()[static_cast<std::size_t>(neg)];
      double bias_pos = cfg.use_biases ? bp : 0.0;
      double bias_neg = cfg.use_biases ? bn : 0.0;

      loss_sum += bpr_triple_loss(p, qp, qn, bias_pos, bias_neg, cfg.reg, cfg.bias_reg);
      ++triples;

      double d_bp = 0.0, d_bn = 0.0;
      bpr_triple_gradient(p, qp, qn, bias_pos, bias_neg, cfg.reg, cfg.bias_reg, d_user,
                          d_pos, d_neg, d_bp, d_bn);
      for (std::size_t d = 0; d < dim; ++d) {
        p[d] -= lr * d_user[d];
        qp[d] -= lr * d_pos[d];
        qn[d] -= lr * d_neg[d];
      }
      if (cfg.use_biases) {
        bp -= lr * d_bp;
        bn -= lr * d_bn;
      }
    });
    double mean_loss = triples > 0 ? loss_sum / static_cast<double>(triples) : 0.0;
    if (!std::isfinite(mean_loss)) {
      throw NumericError("bprmf training diverged at epoch " + std::to_string(epoch));
    }
    model.epoch_losses().push_back(mean_loss);
  }
  return model;
}

}  // namespace recmem
