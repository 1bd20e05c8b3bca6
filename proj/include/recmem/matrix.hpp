#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "recmem/dataset.hpp"

namespace recmem {

// Sparse user-item rating matrix with dense indices on both axes. Indices
// are assigned in ascending external-id order, so every derived ranking is
// reproducible. Duplicate (user, item) pairs keep the first occurrence.
class InteractionMatrix {
 public:
  static InteractionMatrix from_log(const InteractionLog& log);

  int n_users() const { return static_cast<int>(user_ids_.size()); }
  int n_items() const { return static_cast<int>(item_ids_.size()); }
  std::size_t nnz() const { return nnz_; }

  // (item index, rating) sorted by item index.
  const std::vector<std::pair<int, double>>& user_row(int u) const { return rows_[u]; }
  // (user index, rating) sorted by user index.
  const std::vector<std::pair<int, double>>& item_col(int i) const { return cols_[i]; }

  std::int64_t user_id(int u) const { return user_ids_[u]; }
  std::int64_t item_id(int i) const { return item_ids_[i]; }
  std::optional<int> user_index(std::int64_t id) const;
  std::optional<int> item_index(std::int64_t id) const;

  bool user_has_item(int u, int i) const;
  std::vector<std::size_t> item_counts() const;

 private:
  std::vector<std::int64_t> user_ids_;
  std::vector<std::int64_t> item_ids_;
  std::unordered_map<std::int64_t, int> user_index_;
  std::unordered_map<std::int64_t, int> item_index_;
  std::vector<std::vector<std::pair<int, double>>> rows_;
  std::vector<std::vector<std::pair<int, double>>> cols_;
  std::size_t nnz_ = 0;
};

}  // namespace recmem
