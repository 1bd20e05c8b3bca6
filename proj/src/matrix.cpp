#include "recmem/matrix.hpp"

#include <algorithm>
#include <set>

namespace recmem {

InteractionMatrix InteractionMatrix::from_log(const InteractionLog& log) {
  InteractionMatrix m;
  std::set<std::int64_t> users, items;
  for (const auto& x : log) {
    users.insert(x.user_id);
    items.insert(x.item_id);
  }
  m.user_ids_.assign(users.begin(), users.end());
  m.item_ids_.assign(items.begin(), items.end());
  for (int u = 0; u < m.n_users(); ++u) m.user_index_[m.user_ids_[u]] = u;
  for (int i = 0; i < m.n_items(); ++i) m.item_index_[m.item_ids_[i]] = i;
  m.rows_.resize(m.user_ids_.size());
  m.cols_.resize(m.item_ids_.size());

  std::set<std::pair<int, int>> seen;
  for (const auto& x : log) {
    int u = m.user_index_.at(x.user_id);
    int i = m.item_index_.at(x.item_id);
    if (!seen.emplace(u, i).second) continue;  // keep first occurrence
    m.rows_[u].emplace_back(i, static_cast<double>(x.rating));
    m.cols_[i].emplace_back(u, static_cast<double>(x.rating));
    ++m.nnz_;
  }
  for (auto& row : m.rows_) std::sort(row.begin(), row.end());
  for (auto& col : m.cols_) std::sort(col.begin(), col.end());
  return m;
}

std::optional<int> InteractionMatrix::user_index(std::int64_t id) const {
  auto it = user_index_.find(id);
  if (it == user_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> InteractionMatrix::item_index(std::int64_t id) const {
  auto it = item_index_.find(id);
  if (it == item_index_.end()) return std::nullopt;
  return it->second;
}

bool InteractionMatrix::user_has_item(int u, int i) const {
  const auto& row = rows_[u];
  auto it = std::lower_bound(row.begin(), row.end(), std::make_pair(i, 0.0),
                             [](const auto& a, const auto& b) { return a.first < b.first; });
  return it != row.end() && it->first == i;
}

std::vector<std::size_t> InteractionMatrix::item_counts() const {
  std::vector<std::size_t> counts(cols_.size());
  for (std::size_t i = 0; i < cols_.size(); ++i) counts[i] = cols_[i].size();
  return counts;
}

}  // namespace recmem
