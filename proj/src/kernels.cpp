#include "recmem/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace recmem {

namespace {

const std::vector<std::pair<int, double>>& axis_row(const InteractionMatrix& m, Axis axis,
                                                    int r) {
  return axis == Axis::Users ? m.user_row(r) : m.item_col(r);
}

int axis_rows(const InteractionMatrix& m, Axis axis) {
  return axis == Axis::Users ? m.n_users() : m.n_items();
}

std::vector<double> row_norms(const InteractionMatrix& m, Axis axis) {
  int n = axis_rows(m, axis);
  std::vector<double> norms(n, 0.0);
  for (int r = 0; r < n; ++r) {
    double s = 0.0;
    for (const auto& [c, v] : axis_row(m, axis, r)) s += v * v;
    norms[r] = std::sqrt(s);
  }
  return norms;
}

std::vector<Neighbor> keep_topk(std::vector<Neighbor>& sims, int k) {
  std::sort(sims.begin(), sims.end(), [](const Neighbor& a, const Neighbor& b) {
    if (a.sim != b.sim) return a.sim > b.sim;
    return a.index < b.index;
  });
  if (static_cast<int>(sims.size()) > k) sims.resize(static_cast<std::size_t>(k));
  return sims;
}

double sparse_dot(const std::vector<std::pair<int, double>>& a,
                  const std::vector<std::pair<int, double>>& b) {
  double s = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].first == b[j].first) {
      s += a[i].second * b[j].second;
      ++i;
      ++j;
    } else if (a[i].first < b[j].first) {
      ++i;
    } else {
      ++j;
    }
  }
  return s;
}

}  // namespace

std::vector<std::vector<Neighbor>> topk_cosine_neighbors_serial(
    const InteractionMatrix& m, Axis axis, int k) {
  int n = axis_rows(m, axis);
  auto norms = row_norms(m, axis);
  std::vector<std::vector<Neighbor>> out(static_cast<std::size_t>(n));
  for (int r = 0; r < n; ++r) {
    std::vector<Neighbor> sims;
    for (int s = 0; s < n; ++s) {
      if (s == r || norms[r] == 0.0 || norms[s] == 0.0) continue;
      double dot = sparse_dot(axis_row(m, axis, r), axis_row(m, axis, s));
      double sim = dot / (norms[r] * norms[s]);
      if (sim > 0.0) sims.push_back({s, sim});
    }
    out[static_cast<std::size_t>(r)] = keep_topk(sims, k);
  }
  return out;
}

std::vector<std::vector<Neighbor>> topk_cosine_neighbors(const InteractionMatrix& m,
                                                         Axis axis, int k) {
  int n = axis_rows(m, axis);
  const Axis other = axis == Axis::Users ? Axis::Items : Axis::Users;
  auto norms = row_norms(m, axis);
  std::vector<std::vector<Neighbor>> out(static_cast<std::size_t>(n));

#pragma omp parallel
  {
    // One dense accumulator per thread; rows are independent.
    std::vector<double> acc(static_cast<std::size_t>(n), 0.0);
    std::vector<int> touched;
#pragma omp for schedule(dynamic, 16)
    for (int r = 0; r < n; ++r) {
      touched.clear();
      for (const auto& [c, v] : axis_row(m, axis, r)) {
        for (const auto& [s, w] : axis_row(m, other, c)) {
          if (acc[static_cast<std::size_t>(s)] == 0.0) touched.push_back(s);
          acc[static_cast<std::size_t>(s)] += v * w;
        }
      }
      std::sort(touched.begin(), touched.end());
      std::vector<Neighbor> sims;
      sims.reserve(touched.size());
      for (int s : touched) {
        double dot = acc[static_cast<std::size_t>(s)];
        acc[static_cast<std::size_t>(s)] = 0.0;
        if (s == r || norms[r] == 0.0 || norms[s] == 0.0) continue;
        double sim = dot / (norms[r] * norms[s]);
        if (sim > 0.0) sims.push_back({s, sim});
      }
      out[static_cast<std::size_t>(r)] = keep_topk(sims, k);
    }
  }
  return out;
}

std::vector<double> gram_matrix_serial(const InteractionMatrix& m, bool binarize) {
  std::size_t n = static_cast<std::size_t>(m.n_items());
  std::vector<double> g(n * n, 0.0);
  for (int u = 0; u < m.n_users(); ++u) {
    for (const auto& [i, vi] : m.user_row(u)) {
      double a = binarize ? 1.0 : vi;
      for (const auto& [j, vj] : m.user_row(u)) {
        double b = binarize ? 1.0 : vj;
        g[static_cast<std::size_t>(i) * n + static_cast<std::size_t>(j)] += a * b;
      }
    }
  }
  return g;
}

std::vector<double> gram_matrix(const InteractionMatrix& m, bool binarize) {
  std::size_t n = static_cast<std::size_t>(m.n_items());
  std::vector<double> g(n * n, 0.0);
  // Row i of G only reads item i's user list and those users' rows, so the
  // outer loop is contention-free.
#pragma omp parallel for schedule(dynamic, 8)
  for (int i = 0; i < m.n_items(); ++i) {
    double* row = g.data() + static_cast<std::size_t>(i) * n;
    for (const auto& [u, vi] : m.item_col(i)) {
      double a = binarize ? 1.0 : vi;
      for (const auto& [j, vj] : m.user_row(u)) {
        row[j] += a * (binarize ? 1.0 : vj);
      }
    }
  }
  return g;
}

}  // namespace recmem
