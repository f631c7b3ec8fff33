#include "embedclust/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

#include "embedclust/error.hpp"

namespace embedclust {

namespace {

void check_labels(const std::vector<int>& a, const std::vector<int>& b,
                  std::size_t min_len, const char* who) {
  if (a.size() != b.size()) {
    throw ShapeError(std::string(who) + ": length mismatch, " +
                     std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()));
  }
  if (a.size() < min_len) {
    throw ValidationError(std::string(who) + ": need at least " +
                          std::to_string(min_len) + " labels");
  }
}

// Dense reindexing of arbitrary integer labels.
std::vector<std::size_t> dense_ids(const std::vector<int>& labels,
                                   std::size_t& n_clusters) {
  std::unordered_map<int, std::size_t> index;
  std::vector<std::size_t> out;
  out.reserve(labels.size());
  for (int label : labels) {
    auto [it, inserted] = index.emplace(label, index.size());
    out.push_back(it->second);
  }
  n_clusters = index.size();
  return out;
}

std::int64_t choose2(std::int64_t n) { return n * (n - 1) / 2; }

}  // namespace

ContingencyTable ContingencyTable::from_labels(
    const std::vector<int>& true_labels, const std::vector<int>& pred_labels) {
  check_labels(true_labels, pred_labels, 1, "contingency");
  std::size_t rows = 0;
  std::size_t cols = 0;
  const std::vector<std::size_t> t = dense_ids(true_labels, rows);
  const std::vector<std::size_t> p = dense_ids(pred_labels, cols);

  ContingencyTable table;
  table.counts.assign(rows, std::vector<std::int64_t>(cols, 0));
  table.row_sums.assign(rows, 0);
  table.col_sums.assign(cols, 0);
  table.total = static_cast<std::int64_t>(true_labels.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    ++table.counts[t[i]][p[i]];
    ++table.row_sums[t[i]];
    ++table.col_sums[p[i]];
  }
  return table;
}

double nmi(const std::vector<int>& true_labels,
           const std::vector<int>& pred_labels) {
  check_labels(true_labels, pred_labels, 1, "nmi");
  const ContingencyTable t = ContingencyTable::from_labels(true_labels,
                                                           pred_labels);
  const double m = static_cast<double>(t.total);

  auto entropy = [&](const std::vector<std::int64_t>& sums) {
    double h = 0.0;
    for (std::int64_t s : sums) {
      if (s > 0) {
        const double p = static_cast<double>(s) / m;
        h -= p * std::log(p);
      }
    }
    return h;
  };
  const double h_true = entropy(t.row_sums);
  const double h_pred = entropy(t.col_sums);

  if (h_true == 0.0 || h_pred == 0.0) {
    // Single-cluster partition(s): the formula divides by zero.
    return (h_true == 0.0 && h_pred == 0.0) ? 1.0 : 0.0;
  }

  // Summing in sorted order keeps nmi(a,b) == nmi(b,a) bit-exact: swapping
  // the arguments transposes the table but leaves the term multiset intact.
  std::vector<double> terms;
  terms.reserve(t.counts.size() * t.counts[0].size());
  for (std::size_t i = 0; i < t.counts.size(); ++i) {
    for (std::size_t j = 0; j < t.counts[i].size(); ++j) {
      const std::int64_t n_ij = t.counts[i][j];
      if (n_ij == 0) {
        continue;
      }
      const double p_ij = static_cast<double>(n_ij) / m;
      terms.push_back(p_ij * std::log(p_ij * m * m /
                                      (static_cast<double>(t.row_sums[i]) *
                                       static_cast<double>(t.col_sums[j]))));
    }
  }
  std::sort(terms.begin(), terms.end());
  double mi = 0.0;
  for (double term : terms) {
    mi += term;
  }
  const double value = mi / std::sqrt(h_true * h_pred);
  return std::clamp(value, 0.0, 1.0);
}

double rand_index(const std::vector<int>& true_labels,
                  const std::vector<int>& pred_labels) {
  check_labels(true_labels, pred_labels, 2, "rand_index");
  const ContingencyTable t = ContingencyTable::from_labels(true_labels,
                                                           pred_labels);
  std::int64_t s_cells = 0;
  for (const auto& row : t.counts) {
    for (std::int64_t n : row) {
      s_cells += choose2(n);
    }
  }
  std::int64_t s_rows = 0;
  for (std::int64_t a : t.row_sums) {
    s_rows += choose2(a);
  }
  std::int64_t s_cols = 0;
  for (std::int64_t b : t.col_sums) {
    s_cols += choose2(b);
  }
  const std::int64_t all = choose2(t.total);
  const std::int64_t s1 = s_cells;
  const std::int64_t s2 = all - s_rows - s_cols + s_cells;
  return static_cast<double>(s1 + s2) / static_cast<double>(all);
}

double ari(const std::vector<int>& true_labels,
           const std::vector<int>& pred_labels) {
  check_labels(true_labels, pred_labels, 2, "ari");
  const ContingencyTable t = ContingencyTable::from_labels(true_labels,
                                                           pred_labels);
  double s_cells = 0.0;
  for (const auto& row : t.counts) {
    for (std::int64_t n : row) {
      s_cells += static_cast<double>(choose2(n));
    }
  }
  double s_rows = 0.0;
  for (std::int64_t a : t.row_sums) {
    s_rows += static_cast<double>(choose2(a));
  }
  double s_cols = 0.0;
  for (std::int64_t b : t.col_sums) {
    s_cols += static_cast<double>(choose2(b));
  }
  const double all = static_cast<double>(choose2(t.total));
  const double expected = s_rows * s_cols / all;
  const double maximum = 0.5 * (s_rows + s_cols);
  const double denominator = maximum - expected;
  if (denominator == 0.0) {
    return 0.0;
  }
  return (s_cells - expected) / denominator;
}

PairCounts brute_force_pair_counts(const std::vector<int>& true_labels,
                                   const std::vector<int>& pred_labels) {
  check_labels(true_labels, pred_labels, 2, "brute_force_pair_counts");
  PairCounts counts;
  const std::size_t m = true_labels.size();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const bool same_true = true_labels[i] == true_labels[j];
      const bool same_pred = pred_labels[i] == pred_labels[j];
      if (same_true && same_pred) {
        ++counts.same_same;
      } else if (!same_true && !same_pred) {
        ++counts.diff_diff;
      } else {
        ++counts.disagreements;
      }
    }
  }
  return counts;
}

}  // namespace embedclust
