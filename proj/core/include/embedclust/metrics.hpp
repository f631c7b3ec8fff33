#pragma once

#include <cstdint>
#include <vector>

namespace embedclust {

// Joint counts of two labelings of the same items.
struct ContingencyTable {
  std::vector<std::vector<std::int64_t>> counts;  // true clusters x predicted
  std::vector<std::int64_t> row_sums;
  std::vector<std::int64_t> col_sums;
  std::int64_t total = 0;

  static ContingencyTable from_labels(const std::vector<int>& true_labels,
                                      const std::vector<int>& pred_labels);
};

// Mutual information normalized by the geometric mean of the entropies,
// natural log, in [0,1]. If either partition is a single cluster its entropy
// is zero; then NMI is 1 when both are single-cluster and 0 otherwise.
double nmi(const std::vector<int>& true_labels,
           const std::vector<int>& pred_labels);

// (pairs together in both + pairs separated in both) / C(M,2).
double rand_index(const std::vector<int>& true_labels,
                  const std::vector<int>& pred_labels);

// Chance-corrected Rand index (contingency form); 0 when the correction
// denominator vanishes.
double ari(const std::vector<int>& true_labels,
           const std::vector<int>& pred_labels);

// O(M^2) enumeration of all sample pairs; the independent oracle for the
// contingency-based scores above. same_same + diff_diff + disagreements
// always equals C(M,2).
struct PairCounts {
  std::int64_t same_same = 0;    // together in both partitions
  std::int64_t diff_diff = 0;    // separated in both partitions
  std::int64_t disagreements = 0;
};
PairCounts brute_force_pair_counts(const std::vector<int>& true_labels,
                                   const std::vector<int>& pred_labels);

}  // namespace embedclust
