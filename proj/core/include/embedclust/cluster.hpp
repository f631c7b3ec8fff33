#pragma once

#include <string>
#include <vector>

#include "embedclust/linalg.hpp"
#include "embedclust/rng.hpp"

namespace embedclust {

struct ClusterResult {
  std::vector<std::size_t> assignments;
  Matrix centroids;  // k_clusters x dim
  double inertia = 0.0;
  std::size_t iterations_run = 0;
  std::size_t restarts_run = 0;
  // Inertia after each Lloyd iteration of the winning restart.
  std::vector<double> inertia_history;
};

// Lloyd iterations from k-means++ seeding. Each restart runs until the
// largest centroid shift drops below tol or max_iter is reached; the restart
// with minimum inertia wins. Nearest-centroid ties break toward the lowest
// centroid index. A cluster emptied during iteration is repaired by moving
// the point currently farthest from its own centroid into it. Per-restart
// seeds are drawn from rng up front, so the result is deterministic and
// independent of restart execution order.
ClusterResult kmeans(const Matrix& points, std::size_t k_clusters,
                     std::size_t restarts, std::size_t max_iter, double tol,
                     Rng& rng);

inline ClusterResult kmeans(const Matrix& points, std::size_t k_clusters,
                            Rng& rng) {
  return kmeans(points, k_clusters, 10, 300, 1e-6, rng);
}

// CSV: sample_index,cluster
void save_csv(const ClusterResult& result, const std::string& path);

// Reads an assignments CSV back; rows must cover 0..n-1 in order.
std::vector<std::size_t> load_assignments_csv(const std::string& path);

}  // namespace embedclust
