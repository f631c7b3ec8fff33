#include "embedclust/cluster.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "embedclust/error.hpp"

namespace embedclust {

namespace {

std::size_t nearest_centroid(const Matrix& points, std::size_t p,
                             const Matrix& centroids) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.rows; ++c) {
    const double d = squared_distance(points.row(p), centroids.row(c));
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

Matrix kmeanspp_seed(const Matrix& points, std::size_t k, Rng& rng) {
  const std::size_t n = points.rows;
  Matrix centroids(k, points.cols);
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());

  std::size_t first = rng.uniform_index(n);
  std::copy(points.row(first).begin(), points.row(first).end(),
            centroids.row(0).begin());

  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      const double d = squared_distance(points.row(p), centroids.row(c - 1));
      if (d < d2[p]) {
        d2[p] = d;
      }
      total += d2[p];
    }
    std::size_t chosen;
    if (total <= 0.0) {
      // All remaining points coincide with a centroid.
      chosen = rng.uniform_index(n);
    } else {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      chosen = n - 1;
      for (std::size_t p = 0; p < n; ++p) {
        acc += d2[p];
        if (acc >= target) {
          chosen = p;
          break;
        }
      }
    }
    std::copy(points.row(chosen).begin(), points.row(chosen).end(),
              centroids.row(c).begin());
  }
  return centroids;
}

struct RestartResult {
  std::vector<std::size_t> assignments;
  Matrix centroids;
  double inertia = 0.0;
  std::size_t iterations = 0;
  std::vector<double> history;
};

double compute_inertia(const Matrix& points,
                       const std::vector<std::size_t>& assignments,
                       const Matrix& centroids) {
  double acc = 0.0;
  for (std::size_t p = 0; p < points.rows; ++p) {
    acc += squared_distance(points.row(p), centroids.row(assignments[p]));
  }
  return acc;
}

RestartResult run_restart(const Matrix& points, std::size_t k,
                          std::size_t max_iter, double tol, Rng& rng) {
  const std::size_t n = points.rows;
  const std::size_t dim = points.cols;

  RestartResult result;
  result.centroids = kmeanspp_seed(points, k, rng);
  result.assignments.assign(n, 0);
  std::vector<std::size_t> counts(k, 0);

  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    // Assignment.
    std::fill(counts.begin(), counts.end(), std::size_t{0});
    for (std::size_t p = 0; p < n; ++p) {
      result.assignments[p] = nearest_centroid(points, p, result.centroids);
      ++counts[result.assignments[p]];
    }

    // Repair empty clusters with the globally farthest point whose cluster
    // can spare it.
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] != 0) {
        continue;
      }
      std::size_t victim = n;
      double worst = -1.0;
      for (std::size_t p = 0; p < n; ++p) {
        if (counts[result.assignments[p]] < 2) {
          continue;
        }
        const double d = squared_distance(
            points.row(p), result.centroids.row(result.assignments[p]));
        if (d > worst) {
          worst = d;
          victim = p;
        }
      }
      if (victim == n) {
        continue;  // cannot repair without emptying another cluster
      }
      --counts[result.assignments[victim]];
      result.assignments[victim] = c;
      ++counts[c];
    }

    // Update: centroid = member mean. An unrepairable empty cluster keeps
    // its previous centroid.
    Matrix next(k, dim);
    for (std::size_t p = 0; p < n; ++p) {
      auto row = points.row(p);
      auto crow = next.row(result.assignments[p]);
      for (std::size_t j = 0; j < dim; ++j) {
        crow[j] += row[j];
      }
    }
    double shift = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      auto crow = next.row(c);
      if (counts[c] == 0) {
        std::copy(result.centroids.row(c).begin(),
                  result.centroids.row(c).end(), crow.begin());
      } else {
        for (std::size_t j = 0; j < dim; ++j) {
          crow[j] /= static_cast<double>(counts[c]);
        }
      }
      shift = std::max(
          shift, std::sqrt(squared_distance(crow, result.centroids.row(c))));
    }
    result.centroids = std::move(next);
    result.iterations = iter + 1;
    result.history.push_back(
        compute_inertia(points, result.assignments, result.centroids));

    if (shift < tol) {
      break;
    }
  }

  result.inertia = result.history.empty()
                       ? compute_inertia(points, result.assignments,
                                         result.centroids)
                       : result.history.back();
  return result;
}

}  // namespace

ClusterResult kmeans(const Matrix& points, std::size_t k_clusters,
                     std::size_t restarts, std::size_t max_iter, double tol,
                     Rng& rng) {
  if (k_clusters == 0) {
    throw ValidationError("kmeans: k_clusters must be positive");
  }
  if (points.rows < k_clusters) {
    throw ValidationError("kmeans: " + std::to_string(k_clusters) +
                          " clusters requested for " +
                          std::to_string(points.rows) + " points");
  }
  if (restarts < 1 || max_iter < 1) {
    throw ValidationError("kmeans: restarts and max_iter must be >= 1");
  }
  if (tol < 0.0) {
    throw ValidationError("kmeans: tol must be nonnegative");
  }

  std::vector<std::uint64_t> seeds(restarts);
  for (std::uint64_t& s : seeds) {
    s = rng.next_u64();
  }

  RestartResult best;
  bool have_best = false;
  for (std::size_t r = 0; r < restarts; ++r) {
    Rng restart_rng(seeds[r]);
    RestartResult candidate =
        run_restart(points, k_clusters, max_iter, tol, restart_rng);
    if (!have_best || candidate.inertia < best.inertia) {
      best = std::move(candidate);
      have_best = true;
    }
  }

  ClusterResult out;
  out.assignments = std::move(best.assignments);
  out.centroids = std::move(best.centroids);
  out.inertia = best.inertia;
  out.iterations_run = best.iterations;
  out.restarts_run = restarts;
  out.inertia_history = std::move(best.history);
  return out;
}

void save_csv(const ClusterResult& result, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot write assignments file: " + path);
  }
  out << "sample_index,cluster\n";
  for (std::size_t i = 0; i < result.assignments.size(); ++i) {
    out << i << ',' << result.assignments[i] << '\n';
  }
  if (!out) {
    throw IoError("failed writing assignments file: " + path);
  }
}

std::vector<std::size_t> load_assignments_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ParseError("cannot open assignments file: " + path);
  }
  std::vector<std::size_t> assignments;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    if (line_no == 1) {
      if (line != "sample_index,cluster") {
        throw ParseError("line 1: expected header 'sample_index,cluster'");
      }
      continue;
    }
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos) {
      throw ParseError("line " + std::to_string(line_no) +
                       ": expected 'sample_index,cluster'");
    }
    std::size_t index = 0;
    std::size_t cluster = 0;
    try {
      index = std::stoul(line.substr(0, comma));
      cluster = std::stoul(line.substr(comma + 1));
    } catch (const std::exception&) {
      throw ParseError("line " + std::to_string(line_no) +
                       ": non-numeric field");
    }
    if (index != assignments.size()) {
      throw ParseError("line " + std::to_string(line_no) +
                       ": sample_index out of order");
    }
    assignments.push_back(cluster);
  }
  if (assignments.empty()) {
    throw ParseError("no assignments in " + path);
  }
  return assignments;
}

}  // namespace embedclust
