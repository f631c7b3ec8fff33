#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "embedclust/linalg.hpp"
#include "embedclust/rng.hpp"

namespace embedclust {

struct Sample {
  std::vector<double> features;
  int class_id = 0;
  std::string class_name;
};

// Immutable after load; class_names in first-appearance order.
struct Dataset {
  std::vector<Sample> samples;
  std::size_t dimension = 0;
  std::vector<std::string> class_names;

  std::size_t size() const { return samples.size(); }
  std::size_t n_classes() const { return class_names.size(); }

  std::vector<int> labels() const;
  Matrix feature_matrix() const;
  // Sample indices grouped by class id.
  std::vector<std::vector<std::size_t>> indices_by_class() const;
};

struct SplitSpec {
  std::vector<std::string> known_classes;
  std::vector<std::string> unknown_classes;
  std::uint64_t seed = 0;
};

// y == 1 iff the two samples share a class; indices always distinct.
struct LabeledPair {
  std::size_t first_index = 0;
  std::size_t second_index = 0;
  int y = 0;
};

// CSV format: UTF-8, header `label,f0,...,f{d-1}`, one sample per line,
// decimal ASCII floats, no quoting. LF and CRLF are both accepted on read;
// the writer emits LF.
Dataset load_csv(const std::string& path);
void save_csv(const Dataset& ds, const std::string& path);

// Partitions by class name; class ids are remapped densely within each
// output, preserving the parent's class order.
std::pair<Dataset, Dataset> split(const Dataset& ds, const SplitSpec& spec);

// Draws exactly n_pairs pairs, round(n_pairs * positive_fraction) of them
// positive. Positives: a uniformly chosen class with >= 2 samples, then two
// distinct members. Negatives: two distinct classes, one member each.
// Sampling is with replacement across pairs; the returned list is shuffled.
std::vector<LabeledPair> sample_pairs(const Dataset& ds, std::size_t n_pairs,
                                      double positive_fraction, Rng& rng);

// Copy of ds with every sample's features replaced by the matching row.
Dataset with_features(const Dataset& ds, const Matrix& features);

}  // namespace embedclust
