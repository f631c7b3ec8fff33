#include "embedclust/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "embedclust/error.hpp"
#include "embedclust/format.hpp"

namespace embedclust {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

double parse_double(const std::string& tok, std::size_t line_no) {
  double value = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw ParseError("line " + std::to_string(line_no) +
                     ": non-numeric feature '" + tok + "'");
  }
  if (!std::isfinite(value)) {
    throw ParseError("line " + std::to_string(line_no) +
                     ": non-finite feature '" + tok + "'");
  }
  return value;
}

}  // namespace

std::vector<int> Dataset::labels() const {
  std::vector<int> out;
  out.reserve(samples.size());
  for (const Sample& s : samples) {
    out.push_back(s.class_id);
  }
  return out;
}

Matrix Dataset::feature_matrix() const {
  Matrix m(samples.size(), dimension);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    std::copy(samples[i].features.begin(), samples[i].features.end(),
              m.row(i).begin());
  }
  return m;
}

std::vector<std::vector<std::size_t>> Dataset::indices_by_class() const {
  std::vector<std::vector<std::size_t>> groups(class_names.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    groups[static_cast<std::size_t>(samples[i].class_id)].push_back(i);
  }
  return groups;
}

Dataset load_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ParseError("cannot open dataset file: " + path);
  }

  Dataset ds;
  std::unordered_map<std::string, int> class_index;
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
    const std::vector<std::string> fields = split_fields(line);

    if (line_no == 1) {
      if (fields.size() < 2 || fields[0] != "label") {
        throw ParseError("line 1: header must start with 'label,f0,...'");
      }
      for (std::size_t i = 1; i < fields.size(); ++i) {
        if (fields[i] != "f" + std::to_string(i - 1)) {
          throw ParseError("line 1: expected column name 'f" +
                           std::to_string(i - 1) + "', found '" + fields[i] +
                           "'");
        }
      }
      ds.dimension = fields.size() - 1;
      continue;
    }

    if (fields.size() != ds.dimension + 1) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(ds.dimension + 1) + " columns, found " +
                       std::to_string(fields.size()));
    }
    Sample s;
    s.class_name = fields[0];
    auto [it, inserted] = class_index.emplace(
        s.class_name, static_cast<int>(ds.class_names.size()));
    if (inserted) {
      ds.class_names.push_back(s.class_name);
    }
    s.class_id = it->second;
    s.features.reserve(ds.dimension);
    for (std::size_t i = 1; i < fields.size(); ++i) {
      s.features.push_back(parse_double(fields[i], line_no));
    }
    ds.samples.push_back(std::move(s));
  }

  if (line_no == 0) {
    throw ParseError("empty file: " + path);
  }
  if (ds.samples.empty()) {
    throw ParseError("no samples in " + path);
  }
  return ds;
}

void save_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot write dataset file: " + path);
  }
  out << "label";
  for (std::size_t i = 0; i < ds.dimension; ++i) {
    out << ",f" << i;
  }
  out << '\n';
  for (const Sample& s : ds.samples) {
    out << s.class_name;
    for (double v : s.features) {
      out << ',' << format_double(v);
    }
    out << '\n';
  }
  if (!out) {
    throw IoError("failed writing dataset file: " + path);
  }
}

std::pair<Dataset, Dataset> split(const Dataset& ds, const SplitSpec& spec) {
  std::unordered_set<std::string> known(spec.known_classes.begin(),
                                        spec.known_classes.end());
  std::unordered_set<std::string> unknown(spec.unknown_classes.begin(),
                                          spec.unknown_classes.end());
  for (const std::string& name : spec.known_classes) {
    if (unknown.count(name) != 0) {
      throw ValidationError("split: class '" + name +
                            "' appears in both known and unknown sets");
    }
  }
  std::unordered_set<std::string> existing(ds.class_names.begin(),
                                           ds.class_names.end());
  for (const auto& set : {known, unknown}) {
    for (const std::string& name : set) {
      if (existing.count(name) == 0) {
        throw ValidationError("split: class '" + name +
                              "' not present in dataset");
      }
    }
  }

  auto extract = [&](const std::unordered_set<std::string>& wanted) {
    Dataset out;
    out.dimension = ds.dimension;
    std::unordered_map<std::string, int> remap;
    for (const std::string& name : ds.class_names) {
      if (wanted.count(name) != 0) {
        remap.emplace(name, static_cast<int>(out.class_names.size()));
        out.class_names.push_back(name);
      }
    }
    for (const Sample& s : ds.samples) {
      auto it = remap.find(s.class_name);
      if (it == remap.end()) {
        continue;
      }
      Sample copy = s;
      copy.class_id = it->second;
      out.samples.push_back(std::move(copy));
    }
    return out;
  };

  return {extract(known), extract(unknown)};
}

std::vector<LabeledPair> sample_pairs(const Dataset& ds, std::size_t n_pairs,
                                      double positive_fraction, Rng& rng) {
  if (n_pairs == 0) {
    throw ValidationError("sample_pairs: n_pairs must be positive");
  }
  if (positive_fraction < 0.0 || positive_fraction > 1.0) {
    throw ValidationError("sample_pairs: positive_fraction must be in [0,1]");
  }
  if (ds.n_classes() < 2) {
    throw SamplingError("sample_pairs: need at least 2 classes, have " +
                        std::to_string(ds.n_classes()));
  }

  const auto groups = ds.indices_by_class();
  std::vector<std::size_t> pairable;  // classes with >= 2 samples
  for (std::size_t c = 0; c < groups.size(); ++c) {
    if (groups[c].size() >= 2) {
      pairable.push_back(c);
    }
  }

  const std::size_t n_positive = static_cast<std::size_t>(
      std::llround(static_cast<double>(n_pairs) * positive_fraction));
  const std::size_t n_negative = n_pairs - n_positive;

  std::vector<LabeledPair> pairs;
  pairs.reserve(n_pairs);

  for (std::size_t i = 0; i < n_positive; ++i) {
    if (pairable.empty()) {
      throw SamplingError(
          "sample_pairs: positive pair requested but no class has 2 samples");
    }
    const auto& members = groups[pairable[rng.uniform_index(pairable.size())]];
    const std::size_t a = rng.uniform_index(members.size());
    std::size_t b = rng.uniform_index(members.size() - 1);
    if (b >= a) {
      ++b;
    }
    pairs.push_back({members[a], members[b], 1});
  }

  for (std::size_t i = 0; i < n_negative; ++i) {
    const std::size_t c1 = rng.uniform_index(groups.size());
    std::size_t c2 = rng.uniform_index(groups.size() - 1);
    if (c2 >= c1) {
      ++c2;
    }
    const auto& g1 = groups[c1];
    const auto& g2 = groups[c2];
    if (g1.empty() || g2.empty()) {
      throw SamplingError("sample_pairs: class without samples");
    }
    pairs.push_back({g1[rng.uniform_index(g1.size())],
                     g2[rng.uniform_index(g2.size())], 0});
  }

  rng.shuffle(pairs);
  return pairs;
}

Dataset with_features(const Dataset& ds, const Matrix& features) {
  if (features.rows != ds.size()) {
    throw ShapeError("with_features: " + std::to_string(features.rows) +
                     " rows for " + std::to_string(ds.size()) + " samples");
  }
  Dataset out;
  out.dimension = features.cols;
  out.class_names = ds.class_names;
  out.samples.reserve(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    Sample s;
    s.class_id = ds.samples[i].class_id;
    s.class_name = ds.samples[i].class_name;
    auto row = features.row(i);
    s.features.assign(row.begin(), row.end());
    out.samples.push_back(std::move(s));
  }
  return out;
}

}  // namespace embedclust
