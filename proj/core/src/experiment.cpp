#include "embedclust/experiment.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "embedclust/error.hpp"
#include "embedclust/format.hpp"
#include "embedclust/metrics.hpp"
#include "embedclust/trainer.hpp"

namespace embedclust {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

json rmsprop_to_json(const RmspropConfig& cfg) {
  return {{"learning_rate", cfg.learning_rate},
          {"rho", cfg.rho},
          {"epsilon", cfg.epsilon}};
}

void rmsprop_from_json(const json& doc, RmspropConfig& cfg) {
  cfg.learning_rate = doc.value("learning_rate", cfg.learning_rate);
  cfg.rho = doc.value("rho", cfg.rho);
  cfg.epsilon = doc.value("epsilon", cfg.epsilon);
}

json config_to_json_obj(const ExperimentConfig& cfg) {
  json doc;
  doc["dataset"] = cfg.dataset_path;
  doc["split"] = {{"known_classes", cfg.split.known_classes},
                  {"unknown_classes", cfg.split.unknown_classes},
                  {"seed", cfg.split.seed}};
  doc["method"] = to_string(cfg.method);
  doc["k_clusters"] = cfg.k_clusters;
  doc["seed"] = cfg.seed;
  doc["direct"] = {{"hidden_dim", cfg.direct.hidden_dim},
                   {"embedding_dim", cfg.direct.embedding_dim},
                   {"l2_coefficient", cfg.direct.l2_coefficient},
                   {"margin", cfg.direct.margin},
                   {"distance", to_string(cfg.direct.distance)},
                   {"epochs", cfg.direct.epochs},
                   {"batch_size", cfg.direct.batch_size},
                   {"pairs_per_epoch", cfg.direct.pairs_per_epoch},
                   {"positive_fraction", cfg.direct.positive_fraction},
                   {"optimizer", rmsprop_to_json(cfg.direct.optimizer)}};
  doc["pca"] = {{"n_components", cfg.pca.n_components}};
  doc["autoencoder"] = {{"hidden_dim", cfg.autoencoder.hidden_dim},
                        {"bottleneck_dim", cfg.autoencoder.bottleneck_dim},
                        {"epochs", cfg.autoencoder.epochs},
                        {"batch_size", cfg.autoencoder.batch_size},
                        {"optimizer", rmsprop_to_json(cfg.autoencoder.optimizer)}};
  doc["kmeans"] = {{"restarts", cfg.kmeans.restarts},
                   {"max_iter", cfg.kmeans.max_iter},
                   {"tol", cfg.kmeans.tol}};
  return doc;
}

// Remembers what a run has written so a failing stage can remove it.
class OutputTracker {
 public:
  void track(const fs::path& path) { written_.push_back(path); }
  void discard_all() {
    for (const fs::path& p : written_) {
      std::error_code ec;
      fs::remove(p, ec);
    }
    written_.clear();
  }

 private:
  std::vector<fs::path> written_;
};

}  // namespace

std::string to_string(Method method) {
  switch (method) {
    case Method::direct:
      return "direct";
    case Method::raw:
      return "raw";
    case Method::pca:
      return "pca";
    case Method::autoencoder:
      return "autoencoder";
  }
  return "direct";
}

Method method_from_string(const std::string& name) {
  if (name == "direct") return Method::direct;
  if (name == "raw") return Method::raw;
  if (name == "pca") return Method::pca;
  if (name == "autoencoder") return Method::autoencoder;
  throw ValidationError("unknown method: '" + name + "'");
}

std::unique_ptr<Embedder> make_embedder(const ExperimentConfig& cfg,
                                        const Dataset& known) {
  switch (cfg.method) {
    case Method::raw: {
      auto embedder = std::make_unique<RawEmbedder>();
      embedder->fit(known);
      return embedder;
    }
    case Method::pca: {
      auto embedder = std::make_unique<PcaEmbedder>(cfg.pca.n_components);
      embedder->fit(known);
      return embedder;
    }
    case Method::autoencoder: {
      AutoencoderConfig ae = cfg.autoencoder;
      ae.seed = derive_seed(cfg.seed, "autoencoder");
      auto embedder = std::make_unique<AutoencoderEmbedder>(ae);
      embedder->fit(known);
      return embedder;
    }
    case Method::direct: {
      DirectEmbedderConfig dc;
      dc.hidden_dim = cfg.direct.hidden_dim;
      dc.embedding_dim = cfg.direct.embedding_dim;
      dc.hidden_l2 = cfg.direct.l2_coefficient;
      dc.train.epochs = cfg.direct.epochs;
      dc.train.batch_size = cfg.direct.batch_size;
      dc.train.pairs_per_epoch = cfg.direct.pairs_per_epoch;
      dc.train.positive_fraction = cfg.direct.positive_fraction;
      dc.train.contrastive.margin = cfg.direct.margin;
      dc.train.contrastive.distance = cfg.direct.distance;
      dc.train.optimizer = cfg.direct.optimizer;
      dc.train.seed = derive_seed(cfg.seed, "direct");
      auto embedder = std::make_unique<DirectEmbedder>(dc);
      embedder->fit(known);
      return embedder;
    }
  }
  throw ValidationError("make_embedder: unhandled method");
}

EvaluationReport run_experiment(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  OutputTracker outputs;
  std::string stage = "config";
  try {
    if (cfg.out_dir.empty()) {
      throw ValidationError("output directory not set");
    }

    stage = "load";
    const Dataset ds = load_csv(cfg.dataset_path);

    stage = "split";
    const auto [known, unknown] = split(ds, cfg.split);
    if (unknown.size() == 0) {
      throw ValidationError("unknown split is empty");
    }
    const std::size_t k =
        cfg.k_clusters > 0 ? cfg.k_clusters : unknown.n_classes();

    stage = "fit";
    const std::unique_ptr<Embedder> embedder = make_embedder(cfg, known);

    stage = "transform";
    const Matrix embedded = embedder->transform(unknown);

    stage = "cluster";
    Rng kmeans_rng(derive_seed(cfg.seed, "kmeans"));
    const ClusterResult clusters =
        kmeans(embedded, k, cfg.kmeans.restarts, cfg.kmeans.max_iter,
               cfg.kmeans.tol, kmeans_rng);

    stage = "evaluate";
    const std::vector<int> truth = unknown.labels();
    std::vector<int> predicted;
    predicted.reserve(clusters.assignments.size());
    for (std::size_t a : clusters.assignments) {
      predicted.push_back(static_cast<int>(a));
    }
    EvaluationReport report;
    report.method = embedder->name();
    report.nmi = nmi(truth, predicted);
    report.ri = rand_index(truth, predicted);
    report.ari = ari(truth, predicted);
    report.k_used = k;
    report.embedding_dim = embedded.cols;
    report.seed = cfg.seed;
    report.config_echo = config_to_json_obj(cfg).dump(2);

    stage = "write";
    fs::create_directories(cfg.out_dir);
    const fs::path dir(cfg.out_dir);

    outputs.track(dir / "assignments.csv");
    save_csv(clusters, (dir / "assignments.csv").string());

    outputs.track(dir / "embeddings.csv");
    save_csv(with_features(unknown, embedded),
             (dir / "embeddings.csv").string());

    if (embedded.cols >= 2 && embedded.rows >= 3) {
      const PcaModel plane = pca_fit(embedded, 2);
      outputs.track(dir / "embeddings_2d.csv");
      save_csv(with_features(unknown, pca_transform(plane, embedded)),
               (dir / "embeddings_2d.csv").string());
    }

    if (const TrainLog* log = embedder->train_log()) {
      outputs.track(dir / "trainlog.csv");
      save_csv(*log, (dir / "trainlog.csv").string());
    }

    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    outputs.track(dir / "report.json");
    std::ofstream out(dir / "report.json", std::ios::binary);
    if (!out) {
      throw IoError("cannot write report.json");
    }
    out << report_to_json(report) << '\n';
    if (!out) {
      throw IoError("failed writing report.json");
    }
    return report;
  } catch (const Error& e) {
    outputs.discard_all();
    throw Error("stage " + stage + ": " + e.what());
  } catch (const std::exception& e) {
    outputs.discard_all();
    throw Error("stage " + stage + ": " + e.what());
  }
}

std::vector<SweepEntry> sweep_embedding_dim(
    const ExperimentConfig& cfg, const std::vector<std::size_t>& dims) {
  if (dims.empty()) {
    throw ValidationError("sweep: dims must be nonempty");
  }
  for (std::size_t k : dims) {
    if (k < 1) {
      throw ValidationError("sweep: embedding sizes must be positive");
    }
  }

  std::vector<SweepEntry> entries;
  entries.reserve(dims.size());
  for (std::size_t i = 0; i < dims.size(); ++i) {
    ExperimentConfig sub = cfg;
    sub.method = Method::direct;
    sub.direct.embedding_dim = dims[i];
    sub.out_dir = (fs::path(cfg.out_dir) /
                   ("k" + std::to_string(dims[i]) + "_" + std::to_string(i)))
                      .string();
    SweepEntry entry;
    entry.k = dims[i];
    try {
      entry.report = run_experiment(sub);
      entry.ok = true;
    } catch (const std::exception& e) {
      entry.ok = false;
      entry.error = e.what();
    }
    entries.push_back(std::move(entry));
  }

  fs::create_directories(cfg.out_dir);
  std::ofstream out(fs::path(cfg.out_dir) / "sweep.csv", std::ios::binary);
  if (!out) {
    throw IoError("cannot write sweep.csv");
  }
  out << "k,nmi,ari\n";
  for (const SweepEntry& entry : entries) {
    if (entry.ok) {
      out << entry.k << ',' << format_double(entry.report.nmi) << ','
          << format_double(entry.report.ari) << '\n';
    }
  }
  return entries;
}

ExperimentConfig experiment_config_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("config json: ") + e.what());
  }
  try {
    ExperimentConfig cfg;
    cfg.dataset_path = doc.value("dataset", cfg.dataset_path);
    if (doc.contains("split")) {
      const json& s = doc["split"];
      cfg.split.known_classes = s.value("known_classes", cfg.split.known_classes);
      cfg.split.unknown_classes =
          s.value("unknown_classes", cfg.split.unknown_classes);
      cfg.split.seed = s.value("seed", cfg.split.seed);
    }
    if (doc.contains("method")) {
      cfg.method = method_from_string(doc["method"].get<std::string>());
    }
    cfg.k_clusters = doc.value("k_clusters", cfg.k_clusters);
    cfg.seed = doc.value("seed", cfg.seed);
    cfg.out_dir = doc.value("out", cfg.out_dir);
    if (doc.contains("direct")) {
      const json& d = doc["direct"];
      cfg.direct.hidden_dim = d.value("hidden_dim", cfg.direct.hidden_dim);
      cfg.direct.embedding_dim =
          d.value("embedding_dim", cfg.direct.embedding_dim);
      cfg.direct.l2_coefficient =
          d.value("l2_coefficient", cfg.direct.l2_coefficient);
      cfg.direct.margin = d.value("margin", cfg.direct.margin);
      if (d.contains("distance")) {
        cfg.direct.distance =
            distance_kind_from_string(d["distance"].get<std::string>());
      }
      cfg.direct.epochs = d.value("epochs", cfg.direct.epochs);
      cfg.direct.batch_size = d.value("batch_size", cfg.direct.batch_size);
      cfg.direct.pairs_per_epoch =
          d.value("pairs_per_epoch", cfg.direct.pairs_per_epoch);
      cfg.direct.positive_fraction =
          d.value("positive_fraction", cfg.direct.positive_fraction);
      if (d.contains("optimizer")) {
        rmsprop_from_json(d["optimizer"], cfg.direct.optimizer);
      }
    }
    if (doc.contains("pca")) {
      cfg.pca.n_components =
          doc["pca"].value("n_components", cfg.pca.n_components);
    }
    if (doc.contains("autoencoder")) {
      const json& a = doc["autoencoder"];
      cfg.autoencoder.hidden_dim =
          a.value("hidden_dim", cfg.autoencoder.hidden_dim);
      cfg.autoencoder.bottleneck_dim =
          a.value("bottleneck_dim", cfg.autoencoder.bottleneck_dim);
      cfg.autoencoder.epochs = a.value("epochs", cfg.autoencoder.epochs);
      cfg.autoencoder.batch_size =
          a.value("batch_size", cfg.autoencoder.batch_size);
      if (a.contains("optimizer")) {
        rmsprop_from_json(a["optimizer"], cfg.autoencoder.optimizer);
      }
    }
    if (doc.contains("kmeans")) {
      const json& m = doc["kmeans"];
      cfg.kmeans.restarts = m.value("restarts", cfg.kmeans.restarts);
      cfg.kmeans.max_iter = m.value("max_iter", cfg.kmeans.max_iter);
      cfg.kmeans.tol = m.value("tol", cfg.kmeans.tol);
    }
    return cfg;
  } catch (const json::exception& e) {
    throw ParseError(std::string("config json: ") + e.what());
  }
}

std::string experiment_config_to_json(const ExperimentConfig& cfg) {
  return config_to_json_obj(cfg).dump(2);
}

std::string report_to_json(const EvaluationReport& report) {
  json doc;
  doc["method"] = report.method;
  doc["nmi"] = report.nmi;
  doc["ri"] = report.ri;
  doc["ari"] = report.ari;
  doc["k_used"] = report.k_used;
  doc["embedding_dim"] = report.embedding_dim;
  doc["seed"] = report.seed;
  doc["wall_seconds"] = report.wall_seconds;
  doc["config"] = json::parse(report.config_echo);
  return doc.dump(2);
}

EvaluationReport report_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("report json: ") + e.what());
  }
  try {
    EvaluationReport report;
    report.method = doc.at("method").get<std::string>();
    report.nmi = doc.at("nmi").get<double>();
    report.ri = doc.at("ri").get<double>();
    report.ari = doc.at("ari").get<double>();
    report.k_used = doc.at("k_used").get<std::size_t>();
    report.embedding_dim = doc.at("embedding_dim").get<std::size_t>();
    report.seed = doc.at("seed").get<std::uint64_t>();
    report.wall_seconds = doc.at("wall_seconds").get<double>();
    report.config_echo = doc.at("config").dump(2);
    return report;
  } catch (const json::exception& e) {
    throw ParseError(std::string("report json: ") + e.what());
  }
}

}  // namespace embedclust
