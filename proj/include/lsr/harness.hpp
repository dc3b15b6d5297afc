#pragma once

#include <functional>
#include <optional>
#include <string>

#include "lsr/checkpoint.hpp"
#include "lsr/metrics.hpp"
#include "lsr/model.hpp"

namespace lsr {

/// Run configuration; defaults follow batch 20, lr 0.001, hidden 120,
/// 2 blocks, dropout 0.3. Loadable from a flat key-value JSON file.
struct RunConfig {
  std::string train_path;
  std::string dev_path;
  std::string test_path;
  std::string mode = "with-mdp";  // with-mdp | full-tokens
  int d = 120;
  int d_emb = 100;
  int blocks = 2;
  int sub_layers = 2;
  int k = 4;
  int batch_size = 20;
  double learning_rate = 0.001;
  double dropout = 0.3;
  int epochs = 10;
  std::uint64_t seed = 1;
  bool uniform_structure = false;
  std::string threshold_policy = "max-dev-f1";

  GraphMode graph_mode() const;
  ModelConfig model_config() const;
};

RunConfig load_run_config(const std::string& path);

struct EpochStats {
  int epoch = 0;
  double mean_loss = 0.0;
  int singular_skipped = 0;
  MetricsReport dev_metrics;
};

struct TrainResult {
  Checkpoint best;
  std::vector<EpochStats> epochs;
};

/// Seeded training loop: shuffle, accumulate gradients per batch, Adam
/// step, evaluate on dev after each epoch, keep the best-F1 checkpoint.
/// `log` (optional) receives one line-oriented JSON record per epoch;
/// `epoch_hook` (optional) sees the live model after each epoch's
/// evaluation, e.g. for structure spot checks.
TrainResult train(const RunConfig& config,
                  const std::function<void(const std::string&)>& log = {},
                  const std::function<void(const LsrModel&, int)>& epoch_hook = {});

/// Deterministic eval-mode scores for every ordered entity pair and
/// relation of every document.
std::vector<ScoredFact> predict(const Checkpoint& ckpt, const Corpus& corpus);

/// Per-refinement structure dump for one document (exact marginals).
/// Returns a JSON string: {"doc_id", "blocks":[{A, root, log_z, nodes}]}.
std::string induce_structure_dump(const Checkpoint& ckpt, const Document& doc);

std::string metrics_to_json(const MetricsReport& report);

}  // namespace lsr
