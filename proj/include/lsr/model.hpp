#pragma once

#include <random>

#include "lsr/docmodel.hpp"
#include "lsr/encoder.hpp"
#include "lsr/reasoner.hpp"

namespace lsr {

struct ModelConfig {
  int d = 120;
  int d_emb = 100;
  int blocks = 2;
  int sub_layers = 2;
  int k = 4;  // relation types
  double dropout = 0.3;
  GraphMode mode = GraphMode::WithMdp;
  bool uniform_structure = false;  // frozen-structure baseline
};

/// Full LSR model: parameter store plus vocabulary. Forward passes are
/// pure given (params, doc, rng state); training mutates params only via
/// the optimizer between batches.
struct LsrModel {
  ModelConfig cfg;
  Vocab vocab;
  ParamStore params;

  static LsrModel init(const ModelConfig& cfg, const Vocab& vocab,
                       std::uint64_t seed);
};

struct PairScore {
  int head = 0;
  int tail = 0;
  std::vector<double> probs;  // length k
};

struct DocForward {
  NodePlan plan;
  Tensor U0;
  RefinementTrace trace;
  Tensor probs;    // (pairs) x k, tape-tracked
  Tensor targets;  // same shape, constant
  Tensor loss;     // scalar
  std::vector<std::pair<int, int>> pair_entities;  // ordered (head, tail) ids
};

/// Runs encode -> build nodes -> refine -> classify -> loss for one
/// document. Entity pairs are all ordered pairs of distinct entity ids.
DocForward forward_document(Tape& tape, const TrackedParams& tracked,
                            const LsrModel& model, const Document& doc,
                            bool train_mode, std::mt19937_64& rng);

/// Eval-mode pair probabilities for one document (no loss needed).
std::vector<PairScore> score_document(const LsrModel& model, const Document& doc);

}  // namespace lsr
