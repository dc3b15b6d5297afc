#include "lsr/harness.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "lsr/adam.hpp"

namespace lsr {

using nlohmann::json;

GraphMode RunConfig::graph_mode() const {
  if (mode == "with-mdp") return GraphMode::WithMdp;
  if (mode == "full-tokens") return GraphMode::FullyConnectedTokens;
  throw DataError("config: unknown mode '" + mode + "'");
}

ModelConfig RunConfig::model_config() const {
  ModelConfig mc;
  mc.d = d;
  mc.d_emb = d_emb;
  mc.blocks = blocks;
  mc.sub_layers = sub_layers;
  mc.k = k;
  mc.dropout = dropout;
  mc.mode = graph_mode();
  mc.uniform_structure = uniform_structure;
  return mc;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw DataError("config " + path + ": invalid JSON: " + e.what());
  }
  RunConfig c;
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  get("train_path", c.train_path);
  get("dev_path", c.dev_path);
  get("test_path", c.test_path);
  get("mode", c.mode);
  get("d", c.d);
  get("d_emb", c.d_emb);
  get("blocks", c.blocks);
  get("sub_layers", c.sub_layers);
  get("k", c.k);
  get("batch_size", c.batch_size);
  get("learning_rate", c.learning_rate);
  get("dropout", c.dropout);
  get("epochs", c.epochs);
  get("seed", c.seed);
  get("uniform_structure", c.uniform_structure);
  get("threshold_policy", c.threshold_policy);
  c.graph_mode();  // validates mode
  return c;
}

std::vector<ScoredFact> predict(const Checkpoint& ckpt, const Corpus& corpus) {
  std::vector<ScoredFact> out;
  for (const Document& doc : corpus) {
    for (const PairScore& ps : score_document(ckpt.model, doc)) {
      for (int r = 0; r < ckpt.model.cfg.k; ++r) {
        out.push_back({doc.doc_id, ps.head, ps.tail, r, ps.probs[r]});
      }
    }
  }
  return out;
}

TrainResult train(const RunConfig& config,
                  const std::function<void(const std::string&)>& log,
                  const std::function<void(const LsrModel&, int)>& epoch_hook) {
  Corpus train_corpus = load_corpus(config.train_path);
  Corpus dev_corpus = load_corpus(config.dev_path);
  if (train_corpus.empty()) throw DataError("training corpus is empty");
  if (dev_corpus.empty()) throw DataError("dev corpus is empty");

  Vocab vocab = Vocab::from_corpus(train_corpus);
  LsrModel model = LsrModel::init(config.model_config(), vocab, config.seed);
  AdamState adam;
  adam.learning_rate = config.learning_rate;

  std::mt19937_64 shuffle_rng(config.seed ^ 0x5f5f5f5fULL);
  std::mt19937_64 dropout_rng(config.seed ^ 0xa0a0a0a0ULL);
  std::set<std::string> train_keys = train_fact_keys(train_corpus);

  TrainResult result;
  double best_f1 = -1.0;
  std::vector<std::size_t> order(train_corpus.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    EpochStats stats;
    stats.epoch = epoch;
    double loss_sum = 0.0;
    long loss_count = 0;

    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(config.batch_size)) {
      GradMap batch_grads;
      int in_batch = 0;
      const std::size_t end =
          std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      for (std::size_t idx = start; idx < end; ++idx) {
        const Document& doc = train_corpus[order[idx]];
        try {
          Tape tape;
          TrackedParams tracked = track(tape, model.params);
          DocForward fwd =
              forward_document(tape, tracked, model, doc, /*train=*/true, dropout_rng);
          tape.backward(fwd.loss);
          accumulate(batch_grads, collect_grads(tape, tracked));
          loss_sum += fwd.loss[0];
          ++loss_count;
          ++in_batch;
        } catch (const SingularStructure&) {
          ++stats.singular_skipped;
        }
      }
      if (in_batch > 0) {
        scale(batch_grads, 1.0 / in_batch);
        adam_step(adam, model.params, batch_grads);
      }
    }
    stats.mean_loss = loss_count == 0 ? 0.0 : loss_sum / loss_count;

    Checkpoint current;
    current.model = model;
    current.epoch = epoch;
    std::vector<ScoredFact> dev_scores = predict(current, dev_corpus);
    current.threshold = pick_threshold(dev_scores, dev_corpus);
    stats.dev_metrics =
        evaluate(apply_threshold(dev_scores, current.threshold), dev_corpus, train_keys);
    stats.dev_metrics.threshold = current.threshold;
    result.epochs.push_back(stats);

    if (stats.dev_metrics.f1 > best_f1) {
      best_f1 = stats.dev_metrics.f1;
      result.best = current;
    }

    if (log) {
      json rec{{"epoch", epoch},
               {"mean_loss", stats.mean_loss},
               {"singular_skipped", stats.singular_skipped},
               {"dev_f1", stats.dev_metrics.f1},
               {"dev_ign_f1", stats.dev_metrics.ign_f1},
               {"dev_intra_f1", stats.dev_metrics.intra_f1},
               {"dev_inter_f1", stats.dev_metrics.inter_f1},
               {"threshold", stats.dev_metrics.threshold}};
      log(rec.dump());
    }
    if (epoch_hook) epoch_hook(model, epoch);
  }
  for (const EpochStats& s : result.epochs) {
    result.best.dev_f1_history.push_back(s.dev_metrics.f1);
  }
  return result;
}

std::string induce_structure_dump(const Checkpoint& ckpt, const Document& doc) {
  const LsrModel& model = ckpt.model;
  Tape tape;
  TrackedParams tracked = track(tape, model.params);
  std::mt19937_64 rng(0);
  DocForward fwd = forward_document(tape, tracked, model, doc, /*train=*/false, rng);

  json dump;
  dump["doc_id"] = doc.doc_id;
  json jnodes = json::array();
  for (const NodeDescriptor& nd : fwd.plan.nodes) {
    json jn;
    switch (nd.kind) {
      case NodeKind::Mention: {
        const Mention& m = fwd.plan.mention_order[nd.mention_index];
        std::string text;
        for (int t = m.start; t < m.end; ++t) {
          if (!text.empty()) text += " ";
          text += doc.sentences[m.sentence_index].tokens[t];
        }
        jn = {{"kind", "mention"}, {"text", text}, {"sent", m.sentence_index}};
        break;
      }
      case NodeKind::Entity:
        jn = {{"kind", "entity"}, {"text", "entity " + std::to_string(nd.entity_id)},
              {"sent", -1}};
        break;
      case NodeKind::Mdp:
        jn = {{"kind", "mdp"},
              {"text", doc.sentences[nd.sentence].tokens[nd.token]},
              {"sent", nd.sentence}};
        break;
    }
    jnodes.push_back(jn);
  }
  dump["blocks"] = json::array();
  for (const RefinementStep& step : fwd.trace.steps) {
    const Tensor& A = step.structure.A;
    json ja = json::array();
    for (int i = 0; i < A.shape[0]; ++i) {
      json row = json::array();
      for (int j = 0; j < A.shape[1]; ++j) row.push_back(A.at(i, j));
      ja.push_back(row);
    }
    json jroot = json::array();
    for (double v : step.structure.root.data) jroot.push_back(v);
    dump["blocks"].push_back({{"A", ja},
                              {"root", jroot},
                              {"log_z", step.structure.log_z[0]},
                              {"nodes", jnodes}});
  }
  return dump.dump(2);
}

std::string metrics_to_json(const MetricsReport& r) {
  json j{{"precision", r.precision},
         {"recall", r.recall},
         {"f1", r.f1},
         {"ign_f1", r.ign_f1},
         {"intra_f1", r.intra_f1},
         {"inter_f1", r.inter_f1},
         {"threshold", r.threshold},
         {"gold_count", r.gold_count},
         {"predicted_count", r.predicted_count},
         {"correct_count", r.correct_count}};
  return j.dump();
}

}  // namespace lsr
