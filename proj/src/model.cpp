#include "lsr/model.hpp"

#include <algorithm>
#include <map>

namespace lsr {

LsrModel LsrModel::init(const ModelConfig& cfg, const Vocab& vocab,
                        std::uint64_t seed) {
  LsrModel model;
  model.cfg = cfg;
  model.vocab = vocab;
  std::mt19937_64 rng(seed);
  init_encoder_params(model.params, vocab, cfg.d_emb, cfg.d, rng);
  for (int t = 0; t < cfg.blocks; ++t) {
    init_block_params(model.params, "block" + std::to_string(t), cfg.d,
                      cfg.sub_layers, rng);
  }
  init_classifier_params(model.params, cfg.d, cfg.k, rng);
  return model;
}

DocForward forward_document(Tape& tape, const TrackedParams& tracked,
                            const LsrModel& model, const Document& doc,
                            bool train_mode, std::mt19937_64& rng) {
  const ModelConfig& cfg = model.cfg;
  DocForward out;
  out.plan = build_node_plan(doc, cfg.mode);

  std::vector<Tensor> sentence_reprs;
  sentence_reprs.reserve(doc.sentences.size());
  for (const Sentence& s : doc.sentences) {
    sentence_reprs.push_back(
        encode_sentence(tape, tracked, model.vocab, s.tokens, cfg.d_emb, cfg.d));
  }
  out.U0 = build_nodes(tape, doc, sentence_reprs, out.plan);
  out.trace = refine(tape, tracked, out.U0, cfg.blocks, cfg.sub_layers, cfg.dropout,
                     train_mode, rng, cfg.uniform_structure);
  const Tensor& Ufinal = out.trace.steps.back().U;

  // entity node rows sit after the mention rows, in ascending id order
  std::vector<int> entity_ids;
  for (const Entity& e : doc.entities) entity_ids.push_back(e.id);
  std::sort(entity_ids.begin(), entity_ids.end());
  std::map<int, int> entity_row;
  const int mention_count = static_cast<int>(out.plan.mention_order.size());
  for (std::size_t i = 0; i < entity_ids.size(); ++i) {
    entity_row[entity_ids[i]] = mention_count + static_cast<int>(i);
  }

  std::vector<Tensor> prob_rows;
  for (int h : entity_ids) {
    for (int t : entity_ids) {
      if (h == t) continue;
      out.pair_entities.push_back({h, t});
      prob_rows.push_back(
          classify_pair(tape, tracked, Ufinal, entity_row[h], entity_row[t], cfg.k));
    }
  }
  if (prob_rows.empty()) {
    throw DataError("doc " + doc.doc_id + ": needs at least two entities");
  }
  out.probs = tape.stack_rows(prob_rows);

  out.targets = Tensor::zeros(out.probs.shape);
  for (std::size_t p = 0; p < out.pair_entities.size(); ++p) {
    for (const RelationFact& f : doc.facts) {
      if (f.head == out.pair_entities[p].first && f.tail == out.pair_entities[p].second) {
        out.targets.at(static_cast<int>(p), f.relation) = 1.0;
      }
    }
  }
  out.loss = bce_loss(tape, out.probs, out.targets);
  return out;
}

std::vector<PairScore> score_document(const LsrModel& model, const Document& doc) {
  Tape tape;
  TrackedParams tracked = track(tape, model.params);
  std::mt19937_64 rng(0);  // unused: eval mode has no dropout
  DocForward fwd = forward_document(tape, tracked, model, doc, /*train_mode=*/false, rng);
  std::vector<PairScore> scores;
  for (std::size_t p = 0; p < fwd.pair_entities.size(); ++p) {
    PairScore ps;
    ps.head = fwd.pair_entities[p].first;
    ps.tail = fwd.pair_entities[p].second;
    for (int r = 0; r < model.cfg.k; ++r) ps.probs.push_back(fwd.probs.at(static_cast<int>(p), r));
    scores.push_back(std::move(ps));
  }
  return scores;
}

}  // namespace lsr
