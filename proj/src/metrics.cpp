#include "lsr/metrics.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace lsr {

bool pair_is_intra(const Document& doc, int head, int tail) {
  const Entity& h = doc.entity(head);
  const Entity& t = doc.entity(tail);
  for (const Mention& mh : h.mentions)
    for (const Mention& mt : t.mentions)
      if (mh.sentence_index == mt.sentence_index) return true;
  return false;
}

namespace {

std::string mention_surface(const Document& doc, const Mention& m) {
  std::string s;
  const auto& toks = doc.sentences[m.sentence_index].tokens;
  for (int t = m.start; t < m.end; ++t) {
    if (!s.empty()) s += " ";
    s += toks[t];
  }
  return s;
}

std::string entity_surface_set(const Document& doc, int entity_id) {
  std::set<std::string> surfaces;
  for (const Mention& m : doc.entity(entity_id).mentions) {
    surfaces.insert(mention_surface(doc, m));
  }
  std::string out;
  for (const std::string& s : surfaces) {
    if (!out.empty()) out += "|";
    out += s;
  }
  return out;
}

}  // namespace

std::string fact_surface_key(const Document& doc, const RelationFact& f) {
  return entity_surface_set(doc, f.head) + "##" + entity_surface_set(doc, f.tail) +
         "##" + std::to_string(f.relation);
}

std::set<std::string> train_fact_keys(const Corpus& corpus) {
  std::set<std::string> keys;
  for (const Document& doc : corpus)
    for (const RelationFact& f : doc.facts) keys.insert(fact_surface_key(doc, f));
  return keys;
}

std::vector<PredictedFact> apply_threshold(const std::vector<ScoredFact>& scored,
                                           double threshold) {
  std::vector<PredictedFact> out;
  for (const ScoredFact& s : scored) {
    if (s.score >= threshold) out.push_back({s.doc_id, s.head, s.tail, s.relation});
  }
  return out;
}

namespace {

struct Counts {
  long tp = 0, fp = 0, fn = 0;
  double precision() const { return tp + fp == 0 ? 0.0 : double(tp) / (tp + fp); }
  double recall() const { return tp + fn == 0 ? 0.0 : double(tp) / (tp + fn); }
  double f1() const {
    double p = precision(), r = recall();
    return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
  }
};

Counts count(const std::set<PredictedFact>& predicted, const std::set<PredictedFact>& gold) {
  Counts c;
  for (const PredictedFact& p : predicted) {
    if (gold.count(p)) {
      ++c.tp;
    } else {
      ++c.fp;
    }
  }
  c.fn = static_cast<long>(gold.size()) - c.tp;
  return c;
}

}  // namespace

double pick_threshold(const std::vector<ScoredFact>& scored, const Corpus& gold) {
  if (scored.empty()) throw DataError("pick_threshold: no scored facts");
  std::set<PredictedFact> gold_set;
  long gold_total = 0;
  for (const Document& doc : gold) {
    for (const RelationFact& f : doc.facts) {
      gold_set.insert({doc.doc_id, f.head, f.tail, f.relation});
      ++gold_total;
    }
  }
  // sweep thresholds from high to low; at theta = s all facts scoring >= s
  // are predicted
  std::vector<ScoredFact> sorted = scored;
  std::sort(sorted.begin(), sorted.end(),
            [](const ScoredFact& a, const ScoredFact& b) { return a.score > b.score; });
  long tp = 0, predicted = 0;
  double best_f1 = -1.0, best_theta = sorted.front().score;
  std::size_t i = 0;
  while (i < sorted.size()) {
    const double theta = sorted[i].score;
    // absorb the whole tie group
    while (i < sorted.size() && sorted[i].score == theta) {
      ++predicted;
      if (gold_set.count({sorted[i].doc_id, sorted[i].head, sorted[i].tail,
                          sorted[i].relation}))
        ++tp;
      ++i;
    }
    const double p = predicted == 0 ? 0.0 : double(tp) / predicted;
    const double r = gold_total == 0 ? 0.0 : double(tp) / gold_total;
    const double f1 = p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
    // ties between thresholds prefer the smaller theta
    if (f1 >= best_f1) {
      best_f1 = f1;
      best_theta = theta;
    }
  }
  return best_theta;
}

MetricsReport evaluate(const std::vector<PredictedFact>& predicted,
                       const Corpus& gold,
                       const std::set<std::string>& train_keys) {
  std::map<std::string, const Document*> docs;
  for (const Document& d : gold) docs[d.doc_id] = &d;

  std::set<PredictedFact> pred_set(predicted.begin(), predicted.end());
  std::set<PredictedFact> gold_set;
  for (const Document& doc : gold)
    for (const RelationFact& f : doc.facts)
      gold_set.insert({doc.doc_id, f.head, f.tail, f.relation});

  auto doc_of = [&](const PredictedFact& f) -> const Document& {
    auto it = docs.find(f.doc_id);
    if (it == docs.end()) throw DataError("evaluate: unknown doc id " + f.doc_id);
    return *it->second;
  };
  auto in_train = [&](const PredictedFact& f) {
    return train_keys.count(
               fact_surface_key(doc_of(f), {f.head, f.tail, f.relation})) > 0;
  };
  auto intra = [&](const PredictedFact& f) {
    return pair_is_intra(doc_of(f), f.head, f.tail);
  };

  MetricsReport rep;
  Counts overall = count(pred_set, gold_set);
  rep.precision = overall.precision();
  rep.recall = overall.recall();
  rep.f1 = overall.f1();
  rep.gold_count = static_cast<long>(gold_set.size());
  rep.predicted_count = static_cast<long>(pred_set.size());
  rep.correct_count = overall.tp;

  std::set<PredictedFact> pred_ign, gold_ign;
  for (const PredictedFact& f : pred_set)
    if (!in_train(f)) pred_ign.insert(f);
  for (const PredictedFact& f : gold_set)
    if (!in_train(f)) gold_ign.insert(f);
  rep.ign_f1 = count(pred_ign, gold_ign).f1();

  std::set<PredictedFact> pred_intra, gold_intra, pred_inter, gold_inter;
  for (const PredictedFact& f : pred_set) (intra(f) ? pred_intra : pred_inter).insert(f);
  for (const PredictedFact& f : gold_set) (intra(f) ? gold_intra : gold_inter).insert(f);
  rep.intra_f1 = count(pred_intra, gold_intra).f1();
  rep.inter_f1 = count(pred_inter, gold_inter).f1();
  return rep;
}

}  // namespace lsr
