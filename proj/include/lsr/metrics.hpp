#pragma once

#include <set>
#include <string>
#include <vector>

#include "lsr/docmodel.hpp"

namespace lsr {

struct ScoredFact {
  std::string doc_id;
  int head = 0;
  int tail = 0;
  int relation = 0;
  double score = 0.0;
};

struct PredictedFact {
  std::string doc_id;
  int head = 0;
  int tail = 0;
  int relation = 0;

  bool operator<(const PredictedFact& o) const {
    if (doc_id != o.doc_id) return doc_id < o.doc_id;
    if (head != o.head) return head < o.head;
    if (tail != o.tail) return tail < o.tail;
    return relation < o.relation;
  }
};

struct MetricsReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double ign_f1 = 0.0;
  double intra_f1 = 0.0;
  double inter_f1 = 0.0;
  double threshold = 0.0;
  long gold_count = 0;
  long predicted_count = 0;
  long correct_count = 0;
};

/// True when the two entities have mentions in one common sentence.
bool pair_is_intra(const Document& doc, int head, int tail);

/// Surface-based identity for Ign F1: sorted head mention strings, sorted
/// tail mention strings, and the relation id, joined into one key.
std::string fact_surface_key(const Document& doc, const RelationFact& f);

/// All surface keys of gold facts in a (training) corpus.
std::set<std::string> train_fact_keys(const Corpus& corpus);

/// Global threshold maximizing F1 on the dev scores; candidates are the
/// distinct scores (predicted means score >= theta); ties pick the
/// smaller theta.
double pick_threshold(const std::vector<ScoredFact>& scored, const Corpus& gold);

/// Micro precision/recall/F1 over (doc, head, tail, relation), plus Ign /
/// Intra / Inter variants.
MetricsReport evaluate(const std::vector<PredictedFact>& predicted,
                       const Corpus& gold,
                       const std::set<std::string>& train_keys);

std::vector<PredictedFact> apply_threshold(const std::vector<ScoredFact>& scored,
                                           double threshold);

}  // namespace lsr
