#pragma once

#include <cstdint>
#include <vector>

#include "lsr/docmodel.hpp"

namespace lsr {

/// Controls the synthetic multi-hop corpus generator. A fraction
/// `bridge_prob` of fact slots become compositional: r(A,B) and r(B,C) are
/// planted in different sentences and r(A,C) is added as a gold fact whose
/// entities never share a sentence.
struct GeneratorSpec {
  int vocab_size = 200;
  int num_docs = 100;
  int sentences_per_doc = 4;
  int entities_per_doc = 5;
  int num_relations = 4;
  double bridge_prob = 0.5;
  int facts_per_doc = 3;
  int filler_tokens_per_sentence = 3;
};

struct SyntheticTags {
  // (document index, fact) pairs the generator planted as inter-sentence
  std::vector<std::pair<int, RelationFact>> inter_facts;
};

Corpus generate_synthetic_corpus(const GeneratorSpec& spec, std::uint64_t seed,
                                 SyntheticTags* tags = nullptr);

}  // namespace lsr
