#pragma once

#include <map>
#include <string>
#include <vector>

#include "lsr/docmodel.hpp"
#include "lsr/params.hpp"
#include "lsr/tensor.hpp"

namespace lsr {

/// Token -> embedding-row lookup with a dedicated unk row (last row of the
/// matrix). The matrix itself lives in the ParamStore under "embedding".
struct Vocab {
  std::map<std::string, int> index;
  int unk_row = 0;

  int row_of(const std::string& token) const {
    auto it = index.find(token);
    return it == index.end() ? unk_row : it->second;
  }
  int size() const { return static_cast<int>(index.size()) + 1; }  // + unk

  static Vocab from_corpus(const Corpus& corpus);
};

/// Loads "token v1 ... v_d" lines; returns vocab plus matrix (unk row is
/// zero-initialized at the end).
std::pair<Vocab, Tensor> load_embeddings(const std::string& path);

/// Registers embedding + BiLSTM weights. Hidden size per direction is d/2
/// so the concatenated output has width d.
void init_encoder_params(ParamStore& params, const Vocab& vocab, int d_emb, int d,
                         std::mt19937_64& rng);

/// BiLSTM over one sentence: row j = [forward state at j ; backward state
/// at j], zero initial states. Output is len x d on the tape.
Tensor encode_sentence(Tape& tape, const TrackedParams& tracked, const Vocab& vocab,
                       const std::vector<std::string>& tokens, int d_emb, int d);

/// Assembles the initial node matrix in plan order: mention nodes are mean
/// over span tokens, entity nodes mean over their mention nodes, MDP/token
/// nodes the raw token vector.
Tensor build_nodes(Tape& tape, const Document& doc,
                   const std::vector<Tensor>& sentence_reprs, const NodePlan& plan);

}  // namespace lsr
