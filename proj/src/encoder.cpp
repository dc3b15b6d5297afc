#include "lsr/encoder.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace lsr {

Vocab Vocab::from_corpus(const Corpus& corpus) {
  std::set<std::string> words;
  for (const Document& doc : corpus)
    for (const Sentence& s : doc.sentences)
      for (const std::string& t : s.tokens) words.insert(t);
  Vocab v;
  int row = 0;
  for (const std::string& w : words) v.index[w] = row++;
  v.unk_row = row;
  return v;
}

std::pair<Vocab, Tensor> load_embeddings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open embedding file: " + path);
  Vocab vocab;
  std::vector<std::vector<double>> rows;
  std::string line;
  int dim = -1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string token;
    ss >> token;
    std::vector<double> vec;
    double v;
    while (ss >> v) vec.push_back(v);
    if (dim < 0) dim = static_cast<int>(vec.size());
    if (static_cast<int>(vec.size()) != dim || dim == 0) {
      throw DataError("embedding file: inconsistent vector width at token '" + token + "'");
    }
    if (vocab.index.count(token)) {
      throw DataError("embedding file: duplicate token '" + token + "'");
    }
    vocab.index[token] = static_cast<int>(rows.size());
    rows.push_back(std::move(vec));
  }
  if (rows.empty()) throw DataError("embedding file is empty: " + path);
  vocab.unk_row = static_cast<int>(rows.size());
  rows.emplace_back(dim, 0.0);  // unk
  return {vocab, Tensor::from_rows(rows)};
}

void init_encoder_params(ParamStore& params, const Vocab& vocab, int d_emb, int d,
                         std::mt19937_64& rng) {
  if (d % 2 != 0) throw ShapeError("hidden size d must be even (d/2 per direction)");
  const int h = d / 2;
  const double es = 0.5;
  if (!params.contains("embedding")) {
    params.add("embedding", Tensor::uniform({vocab.size(), d_emb}, -es, es, rng));
  }
  const double ws = 1.0 / std::sqrt(static_cast<double>(d_emb + h));
  for (const char* dir : {"lstm_fw", "lstm_bw"}) {
    params.add(std::string(dir) + ".W",
               Tensor::uniform({d_emb + h, 4 * h}, -ws, ws, rng));
    params.add(std::string(dir) + ".b", Tensor::zeros({4 * h}));
  }
}

namespace {

struct LstmCell {
  Tape& tape;
  const Tensor& W;  // {e+h, 4h}
  const Tensor& b;  // {4h}
  int h;

  std::pair<Tensor, Tensor> step(const Tensor& x, const Tensor& hidden,
                                 const Tensor& cell) {
    Tensor in = tape.concat_cols(x, hidden);
    Tensor z = tape.add_rowvec(tape.matmul(in, W), b);
    Tensor ig = tape.sigmoid(tape.slice_cols(z, 0, h));
    Tensor fg = tape.sigmoid(tape.slice_cols(z, h, 2 * h));
    Tensor gg = tape.tanh(tape.slice_cols(z, 2 * h, 3 * h));
    Tensor og = tape.sigmoid(tape.slice_cols(z, 3 * h, 4 * h));
    Tensor c_next = tape.add(tape.mul(fg, cell), tape.mul(ig, gg));
    Tensor h_next = tape.mul(og, tape.tanh(c_next));
    return {h_next, c_next};
  }
};

}  // namespace

Tensor encode_sentence(Tape& tape, const TrackedParams& tracked, const Vocab& vocab,
                       const std::vector<std::string>& tokens, int d_emb, int d) {
  if (tokens.empty()) throw DataError("encode_sentence: empty sentence");
  const int h = d / 2;
  const int len = static_cast<int>(tokens.size());
  const Tensor& emb = tracked.at("embedding");
  (void)d_emb;

  std::vector<Tensor> xs;
  xs.reserve(tokens.size());
  for (const std::string& t : tokens) xs.push_back(tape.row(emb, vocab.row_of(t)));

  LstmCell fw{tape, tracked.at("lstm_fw.W"), tracked.at("lstm_fw.b"), h};
  LstmCell bw{tape, tracked.at("lstm_bw.W"), tracked.at("lstm_bw.b"), h};

  std::vector<Tensor> fw_states(len), bw_states(len);
  Tensor hf = Tensor::zeros({1, h}), cf = Tensor::zeros({1, h});
  for (int j = 0; j < len; ++j) {
    std::tie(hf, cf) = fw.step(xs[j], hf, cf);
    fw_states[j] = hf;
  }
  Tensor hb = Tensor::zeros({1, h}), cb = Tensor::zeros({1, h});
  for (int j = len - 1; j >= 0; --j) {
    std::tie(hb, cb) = bw.step(xs[j], hb, cb);
    bw_states[j] = hb;
  }
  return tape.concat_cols(tape.stack_rows(fw_states), tape.stack_rows(bw_states));
}

Tensor build_nodes(Tape& tape, const Document& doc,
                   const std::vector<Tensor>& sentence_reprs, const NodePlan& plan) {
  if (sentence_reprs.size() != doc.sentences.size()) {
    throw DataError("build_nodes: sentence representations do not cover the document");
  }
  // mention nodes first; entity nodes average them
  std::vector<Tensor> mention_nodes;
  mention_nodes.reserve(plan.mention_order.size());
  for (const Mention& m : plan.mention_order) {
    const Tensor& H = sentence_reprs[m.sentence_index];
    mention_nodes.push_back(
        tape.mean_over_rows(tape.slice_rows(H, m.start, m.end)));
  }
  std::vector<Tensor> rows;
  rows.reserve(plan.nodes.size());
  for (const NodeDescriptor& nd : plan.nodes) {
    switch (nd.kind) {
      case NodeKind::Mention:
        rows.push_back(mention_nodes[nd.mention_index]);
        break;
      case NodeKind::Entity: {
        std::vector<Tensor> own;
        for (std::size_t i = 0; i < plan.mention_order.size(); ++i) {
          if (plan.mention_order[i].entity_id == nd.entity_id)
            own.push_back(mention_nodes[i]);
        }
        if (own.empty()) throw DataError("build_nodes: entity without mentions in plan");
        rows.push_back(tape.mean_over_rows(tape.stack_rows(own)));
        break;
      }
      case NodeKind::Mdp:
        rows.push_back(tape.row(sentence_reprs[nd.sentence], nd.token));
        break;
    }
  }
  return tape.stack_rows(rows);
}

}  // namespace lsr
