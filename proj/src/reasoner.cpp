#include "lsr/reasoner.hpp"

#include <cmath>
#include <string>

namespace lsr {

void init_block_params(ParamStore& params, const std::string& prefix, int d,
                       int sub_layers, std::mt19937_64& rng) {
  if (sub_layers < 1 || d % sub_layers != 0) {
    throw ShapeError("block: d must be divisible by the sub-layer count");
  }
  init_induction_params(params, prefix + ".ind", d, rng);
  const int d_sub = d / sub_layers;
  for (int l = 0; l < sub_layers; ++l) {
    const int d_in = d + l * d_sub;  // dense wiring
    const double s = 1.0 / std::sqrt(static_cast<double>(d_in));
    params.add(prefix + ".gcn" + std::to_string(l) + ".W",
               Tensor::uniform({d_in, d_sub}, -s, s, rng));
    params.add(prefix + ".gcn" + std::to_string(l) + ".b", Tensor::zeros({d_sub}));
  }
  const double s = 1.0 / std::sqrt(static_cast<double>(d));
  params.add(prefix + ".Wcomb", Tensor::uniform({d, d}, -s, s, rng));
}

void init_classifier_params(ParamStore& params, int d, int k, std::mt19937_64& rng) {
  const double s = 1.0 / std::sqrt(static_cast<double>(d));
  params.add("cls.We", Tensor::uniform({k * d, d}, -s, s, rng));
  params.add("cls.be", Tensor::zeros({k}));
}

Tensor gcn_layer(Tape& tape, const Tensor& A, const Tensor& U_in, const Tensor& W,
                 const Tensor& b, double dropout_rate, bool train_mode,
                 std::mt19937_64& rng) {
  Tensor out = tape.relu(tape.add_rowvec(tape.matmul(A, tape.matmul(U_in, W)), b));
  if (train_mode && dropout_rate > 0.0) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Tensor mask = Tensor::zeros(out.shape);
    const double keep = 1.0 - dropout_rate;
    for (double& v : mask.data) v = unit(rng) < keep ? 1.0 / keep : 0.0;
    out = tape.mul(out, mask);
  }
  return out;
}

Tensor dense_gcn_block(Tape& tape, const TrackedParams& tracked,
                       const std::string& prefix, int sub_layers, const Tensor& A,
                       const Tensor& U, double dropout_rate, bool train_mode,
                       std::mt19937_64& rng) {
  Tensor cat = U;
  std::vector<Tensor> outs;
  for (int l = 0; l < sub_layers; ++l) {
    const Tensor& W = tracked.at(prefix + ".gcn" + std::to_string(l) + ".W");
    const Tensor& b = tracked.at(prefix + ".gcn" + std::to_string(l) + ".b");
    Tensor out = gcn_layer(tape, A, cat, W, b, dropout_rate, train_mode, rng);
    outs.push_back(out);
    if (l + 1 < sub_layers) cat = tape.concat_cols(cat, out);
  }
  Tensor joined = outs[0];
  for (std::size_t l = 1; l < outs.size(); ++l) joined = tape.concat_cols(joined, outs[l]);
  return tape.matmul(joined, tracked.at(prefix + ".Wcomb"));
}

RefinementTrace refine(Tape& tape, const TrackedParams& tracked, const Tensor& U0,
                       int blocks, int sub_layers, double dropout_rate,
                       bool train_mode, std::mt19937_64& rng,
                       bool uniform_structure) {
  if (blocks < 1) throw ShapeError("refine: block count must be >= 1");
  const int n = U0.shape[0];
  RefinementTrace trace;
  Tensor U = U0;
  for (int t = 0; t < blocks; ++t) {
    const std::string prefix = "block" + std::to_string(t);
    RefinementStep step;
    if (uniform_structure) {
      step.structure.A = Tensor::full({n, n}, 1.0 / n);
      step.structure.root = Tensor::full({n}, 1.0 / n);
      step.structure.log_z = Tensor::scalar(0.0);
    } else {
      Tensor s = pair_scores(tape, U, tracked.at(prefix + ".ind.Wp"),
                             tracked.at(prefix + ".ind.Wc"),
                             tracked.at(prefix + ".ind.Wb"));
      Tensor sr = root_scores(tape, U, tracked.at(prefix + ".ind.Wr"));
      try {
        step.structure = marginals_on_tape(tape, s, sr);
      } catch (const SingularStructure& e) {
        throw SingularStructure("block " + std::to_string(t) + ": " + e.what());
      }
    }
    U = dense_gcn_block(tape, tracked, prefix, sub_layers, step.structure.A, U,
                        dropout_rate, train_mode, rng);
    step.U = U;
    trace.steps.push_back(std::move(step));
  }
  return trace;
}

Tensor classify_pair(Tape& tape, const TrackedParams& tracked, const Tensor& U,
                     int row_i, int row_j, int k) {
  if (row_i == row_j) throw ShapeError("classify_pair: head and tail rows must differ");
  const int d = U.shape[1];
  const Tensor& We = tracked.at("cls.We");
  const Tensor& be = tracked.at("cls.be");
  Tensor ei = tape.row(U, row_i);
  Tensor ejT = tape.transpose(tape.row(U, row_j));
  std::vector<Tensor> logits;
  logits.reserve(k);
  for (int r = 0; r < k; ++r) {
    Tensor M = tape.slice_rows(We, r * d, (r + 1) * d);
    logits.push_back(tape.matmul(tape.matmul(ei, M), ejT));  // {1,1}
  }
  Tensor row = tape.transpose(tape.stack_rows(logits));  // {1,k}
  row = tape.add(row, tape.stack_rows({be}));
  return tape.sigmoid(row);
}

Tensor bce_loss(Tape& tape, const Tensor& probs, const Tensor& targets) {
  if (probs.shape != targets.shape) detail::shape_fail("bce_loss", probs, targets);
  Tensor p = tape.clamp(probs, 1e-7, 1.0 - 1e-7);
  Tensor ones = Tensor::full(p.shape, 1.0);
  Tensor inv_targets = ones;
  for (std::size_t i = 0; i < targets.numel(); ++i) inv_targets.data[i] -= targets.data[i];
  Tensor pos = tape.mul(tape.log(p), targets);
  Tensor neg = tape.mul(tape.log(tape.sub(ones, p)), inv_targets);
  Tensor total = tape.sum(tape.add(pos, neg));
  return tape.scalar_mul(total, -1.0 / static_cast<double>(p.numel()));
}

}  // namespace lsr
