#pragma once

#include <random>

#include "lsr/induction.hpp"
#include "lsr/params.hpp"
#include "lsr/tensor.hpp"

namespace lsr {

/// Registers the GCN sub-layer weights and the post-concat combination map
/// for one reasoning block. Sub-layer l consumes d + (l-1)*(d/sub_layers)
/// columns under dense wiring; each emits d/sub_layers.
void init_block_params(ParamStore& params, const std::string& prefix, int d,
                       int sub_layers, std::mt19937_64& rng);

/// W_e stored as {k*d, d} (k stacked d x d slices) plus bias {k}.
void init_classifier_params(ParamStore& params, int d, int k, std::mt19937_64& rng);

/// u_i' = ReLU(sum_j A_ij W u_j + b), with inverted dropout on the output
/// in train mode.
Tensor gcn_layer(Tape& tape, const Tensor& A, const Tensor& U_in, const Tensor& W,
                 const Tensor& b, double dropout_rate, bool train_mode,
                 std::mt19937_64& rng);

/// Densely connected block: sub-layer l sees concat(U, out_1..out_{l-1});
/// block output is concat(out_1..out_L) * W_comb, an n x d matrix.
Tensor dense_gcn_block(Tape& tape, const TrackedParams& tracked,
                       const std::string& prefix, int sub_layers, const Tensor& A,
                       const Tensor& U, double dropout_rate, bool train_mode,
                       std::mt19937_64& rng);

struct RefinementStep {
  TapeMarginals structure;
  Tensor U;  // node matrix after this block
};

struct RefinementTrace {
  std::vector<RefinementStep> steps;
};

/// N rounds of induce-then-propagate. With `uniform_structure` set, A is
/// frozen to 1/n everywhere (the frozen-structure baseline) and root/logZ
/// are uniform placeholders.
RefinementTrace refine(Tape& tape, const TrackedParams& tracked, const Tensor& U0,
                       int blocks, int sub_layers, double dropout_rate,
                       bool train_mode, std::mt19937_64& rng,
                       bool uniform_structure = false);

/// Bilinear relation probabilities for an ordered entity pair: {1, k} of
/// sigmoid(e_i^T W_e[r] e_j + b_e[r]).
Tensor classify_pair(Tape& tape, const TrackedParams& tracked, const Tensor& U,
                     int row_i, int row_j, int k);

/// Mean multi-label binary cross-entropy; probabilities clamped to
/// [1e-7, 1 - 1e-7]. `targets` is a constant 0/1 tensor of probs' shape.
Tensor bce_loss(Tape& tape, const Tensor& probs, const Tensor& targets);

}  // namespace lsr
