#pragma once

#include <random>

#include "lsr/params.hpp"
#include "lsr/tensor.hpp"

namespace lsr {

struct SingularStructure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Pairwise and root attention scores for one refinement block.
struct ScoreSet {
  Tensor s;       // n x n, diagonal masked to zero
  Tensor s_root;  // n
};

/// Induced arborescence distribution: edge marginals A (A[i][j] is the
/// probability that node i is the parent of node j), root marginals, and
/// the log partition function.
struct StructureMarginals {
  Tensor A;       // n x n, zero diagonal
  Tensor root;    // n
  double log_z = 0.0;
};

/// Registers W_p, W_c, W_b (d x d) and W_r (1 x d) under the given prefix.
void init_induction_params(ParamStore& params, const std::string& prefix, int d,
                           std::mt19937_64& rng);

/// s_ij = tanh(W_p u_i)^T W_b tanh(W_c u_j), diagonal masked.
Tensor pair_scores(Tape& tape, const Tensor& U, const Tensor& Wp, const Tensor& Wc,
                   const Tensor& Wb);

/// s_i^r = W_r u_i.
Tensor root_scores(Tape& tape, const Tensor& U, const Tensor& Wr);

/// Largest entry over s and s_root; subtracted before exponentiation.
/// Marginals are shift-invariant, so the result is exact.
double stability_shift(const ScoreSet& scores);

/// P_ij = exp(s_ij - c) off the diagonal, zero on it.
Tensor edge_weights(const ScoreSet& scores);

/// (L, L-hat): L has column sums on the diagonal and -P off it; L-hat
/// replaces the first row with the root weights exp(s_j^r - c).
std::pair<Tensor, Tensor> laplacian(const Tensor& P, const Tensor& root_weights);

/// Matrix-Tree marginals from nonnegative edge/root weights. log_z here is
/// log det(L-hat) of the given (possibly shifted) weights.
StructureMarginals marginals(const Tensor& P, const Tensor& root_weights);

/// Convenience wrapper: shift, exponentiate, compute marginals, and undo
/// the shift in log_z (adds n * c).
StructureMarginals induce(const ScoreSet& scores);

/// Enumeration oracle over all rooted spanning arborescences (n <= 8).
StructureMarginals brute_force_marginals(const Tensor& P, const Tensor& root_weights);

/// Tape-recorded marginals for training: differentiable A, root, and logZ
/// (shift-corrected). A singular L-hat is retried once with 1e-10 diagonal
/// jitter, then raises SingularStructure.
struct TapeMarginals {
  Tensor A;
  Tensor root;
  Tensor log_z;  // scalar
};
TapeMarginals marginals_on_tape(Tape& tape, const Tensor& s, const Tensor& s_root);

}  // namespace lsr
