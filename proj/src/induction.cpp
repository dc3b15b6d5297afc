#include "lsr/induction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lsr/linalg.hpp"

namespace lsr {

void init_induction_params(ParamStore& params, const std::string& prefix, int d,
                           std::mt19937_64& rng) {
  const double s = 1.0 / std::sqrt(static_cast<double>(d));
  params.add(prefix + ".Wp", Tensor::uniform({d, d}, -s, s, rng));
  params.add(prefix + ".Wc", Tensor::uniform({d, d}, -s, s, rng));
  params.add(prefix + ".Wb", Tensor::uniform({d, d}, -s, s, rng));
  params.add(prefix + ".Wr", Tensor::uniform({1, d}, -s, s, rng));
}

namespace {

Tensor offdiag_mask(int n) {
  Tensor m = Tensor::full({n, n}, 1.0);
  for (int i = 0; i < n; ++i) m.at(i, i) = 0.0;
  return m;
}

}  // namespace

Tensor pair_scores(Tape& tape, const Tensor& U, const Tensor& Wp, const Tensor& Wc,
                   const Tensor& Wb) {
  Tensor X = tape.tanh(tape.matmul(U, tape.transpose(Wp)));
  Tensor Y = tape.tanh(tape.matmul(U, tape.transpose(Wc)));
  Tensor S = tape.matmul(tape.matmul(X, Wb), tape.transpose(Y));
  return tape.mul(S, offdiag_mask(U.shape[0]));
}

Tensor root_scores(Tape& tape, const Tensor& U, const Tensor& Wr) {
  return tape.col(tape.matmul(U, tape.transpose(Wr)), 0);
}

double stability_shift(const ScoreSet& scores) {
  double c = -std::numeric_limits<double>::infinity();
  for (double v : scores.s.data) c = std::max(c, v);
  for (double v : scores.s_root.data) c = std::max(c, v);
  return c;
}

Tensor edge_weights(const ScoreSet& scores) {
  const int n = scores.s.shape[0];
  const double c = stability_shift(scores);
  Tensor P = Tensor::zeros({n, n});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) P.at(i, j) = std::exp(scores.s.at(i, j) - c);
  return P;
}

std::pair<Tensor, Tensor> laplacian(const Tensor& P, const Tensor& root_weights) {
  const int n = P.shape[0];
  Tensor L = Tensor::zeros({n, n});
  for (int j = 0; j < n; ++j) {
    double colsum = 0.0;
    for (int i = 0; i < n; ++i) colsum += P.at(i, j);
    for (int i = 0; i < n; ++i) L.at(i, j) = i == j ? colsum : -P.at(i, j);
  }
  Tensor Lhat = L;
  for (int j = 0; j < n; ++j) Lhat.at(0, j) = root_weights[j];
  return {L, Lhat};
}

namespace {

StructureMarginals marginals_from_inverse(const Tensor& P, const Tensor& root_weights,
                                          const Tensor& Linv, double logdet) {
  const int n = P.shape[0];
  StructureMarginals m;
  m.A = Tensor::zeros({n, n});
  m.root = Tensor::zeros({n});
  m.log_z = logdet;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      double t1 = j == 0 ? 0.0 : P.at(i, j) * Linv.at(j, j);
      double t2 = i == 0 ? 0.0 : P.at(i, j) * Linv.at(j, i);
      m.A.at(i, j) = t1 - t2;
    }
  }
  for (int j = 0; j < n; ++j) m.root[j] = root_weights[j] * Linv.at(j, 0);
  return m;
}

}  // namespace

StructureMarginals marginals(const Tensor& P, const Tensor& root_weights) {
  auto [L, Lhat] = laplacian(P, root_weights);
  (void)L;
  try {
    InverseLogdet r = inverse_and_logdet(Lhat);
    return marginals_from_inverse(P, root_weights, r.inverse, r.logdet);
  } catch (const SingularMatrix&) {
    const int n = Lhat.shape[0];
    for (int i = 0; i < n; ++i) Lhat.at(i, i) += 1e-10;
    try {
      InverseLogdet r = inverse_and_logdet(Lhat);
      return marginals_from_inverse(P, root_weights, r.inverse, r.logdet);
    } catch (const SingularMatrix& e) {
      throw SingularStructure(std::string("singular root-augmented Laplacian: ") + e.what());
    }
  }
}

StructureMarginals induce(const ScoreSet& scores) {
  const int n = scores.s.shape[0];
  const double c = stability_shift(scores);
  Tensor P = edge_weights(scores);
  Tensor rw = Tensor::zeros({n});
  for (int j = 0; j < n; ++j) rw[j] = std::exp(scores.s_root[j] - c);
  StructureMarginals m = marginals(P, rw);
  m.log_z += n * c;
  return m;
}

StructureMarginals brute_force_marginals(const Tensor& P, const Tensor& root_weights) {
  const int n = P.shape[0];
  if (n > 8) throw NumericError("brute_force_marginals: n > 8 is too expensive");
  StructureMarginals m;
  m.A = Tensor::zeros({n, n});
  m.root = Tensor::zeros({n});
  double z = 0.0;
  Tensor edge_sum = Tensor::zeros({n, n});
  std::vector<double> root_sum(n, 0.0);

  std::vector<int> parent(n, -1);  // -1 marks the root
  for (int root = 0; root < n; ++root) {
    // enumerate parents of every non-root node
    std::vector<int> free_nodes;
    for (int j = 0; j < n; ++j)
      if (j != root) free_nodes.push_back(j);
    const int k = static_cast<int>(free_nodes.size());
    std::vector<int> choice(k, 0);  // index into candidate parents (all nodes != j)
    while (true) {
      std::fill(parent.begin(), parent.end(), -1);
      bool ok = true;
      for (int idx = 0; idx < k; ++idx) {
        int j = free_nodes[idx];
        int p = choice[idx];
        if (p >= j) ++p;  // skip self
        parent[j] = p;
      }
      // acyclicity: every node must reach the root following parents
      for (int j = 0; j < n && ok; ++j) {
        int cur = j, steps = 0;
        while (cur != root) {
          cur = parent[cur];
          if (++steps > n) {
            ok = false;
            break;
          }
        }
      }
      if (ok) {
        double w = root_weights[root];
        for (int j = 0; j < n; ++j)
          if (j != root) w *= P.at(parent[j], j);
        z += w;
        root_sum[root] += w;
        for (int j = 0; j < n; ++j)
          if (j != root) edge_sum.at(parent[j], j) += w;
      }
      // odometer over choices
      int pos = k - 1;
      while (pos >= 0) {
        if (++choice[pos] < n - 1) break;
        choice[pos] = 0;
        --pos;
      }
      if (pos < 0) break;
    }
  }
  if (z <= 0.0) throw NumericError("brute_force_marginals: zero partition function");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m.A.at(i, j) = edge_sum.at(i, j) / z;
  for (int j = 0; j < n; ++j) m.root[j] = root_sum[j] / z;
  m.log_z = std::log(z);
  return m;
}

TapeMarginals marginals_on_tape(Tape& tape, const Tensor& s, const Tensor& s_root) {
  const int n = s.shape[0];
  // the shift is treated as a constant; marginals are shift-invariant and
  // the gradient of logZ is unaffected
  double c = -std::numeric_limits<double>::infinity();
  for (double v : s.data) c = std::max(c, v);
  for (double v : s_root.data) c = std::max(c, v);

  Tensor P = tape.mul(tape.exp(tape.add(s, Tensor::full({n, n}, -c))), offdiag_mask(n));
  Tensor rw = tape.exp(tape.add(s_root, Tensor::full({n}, -c)));

  Tensor L = tape.sub(tape.diag_embed(tape.col_sums(P)), P);
  Tensor Lhat = n == 1 ? tape.stack_rows({rw})
                       : tape.stack_rows({rw, tape.slice_rows(L, 1, n)});

  Tensor Linv, logz_shifted;
  try {
    Linv = tape.inverse(Lhat);
    logz_shifted = tape.logdet(Lhat);
  } catch (const SingularMatrix&) {
    Tensor jitter = Tensor::zeros({n, n});
    for (int i = 0; i < n; ++i) jitter.at(i, i) = 1e-10;
    Tensor Lhat2 = tape.add(Lhat, jitter);
    try {
      Linv = tape.inverse(Lhat2);
      logz_shifted = tape.logdet(Lhat2);
    } catch (const SingularMatrix& e) {
      throw SingularStructure(std::string("singular root-augmented Laplacian: ") + e.what());
    }
  }

  Tensor col0_mask = Tensor::full({n, n}, 1.0);
  for (int i = 0; i < n; ++i) col0_mask.at(i, 0) = 0.0;
  Tensor row0_mask = Tensor::full({n, n}, 1.0);
  for (int j = 0; j < n; ++j) row0_mask.at(0, j) = 0.0;

  Tensor term1 = tape.mul(tape.mul_rowvec(P, tape.diagonal_of(Linv)), col0_mask);
  Tensor term2 = tape.mul(tape.mul(P, tape.transpose(Linv)), row0_mask);

  TapeMarginals out;
  out.A = tape.sub(term1, term2);
  out.root = tape.mul(rw, tape.col(Linv, 0));
  out.log_z = tape.add(logz_shifted, Tensor::scalar(n * c));
  return out;
}

}  // namespace lsr
