#pragma once

#include <vector>

#include "lsr/tensor.hpp"

namespace lsr {

/// PA = LU with partial pivoting. `lu` packs L (unit diagonal, below) and U
/// (on and above the diagonal); `perm[i]` is the source row of row i;
/// `parity` is +1/-1 with the number of row swaps.
struct LuResult {
  Tensor lu;
  std::vector<int> perm;
  int parity = 1;
};

/// Throws SingularMatrix when a pivot falls below 1e-12 * max|A|.
LuResult lu_decompose(const Tensor& a);

struct InverseLogdet {
  Tensor inverse;
  double logdet = 0.0;
  int sign = 1;
};

/// Inverse and log|det| from one LU factorization.
InverseLogdet inverse_and_logdet(const Tensor& a);

/// Solves A x = b for a single right-hand side using precomputed factors.
std::vector<double> lu_solve(const LuResult& f, const std::vector<double>& b);

}  // namespace lsr
