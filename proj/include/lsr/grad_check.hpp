#pragma once

#include <functional>
#include <string>

#include "lsr/params.hpp"

namespace lsr {

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_param;
  std::size_t worst_index = 0;
};

/// Compares tape gradients against central finite differences, coordinate by
/// coordinate. `f` must be a deterministic scalar function of the store.
/// Relative error uses |fd - ad| / max(1e-6, |fd|, |ad|); the floor keeps
/// finite-difference noise on negligible gradients from dominating.
GradCheckResult grad_check(const std::function<double(const ParamStore&)>& f,
                           ParamStore& params, const GradMap& tape_grads,
                           double eps = 1e-6);

}  // namespace lsr
