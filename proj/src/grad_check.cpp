#include "lsr/grad_check.hpp"

#include <cmath>

namespace lsr {

GradCheckResult grad_check(const std::function<double(const ParamStore&)>& f,
                           ParamStore& params, const GradMap& tape_grads,
                           double eps) {
  GradCheckResult result;
  for (auto& [name, value] : params.items()) {
    auto git = tape_grads.find(name);
    if (git == tape_grads.end()) continue;
    const std::vector<double>& ad = git->second;
    for (std::size_t i = 0; i < value.numel(); ++i) {
      const double saved = value.data[i];
      value.data[i] = saved + eps;
      const double fp = f(params);
      value.data[i] = saved - eps;
      const double fm = f(params);
      value.data[i] = saved;
      const double fd = (fp - fm) / (2.0 * eps);
      // floor the denominator so coordinates with negligible gradients are
      // compared absolutely; below 1e-6 central differences are pure noise
      const double denom = std::max({1e-6, std::abs(fd), std::abs(ad[i])});
      const double rel = std::abs(fd - ad[i]) / denom;
      if (rel > result.max_rel_error) {
        result.max_rel_error = rel;
        result.worst_param = name;
        result.worst_index = i;
      }
    }
  }
  return result;
}

}  // namespace lsr
