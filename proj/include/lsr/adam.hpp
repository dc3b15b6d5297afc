#pragma once

#include <map>
#include <string>
#include <vector>

#include "lsr/params.hpp"

namespace lsr {

/// Adam optimizer state: first/second moments per parameter plus the step
/// counter. Defaults follow the usual lr 0.001, beta1 0.9, beta2 0.999.
struct AdamState {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  long step = 0;
  std::map<std::string, std::vector<double>> m;
  std::map<std::string, std::vector<double>> v;
};

/// One bias-corrected Adam update, in place on the parameter store.
void adam_step(AdamState& state, ParamStore& params, const GradMap& grads);

}  // namespace lsr
