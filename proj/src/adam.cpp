#include "lsr/adam.hpp"

#include <cmath>

namespace lsr {

void adam_step(AdamState& state, ParamStore& params, const GradMap& grads) {
  ++state.step;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (auto& [name, value] : params.items()) {
    auto git = grads.find(name);
    if (git == grads.end()) continue;
    const std::vector<double>& g = git->second;
    if (g.size() != value.numel()) {
      throw ShapeError("adam_step: gradient size mismatch for " + name);
    }
    auto& m = state.m[name];
    auto& v = state.v[name];
    if (m.empty()) m.assign(g.size(), 0.0);
    if (v.empty()) v.assign(g.size(), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      value.data[i] -= state.learning_rate * mhat / (std::sqrt(vhat) + state.epsilon);
    }
  }
}

}  // namespace lsr
