#include "lsr/params.hpp"

namespace lsr {

void ParamStore::add(const std::string& name, Tensor value) {
  if (index_.count(name)) throw NumericError("duplicate parameter name: " + name);
  index_[name] = items_.size();
  items_.emplace_back(name, std::move(value));
}

Tensor& ParamStore::at(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw NumericError("unknown parameter: " + name);
  return items_[it->second].second;
}

const Tensor& ParamStore::at(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw NumericError("unknown parameter: " + name);
  return items_[it->second].second;
}

bool ParamStore::contains(const std::string& name) const { return index_.count(name) > 0; }

const Tensor& TrackedParams::at(const std::string& name) const {
  auto it = leaves.find(name);
  if (it == leaves.end()) throw NumericError("parameter not tracked: " + name);
  return it->second;
}

TrackedParams track(Tape& tape, const ParamStore& params) {
  TrackedParams t;
  for (const auto& [name, value] : params.items()) {
    t.leaves.emplace(name, tape.leaf(value));
  }
  return t;
}

GradMap collect_grads(const Tape& tape, const TrackedParams& tracked) {
  GradMap g;
  for (const auto& [name, leaf] : tracked.leaves) {
    const std::vector<double>& raw = tape.grad(leaf.node);
    if (raw.empty()) {
      g[name] = std::vector<double>(leaf.numel(), 0.0);
    } else {
      g[name] = raw;
    }
  }
  return g;
}

void accumulate(GradMap& into, const GradMap& delta) {
  for (const auto& [name, g] : delta) {
    auto it = into.find(name);
    if (it == into.end()) {
      into[name] = g;
    } else {
      if (it->second.size() != g.size()) throw ShapeError("gradient size mismatch for " + name);
      for (std::size_t i = 0; i < g.size(); ++i) it->second[i] += g[i];
    }
  }
}

void scale(GradMap& grads, double factor) {
  for (auto& [name, g] : grads) {
    (void)name;
    for (double& v : g) v *= factor;
  }
}

}  // namespace lsr
