#pragma once

#include <map>
#include <string>
#include <vector>

#include "lsr/tensor.hpp"

namespace lsr {

/// Ordered, named collection of trainable tensors. Order is insertion order
/// so iteration (and serialization) is deterministic.
class ParamStore {
 public:
  void add(const std::string& name, Tensor value);
  Tensor& at(const std::string& name);
  const Tensor& at(const std::string& name) const;
  bool contains(const std::string& name) const;

  std::vector<std::pair<std::string, Tensor>>& items() { return items_; }
  const std::vector<std::pair<std::string, Tensor>>& items() const { return items_; }
  std::size_t size() const { return items_.size(); }

 private:
  std::vector<std::pair<std::string, Tensor>> items_;
  std::map<std::string, std::size_t> index_;
};

/// Parameters registered as leaves on one tape for a single forward pass.
struct TrackedParams {
  std::map<std::string, Tensor> leaves;

  const Tensor& at(const std::string& name) const;
};

using GradMap = std::map<std::string, std::vector<double>>;

TrackedParams track(Tape& tape, const ParamStore& params);

/// Reads per-parameter gradients after tape.backward(); missing entries
/// come back as zeros.
GradMap collect_grads(const Tape& tape, const TrackedParams& tracked);

void accumulate(GradMap& into, const GradMap& delta);
void scale(GradMap& grads, double factor);

}  // namespace lsr
