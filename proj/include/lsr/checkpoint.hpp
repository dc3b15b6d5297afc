#pragma once

#include <string>
#include <vector>

#include "lsr/model.hpp"

namespace lsr {

/// Serialized training state. Round-trips bit-exactly: tensor payloads are
/// raw little-endian float64.
struct Checkpoint {
  LsrModel model;
  int epoch = 0;
  double threshold = 0.5;
  std::vector<double> dev_f1_history;
};

/// Binary layout (version 1): magic "LSRCKPT1", a JSON header (config,
/// vocab, epoch, threshold, history, tensor names + shapes), then the
/// tensor payloads in header order.
void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace lsr
