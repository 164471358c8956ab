#pragma once

#include <vector>

#include "spurprobe/mlp.hpp"

namespace spurprobe {

struct AdamWConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.01;
};

// Decoupled weight decay: p <- p - lr*mhat/(sqrt(vhat)+eps) - lr*wd*p.
class AdamW {
 public:
  AdamW(const AdamWConfig& cfg, const std::vector<const Matrix*>& params);

  // Returns false and leaves parameters and moments untouched when any
  // gradient entry is non-finite (the step is skipped, not aborted).
  bool step(const std::vector<Matrix*>& params, const std::vector<const Matrix*>& grads);

  long step_count() const { return step_; }
  long skipped() const { return skipped_; }

 private:
  AdamWConfig cfg_;
  long step_ = 0;
  long skipped_ = 0;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
};

}  // namespace spurprobe
