#pragma once

#include <vector>

#include "nn/tensor.hpp"

namespace echofilter::train {

struct OptimizerConfig {
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 1e-5;  // decoupled
    int lookahead_k = 6;
    double lookahead_alpha = 0.5;
};

// RAdam with gradient centralization on kernel tensors, decoupled weight
// decay, and Lookahead slow weights synchronized every k steps.
class RangerOptimizer {
  public:
    RangerOptimizer(std::vector<nn::ParamRef> params, OptimizerConfig cfg = {});

    // Applies one update from the gradients currently stored in the params.
    // Rejects the step (no state change) on any non-finite gradient.
    void step(double lr, double beta1);

    int64_t step_count() const { return t_; }

  private:
    std::vector<nn::ParamRef> params_;
    OptimizerConfig cfg_;
    std::vector<std::vector<float>> m_, v_, slow_;
    int64_t t_ = 0;
};

}  // namespace echofilter::train
