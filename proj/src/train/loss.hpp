#pragma once

#include <vector>

#include "augment/augment.hpp"
#include "nn/tensor.hpp"

namespace echofilter::train {

// Output-plane roles within one group of 10.
enum PlaneRole {
    kPlaneEntrained = 0,
    kPlaneEntrainedOriginal = 1,
    kPlaneSeafloor = 2,
    kPlaneSeafloorAggressive = 3,
    kPlaneSurface = 4,
    kPlanePassive = 5,
    kPlaneBadPeriod = 6,
    kPlanePatch = 7,
    kPlanePatchOriginal = 8,
    kPlanePatchCrossed = 9,
    kPlanesPerGroup = 10,
};

struct LossBreakdown {
    double entrained = 0.0;  // both entrained planes
    double seafloor = 0.0;   // both seafloor planes
    double surface = 0.0;
    double passive = 0.0;
    double bad_period = 0.0;
    double patch = 0.0;      // all three patch planes
    double total = 0.0;
};

// log of the mean of exponentials, max-subtracted for stability.
double log_avg_exp(const float* values, int n);

// logits: (N, groups*10, W, H); targets: one TrainingView per sample.
// groups 1 = unconditional only; 3 = unconditional + downfacing + upfacing,
// in which case every term (and gradient) is halved to undo double counting.
// When grad_out is non-null it is filled with d(total)/d(logits).
LossBreakdown composite_loss(const nn::Tensor& logits,
                             const std::vector<const augment::TrainingView*>& targets,
                             int groups, nn::Tensor* grad_out = nullptr);

}  // namespace echofilter::train
