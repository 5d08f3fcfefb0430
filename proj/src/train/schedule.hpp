#pragma once

#include <cstdint>

namespace echofilter::train {

struct SchedulePoint {
    double lr = 0.0;
    double beta1 = 0.98;
};

struct ScheduleConfig {
    double max_lr = 0.012;      // halved each cycle
    double beta1_max = 0.98;
    double beta1_min = 0.92;
    double warmup = 0.1;
    double hold = 0.4;
    double warmdown = 0.5;
};

// One-cycle cosine schedule: lr 0 -> max over the warmup fraction, flat over
// the hold fraction, -> 0 over the warmdown; beta1 mirrors between its max
// and min. Cycle c uses max_lr / 2^c.
SchedulePoint schedule_at(int64_t step, int64_t total_steps, int cycle,
                          const ScheduleConfig& cfg = {});

}  // namespace echofilter::train
