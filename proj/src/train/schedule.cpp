#include "train/schedule.hpp"

#include <cmath>

#include "support/errors.hpp"

namespace echofilter::train {

SchedulePoint schedule_at(int64_t step, int64_t total_steps, int cycle,
                          const ScheduleConfig& cfg) {
    if (total_steps < 1) throw DomainError("schedule needs at least one step");
    if (step < 0 || step >= total_steps) throw DomainError("schedule step out of range");
    if (cycle < 0) throw DomainError("negative cycle index");

    const double max_lr = cfg.max_lr / std::pow(2.0, cycle);
    const double p = static_cast<double>(step) / static_cast<double>(total_steps);
    const double pi = 3.14159265358979323846;

    SchedulePoint out;
    if (p < cfg.warmup) {
        const double q = p / cfg.warmup;
        out.lr = max_lr * 0.5 * (1.0 - std::cos(pi * q));
        out.beta1 = cfg.beta1_min + (cfg.beta1_max - cfg.beta1_min) * 0.5 *
                                        (1.0 + std::cos(pi * q));
    } else if (p < cfg.warmup + cfg.hold) {
        out.lr = max_lr;
        out.beta1 = cfg.beta1_min;
    } else {
        const double q = (p - cfg.warmup - cfg.hold) / cfg.warmdown;
        out.lr = max_lr * 0.5 * (1.0 + std::cos(pi * q));
        out.beta1 = cfg.beta1_min + (cfg.beta1_max - cfg.beta1_min) * 0.5 *
                                        (1.0 - std::cos(pi * q));
    }
    return out;
}

}  // namespace echofilter::train
