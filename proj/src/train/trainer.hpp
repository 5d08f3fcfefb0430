#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "augment/augment.hpp"
#include "nn/unet.hpp"
#include "train/batching.hpp"
#include "train/loss.hpp"
#include "train/optimizer.hpp"
#include "train/schedule.hpp"

namespace echofilter::train {

struct TrainConfig {
    int batch_size = 12;
    int epochs = 100;      // first cycle; doubled each subsequent cycle
    int cycles = 1;
    ScheduleConfig schedule;
    OptimizerConfig optimizer;
    bool augment = true;
    int input_w = 128;
    int input_h = 512;
    std::string checkpoint_dir;  // empty = no checkpoints
};

struct TrainDataset {
    std::string name;
    std::vector<augment::View> views;  // one source view per shard
    int upsample = 1;
};

struct StepRecord {
    int64_t step = 0;
    double lr = 0.0;
    double beta1 = 0.0;
    LossBreakdown loss;
};

struct TrainResult {
    std::vector<StepRecord> steps;
    std::vector<std::string> checkpoints;  // one per cycle
};

// Full cyclic training loop. Deterministic in (model seed, seed, config,
// data). Writes one log line per step to `log` when non-null.
TrainResult train(nn::UNet& model, const std::vector<TrainDataset>& datasets,
                  const TrainConfig& cfg, uint64_t seed, std::ostream* log = nullptr);

}  // namespace echofilter::train
