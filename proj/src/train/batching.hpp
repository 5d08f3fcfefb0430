#pragma once

#include <random>
#include <vector>

#include "core/echogram.hpp"

namespace echofilter::train {

struct SampleRef {
    int dataset = 0;
    int index = 0;  // shard index within the dataset
    core::Orientation orientation = core::Orientation::kDownfacing;
};

struct DatasetIndex {
    std::vector<core::Orientation> orientations;  // one per shard
    int upsample = 1;  // occurrences per epoch
};

// Batches of `batch_size` with the aggregate downfacing/upfacing ratio
// preserved in every batch; a trailing partial batch is dropped.
std::vector<std::vector<SampleRef>> make_epoch_batches(
    const std::vector<DatasetIndex>& datasets, int batch_size, std::mt19937_64& rng);

}  // namespace echofilter::train
