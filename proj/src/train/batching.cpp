#include "train/batching.hpp"

#include <algorithm>
#include <cmath>

#include "support/errors.hpp"

namespace echofilter::train {

std::vector<std::vector<SampleRef>> make_epoch_batches(
    const std::vector<DatasetIndex>& datasets, int batch_size, std::mt19937_64& rng) {
    if (batch_size < 1) throw DomainError("batch size must be positive");
    if (datasets.empty()) throw DomainError("no datasets configured");

    std::vector<SampleRef> down, up;
    for (size_t d = 0; d < datasets.size(); ++d) {
        const auto& ds = datasets[d];
        if (ds.orientations.empty()) throw DomainError("empty dataset in batch configuration");
        if (ds.upsample < 1) throw DomainError("upsample factor must be >= 1");
        for (int rep = 0; rep < ds.upsample; ++rep) {
            for (size_t i = 0; i < ds.orientations.size(); ++i) {
                SampleRef s{static_cast<int>(d), static_cast<int>(i), ds.orientations[i]};
                (s.orientation == core::Orientation::kDownfacing ? down : up).push_back(s);
            }
        }
    }
    std::shuffle(down.begin(), down.end(), rng);
    std::shuffle(up.begin(), up.end(), rng);

    const size_t total = down.size() + up.size();
    const size_t n_batches = total / batch_size;
    std::vector<std::vector<SampleRef>> batches;
    batches.reserve(n_batches);
    size_t di = 0, ui = 0;
    for (size_t b = 0; b < n_batches; ++b) {
        // proportional allocation keeps every batch at the aggregate ratio
        const size_t down_upto =
            static_cast<size_t>(std::llround(static_cast<double>(down.size()) * (b + 1) *
                                             batch_size / static_cast<double>(total)));
        size_t take_down = std::min(down_upto - di, static_cast<size_t>(batch_size));
        take_down = std::min(take_down, down.size() - di);
        size_t take_up = batch_size - take_down;
        if (take_up > up.size() - ui) {
            take_up = up.size() - ui;
            take_down = batch_size - take_up;
        }
        std::vector<SampleRef> batch;
        batch.reserve(batch_size);
        for (size_t j = 0; j < take_down; ++j) batch.push_back(down[di++]);
        for (size_t j = 0; j < take_up; ++j) batch.push_back(up[ui++]);
        std::shuffle(batch.begin(), batch.end(), rng);
        batches.push_back(std::move(batch));
    }
    return batches;
}

}  // namespace echofilter::train
