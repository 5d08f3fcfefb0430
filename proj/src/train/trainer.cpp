#include "train/trainer.hpp"

#include <cmath>
#include <filesystem>
#include <ostream>

#include "nn/checkpoint.hpp"
#include "support/errors.hpp"

namespace echofilter::train {

TrainResult train(nn::UNet& model, const std::vector<TrainDataset>& datasets,
                  const TrainConfig& cfg, uint64_t seed, std::ostream* log) {
    if (datasets.empty()) throw DomainError("no training datasets");
    const int groups = model.config().groups;
    if (model.config().input_w != cfg.input_w || model.config().input_h != cfg.input_h)
        throw DomainError("model input size does not match training config");

    std::vector<DatasetIndex> index(datasets.size());
    for (size_t d = 0; d < datasets.size(); ++d) {
        index[d].upsample = datasets[d].upsample;
        for (const auto& v : datasets[d].views) index[d].orientations.push_back(v.orientation);
    }

    RangerOptimizer opt(model.params(), cfg.optimizer);
    std::mt19937_64 batch_rng(seed);
    std::mt19937_64 view_seed_rng(seed ^ 0x9e3779b97f4a7c15ull);

    TrainResult result;
    int64_t global_step = 0;
    for (int cycle = 0; cycle < cfg.cycles; ++cycle) {
        const int epochs = cfg.epochs << cycle;
        // pin the cycle length up front so the schedule has a fixed horizon
        std::mt19937_64 probe = batch_rng;
        const int64_t steps_per_epoch =
            static_cast<int64_t>(make_epoch_batches(index, cfg.batch_size, probe).size());
        if (steps_per_epoch == 0)
            throw DomainError("dataset smaller than one batch; reduce batch size");
        const int64_t cycle_steps = steps_per_epoch * epochs;

        int64_t cycle_step = 0;
        for (int epoch = 0; epoch < epochs; ++epoch) {
            auto batches = make_epoch_batches(index, cfg.batch_size, batch_rng);
            for (const auto& batch : batches) {
                if (cycle_step >= cycle_steps) break;
                const SchedulePoint sp = schedule_at(cycle_step, cycle_steps, cycle,
                                                     cfg.schedule);

                const int n = static_cast<int>(batch.size());
                nn::Tensor x({n, 1, cfg.input_w, cfg.input_h});
                std::vector<augment::TrainingView> views;
                views.reserve(n);
                for (int b = 0; b < n; ++b) {
                    const auto& src = datasets[batch[b].dataset].views[batch[b].index];
                    views.push_back(augment::build_training_view(
                        src, view_seed_rng(), cfg.augment, cfg.input_w, cfg.input_h));
                    std::copy(views.back().image.begin(), views.back().image.end(),
                              x.data.begin() +
                                  static_cast<size_t>(b) * cfg.input_w * cfg.input_h);
                }
                std::vector<const augment::TrainingView*> targets;
                for (const auto& v : views) targets.push_back(&v);

                nn::Tensor logits = model.forward(x, true);
                nn::Tensor dlogits;
                const LossBreakdown bd = composite_loss(logits, targets, groups, &dlogits);
                model.zero_grad();
                model.backward(dlogits);
                opt.step(sp.lr, sp.beta1);

                StepRecord rec{global_step, sp.lr, sp.beta1, bd};
                if (log) {
                    *log << "step=" << rec.step << " lr=" << sp.lr << " beta1=" << sp.beta1
                         << " entrained=" << bd.entrained << " seafloor=" << bd.seafloor
                         << " surface=" << bd.surface << " passive=" << bd.passive
                         << " bad_period=" << bd.bad_period << " patch=" << bd.patch
                         << " total=" << bd.total << "\n";
                }
                result.steps.push_back(rec);
                ++cycle_step;
                ++global_step;
            }
        }

        if (!cfg.checkpoint_dir.empty()) {
            std::filesystem::create_directories(cfg.checkpoint_dir);
            const std::string path =
                cfg.checkpoint_dir + "/cycle_" + std::to_string(cycle) + ".ckpt";
            nn::save_checkpoint(model, path);
            result.checkpoints.push_back(path);
        }
    }
    return result;
}

}  // namespace echofilter::train
