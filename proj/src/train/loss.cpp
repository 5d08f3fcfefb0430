#include "train/loss.hpp"

#include <cmath>
#include <iostream>

#include "support/errors.hpp"

namespace echofilter::train {

namespace {

double stable_bce(double logit, double y) {
    // softplus(logit) - y*logit without overflow
    return std::max(logit, 0.0) - y * logit + std::log1p(std::exp(-std::abs(logit)));
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

double log_avg_exp(const float* values, int n) {
    if (n < 1) throw DomainError("log_avg_exp of empty input");
    float m = values[0];
    for (int i = 1; i < n; ++i) m = std::max(m, values[i]);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += std::exp(static_cast<double>(values[i]) - m);
    return m + std::log(acc / n);
}

LossBreakdown composite_loss(const nn::Tensor& logits,
                             const std::vector<const augment::TrainingView*>& targets,
                             int groups, nn::Tensor* grad_out) {
    if (logits.shape.size() != 4) throw DomainError("logits must be 4-D");
    const int N = logits.shape[0];
    const int C = logits.shape[1];
    const int W = logits.shape[2];
    const int H = logits.shape[3];
    if (C != groups * kPlanesPerGroup) throw DomainError("plane count does not match groups");
    if (static_cast<int>(targets.size()) != N) throw DomainError("batch/target size mismatch");
    for (const auto* t : targets)
        if (t->n_pings != W || t->n_bins != H)
            throw DomainError("target grid does not match logits");

    if (grad_out) {
        grad_out->shape = logits.shape;
        grad_out->data.assign(logits.numel(), 0.0f);
    }
    const double scale = groups == 3 ? 0.5 : 1.0;

    auto in_group = [&](int g, int n) {
        if (g == 0) return true;
        const bool down = targets[n]->orientation == core::Orientation::kDownfacing;
        return g == 1 ? down : !down;
    };
    auto plane_ptr = [&](const nn::Tensor& t, int n, int c) {
        return t.data.data() + ((static_cast<size_t>(n) * C + c) * W) * H;
    };
    auto plane_ptr_mut = [&](nn::Tensor& t, int n, int c) {
        return t.data.data() + ((static_cast<size_t>(n) * C + c) * W) * H;
    };

    LossBreakdown bd;
    std::vector<double> probs(H);

    auto line_term = [&](int role, int line_slot, bool skip_anomalous) {
        double term = 0.0;
        for (int g = 0; g < groups; ++g) {
            int n_samples = 0;
            for (int n = 0; n < N; ++n)
                if (in_group(g, n)) ++n_samples;
            if (n_samples == 0) continue;
            const int c = g * kPlanesPerGroup + role;
            double group_acc = 0.0;
            for (int n = 0; n < N; ++n) {
                if (!in_group(g, n)) continue;
                const auto& tv = *targets[n];
                const float* plane = plane_ptr(logits, n, c);
                // count contributing pings first so the gradient scale is known
                int n_pings = 0;
                for (int w = 0; w < W; ++w) {
                    if (tv.line_bins[line_slot][w] < 0) continue;
                    if (skip_anomalous && tv.surface_anomalous[w]) continue;
                    ++n_pings;
                }
                if (n_pings == 0) {
                    std::cerr << "warning: all pings masked for line plane " << c
                              << " in sample " << n << "\n";
                    continue;
                }
                double sample_acc = 0.0;
                for (int w = 0; w < W; ++w) {
                    const int t = tv.line_bins[line_slot][w];
                    if (t < 0) continue;
                    if (skip_anomalous && tv.surface_anomalous[w]) continue;
                    const float* col = plane + static_cast<size_t>(w) * H;
                    float m = col[0];
                    for (int h = 1; h < H; ++h) m = std::max(m, col[h]);
                    double z = 0.0;
                    for (int h = 0; h < H; ++h) {
                        probs[h] = std::exp(static_cast<double>(col[h]) - m);
                        z += probs[h];
                    }
                    sample_acc += std::log(z) + m - col[t];
                    if (grad_out) {
                        float* gcol = plane_ptr_mut(*grad_out, n, c) +
                                      static_cast<size_t>(w) * H;
                        const double gs = scale / (static_cast<double>(n_pings) * n_samples);
                        for (int h = 0; h < H; ++h)
                            gcol[h] += static_cast<float>((probs[h] / z - (h == t)) * gs);
                    }
                }
                group_acc += sample_acc / n_pings;
            }
            term += group_acc / n_samples;
        }
        return term * scale;
    };

    bd.entrained = line_term(kPlaneEntrained, augment::kEntrained, false) +
                   line_term(kPlaneEntrainedOriginal, augment::kEntrainedOriginal, false);
    bd.seafloor = line_term(kPlaneSeafloor, augment::kSeafloor, false) +
                  line_term(kPlaneSeafloorAggressive, augment::kSeafloorAggressive, false);
    bd.surface = line_term(kPlaneSurface, augment::kSurface, true);

    auto period_term = [&](int role, auto flag_of) {
        double term = 0.0;
        for (int g = 0; g < groups; ++g) {
            int n_samples = 0;
            for (int n = 0; n < N; ++n)
                if (in_group(g, n)) ++n_samples;
            if (n_samples == 0) continue;
            const int c = g * kPlanesPerGroup + role;
            double group_acc = 0.0;
            for (int n = 0; n < N; ++n) {
                if (!in_group(g, n)) continue;
                const auto& tv = *targets[n];
                const float* plane = plane_ptr(logits, n, c);
                double sample_acc = 0.0;
                for (int w = 0; w < W; ++w) {
                    const float* col = plane + static_cast<size_t>(w) * H;
                    const double lae = log_avg_exp(col, H);
                    const double y = flag_of(tv, w) ? 1.0 : 0.0;
                    sample_acc += stable_bce(lae, y);
                    if (grad_out) {
                        // d(lae)/d(col[h]) = softmax(col)[h]
                        float m = col[0];
                        for (int h = 1; h < H; ++h) m = std::max(m, col[h]);
                        double z = 0.0;
                        for (int h = 0; h < H; ++h) {
                            probs[h] = std::exp(static_cast<double>(col[h]) - m);
                            z += probs[h];
                        }
                        const double dl = (sigmoid(lae) - y) * scale /
                                          (static_cast<double>(W) * n_samples);
                        float* gcol = plane_ptr_mut(*grad_out, n, c) +
                                      static_cast<size_t>(w) * H;
                        for (int h = 0; h < H; ++h)
                            gcol[h] += static_cast<float>(dl * probs[h] / z);
                    }
                }
                group_acc += sample_acc / W;
            }
            term += group_acc / n_samples;
        }
        return term * scale;
    };

    bd.passive = period_term(
        kPlanePassive, [](const augment::TrainingView& tv, int w) { return tv.passive[w] != 0; });
    bd.bad_period = period_term(kPlaneBadPeriod, [](const augment::TrainingView& tv, int w) {
        return tv.bad_period[w] != 0;
    });

    auto patch_term = [&](int role) {
        double term = 0.0;
        for (int g = 0; g < groups; ++g) {
            int n_samples = 0;
            for (int n = 0; n < N; ++n)
                if (in_group(g, n)) ++n_samples;
            if (n_samples == 0) continue;
            const int c = g * kPlanesPerGroup + role;
            double group_acc = 0.0;
            for (int n = 0; n < N; ++n) {
                if (!in_group(g, n)) continue;
                const auto& tv = *targets[n];
                const float* plane = plane_ptr(logits, n, c);
                double sample_acc = 0.0;
                const size_t n_px = static_cast<size_t>(W) * H;
                for (size_t px = 0; px < n_px; ++px) {
                    const double y = tv.patch[px] ? 1.0 : 0.0;
                    sample_acc += stable_bce(plane[px], y);
                    if (grad_out) {
                        float* gp = plane_ptr_mut(*grad_out, n, c);
                        gp[px] += static_cast<float>((sigmoid(plane[px]) - y) * scale /
                                                     (static_cast<double>(n_px) * n_samples));
                    }
                }
                group_acc += sample_acc / static_cast<double>(n_px);
            }
            term += group_acc / n_samples;
        }
        return term * scale;
    };

    bd.patch = patch_term(kPlanePatch) + patch_term(kPlanePatchOriginal) +
               patch_term(kPlanePatchCrossed);

    bd.total = bd.entrained + bd.seafloor + bd.surface + bd.passive + bd.bad_period + bd.patch;
    return bd;
}

}  // namespace echofilter::train
