#include "train/optimizer.hpp"

#include <cmath>

#include "support/errors.hpp"

namespace echofilter::train {

RangerOptimizer::RangerOptimizer(std::vector<nn::ParamRef> params, OptimizerConfig cfg)
    : params_(std::move(params)), cfg_(cfg) {
    m_.reserve(params_.size());
    v_.reserve(params_.size());
    slow_.reserve(params_.size());
    for (const auto& p : params_) {
        m_.emplace_back(p.value->numel(), 0.0f);
        v_.emplace_back(p.value->numel(), 0.0f);
        slow_.push_back(p.value->data);
    }
}

void RangerOptimizer::step(double lr, double beta1) {
    for (const auto& p : params_)
        for (float g : p.grad->data)
            if (!std::isfinite(g))
                throw DomainError("non-finite gradient in " + p.path + "; step rejected");

    ++t_;
    const double b1 = beta1, b2 = cfg_.beta2;
    const double bias1 = 1.0 - std::pow(b1, static_cast<double>(t_));
    const double bias2 = 1.0 - std::pow(b2, static_cast<double>(t_));
    const double rho_inf = 2.0 / (1.0 - b2) - 1.0;
    const double b2t = std::pow(b2, static_cast<double>(t_));
    const double rho_t = rho_inf - 2.0 * t_ * b2t / bias2;

    double rect = 0.0;
    const bool rectified = rho_t > 4.0;
    if (rectified)
        rect = std::sqrt(((rho_t - 4.0) * (rho_t - 2.0) * rho_inf) /
                         ((rho_inf - 4.0) * (rho_inf - 2.0) * rho_t));

    for (size_t pi = 0; pi < params_.size(); ++pi) {
        auto& p = params_[pi];
        const size_t n = p.value->numel();
        float* w = p.value->ptr();
        const float* g_raw = p.grad->ptr();
        std::vector<float> g(g_raw, g_raw + n);

        // gradient centralization: per output channel (leading axis) mean removal
        if (p.is_kernel && p.value->shape.size() > 1) {
            const size_t per_out = n / p.value->shape[0];
            for (int o = 0; o < p.value->shape[0]; ++o) {
                double mean = 0.0;
                for (size_t j = 0; j < per_out; ++j) mean += g[o * per_out + j];
                mean /= static_cast<double>(per_out);
                for (size_t j = 0; j < per_out; ++j)
                    g[o * per_out + j] -= static_cast<float>(mean);
            }
        }

        float* m = m_[pi].data();
        float* v = v_[pi].data();
        for (size_t j = 0; j < n; ++j) {
            m[j] = static_cast<float>(b1 * m[j] + (1.0 - b1) * g[j]);
            v[j] = static_cast<float>(b2 * v[j] + (1.0 - b2) * g[j] * g[j]);
            const double m_hat = m[j] / bias1;
            double update;
            if (rectified) {
                const double v_hat = std::sqrt(v[j] / bias2);
                update = lr * rect * m_hat / (v_hat + cfg_.eps);
            } else {
                update = lr * m_hat;
            }
            w[j] = static_cast<float>(w[j] - update - lr * cfg_.weight_decay * w[j]);
        }

        if (cfg_.lookahead_k > 0 && t_ % cfg_.lookahead_k == 0) {
            float* s = slow_[pi].data();
            for (size_t j = 0; j < n; ++j) {
                s[j] = static_cast<float>(s[j] + cfg_.lookahead_alpha * (w[j] - s[j]));
                w[j] = s[j];
            }
        }
    }
}

}  // namespace echofilter::train
