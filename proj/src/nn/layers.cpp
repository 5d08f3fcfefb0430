#include "nn/layers.hpp"

#include <algorithm>
#include <cmath>

#include "support/errors.hpp"

namespace echofilter::nn {

namespace {

void check_4d(const Tensor& x) {
    if (x.shape.size() != 4) throw DomainError("expected a 4-D (N,C,W,H) tensor");
}

}  // namespace

void init_uniform(Tensor& t, int fan_in, Rng& rng) {
    const float bound = std::sqrt(1.0f / static_cast<float>(std::max(1, fan_in)));
    std::uniform_real_distribution<float> dist(-bound, bound);
    for (auto& v : t.data) v = dist(rng);
}

// ---------------------------------------------------------------- PointwiseConv

PointwiseConv::PointwiseConv(int in_ch, int out_ch, bool bias, Rng& rng)
    : weight({out_ch, in_ch}), grad_weight({out_ch, in_ch}), in_ch_(in_ch), out_ch_(out_ch),
      has_bias_(bias) {
    init_uniform(weight, in_ch, rng);
    if (bias) {
        this->bias = Tensor({out_ch});
        grad_bias = Tensor({out_ch});
        init_uniform(this->bias, in_ch, rng);
    }
}

Tensor PointwiseConv::forward(const Tensor& x) {
    check_4d(x);
    const int n = x.dim(0), w = x.dim(2), h = x.dim(3);
    const int hw = w * h;
    x_cache_ = x;
    Tensor y({n, out_ch_, w, h});
    for (int i = 0; i < n; ++i) {
        gemm(false, false, out_ch_, hw, in_ch_, 1.0f, weight.ptr(),
             x.ptr() + static_cast<size_t>(i) * in_ch_ * hw, 0.0f,
             y.ptr() + static_cast<size_t>(i) * out_ch_ * hw);
    }
    if (has_bias_) {
        for (int i = 0; i < n; ++i)
            for (int c = 0; c < out_ch_; ++c) {
                float* row = y.ptr() + (static_cast<size_t>(i) * out_ch_ + c) * hw;
                const float b = bias.data[c];
                for (int j = 0; j < hw; ++j) row[j] += b;
            }
    }
    return y;
}

Tensor PointwiseConv::backward(const Tensor& dy) {
    const int n = dy.dim(0), w = dy.dim(2), h = dy.dim(3);
    const int hw = w * h;
    Tensor dx({n, in_ch_, w, h});
    for (int i = 0; i < n; ++i) {
        const float* dy_i = dy.ptr() + static_cast<size_t>(i) * out_ch_ * hw;
        const float* x_i = x_cache_.ptr() + static_cast<size_t>(i) * in_ch_ * hw;
        gemm(false, true, out_ch_, in_ch_, hw, 1.0f, dy_i, x_i, 1.0f, grad_weight.ptr());
        gemm(true, false, in_ch_, hw, out_ch_, 1.0f, weight.ptr(), dy_i, 0.0f,
             dx.ptr() + static_cast<size_t>(i) * in_ch_ * hw);
    }
    if (has_bias_) {
        for (int i = 0; i < n; ++i)
            for (int c = 0; c < out_ch_; ++c) {
                const float* row = dy.ptr() + (static_cast<size_t>(i) * out_ch_ + c) * hw;
                float acc = 0.0f;
                for (int j = 0; j < hw; ++j) acc += row[j];
                grad_bias.data[c] += acc;
            }
    }
    return dx;
}

void PointwiseConv::collect_params(std::vector<ParamRef>& out, const std::string& prefix) {
    out.push_back({prefix + ".weight", &weight, &grad_weight, true});
    if (has_bias_) out.push_back({prefix + ".bias", &bias, &grad_bias, false});
}

// --------------------------------------------------------------------- Conv2d

Conv2d::Conv2d(int in_ch, int out_ch, int kernel, Rng& rng)
    : weight({out_ch, in_ch, kernel, kernel}), grad_weight({out_ch, in_ch, kernel, kernel}),
      in_ch_(in_ch), out_ch_(out_ch), k_(kernel) {
    init_uniform(weight, in_ch * kernel * kernel, rng);
}

Tensor Conv2d::forward(const Tensor& x) {
    check_4d(x);
    const int n = x.dim(0), w = x.dim(2), h = x.dim(3);
    const int pad = k_ / 2;
    x_cache_ = x;
    Tensor y({n, out_ch_, w, h});
    for (int i = 0; i < n; ++i) {
        for (int co = 0; co < out_ch_; ++co) {
            float* yrow = y.ptr() + (static_cast<size_t>(i) * out_ch_ + co) * w * h;
            for (int ci = 0; ci < in_ch_; ++ci) {
                const float* xrow = x.ptr() + (static_cast<size_t>(i) * in_ch_ + ci) * w * h;
                const float* krow = weight.ptr() + ((static_cast<size_t>(co) * in_ch_ + ci)) * k_ * k_;
                for (int u = 0; u < k_; ++u) {
                    for (int v = 0; v < k_; ++v) {
                        const float kv = krow[u * k_ + v];
                        const int dw = u - pad, dh = v - pad;
                        const int w0 = std::max(0, -dw), w1 = std::min(w, w - dw);
                        const int h0 = std::max(0, -dh), h1 = std::min(h, h - dh);
                        for (int iw = w0; iw < w1; ++iw) {
                            const float* src = xrow + (iw + dw) * h + dh;
                            float* dst = yrow + iw * h;
                            for (int ih = h0; ih < h1; ++ih) dst[ih] += kv * src[ih];
                        }
                    }
                }
            }
        }
    }
    return y;
}

Tensor Conv2d::backward(const Tensor& dy) {
    const int n = dy.dim(0), w = dy.dim(2), h = dy.dim(3);
    const int pad = k_ / 2;
    Tensor dx({n, in_ch_, w, h});
    for (int i = 0; i < n; ++i) {
        for (int co = 0; co < out_ch_; ++co) {
            const float* dyrow = dy.ptr() + (static_cast<size_t>(i) * out_ch_ + co) * w * h;
            for (int ci = 0; ci < in_ch_; ++ci) {
                const float* xrow =
                    x_cache_.ptr() + (static_cast<size_t>(i) * in_ch_ + ci) * w * h;
                float* dxrow = dx.ptr() + (static_cast<size_t>(i) * in_ch_ + ci) * w * h;
                float* gk = grad_weight.ptr() + ((static_cast<size_t>(co) * in_ch_ + ci)) * k_ * k_;
                const float* kk = weight.ptr() + ((static_cast<size_t>(co) * in_ch_ + ci)) * k_ * k_;
                for (int u = 0; u < k_; ++u) {
                    for (int v = 0; v < k_; ++v) {
                        const int dw = u - pad, dh = v - pad;
                        const int w0 = std::max(0, -dw), w1 = std::min(w, w - dw);
                        const int h0 = std::max(0, -dh), h1 = std::min(h, h - dh);
                        float gacc = 0.0f;
                        const float kv = kk[u * k_ + v];
                        for (int iw = w0; iw < w1; ++iw) {
                            const float* xs = xrow + (iw + dw) * h + dh;
                            float* dxs = dxrow + (iw + dw) * h + dh;
                            const float* dys = dyrow + iw * h;
                            for (int ih = h0; ih < h1; ++ih) {
                                gacc += dys[ih] * xs[ih];
                                dxs[ih] += dys[ih] * kv;
                            }
                        }
                        gk[u * k_ + v] += gacc;
                    }
                }
            }
        }
    }
    return dx;
}

void Conv2d::collect_params(std::vector<ParamRef>& out, const std::string& prefix) {
    out.push_back({prefix + ".weight", &weight, &grad_weight, true});
}

// -------------------------------------------------------------- DepthwiseConv

DepthwiseConv::DepthwiseConv(int channels, int kernel, Rng& rng)
    : weight({channels, kernel, kernel}), grad_weight({channels, kernel, kernel}),
      channels_(channels), k_(kernel) {
    init_uniform(weight, kernel * kernel, rng);
}

Tensor DepthwiseConv::forward(const Tensor& x) {
    check_4d(x);
    const int n = x.dim(0), w = x.dim(2), h = x.dim(3);
    const int pad = k_ / 2;
    x_cache_ = x;
    Tensor y({n, channels_, w, h});
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c < channels_; ++c) {
            const float* xrow = x.ptr() + (static_cast<size_t>(i) * channels_ + c) * w * h;
            float* yrow = y.ptr() + (static_cast<size_t>(i) * channels_ + c) * w * h;
            const float* krow = weight.ptr() + static_cast<size_t>(c) * k_ * k_;
            for (int u = 0; u < k_; ++u) {
                for (int v = 0; v < k_; ++v) {
                    const float kv = krow[u * k_ + v];
                    const int dw = u - pad, dh = v - pad;
                    const int w0 = std::max(0, -dw), w1 = std::min(w, w - dw);
                    const int h0 = std::max(0, -dh), h1 = std::min(h, h - dh);
                    for (int iw = w0; iw < w1; ++iw) {
                        const float* src = xrow + (iw + dw) * h + dh;
                        float* dst = yrow + iw * h;
                        for (int ih = h0; ih < h1; ++ih) dst[ih] += kv * src[ih];
                    }
                }
            }
        }
    }
    return y;
}

Tensor DepthwiseConv::backward(const Tensor& dy) {
    const int n = dy.dim(0), w = dy.dim(2), h = dy.dim(3);
    const int pad = k_ / 2;
    Tensor dx({n, channels_, w, h});
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c < channels_; ++c) {
            const float* xrow = x_cache_.ptr() + (static_cast<size_t>(i) * channels_ + c) * w * h;
            const float* dyrow = dy.ptr() + (static_cast<size_t>(i) * channels_ + c) * w * h;
            float* dxrow = dx.ptr() + (static_cast<size_t>(i) * channels_ + c) * w * h;
            float* gk = grad_weight.ptr() + static_cast<size_t>(c) * k_ * k_;
            const float* kk = weight.ptr() + static_cast<size_t>(c) * k_ * k_;
            for (int u = 0; u < k_; ++u) {
                for (int v = 0; v < k_; ++v) {
                    const int dw = u - pad, dh = v - pad;
                    const int w0 = std::max(0, -dw), w1 = std::min(w, w - dw);
                    const int h0 = std::max(0, -dh), h1 = std::min(h, h - dh);
                    float gacc = 0.0f;
                    const float kv = kk[u * k_ + v];
                    for (int iw = w0; iw < w1; ++iw) {
                        const float* xs = xrow + (iw + dw) * h + dh;
                        float* dxs = dxrow + (iw + dw) * h + dh;
                        const float* dys = dyrow + iw * h;
                        for (int ih = h0; ih < h1; ++ih) {
                            gacc += dys[ih] * xs[ih];
                            dxs[ih] += dys[ih] * kv;
                        }
                    }
                    gk[u * k_ + v] += gacc;
                }
            }
        }
    }
    return dx;
}

void DepthwiseConv::collect_params(std::vector<ParamRef>& out, const std::string& prefix) {
    out.push_back({prefix + ".weight", &weight, &grad_weight, true});
}

// ---------------------------------------------------------------- BatchNorm2d

BatchNorm2d::BatchNorm2d(int channels)
    : gamma({channels}), beta({channels}), grad_gamma({channels}), grad_beta({channels}),
      running_mean({channels}), running_var({channels}), channels_(channels) {
    std::fill(gamma.data.begin(), gamma.data.end(), 1.0f);
    std::fill(running_var.data.begin(), running_var.data.end(), 1.0f);
}

Tensor BatchNorm2d::forward(const Tensor& x, bool training) {
    check_4d(x);
    const int n = x.dim(0), w = x.dim(2), h = x.dim(3);
    const size_t hw = static_cast<size_t>(w) * h;
    const size_t m = static_cast<size_t>(n) * hw;
    Tensor y(x.shape);
    xhat_cache_ = Tensor(x.shape);
    inv_std_cache_.assign(channels_, 0.0f);
    trained_forward_ = training;
    for (int c = 0; c < channels_; ++c) {
        float mean, var;
        if (training) {
            double sum = 0.0, sq = 0.0;
            for (int i = 0; i < n; ++i) {
                const float* row = x.ptr() + (static_cast<size_t>(i) * channels_ + c) * hw;
                for (size_t j = 0; j < hw; ++j) {
                    sum += row[j];
                    sq += static_cast<double>(row[j]) * row[j];
                }
            }
            mean = static_cast<float>(sum / static_cast<double>(m));
            var = static_cast<float>(sq / static_cast<double>(m) - static_cast<double>(mean) * mean);
            var = std::max(var, 0.0f);
            running_mean.data[c] = (1.0f - kMomentum) * running_mean.data[c] + kMomentum * mean;
            running_var.data[c] = (1.0f - kMomentum) * running_var.data[c] + kMomentum * var;
        } else {
            mean = running_mean.data[c];
            var = running_var.data[c];
        }
        const float inv_std = 1.0f / std::sqrt(var + kEps);
        inv_std_cache_[c] = inv_std;
        const float g = gamma.data[c], b = beta.data[c];
        for (int i = 0; i < n; ++i) {
            const float* row = x.ptr() + (static_cast<size_t>(i) * channels_ + c) * hw;
            float* xh = xhat_cache_.ptr() + (static_cast<size_t>(i) * channels_ + c) * hw;
            float* yrow = y.ptr() + (static_cast<size_t>(i) * channels_ + c) * hw;
            for (size_t j = 0; j < hw; ++j) {
                xh[j] = (row[j] - mean) * inv_std;
                yrow[j] = g * xh[j] + b;
            }
        }
    }
    return y;
}

Tensor BatchNorm2d::backward(const Tensor& dy) {
    const int n = dy.dim(0), w = dy.dim(2), h = dy.dim(3);
    const size_t hw = static_cast<size_t>(w) * h;
    const double m = static_cast<double>(n) * hw;
    Tensor dx(dy.shape);
    for (int c = 0; c < channels_; ++c) {
        double sum_dy = 0.0, sum_dy_xhat = 0.0;
        for (int i = 0; i < n; ++i) {
            const float* dyr = dy.ptr() + (static_cast<size_t>(i) * channels_ + c) * hw;
            const float* xh = xhat_cache_.ptr() + (static_cast<size_t>(i) * channels_ + c) * hw;
            for (size_t j = 0; j < hw; ++j) {
                sum_dy += dyr[j];
                sum_dy_xhat += static_cast<double>(dyr[j]) * xh[j];
            }
        }
        grad_gamma.data[c] += static_cast<float>(sum_dy_xhat);
        grad_beta.data[c] += static_cast<float>(sum_dy);
        const float scale = gamma.data[c] * inv_std_cache_[c];
        const float mean_dy = static_cast<float>(sum_dy / m);
        const float mean_dy_xhat = static_cast<float>(sum_dy_xhat / m);
        for (int i = 0; i < n; ++i) {
            const float* dyr = dy.ptr() + (static_cast<size_t>(i) * channels_ + c) * hw;
            const float* xh = xhat_cache_.ptr() + (static_cast<size_t>(i) * channels_ + c) * hw;
            float* dxr = dx.ptr() + (static_cast<size_t>(i) * channels_ + c) * hw;
            for (size_t j = 0; j < hw; ++j)
                // in eval mode the normalization statistics are constants, so
                // the batch-coupling terms drop out
                dxr[j] = trained_forward_
                             ? scale * (dyr[j] - mean_dy - xh[j] * mean_dy_xhat)
                             : scale * dyr[j];
        }
    }
    return dx;
}

void BatchNorm2d::collect_params(std::vector<ParamRef>& out, const std::string& prefix) {
    out.push_back({prefix + ".gamma", &gamma, &grad_gamma, false});
    out.push_back({prefix + ".beta", &beta, &grad_beta, false});
}

// ----------------------------------------------------------------------- Relu

Tensor Relu::forward(const Tensor& x) {
    Tensor y(x.shape);
    mask_.assign(x.numel(), 0);
    for (size_t i = 0; i < x.numel(); ++i) {
        if (x.data[i] > 0.0f) {
            y.data[i] = x.data[i];
            mask_[i] = 1;
        }
    }
    return y;
}

Tensor Relu::backward(const Tensor& dy) {
    Tensor dx(dy.shape);
    for (size_t i = 0; i < dy.numel(); ++i) dx.data[i] = mask_[i] ? dy.data[i] : 0.0f;
    return dx;
}

// --------------------------------------------------------------- SqueezeExcite

SqueezeExcite::SqueezeExcite(int channels, int reduction, Rng& rng)
    : w1({channels / reduction, channels}), b1({channels / reduction}),
      w2({channels, channels / reduction}), b2({channels}),
      grad_w1(w1.shape), grad_b1(b1.shape), grad_w2(w2.shape), grad_b2(b2.shape),
      channels_(channels), hidden_(channels / reduction) {
    if (channels % reduction != 0)
        throw DomainError("squeeze-excite channel count not divisible by reduction");
    init_uniform(w1, channels, rng);
    init_uniform(b1, channels, rng);
    init_uniform(w2, hidden_, rng);
    init_uniform(b2, hidden_, rng);
}

Tensor SqueezeExcite::forward(const Tensor& x) {
    check_4d(x);
    const int n = x.dim(0), w = x.dim(2), h = x.dim(3);
    const size_t hw = static_cast<size_t>(w) * h;
    x_cache_ = x;
    pooled_ = Tensor({n, channels_});
    hidden_act_ = Tensor({n, hidden_});
    gates_ = Tensor({n, channels_});
    Tensor y(x.shape);
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c < channels_; ++c) {
            const float* row = x.ptr() + (static_cast<size_t>(i) * channels_ + c) * hw;
            double acc = 0.0;
            for (size_t j = 0; j < hw; ++j) acc += row[j];
            pooled_.data[static_cast<size_t>(i) * channels_ + c] =
                static_cast<float>(acc / static_cast<double>(hw));
        }
        for (int u = 0; u < hidden_; ++u) {
            float acc = b1.data[u];
            for (int c = 0; c < channels_; ++c)
                acc += w1.data[static_cast<size_t>(u) * channels_ + c] *
                       pooled_.data[static_cast<size_t>(i) * channels_ + c];
            hidden_act_.data[static_cast<size_t>(i) * hidden_ + u] = acc > 0.0f ? acc : 0.0f;
        }
        for (int c = 0; c < channels_; ++c) {
            float acc = b2.data[c];
            for (int u = 0; u < hidden_; ++u)
                acc += w2.data[static_cast<size_t>(c) * hidden_ + u] *
                       hidden_act_.data[static_cast<size_t>(i) * hidden_ + u];
            gates_.data[static_cast<size_t>(i) * channels_ + c] = 1.0f / (1.0f + std::exp(-acc));
        }
        for (int c = 0; c < channels_; ++c) {
            const float g = gates_.data[static_cast<size_t>(i) * channels_ + c];
            const float* row = x.ptr() + (static_cast<size_t>(i) * channels_ + c) * hw;
            float* yrow = y.ptr() + (static_cast<size_t>(i) * channels_ + c) * hw;
            for (size_t j = 0; j < hw; ++j) yrow[j] = row[j] * g;
        }
    }
    return y;
}

Tensor SqueezeExcite::backward(const Tensor& dy) {
    const int n = dy.dim(0), w = dy.dim(2), h = dy.dim(3);
    const size_t hw = static_cast<size_t>(w) * h;
    Tensor dx(dy.shape);
    std::vector<float> dgate(channels_), dz2(channels_), dh_vec(hidden_), dz1(hidden_),
        ds(channels_);
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c < channels_; ++c) {
            const float* dyr = dy.ptr() + (static_cast<size_t>(i) * channels_ + c) * hw;
            const float* xr = x_cache_.ptr() + (static_cast<size_t>(i) * channels_ + c) * hw;
            float* dxr = dx.ptr() + (static_cast<size_t>(i) * channels_ + c) * hw;
            const float g = gates_.data[static_cast<size_t>(i) * channels_ + c];
            double acc = 0.0;
            for (size_t j = 0; j < hw; ++j) {
                acc += static_cast<double>(dyr[j]) * xr[j];
                dxr[j] = dyr[j] * g;
            }
            dgate[c] = static_cast<float>(acc);
            dz2[c] = dgate[c] * g * (1.0f - g);
        }
        for (int c = 0; c < channels_; ++c) {
            grad_b2.data[c] += dz2[c];
            for (int u = 0; u < hidden_; ++u)
                grad_w2.data[static_cast<size_t>(c) * hidden_ + u] +=
                    dz2[c] * hidden_act_.data[static_cast<size_t>(i) * hidden_ + u];
        }
        for (int u = 0; u < hidden_; ++u) {
            float acc = 0.0f;
            for (int c = 0; c < channels_; ++c)
                acc += w2.data[static_cast<size_t>(c) * hidden_ + u] * dz2[c];
            dh_vec[u] = acc;
            dz1[u] = hidden_act_.data[static_cast<size_t>(i) * hidden_ + u] > 0.0f ? acc : 0.0f;
        }
        for (int u = 0; u < hidden_; ++u) {
            grad_b1.data[u] += dz1[u];
            for (int c = 0; c < channels_; ++c)
                grad_w1.data[static_cast<size_t>(u) * channels_ + c] +=
                    dz1[u] * pooled_.data[static_cast<size_t>(i) * channels_ + c];
        }
        for (int c = 0; c < channels_; ++c) {
            float acc = 0.0f;
            for (int u = 0; u < hidden_; ++u)
                acc += w1.data[static_cast<size_t>(u) * channels_ + c] * dz1[u];
            ds[c] = acc / static_cast<float>(hw);
        }
        for (int c = 0; c < channels_; ++c) {
            float* dxr = dx.ptr() + (static_cast<size_t>(i) * channels_ + c) * hw;
            for (size_t j = 0; j < hw; ++j) dxr[j] += ds[c];
        }
    }
    return dx;
}

void SqueezeExcite::collect_params(std::vector<ParamRef>& out, const std::string& prefix) {
    out.push_back({prefix + ".w1", &w1, &grad_w1, true});
    out.push_back({prefix + ".b1", &b1, &grad_b1, false});
    out.push_back({prefix + ".w2", &w2, &grad_w2, true});
    out.push_back({prefix + ".b2", &b2, &grad_b2, false});
}

// -------------------------------------------------------------------- MaxPool

Tensor MaxPool::forward(const Tensor& x) {
    check_4d(x);
    const int n = x.dim(0), ch = x.dim(1), w = x.dim(2), h = x.dim(3);
    if (w % pool_w_ != 0 || h % pool_h_ != 0)
        throw StructuralError("pooled axis not divisible by pool size");
    const int ow = w / pool_w_, oh = h / pool_h_;
    in_shape_ = x.shape;
    Tensor y({n, ch, ow, oh});
    argmax_.assign(y.numel(), 0);
    size_t oidx = 0;
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c < ch; ++c) {
            const float* xr = x.ptr() + (static_cast<size_t>(i) * ch + c) * w * h;
            for (int pw = 0; pw < ow; ++pw) {
                for (int ph = 0; ph < oh; ++ph, ++oidx) {
                    float best = -std::numeric_limits<float>::infinity();
                    int best_idx = 0;
                    for (int u = 0; u < pool_w_; ++u) {
                        for (int v = 0; v < pool_h_; ++v) {
                            const int idx = (pw * pool_w_ + u) * h + ph * pool_h_ + v;
                            if (xr[idx] > best) {
                                best = xr[idx];
                                best_idx = idx;
                            }
                        }
                    }
                    y.data[oidx] = best;
                    argmax_[oidx] = best_idx;
                }
            }
        }
    }
    return y;
}

Tensor MaxPool::backward(const Tensor& dy) {
    Tensor dx(in_shape_);
    const int n = dy.dim(0), ch = dy.dim(1);
    const int w = in_shape_[2], h = in_shape_[3];
    const size_t ohw = static_cast<size_t>(dy.dim(2)) * dy.dim(3);
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c < ch; ++c) {
            float* dxr = dx.ptr() + (static_cast<size_t>(i) * ch + c) * w * h;
            const size_t base = (static_cast<size_t>(i) * ch + c) * ohw;
            for (size_t j = 0; j < ohw; ++j) dxr[argmax_[base + j]] += dy.data[base + j];
        }
    }
    return dx;
}

// ----------------------------------------------------------- BilinearUpsample

namespace {

struct AxisMap {
    std::vector<int> i0, i1;
    std::vector<float> frac;  // weight of i1
};

AxisMap make_axis_map(int in_size, int factor) {
    AxisMap m;
    const int out_size = in_size * factor;
    m.i0.resize(out_size);
    m.i1.resize(out_size);
    m.frac.resize(out_size);
    for (int o = 0; o < out_size; ++o) {
        const float src = (static_cast<float>(o) + 0.5f) / static_cast<float>(factor) - 0.5f;
        const float clamped = std::clamp(src, 0.0f, static_cast<float>(in_size - 1));
        const int lo = static_cast<int>(std::floor(clamped));
        m.i0[o] = lo;
        m.i1[o] = std::min(lo + 1, in_size - 1);
        m.frac[o] = clamped - static_cast<float>(lo);
    }
    return m;
}

}  // namespace

Tensor BilinearUpsample::forward(const Tensor& x) {
    check_4d(x);
    const int n = x.dim(0), ch = x.dim(1), w = x.dim(2), h = x.dim(3);
    in_shape_ = x.shape;
    const AxisMap wm = make_axis_map(w, fw_);
    const AxisMap hm = make_axis_map(h, fh_);
    const int ow = w * fw_, oh = h * fh_;
    Tensor y({n, ch, ow, oh});
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c < ch; ++c) {
            const float* xr = x.ptr() + (static_cast<size_t>(i) * ch + c) * w * h;
            float* yr = y.ptr() + (static_cast<size_t>(i) * ch + c) * ow * oh;
            for (int pw = 0; pw < ow; ++pw) {
                const int a = wm.i0[pw], b = wm.i1[pw];
                const float fw = wm.frac[pw];
                for (int ph = 0; ph < oh; ++ph) {
                    const int p = hm.i0[ph], q = hm.i1[ph];
                    const float fh = hm.frac[ph];
                    const float top = (1.0f - fh) * xr[a * h + p] + fh * xr[a * h + q];
                    const float bot = (1.0f - fh) * xr[b * h + p] + fh * xr[b * h + q];
                    yr[pw * oh + ph] = (1.0f - fw) * top + fw * bot;
                }
            }
        }
    }
    return y;
}

Tensor BilinearUpsample::backward(const Tensor& dy) {
    const int n = in_shape_[0], ch = in_shape_[1], w = in_shape_[2], h = in_shape_[3];
    const AxisMap wm = make_axis_map(w, fw_);
    const AxisMap hm = make_axis_map(h, fh_);
    const int ow = w * fw_, oh = h * fh_;
    Tensor dx(in_shape_);
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c < ch; ++c) {
            float* dxr = dx.ptr() + (static_cast<size_t>(i) * ch + c) * w * h;
            const float* dyr = dy.ptr() + (static_cast<size_t>(i) * ch + c) * ow * oh;
            for (int pw = 0; pw < ow; ++pw) {
                const int a = wm.i0[pw], b = wm.i1[pw];
                const float fw = wm.frac[pw];
                for (int ph = 0; ph < oh; ++ph) {
                    const int p = hm.i0[ph], q = hm.i1[ph];
                    const float fh = hm.frac[ph];
                    const float g = dyr[pw * oh + ph];
                    dxr[a * h + p] += (1.0f - fw) * (1.0f - fh) * g;
                    dxr[a * h + q] += (1.0f - fw) * fh * g;
                    dxr[b * h + p] += fw * (1.0f - fh) * g;
                    dxr[b * h + q] += fw * fh * g;
                }
            }
        }
    }
    return dx;
}

// --------------------------------------------------------------------- concat

Tensor concat_channels(const Tensor& a, const Tensor& b) {
    check_4d(a);
    check_4d(b);
    const int n = a.dim(0), w = a.dim(2), h = a.dim(3);
    if (b.dim(0) != n || b.dim(2) != w || b.dim(3) != h)
        throw StructuralError("concat shape mismatch");
    const int ca = a.dim(1), cb = b.dim(1);
    const size_t hw = static_cast<size_t>(w) * h;
    Tensor y({n, ca + cb, w, h});
    for (int i = 0; i < n; ++i) {
        std::copy_n(a.ptr() + static_cast<size_t>(i) * ca * hw, ca * hw,
                    y.ptr() + static_cast<size_t>(i) * (ca + cb) * hw);
        std::copy_n(b.ptr() + static_cast<size_t>(i) * cb * hw, cb * hw,
                    y.ptr() + static_cast<size_t>(i) * (ca + cb) * hw + ca * hw);
    }
    return y;
}

void split_channels(const Tensor& d, int ch_a, Tensor& da, Tensor& db) {
    const int n = d.dim(0), c = d.dim(1), w = d.dim(2), h = d.dim(3);
    const int ch_b = c - ch_a;
    const size_t hw = static_cast<size_t>(w) * h;
    da = Tensor({n, ch_a, w, h});
    db = Tensor({n, ch_b, w, h});
    for (int i = 0; i < n; ++i) {
        std::copy_n(d.ptr() + static_cast<size_t>(i) * c * hw, ch_a * hw,
                    da.ptr() + static_cast<size_t>(i) * ch_a * hw);
        std::copy_n(d.ptr() + static_cast<size_t>(i) * c * hw + ch_a * hw, ch_b * hw,
                    db.ptr() + static_cast<size_t>(i) * ch_b * hw);
    }
    return;
}

}  // namespace echofilter::nn
