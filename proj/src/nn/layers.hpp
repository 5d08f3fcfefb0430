#pragma once

#include <random>
#include <vector>

#include "nn/tensor.hpp"

namespace echofilter::nn {

using Rng = std::mt19937_64;

// Fan-in scaled uniform init: U(-sqrt(1/fan_in), +sqrt(1/fan_in)).
void init_uniform(Tensor& t, int fan_in, Rng& rng);

// 1x1 convolution, implemented as a GEMM over the flattened spatial axes.
class PointwiseConv {
public:
    PointwiseConv(int in_ch, int out_ch, bool bias, Rng& rng);

    Tensor forward(const Tensor& x);
    Tensor backward(const Tensor& dy);
    void collect_params(std::vector<ParamRef>& out, const std::string& prefix);

    Tensor weight;  // (out_ch, in_ch)
    Tensor bias;    // (out_ch) or empty
    Tensor grad_weight, grad_bias;

private:
    int in_ch_, out_ch_;
    bool has_bias_;
    Tensor x_cache_;
};

// Dense KxK convolution with "same" padding (used by the stem, where the
// input channel count is tiny).
class Conv2d {
public:
    Conv2d(int in_ch, int out_ch, int kernel, Rng& rng);

    Tensor forward(const Tensor& x);
    Tensor backward(const Tensor& dy);
    void collect_params(std::vector<ParamRef>& out, const std::string& prefix);

    Tensor weight;  // (out_ch, in_ch, k, k)
    Tensor grad_weight;

private:
    int in_ch_, out_ch_, k_;
    Tensor x_cache_;
};

// Per-channel KxK convolution with "same" padding.
class DepthwiseConv {
public:
    DepthwiseConv(int channels, int kernel, Rng& rng);

    Tensor forward(const Tensor& x);
    Tensor backward(const Tensor& dy);
    void collect_params(std::vector<ParamRef>& out, const std::string& prefix);

    Tensor weight;  // (channels, k, k)
    Tensor grad_weight;

private:
    int channels_, k_;
    Tensor x_cache_;
};

class BatchNorm2d {
public:
    explicit BatchNorm2d(int channels);

    Tensor forward(const Tensor& x, bool training);
    Tensor backward(const Tensor& dy);
    void collect_params(std::vector<ParamRef>& out, const std::string& prefix);

    Tensor gamma, beta;          // (channels)
    Tensor grad_gamma, grad_beta;
    Tensor running_mean, running_var;

    static constexpr float kEps = 1e-5f;
    static constexpr float kMomentum = 0.1f;

private:
    int channels_;
    Tensor xhat_cache_;
    std::vector<float> inv_std_cache_;
    bool trained_forward_ = true;
};

class Relu {
public:
    Tensor forward(const Tensor& x);
    Tensor backward(const Tensor& dy);

private:
    std::vector<uint8_t> mask_;
};

// Channel attention: global average pool, two fully connected layers, sigmoid
// gate multiplied back onto the input.
class SqueezeExcite {
public:
    SqueezeExcite(int channels, int reduction, Rng& rng);

    Tensor forward(const Tensor& x);
    Tensor backward(const Tensor& dy);
    void collect_params(std::vector<ParamRef>& out, const std::string& prefix);

    Tensor w1, b1;  // (hidden, channels), (hidden)
    Tensor w2, b2;  // (channels, hidden), (channels)
    Tensor grad_w1, grad_b1, grad_w2, grad_b2;

private:
    int channels_, hidden_;
    Tensor x_cache_;
    Tensor pooled_, hidden_act_, gates_;
};

// Max pooling with kernel == stride (pool_w, pool_h), each 1 or 2.
class MaxPool {
public:
    MaxPool(int pool_w, int pool_h) : pool_w_(pool_w), pool_h_(pool_h) {}

    Tensor forward(const Tensor& x);
    Tensor backward(const Tensor& dy);

private:
    int pool_w_, pool_h_;
    std::vector<int> argmax_;
    std::vector<int> in_shape_;
};

// Bilinear upscaling by integer factors (factor_w, factor_h).
class BilinearUpsample {
public:
    BilinearUpsample(int factor_w, int factor_h) : fw_(factor_w), fh_(factor_h) {}

    Tensor forward(const Tensor& x);
    Tensor backward(const Tensor& dy);

private:
    int fw_, fh_;
    std::vector<int> in_shape_;
};

Tensor concat_channels(const Tensor& a, const Tensor& b);
void split_channels(const Tensor& d, int ch_a, Tensor& da, Tensor& db);

}  // namespace echofilter::nn
