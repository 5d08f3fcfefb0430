#pragma once

#include <memory>
#include <string>
#include <vector>

#include "nn/layers.hpp"

namespace echofilter::nn {

struct ModelConfig {
    int width = 32;          // backbone channel count
    int n_blocks = 6;        // encoder depth == decoder depth
    int kernel = 5;
    int expansion = 6;       // first encoder block uses 1
    int se_reduction = 2;
    int out_planes = 10;
    int groups = 1;          // 1 = Upfacing, 3 = Bifacing (unconditional/down/up)
    int input_w = 128;       // pings
    int input_h = 512;       // depth bins

    int total_planes() const { return out_planes * groups; }
    // Depth halves after every block, time after every other block.
    int depth_divisor() const { return 1 << n_blocks; }
    int time_divisor() const { return 1 << ((n_blocks + 1) / 2); }
};

// Inverse-residual block: expand, depthwise conv, squeeze-excite, project,
// plus an identity (or pointwise) residual branch.
class MBConvBlock {
public:
    MBConvBlock(int in_ch, int out_ch, int expansion, int kernel, int se_reduction, Rng& rng);

    Tensor forward(const Tensor& x, bool training);
    Tensor backward(const Tensor& dy);
    void collect_params(std::vector<ParamRef>& out, const std::string& prefix);
    void collect_state(std::vector<std::pair<std::string, Tensor*>>& out,
                       const std::string& prefix);

private:
    std::unique_ptr<PointwiseConv> expand_;
    std::unique_ptr<BatchNorm2d> bn1_;
    Relu relu1_;
    DepthwiseConv dw_;
    BatchNorm2d bn2_;
    Relu relu2_;
    SqueezeExcite se_;
    PointwiseConv project_;
    BatchNorm2d bn3_;
    std::unique_ptr<PointwiseConv> residual_;
};

class UNet {
public:
    UNet(const ModelConfig& config, uint64_t seed);

    // x: (N, 1, W, H) with W divisible by time_divisor and H by depth_divisor.
    // Returns logits (N, total_planes, W, H).
    Tensor forward(const Tensor& x, bool training);
    // dy: gradient w.r.t. logits. Accumulates parameter gradients.
    Tensor backward(const Tensor& dy);

    std::vector<ParamRef> params();
    std::vector<std::pair<std::string, Tensor*>> state_tensors();
    void zero_grad();
    size_t param_count();

    const ModelConfig& config() const { return config_; }

private:
    ModelConfig config_;
    std::unique_ptr<Conv2d> stem_conv_;
    std::unique_ptr<BatchNorm2d> stem_bn_;
    Relu stem_relu_;
    std::vector<std::unique_ptr<MBConvBlock>> enc_blocks_;
    std::vector<std::unique_ptr<MaxPool>> pools_;
    std::vector<std::unique_ptr<BilinearUpsample>> upsamples_;
    std::vector<std::unique_ptr<MBConvBlock>> dec_blocks_;
    std::unique_ptr<PointwiseConv> head_;

    bool time_pooled(int block) const { return block % 2 == 1; }
    std::vector<Tensor> skip_cache_;
};

size_t param_count(const ModelConfig& config);

}  // namespace echofilter::nn
