#include "nn/unet.hpp"

#include "support/errors.hpp"

namespace echofilter::nn {

// ---------------------------------------------------------------- MBConvBlock

MBConvBlock::MBConvBlock(int in_ch, int out_ch, int expansion, int kernel, int se_reduction,
                         Rng& rng)
    : dw_(expansion == 1 ? in_ch : in_ch * expansion, kernel, rng),
      bn2_(expansion == 1 ? in_ch : in_ch * expansion),
      se_(expansion == 1 ? in_ch : in_ch * expansion, se_reduction, rng),
      project_(expansion == 1 ? in_ch : in_ch * expansion, out_ch, false, rng),
      bn3_(out_ch) {
    const int hidden = expansion == 1 ? in_ch : in_ch * expansion;
    if (expansion != 1) {
        expand_ = std::make_unique<PointwiseConv>(in_ch, hidden, false, rng);
        bn1_ = std::make_unique<BatchNorm2d>(hidden);
    }
    if (in_ch != out_ch) residual_ = std::make_unique<PointwiseConv>(in_ch, out_ch, false, rng);
}

Tensor MBConvBlock::forward(const Tensor& x, bool training) {
    Tensor h = x;
    if (expand_) {
        h = expand_->forward(h);
        h = bn1_->forward(h, training);
        h = relu1_.forward(h);
    }
    h = dw_.forward(h);
    h = bn2_.forward(h, training);
    h = relu2_.forward(h);
    h = se_.forward(h);
    h = project_.forward(h);
    h = bn3_.forward(h, training);
    Tensor res = residual_ ? residual_->forward(x) : x;
    for (size_t i = 0; i < h.numel(); ++i) h.data[i] += res.data[i];
    return h;
}

Tensor MBConvBlock::backward(const Tensor& dy) {
    Tensor d = bn3_.backward(dy);
    d = project_.backward(d);
    d = se_.backward(d);
    d = relu2_.backward(d);
    d = bn2_.backward(d);
    d = dw_.backward(d);
    if (expand_) {
        d = relu1_.backward(d);
        d = bn1_->backward(d);
        d = expand_->backward(d);
    }
    Tensor dres = residual_ ? residual_->backward(dy) : dy;
    for (size_t i = 0; i < d.numel(); ++i) d.data[i] += dres.data[i];
    return d;
}

void MBConvBlock::collect_params(std::vector<ParamRef>& out, const std::string& prefix) {
    if (expand_) {
        expand_->collect_params(out, prefix + ".expand");
        bn1_->collect_params(out, prefix + ".bn1");
    }
    dw_.collect_params(out, prefix + ".dw");
    bn2_.collect_params(out, prefix + ".bn2");
    se_.collect_params(out, prefix + ".se");
    project_.collect_params(out, prefix + ".project");
    bn3_.collect_params(out, prefix + ".bn3");
    if (residual_) residual_->collect_params(out, prefix + ".residual");
}

void MBConvBlock::collect_state(std::vector<std::pair<std::string, Tensor*>>& out,
                                const std::string& prefix) {
    if (bn1_) {
        out.emplace_back(prefix + ".bn1.running_mean", &bn1_->running_mean);
        out.emplace_back(prefix + ".bn1.running_var", &bn1_->running_var);
    }
    out.emplace_back(prefix + ".bn2.running_mean", &bn2_.running_mean);
    out.emplace_back(prefix + ".bn2.running_var", &bn2_.running_var);
    out.emplace_back(prefix + ".bn3.running_mean", &bn3_.running_mean);
    out.emplace_back(prefix + ".bn3.running_var", &bn3_.running_var);
}

// ----------------------------------------------------------------------- UNet

UNet::UNet(const ModelConfig& config, uint64_t seed) : config_(config) {
    // One seeded stream; construction order fully determines the weights.
    Rng rng(seed);
    const int c = config.width;
    stem_conv_ = std::make_unique<Conv2d>(1, c, config.kernel, rng);
    stem_bn_ = std::make_unique<BatchNorm2d>(c);
    for (int i = 0; i < config.n_blocks; ++i) {
        enc_blocks_.push_back(std::make_unique<MBConvBlock>(
            c, c, i == 0 ? 1 : config.expansion, config.kernel, config.se_reduction, rng));
        pools_.push_back(std::make_unique<MaxPool>(time_pooled(i) ? 2 : 1, 2));
    }
    for (int i = 0; i < config.n_blocks; ++i) {
        const int mirrored = config.n_blocks - 1 - i;
        upsamples_.push_back(
            std::make_unique<BilinearUpsample>(time_pooled(mirrored) ? 2 : 1, 2));
        dec_blocks_.push_back(std::make_unique<MBConvBlock>(
            2 * c, c, config.expansion, config.kernel, config.se_reduction, rng));
    }
    head_ = std::make_unique<PointwiseConv>(c, config.total_planes(), true, rng);
}

Tensor UNet::forward(const Tensor& x, bool training) {
    if (x.shape.size() != 4 || x.dim(1) != 1)
        throw StructuralError("model input must be (N, 1, W, H)");
    if (x.dim(2) % config_.time_divisor() != 0 || x.dim(3) % config_.depth_divisor() != 0)
        throw StructuralError("input spatial shape not divisible by the pooling factors");

    Tensor h = stem_conv_->forward(x);
    h = stem_bn_->forward(h, training);
    h = stem_relu_.forward(h);

    skip_cache_.clear();
    for (int i = 0; i < config_.n_blocks; ++i) {
        h = enc_blocks_[i]->forward(h, training);
        skip_cache_.push_back(h);
        h = pools_[i]->forward(h);
    }
    for (int i = 0; i < config_.n_blocks; ++i) {
        const int mirrored = config_.n_blocks - 1 - i;
        h = upsamples_[i]->forward(h);
        h = concat_channels(h, skip_cache_[mirrored]);
        h = dec_blocks_[i]->forward(h, training);
    }
    return head_->forward(h);
}

Tensor UNet::backward(const Tensor& dy) {
    Tensor d = head_->backward(dy);
    std::vector<Tensor> skip_grads(config_.n_blocks);
    for (int i = config_.n_blocks - 1; i >= 0; --i) {
        const int mirrored = config_.n_blocks - 1 - i;
        d = dec_blocks_[i]->backward(d);
        Tensor d_up, d_skip;
        split_channels(d, config_.width, d_up, d_skip);
        skip_grads[mirrored] = std::move(d_skip);
        d = upsamples_[i]->backward(d_up);
    }
    for (int i = config_.n_blocks - 1; i >= 0; --i) {
        d = pools_[i]->backward(d);
        for (size_t j = 0; j < d.numel(); ++j) d.data[j] += skip_grads[i].data[j];
        d = enc_blocks_[i]->backward(d);
    }
    d = stem_relu_.backward(d);
    d = stem_bn_->backward(d);
    return stem_conv_->backward(d);
}

std::vector<ParamRef> UNet::params() {
    std::vector<ParamRef> out;
    stem_conv_->collect_params(out, "stem.conv");
    stem_bn_->collect_params(out, "stem.bn");
    for (int i = 0; i < config_.n_blocks; ++i)
        enc_blocks_[i]->collect_params(out, "enc" + std::to_string(i));
    for (int i = 0; i < config_.n_blocks; ++i)
        dec_blocks_[i]->collect_params(out, "dec" + std::to_string(i));
    head_->collect_params(out, "head");
    return out;
}

std::vector<std::pair<std::string, Tensor*>> UNet::state_tensors() {
    std::vector<std::pair<std::string, Tensor*>> out;
    out.emplace_back("stem.bn.running_mean", &stem_bn_->running_mean);
    out.emplace_back("stem.bn.running_var", &stem_bn_->running_var);
    for (int i = 0; i < config_.n_blocks; ++i)
        enc_blocks_[i]->collect_state(out, "enc" + std::to_string(i));
    for (int i = 0; i < config_.n_blocks; ++i)
        dec_blocks_[i]->collect_state(out, "dec" + std::to_string(i));
    return out;
}

void UNet::zero_grad() {
    for (auto& p : params()) p.grad->zero();
}

size_t UNet::param_count() {
    size_t n = 0;
    for (auto& p : params()) n += p.value->numel();
    return n;
}

size_t param_count(const ModelConfig& config) {
    UNet net(config, 0);
    return net.param_count();
}

}  // namespace echofilter::nn
