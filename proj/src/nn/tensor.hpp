#pragma once

#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

namespace echofilter::nn {

// Dense float tensor, row-major, last axis fastest. Activations are (N, C, W, H)
// with W = time (pings) and H = depth bins.
struct Tensor {
    std::vector<int> shape;
    std::vector<float> data;

    Tensor() = default;
    explicit Tensor(std::vector<int> s) : shape(std::move(s)) {
        data.assign(numel(), 0.0f);
    }

    size_t numel() const {
        size_t n = 1;
        for (int s : shape) n *= static_cast<size_t>(s);
        return n;
    }
    int dim(int i) const { return shape[i]; }
    void zero() { std::fill(data.begin(), data.end(), 0.0f); }
    float* ptr() { return data.data(); }
    const float* ptr() const { return data.data(); }
};

// C = alpha * A(m x k) * B(k x n) + beta * C, with optional transposes.
void gemm(bool trans_a, bool trans_b, int m, int n, int k, float alpha, const float* a,
          const float* b, float beta, float* c);

// Named view of one trainable tensor and its gradient accumulator.
struct ParamRef {
    std::string path;
    Tensor* value = nullptr;
    Tensor* grad = nullptr;
    bool is_kernel = false;  // multi-axis weight, eligible for gradient centralization
};

}  // namespace echofilter::nn
