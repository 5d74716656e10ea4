#pragma once

#include "krecon/kernel_support.hpp"
#include "krecon/kspace.hpp"

#include <cstdint>
#include <functional>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace krecon::neuralk {

using Tensor = RealChannelStack;

// Bias-free masked 2D convolution layer; weights exist only at the
// support offsets, indexed [out][in][offset].
struct ConvLayerParams {
    int in_channels = 0;
    int out_channels = 0;
    KernelSupport support;
    std::vector<double> weights;

    std::size_t weight_count() const {
        return static_cast<std::size_t>(out_channels) * in_channels * support.count();
    }
    double& w(int o, int i, int m) {
        return weights[(static_cast<std::size_t>(o) * in_channels + i) * support.count() + m];
    }
    double w(int o, int i, int m) const {
        return weights[(static_cast<std::size_t>(o) * in_channels + i) * support.count() + m];
    }
};

// Scaled-uniform (Kaiming-style) initialization over the support offsets.
ConvLayerParams make_conv_layer(int in_channels, int out_channels, const KernelSupport& support, std::uint64_t seed);

struct ScalarParam {
    double value = 1.0;
};

// Same-size zero-padded convolution:
//   out[o][x] = sum_i sum_{m in support} w[o][i][m] * in[i][x - m]
Tensor conv2d_same(const Tensor& input, const ConvLayerParams& layer);

Tensor relu(const Tensor& x);

// Records a forward computation over the op set used by the k-space
// networks and produces exact reverse-mode gradients for every tracked
// parameter (convolution weights, scalar step sizes) and every node.
// Layers referenced by several nodes (shared RNN weights) accumulate.
class Tape {
public:
    Tape();
    ~Tape();
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    int input(Tensor value);
    int conv2d(int x, ConvLayerParams* layer);
    int relu(int x);
    // out = x - lambda * y
    int update_step(int x, int y, ScalarParam* lambda);
    // out = dzp where sampled, x elsewhere
    int data_consistency(int x, std::vector<std::uint8_t> sampled, Tensor dzp);
    // mean squared error over all entries; terminal scalar node
    int mse_loss(int x, Tensor target);
    // squared error averaged over the selected entries only
    int masked_mse_loss(int x, Tensor target, std::vector<std::uint8_t> select);

    const Tensor& value(int id) const;
    double scalar_value(int id) const;

    // Reverse pass from a scalar loss node; call once per recorded tape.
    void backward(int loss_id);

    const std::vector<double>& weight_grad(const ConvLayerParams* layer) const;
    double scalar_grad(const ScalarParam* lambda) const;
    const Tensor& node_grad(int id) const;

private:
    struct Node;
    std::vector<Node> nodes_;
    std::vector<Tensor> grads_;
    std::unordered_map<const ConvLayerParams*, std::vector<double>> wgrads_;
    std::unordered_map<const ScalarParam*, double> sgrads_;
    bool backward_done_ = false;

    int push(Node n);
};

// First/second-moment state for the bias-corrected adaptive update.
struct AdamState {
    double lr = 3e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    long step = 0;
    std::vector<double> m;
    std::vector<double> v;
};

void adam_step(std::vector<double>& params, const std::vector<double>& grads, AdamState& state);
void adam_step(double* params, const double* grads, std::size_t count, AdamState& state);

// Central finite differences of `loss` with respect to the storage the
// spans point at; the loss callable must observe the perturbations.
std::vector<double> finite_diff_grad(const std::function<double()>& loss, double* params, std::size_t count,
                                     double h);

} // namespace krecon::neuralk
