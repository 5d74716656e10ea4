#include "krecon/neuralk.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace krecon::neuralk {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// col(px, m*Cin + i) = in[i][x - m], zero where x - m leaves the grid.
RowMat im2col(const Tensor& in, const KernelSupport& s) {
    const int m = s.count();
    const Eigen::Index npx = static_cast<Eigen::Index>(in.n1) * in.n2;
    RowMat col = RowMat::Zero(npx, static_cast<Eigen::Index>(m) * in.channels);
    for (int mi = 0; mi < m; ++mi) {
        const auto& [p, q] = s.offsets[mi];
        const int x1_lo = std::max(0, p), x1_hi = in.n1 - 1 + std::min(0, p);
        const int x2_lo = std::max(0, q), x2_hi = in.n2 - 1 + std::min(0, q);
        for (int x1 = x1_lo; x1 <= x1_hi; ++x1) {
            for (int x2 = x2_lo; x2 <= x2_hi; ++x2) {
                const double* src = &in.at(x1 - p, x2 - q, 0);
                double* dst = &col(static_cast<Eigen::Index>(x1) * in.n2 + x2, static_cast<Eigen::Index>(mi) * in.channels);
                for (int i = 0; i < in.channels; ++i) dst[i] = src[i];
            }
        }
    }
    return col;
}

// Adjoint of im2col: scatter-add column entries back onto the grid.
void col2im_add(const RowMat& col, const KernelSupport& s, Tensor& out) {
    const int m = s.count();
    for (int mi = 0; mi < m; ++mi) {
        const auto& [p, q] = s.offsets[mi];
        const int x1_lo = std::max(0, p), x1_hi = out.n1 - 1 + std::min(0, p);
        const int x2_lo = std::max(0, q), x2_hi = out.n2 - 1 + std::min(0, q);
        for (int x1 = x1_lo; x1 <= x1_hi; ++x1) {
            for (int x2 = x2_lo; x2 <= x2_hi; ++x2) {
                const double* src = &col(static_cast<Eigen::Index>(x1) * out.n2 + x2, static_cast<Eigen::Index>(mi) * out.channels);
                double* dst = &out.at(x1 - p, x2 - q, 0);
                for (int i = 0; i < out.channels; ++i) dst[i] += src[i];
            }
        }
    }
}

// (M*Cin) x Cout weight matrix so the forward pass is a single product.
Eigen::MatrixXd weight_matrix(const ConvLayerParams& layer) {
    const int m = layer.support.count();
    Eigen::MatrixXd w2(static_cast<Eigen::Index>(m) * layer.in_channels, layer.out_channels);
    for (int o = 0; o < layer.out_channels; ++o)
        for (int i = 0; i < layer.in_channels; ++i)
            for (int mi = 0; mi < m; ++mi)
                w2(static_cast<Eigen::Index>(mi) * layer.in_channels + i, o) = layer.w(o, i, mi);
    return w2;
}

Tensor conv_from_col(const RowMat& col, const ConvLayerParams& layer, int n1, int n2) {
    Tensor out(n1, n2, layer.out_channels);
    Eigen::Map<RowMat> out_map(out.data.data(), static_cast<Eigen::Index>(n1) * n2, layer.out_channels);
    out_map.noalias() = col * weight_matrix(layer);
    return out;
}

} // namespace

ConvLayerParams make_conv_layer(int in_channels, int out_channels, const KernelSupport& support,
                                std::uint64_t seed) {
    if (in_channels < 1 || out_channels < 1) throw std::invalid_argument("make_conv_layer: bad channel counts");
    ConvLayerParams layer;
    layer.in_channels = in_channels;
    layer.out_channels = out_channels;
    layer.support = support;
    layer.weights.resize(layer.weight_count());
    const double fan_in = static_cast<double>(in_channels) * support.count();
    const double bound = std::sqrt(6.0 / fan_in);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-bound, bound);
    for (double& w : layer.weights) w = unif(rng);
    return layer;
}

Tensor conv2d_same(const Tensor& input, const ConvLayerParams& layer) {
    if (input.channels != layer.in_channels)
        throw std::invalid_argument("conv2d_same: input channel count does not match the layer");
    return conv_from_col(im2col(input, layer.support), layer, input.n1, input.n2);
}

Tensor relu(const Tensor& x) {
    Tensor out = x;
    for (double& v : out.data) v = v > 0.0 ? v : 0.0;
    return out;
}

Tape::Tape() = default;
Tape::~Tape() = default;

struct Tape::Node {
    enum class Kind { Input, Conv, Relu, UpdateStep, DataConsistency, MseLoss } kind;
    int a = -1;
    int b = -1;
    Tensor value;
    double scalar = 0.0;
    ConvLayerParams* layer = nullptr;
    RowMat col; // cached im2col(input) for conv nodes
    ScalarParam* lambda = nullptr;
    std::vector<std::uint8_t> sampled;
    Tensor aux; // dzp for data consistency, target for loss
};

int Tape::push(Node n) {
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
}

int Tape::input(Tensor value) {
    Node n;
    n.kind = Node::Kind::Input;
    n.value = std::move(value);
    return push(std::move(n));
}

int Tape::conv2d(int x, ConvLayerParams* layer) {
    const Tensor& in = value(x);
    if (in.channels != layer->in_channels)
        throw std::invalid_argument("Tape::conv2d: input channel count does not match the layer");
    Node n;
    n.kind = Node::Kind::Conv;
    n.a = x;
    n.layer = layer;
    n.col = im2col(in, layer->support);
    n.value = conv_from_col(n.col, *layer, in.n1, in.n2);
    return push(std::move(n));
}

int Tape::relu(int x) {
    Node n;
    n.kind = Node::Kind::Relu;
    n.a = x;
    n.value = neuralk::relu(value(x));
    return push(std::move(n));
}

int Tape::update_step(int x, int y, ScalarParam* lambda) {
    const Tensor& xv = value(x);
    const Tensor& yv = value(y);
    if (xv.size() != yv.size()) throw std::invalid_argument("Tape::update_step: shape mismatch");
    Node n;
    n.kind = Node::Kind::UpdateStep;
    n.a = x;
    n.b = y;
    n.lambda = lambda;
    n.value = xv;
    for (std::size_t i = 0; i < n.value.data.size(); ++i) n.value.data[i] -= lambda->value * yv.data[i];
    return push(std::move(n));
}

int Tape::data_consistency(int x, std::vector<std::uint8_t> sampled, Tensor dzp) {
    const Tensor& xv = value(x);
    if (sampled.size() != xv.data.size() || dzp.data.size() != xv.data.size())
        throw std::invalid_argument("Tape::data_consistency: shape mismatch");
    Node n;
    n.kind = Node::Kind::DataConsistency;
    n.a = x;
    n.value = xv;
    for (std::size_t i = 0; i < n.value.data.size(); ++i)
        if (sampled[i]) n.value.data[i] = dzp.data[i];
    n.sampled = std::move(sampled);
    n.aux = std::move(dzp);
    return push(std::move(n));
}

int Tape::mse_loss(int x, Tensor target) {
    return masked_mse_loss(x, std::move(target), {});
}

int Tape::masked_mse_loss(int x, Tensor target, std::vector<std::uint8_t> select) {
    const Tensor& xv = value(x);
    if (target.data.size() != xv.data.size()) throw std::invalid_argument("Tape::mse_loss: shape mismatch");
    if (!select.empty() && select.size() != xv.data.size())
        throw std::invalid_argument("Tape::mse_loss: selection shape mismatch");
    Node n;
    n.kind = Node::Kind::MseLoss;
    n.a = x;
    double acc = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < xv.data.size(); ++i) {
        if (!select.empty() && !select[i]) continue;
        const double d = xv.data[i] - target.data[i];
        acc += d * d;
        ++count;
    }
    if (count == 0) throw std::invalid_argument("Tape::mse_loss: empty selection");
    n.scalar = acc / static_cast<double>(count);
    n.aux = std::move(target);
    n.sampled = std::move(select);
    return push(std::move(n));
}

const Tensor& Tape::value(int id) const { return nodes_.at(id).value; }
double Tape::scalar_value(int id) const { return nodes_.at(id).scalar; }

void Tape::backward(int loss_id) {
    if (backward_done_) throw std::logic_error("Tape::backward: already run on this tape");
    backward_done_ = true;
    const Node& loss = nodes_.at(loss_id);
    if (loss.kind != Node::Kind::MseLoss) throw std::invalid_argument("Tape::backward: node is not a scalar loss");

    grads_.resize(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (nodes_[i].kind == Node::Kind::MseLoss) continue;
        const Tensor& v = nodes_[i].value;
        grads_[i] = Tensor(v.n1, v.n2, v.channels);
    }

    // Seed: d(loss)/d(x) for the (possibly masked) mean-squared loss.
    {
        const Tensor& xv = nodes_[loss.a].value;
        Tensor& g = grads_[loss.a];
        std::size_t count = xv.data.size();
        if (!loss.sampled.empty()) {
            count = 0;
            for (std::uint8_t s : loss.sampled) count += s ? 1 : 0;
        }
        const double scale = 2.0 / static_cast<double>(count);
        for (std::size_t i = 0; i < xv.data.size(); ++i) {
            if (!loss.sampled.empty() && !loss.sampled[i]) continue;
            g.data[i] += scale * (xv.data[i] - loss.aux.data[i]);
        }
    }

    for (int id = loss_id - 1; id >= 0; --id) {
        Node& n = nodes_[id];
        const Tensor& g = grads_[id];
        switch (n.kind) {
        case Node::Kind::Input:
        case Node::Kind::MseLoss:
            break;
        case Node::Kind::Conv: {
            const Tensor& in = nodes_[n.a].value;
            const Eigen::Index npx = static_cast<Eigen::Index>(in.n1) * in.n2;
            Eigen::Map<const RowMat> gmap(g.data.data(), npx, n.layer->out_channels);
            // Weight gradient: col^T * upstream, accumulated across nodes
            // sharing the layer.
            auto [it, inserted] = wgrads_.try_emplace(n.layer);
            if (inserted) it->second.assign(n.layer->weight_count(), 0.0);
            const Eigen::MatrixXd gw2 = n.col.transpose() * gmap;
            const int m = n.layer->support.count();
            for (int o = 0; o < n.layer->out_channels; ++o)
                for (int i = 0; i < n.layer->in_channels; ++i)
                    for (int mi = 0; mi < m; ++mi)
                        it->second[(static_cast<std::size_t>(o) * n.layer->in_channels + i) * m + mi] +=
                            gw2(static_cast<Eigen::Index>(mi) * n.layer->in_channels + i, o);
            // Input gradient: scatter of upstream * W^T.
            const RowMat gcol = gmap * weight_matrix(*n.layer).transpose();
            col2im_add(gcol, n.layer->support, grads_[n.a]);
            break;
        }
        case Node::Kind::Relu: {
            const Tensor& in = nodes_[n.a].value;
            Tensor& ga = grads_[n.a];
            for (std::size_t i = 0; i < in.data.size(); ++i)
                if (in.data[i] > 0.0) ga.data[i] += g.data[i];
            break;
        }
        case Node::Kind::UpdateStep: {
            Tensor& ga = grads_[n.a];
            Tensor& gb = grads_[n.b];
            const Tensor& yv = nodes_[n.b].value;
            const double lam = n.lambda->value;
            double glam = 0.0;
            for (std::size_t i = 0; i < g.data.size(); ++i) {
                ga.data[i] += g.data[i];
                gb.data[i] -= lam * g.data[i];
                glam -= yv.data[i] * g.data[i];
            }
            sgrads_[n.lambda] += glam;
            break;
        }
        case Node::Kind::DataConsistency: {
            Tensor& ga = grads_[n.a];
            for (std::size_t i = 0; i < g.data.size(); ++i)
                if (!n.sampled[i]) ga.data[i] += g.data[i];
            break;
        }
        }
    }
}

const std::vector<double>& Tape::weight_grad(const ConvLayerParams* layer) const {
    static const std::vector<double> empty;
    auto it = wgrads_.find(layer);
    return it == wgrads_.end() ? empty : it->second;
}

double Tape::scalar_grad(const ScalarParam* lambda) const {
    auto it = sgrads_.find(lambda);
    return it == sgrads_.end() ? 0.0 : it->second;
}

const Tensor& Tape::node_grad(int id) const { return grads_.at(id); }

void adam_step(double* params, const double* grads, std::size_t count, AdamState& state) {
    if (state.m.size() != count) {
        if (!state.m.empty()) throw std::invalid_argument("adam_step: parameter count changed");
        state.m.assign(count, 0.0);
        state.v.assign(count, 0.0);
    }
    ++state.step;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < count; ++i) {
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grads[i];
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grads[i] * grads[i];
        const double mhat = state.m[i] / bc1;
        const double vhat = state.v[i] / bc2;
        params[i] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
    }
}

void adam_step(std::vector<double>& params, const std::vector<double>& grads, AdamState& state) {
    if (params.size() != grads.size()) throw std::invalid_argument("adam_step: gradient shape mismatch");
    adam_step(params.data(), grads.data(), params.size(), state);
}

std::vector<double> finite_diff_grad(const std::function<double()>& loss, double* params, std::size_t count,
                                     double h) {
    std::vector<double> grad(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double saved = params[i];
        params[i] = saved + h;
        const double up = loss();
        params[i] = saved - h;
        const double down = loss();
        params[i] = saved;
        grad[i] = (up - down) / (2.0 * h);
    }
    return grad;
}

} // namespace krecon::neuralk
