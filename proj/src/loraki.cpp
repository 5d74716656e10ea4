#include "krecon/loraki.hpp"

#include "krecon/seeds.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace krecon {

neuralk::Tensor data_consistency(const neuralk::Tensor& x, const std::vector<std::uint8_t>& sampled,
                                 const neuralk::Tensor& d_zp) {
    if (sampled.size() != x.data.size() || d_zp.data.size() != x.data.size())
        throw std::invalid_argument("data_consistency: shape mismatch");
    neuralk::Tensor out = x;
    for (std::size_t i = 0; i < out.data.size(); ++i)
        if (sampled[i]) out.data[i] = d_zp.data[i];
    return out;
}

neuralk::Tensor data_consistency(const neuralk::Tensor& x, const SamplingMask& mask, const neuralk::Tensor& d_zp) {
    if (mask.n1 != x.n1 || mask.n2 != x.n2) throw std::invalid_argument("data_consistency: mask dimension mismatch");
    std::vector<std::uint8_t> sampled(x.data.size());
    for (int i = 0; i < x.n1; ++i)
        for (int j = 0; j < x.n2; ++j)
            for (int c = 0; c < x.channels; ++c)
                sampled[(static_cast<std::size_t>(i) * x.n2 + j) * x.channels + c] = mask.at(i, j);
    return data_consistency(x, sampled, d_zp);
}

neuralk::Tensor to_vcc_real(const KSpace& k) { return split_complex_to_real(vcc_augment(k)); }

KSpace from_vcc_real(const neuralk::Tensor& t) {
    if (t.channels % 4 != 0) throw std::invalid_argument("from_vcc_real: channel count must be a multiple of 4");
    const KSpace merged = merge_real_to_complex(t);
    KSpace out(merged.n1, merged.n2, merged.channels / 2);
    for (int i = 0; i < out.n1; ++i)
        for (int j = 0; j < out.n2; ++j)
            for (int c = 0; c < out.channels; ++c) out.at(i, j, c) = merged.at(i, j, c);
    return out;
}

std::vector<std::uint8_t> vcc_real_indicator(const SamplingMask& mask, int physical_channels) {
    const std::vector<std::uint8_t> complex_ind = vcc_sample_indicator(mask, physical_channels);
    const int cc = 2 * physical_channels;
    std::vector<std::uint8_t> out(complex_ind.size() * 2);
    for (std::size_t p = 0; p < complex_ind.size() / cc; ++p)
        for (int c = 0; c < cc; ++c) {
            out[(p * cc + c) * 2] = complex_ind[p * cc + c];
            out[(p * cc + c) * 2 + 1] = complex_ind[p * cc + c];
        }
    return out;
}

namespace {

void check_forward_args(const neuralk::Tensor& d_zp, const std::vector<std::uint8_t>& sampled,
                        const LorakiNetwork& net) {
    if (net.g1.in_channels != d_zp.channels || net.g2.out_channels != d_zp.channels ||
        net.g1.out_channels != net.g2.in_channels)
        throw std::invalid_argument("loraki_forward: channel bookkeeping mismatch");
    if (sampled.size() != d_zp.data.size())
        throw std::invalid_argument("loraki_forward: sampling indicator shape mismatch");
    if (net.k_iters < 1) throw std::invalid_argument("loraki_forward: need at least one iteration");
}

} // namespace

neuralk::Tensor loraki_forward(const neuralk::Tensor& d_zp, const std::vector<std::uint8_t>& sampled,
                               const LorakiNetwork& net, bool use_relu) {
    check_forward_args(d_zp, sampled, net);
    neuralk::Tensor d = d_zp;
    for (int it = 0; it < net.k_iters; ++it) {
        neuralk::Tensor h = neuralk::conv2d_same(d, net.g1);
        if (use_relu) h = neuralk::relu(h);
        const neuralk::Tensor u = neuralk::conv2d_same(h, net.g2);
        for (std::size_t i = 0; i < d.data.size(); ++i) d.data[i] -= net.lambda.value * u.data[i];
        d = data_consistency(d, sampled, d_zp);
    }
    return d;
}

int loraki_forward_tape(neuralk::Tape& tape, const neuralk::Tensor& d_zp,
                        const std::vector<std::uint8_t>& sampled, LorakiNetwork& net, bool use_relu) {
    check_forward_args(d_zp, sampled, net);
    int d = tape.input(d_zp);
    for (int it = 0; it < net.k_iters; ++it) {
        int h = tape.conv2d(d, &net.g1);
        if (use_relu) h = tape.relu(h);
        const int u = tape.conv2d(h, &net.g2);
        const int stepped = tape.update_step(d, u, &net.lambda);
        d = tape.data_consistency(stepped, sampled, d_zp);
    }
    return d;
}

namespace {

SamplingMask draw_style_mask(int n1, int n2, const MaskStyle& style, std::mt19937_64& rng, int pair_index) {
    switch (style.kind) {
    case MaskKind::Uniform: {
        const int a = std::max(1, static_cast<int>(std::lround(style.accel)));
        // Cycle the lattice phase across pairs so every anchor that can
        // appear at reconstruction time is trained.
        const int anchor = pair_index % a;
        SamplingMask m(n1, n2);
        for (int j = anchor; j < n2; j += a)
            for (int i = 0; i < n1; ++i) m.at(i, j) = 1;
        validate(m);
        return m;
    }
    case MaskKind::Random: {
        // Small fully sampled center so every example keeps its DC
        // neighborhood, mirroring variable-density acquisitions.
        const int acs1 = std::max(4, n1 / 8);
        const int acs2 = std::max(4, n2 / 8);
        return variable_density_mask(n1, n2, style.accel, std::min(acs1, n1), std::min(acs2, n2),
                                     rng(), style.density_exponent);
    }
    case MaskKind::PartialFourier: {
        const int a = std::max(1, static_cast<int>(std::lround(style.accel)));
        return partial_fourier_mask(n1, n2, style.pf_fraction, a, 0);
    }
    }
    throw std::logic_error("draw_style_mask: unknown style");
}

} // namespace

std::vector<TrainingPair> make_training_pairs(const KSpace& acs_source, const MaskStyle& style, int count,
                                              std::uint64_t seed, int patch_n1, int patch_n2) {
    if (count < 1) throw std::invalid_argument("make_training_pairs: need at least one pair");
    const bool patching = patch_n1 > 0 && patch_n2 > 0 && (patch_n1 < acs_source.n1 || patch_n2 < acs_source.n2);
    const int bn1 = patching ? std::min(patch_n1, acs_source.n1) : acs_source.n1;
    const int bn2 = patching ? std::min(patch_n2, acs_source.n2) : acs_source.n2;
    if (bn1 < 4 || bn2 < 4 || static_cast<long>(bn1) * bn2 < 576)
        throw std::invalid_argument("make_training_pairs: ACS block too small for training");

    KSpace aug_full;
    if (patching) aug_full = vcc_augment(acs_source);

    std::vector<TrainingPair> pairs;
    pairs.reserve(count);
    for (int t = 0; t < count; ++t) {
        std::mt19937_64 rng(derive_seed(seed, "training-pair", static_cast<std::uint64_t>(t)));
        TrainingPair pair;
        if (patching) {
            const int r0 = static_cast<int>(rng() % static_cast<std::uint64_t>(acs_source.n1 - bn1 + 1));
            const int c0 = static_cast<int>(rng() % static_cast<std::uint64_t>(acs_source.n2 - bn2 + 1));
            KSpace patch(bn1, bn2, aug_full.channels);
            for (int i = 0; i < bn1; ++i)
                for (int j = 0; j < bn2; ++j)
                    for (int c = 0; c < aug_full.channels; ++c) patch.at(i, j, c) = aug_full.at(r0 + i, c0 + j, c);
            pair.target = split_complex_to_real(patch);
        } else {
            pair.target = to_vcc_real(acs_source);
        }
        pair.mask = draw_style_mask(bn1, bn2, style, rng, t);
        pair.sampled = vcc_real_indicator(pair.mask, acs_source.channels);
        pair.input = pair.target;
        for (std::size_t i = 0; i < pair.input.data.size(); ++i)
            if (!pair.sampled[i]) pair.input.data[i] = 0.0;
        pairs.push_back(std::move(pair));
    }
    return pairs;
}

LorakiTrainResult train_loraki(const std::vector<TrainingPair>& pairs, const LorakiNetwork& net_template,
                               const LorakiTrainConfig& config, std::uint64_t seed) {
    if (pairs.empty()) throw std::invalid_argument("train_loraki: need at least one training pair");

    LorakiTrainResult result;
    LorakiNetwork& net = result.net;
    net = net_template;
    net.train_lambda = config.train_lambda;
    if (net.g1.weights.empty())
        net.g1 = neuralk::make_conv_layer(net_template.g1.in_channels, net_template.g1.out_channels,
                                          net_template.g1.support, derive_seed(seed, "g1"));
    if (net.g2.weights.empty()) {
        net.g2 = neuralk::make_conv_layer(net_template.g2.in_channels, net_template.g2.out_channels,
                                          net_template.g2.support, derive_seed(seed, "g2"));
        for (double& w : net.g2.weights) w *= config.g2_init_scale;
    }
    for (const TrainingPair& pair : pairs) {
        if (pair.input.channels != net.g1.in_channels)
            throw std::invalid_argument("train_loraki: pair channel count does not match the network");
    }

    const std::size_t n1 = net.g1.weights.size();
    const std::size_t n2 = net.g2.weights.size();
    const std::size_t total = n1 + n2 + (net.train_lambda ? 1 : 0);
    neuralk::AdamState adam;
    adam.lr = config.lr;
    std::vector<double> flat(total), grad(total);

    result.loss_history.reserve(config.steps);
    for (int step = 0; step < config.steps; ++step) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double loss = 0.0;
        for (const TrainingPair& pair : pairs) {
            neuralk::Tape tape;
            const int out = loraki_forward_tape(tape, pair.input, pair.sampled, net);
            const int loss_node = tape.mse_loss(out, pair.target);
            loss += tape.scalar_value(loss_node);
            tape.backward(loss_node);
            const std::vector<double>& g1g = tape.weight_grad(&net.g1);
            const std::vector<double>& g2g = tape.weight_grad(&net.g2);
            for (std::size_t i = 0; i < n1; ++i) grad[i] += g1g[i];
            for (std::size_t i = 0; i < n2; ++i) grad[n1 + i] += g2g[i];
            if (net.train_lambda) grad[total - 1] += tape.scalar_grad(&net.lambda);
        }
        const double scale = 1.0 / static_cast<double>(pairs.size());
        for (double& g : grad) g *= scale;
        loss *= scale;
        if (!std::isfinite(loss)) {
            std::ostringstream msg;
            msg << "train_loraki: loss diverged (non-finite) at step " << step;
            throw std::runtime_error(msg.str());
        }
        result.loss_history.push_back(loss);

        std::copy(net.g1.weights.begin(), net.g1.weights.end(), flat.begin());
        std::copy(net.g2.weights.begin(), net.g2.weights.end(), flat.begin() + static_cast<std::ptrdiff_t>(n1));
        if (net.train_lambda) flat[total - 1] = net.lambda.value;
        const double frac = config.steps > 1 ? static_cast<double>(step) / (config.steps - 1) : 0.0;
        adam.lr = config.lr * (1.0 - (1.0 - config.lr_floor) * frac);
        neuralk::adam_step(flat.data(), grad.data(), total, adam);
        std::copy(flat.begin(), flat.begin() + static_cast<std::ptrdiff_t>(n1), net.g1.weights.begin());
        std::copy(flat.begin() + static_cast<std::ptrdiff_t>(n1), flat.begin() + static_cast<std::ptrdiff_t>(n1 + n2),
                  net.g2.weights.begin());
        if (net.train_lambda) net.lambda.value = flat[total - 1];
    }
    return result;
}

KSpace reconstruct_loraki(const KSpace& d_zp, const SamplingMask& mask, const LorakiNetwork& net) {
    if (mask.n1 != d_zp.n1 || mask.n2 != d_zp.n2)
        throw std::invalid_argument("reconstruct_loraki: mask dimension mismatch");
    if (net.g1.in_channels != 4 * d_zp.channels)
        throw std::invalid_argument("reconstruct_loraki: network expects a different channel count");
    const neuralk::Tensor t = to_vcc_real(d_zp);
    const std::vector<std::uint8_t> sampled = vcc_real_indicator(mask, d_zp.channels);
    const neuralk::Tensor out = loraki_forward(t, sampled, net);
    return from_vcc_real(out);
}

KSpace synthesize_acs(const KSpace& d_zp, const SamplingMask& mask, const AcLoraksOptions& opts) {
    if (mask.sample_count() == static_cast<std::size_t>(mask.n1) * mask.n2) return d_zp;
    return ac_loraks_reconstruct(d_zp, mask, opts);
}

LorakiNetwork loraki_from_nullspace(const NullspaceBasis& nsb, const KernelSupport& support, double lambda,
                                    int physical_channels, int k_iters) {
    const int lc = 2 * physical_channels; // complex channels after VCC
    const int m = support.count();
    if (nsb.dim() != lc * m)
        throw std::invalid_argument("loraki_from_nullspace: basis dimension inconsistent with support/channels");
    const int cc = nsb.count();

    // Index of the mirrored offset for every support offset.
    std::vector<int> flip(m, -1);
    for (int mi = 0; mi < m; ++mi) {
        const auto& [p, q] = support.offsets[mi];
        for (int mj = 0; mj < m; ++mj)
            if (support.offsets[mj].first == -p && support.offsets[mj].second == -q) {
                flip[mi] = mj;
                break;
            }
        if (flip[mi] < 0)
            throw std::invalid_argument("loraki_from_nullspace: support is not symmetric under negation");
    }

    LorakiNetwork net;
    net.k_iters = k_iters;
    net.lambda.value = lambda;
    net.train_lambda = false;
    net.g1.in_channels = 2 * lc;
    net.g1.out_channels = 2 * cc;
    net.g1.support = support;
    net.g1.weights.assign(net.g1.weight_count(), 0.0);
    net.g2.in_channels = 2 * cc;
    net.g2.out_channels = 2 * lc;
    net.g2.support = support;
    net.g2.weights.assign(net.g2.weight_count(), 0.0);

    for (int j = 0; j < cc; ++j) {
        for (int c = 0; c < lc; ++c) {
            for (int mi = 0; mi < m; ++mi) {
                const cplx w = nsb.n(static_cast<Eigen::Index>(c) * m + mi, j);
                // g1 is y_j = sum_c n_{c,m} x_c[k - m].
                net.g1.w(2 * j, 2 * c, mi) = w.real();
                net.g1.w(2 * j, 2 * c + 1, mi) = -w.imag();
                net.g1.w(2 * j + 1, 2 * c, mi) = w.imag();
                net.g1.w(2 * j + 1, 2 * c + 1, mi) = w.real();
                // g2 is x_c = sum_j conj(n_{c,-m'}) y_j[k - m'].
                const cplx v = nsb.n(static_cast<Eigen::Index>(c) * m + flip[mi], j);
                net.g2.w(2 * c, 2 * j, mi) = v.real();
                net.g2.w(2 * c, 2 * j + 1, mi) = v.imag();
                net.g2.w(2 * c + 1, 2 * j, mi) = -v.imag();
                net.g2.w(2 * c + 1, 2 * j + 1, mi) = v.real();
            }
        }
    }
    return net;
}

} // namespace krecon
