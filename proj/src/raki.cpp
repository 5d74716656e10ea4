#include "krecon/raki.hpp"

#include "krecon/seeds.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

namespace krecon {

namespace {

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t channel, std::uint64_t layer) {
    return derive_seed(base, "raki-layer", channel * 8 + layer);
}

SamplingMask mask_from_configs(const LocalConfigSet& configs) {
    SamplingMask m(configs.n1, configs.n2);
    std::fill(m.sampled.begin(), m.sampled.end(), 1);
    for (const LocalConfig& cfg : configs.configs)
        for (std::size_t i = 0; i < cfg.g.size(); ++i)
            if (cfg.g[i]) m.sampled[i] = 0;
    for (const auto& [i, j] : configs.empty_locations) m.at(i, j) = 0;
    return m;
}

std::string format_offsets(const std::vector<std::pair<int, int>>& offsets) {
    std::ostringstream s;
    s << "{";
    for (std::size_t i = 0; i < offsets.size(); ++i) {
        if (i) s << ", ";
        s << "(" << offsets[i].first << "," << offsets[i].second << ")";
    }
    s << "}";
    return s.str();
}

} // namespace

RakiTrainResult train_raki(const KSpace& acs, const LocalConfigSet& configs, const RakiHyper& hyper,
                           std::uint64_t seed) {
    validate(acs);
    if (configs.configs.empty()) throw std::invalid_argument("train_raki: no local sampling configurations");
    const int rf1 = hyper.r11 + hyper.r12 + hyper.r13 - 2;
    const int rf2 = hyper.r21 + hyper.r22 + hyper.r23 - 2;
    if (acs.n1 < rf1 || acs.n2 < rf2)
        throw std::invalid_argument("train_raki: ACS block smaller than the composite receptive field");

    const neuralk::Tensor block = split_complex_to_real(acs);
    const int j_count = static_cast<int>(configs.configs.size());
    const std::size_t npx = static_cast<std::size_t>(acs.n1) * acs.n2;

    // Training masks: column crops of the acquisition mask laid over the
    // ACS block, chosen so every configuration receives targets.
    const SamplingMask acq = mask_from_configs(configs);
    std::map<std::vector<std::pair<int, int>>, int> config_index;
    for (int j = 0; j < j_count; ++j) config_index[configs.configs[j].offsets] = j;

    struct CropData {
        std::vector<std::uint8_t> input_keep; // per pixel
        std::vector<int> target_config;       // per pixel, -1 when unused
    };
    std::vector<CropData> crops;
    std::vector<std::uint8_t> covered(j_count, 0);
    int covered_count = 0;
    for (int c0 = 0; c0 + acs.n2 <= acq.n2 && static_cast<int>(crops.size()) < hyper.max_train_masks; ++c0) {
        SamplingMask crop(acs.n1, acs.n2);
        for (int i = 0; i < acs.n1; ++i)
            for (int j = 0; j < acs.n2; ++j) crop.at(i, j) = acq.at(std::min(i, acq.n1 - 1), c0 + j);
        if (crop.sample_count() == 0 || crop.sample_count() == npx) continue;
        const LocalConfigSet local = enumerate_local_configs(crop, configs.window);
        CropData data;
        data.input_keep.resize(npx);
        for (std::size_t p = 0; p < npx; ++p) data.input_keep[p] = crop.sampled[p];
        data.target_config.assign(npx, -1);
        bool adds_coverage = false;
        for (const LocalConfig& lc : local.configs) {
            auto it = config_index.find(lc.offsets);
            if (it == config_index.end()) continue; // pattern absent from the acquisition
            for (std::size_t p = 0; p < npx; ++p)
                if (lc.g[p]) data.target_config[p] = it->second;
            if (!covered[it->second]) {
                covered[it->second] = 1;
                ++covered_count;
                adds_coverage = true;
            }
        }
        if (adds_coverage) crops.push_back(std::move(data));
        if (covered_count == j_count) break;
    }
    if (crops.empty()) throw std::invalid_argument("train_raki: could not derive training masks from the configurations");
    for (int j = 0; j < j_count; ++j) {
        if (!covered[j]) {
            std::ostringstream msg;
            msg << "train_raki: no training targets for configuration " << format_offsets(configs.configs[j].offsets);
            throw std::invalid_argument(msg.str());
        }
    }

    RakiTrainResult result;
    RakiNet& net = result.net;
    net.complex_channels = acs.channels;
    net.hyper = hyper;
    for (const LocalConfig& cfg : configs.configs) net.configs.push_back(cfg.offsets);
    result.loss_history.assign(hyper.adam_steps, 0.0);

    const int real_channels = 2 * acs.channels;
    for (int l = 0; l < real_channels; ++l) {
        RakiNet::ChannelNet cn;
        cn.f1 = neuralk::make_conv_layer(real_channels, hyper.c1, rect_support(hyper.r11, hyper.r21),
                                         mix_seed(seed, l, 1));
        cn.f2 = neuralk::make_conv_layer(hyper.c1, hyper.c2, rect_support(hyper.r12, hyper.r22), mix_seed(seed, l, 2));
        cn.f3 = neuralk::make_conv_layer(hyper.c2, j_count, rect_support(hyper.r13, hyper.r23), mix_seed(seed, l, 3));

        // Per-crop inputs, targets and selections are fixed across steps.
        std::vector<neuralk::Tensor> inputs, targets;
        std::vector<std::vector<std::uint8_t>> selects;
        for (const CropData& crop : crops) {
            neuralk::Tensor in = block;
            for (std::size_t p = 0; p < npx; ++p)
                if (!crop.input_keep[p])
                    for (int c = 0; c < real_channels; ++c) in.data[p * real_channels + c] = 0.0;
            neuralk::Tensor tgt(acs.n1, acs.n2, j_count);
            std::vector<std::uint8_t> sel(tgt.data.size(), 0);
            for (std::size_t p = 0; p < npx; ++p) {
                const int j = crop.target_config[p];
                if (j < 0) continue;
                tgt.data[p * j_count + j] = block.data[p * real_channels + l];
                sel[p * j_count + j] = 1;
            }
            inputs.push_back(std::move(in));
            targets.push_back(std::move(tgt));
            selects.push_back(std::move(sel));
        }

        const std::size_t s1 = cn.f1.weights.size(), s2 = cn.f2.weights.size(), s3 = cn.f3.weights.size();
        std::vector<double> flat(s1 + s2 + s3), grad(s1 + s2 + s3);
        neuralk::AdamState adam;
        adam.lr = hyper.lr;
        for (int step = 0; step < hyper.adam_steps; ++step) {
            std::fill(grad.begin(), grad.end(), 0.0);
            double loss = 0.0;
            for (std::size_t t = 0; t < inputs.size(); ++t) {
                neuralk::Tape tape;
                const int x = tape.input(inputs[t]);
                const int y = tape.conv2d(tape.relu(tape.conv2d(tape.relu(tape.conv2d(x, &cn.f1)), &cn.f2)), &cn.f3);
                const int loss_node = tape.masked_mse_loss(y, targets[t], selects[t]);
                loss += tape.scalar_value(loss_node);
                tape.backward(loss_node);
                const auto& g1 = tape.weight_grad(&cn.f1);
                const auto& g2 = tape.weight_grad(&cn.f2);
                const auto& g3 = tape.weight_grad(&cn.f3);
                for (std::size_t i = 0; i < s1; ++i) grad[i] += g1[i];
                for (std::size_t i = 0; i < s2; ++i) grad[s1 + i] += g2[i];
                for (std::size_t i = 0; i < s3; ++i) grad[s1 + s2 + i] += g3[i];
            }
            const double scale = 1.0 / static_cast<double>(inputs.size());
            for (double& g : grad) g *= scale;
            loss *= scale;
            if (!std::isfinite(loss)) {
                std::ostringstream msg;
                msg << "train_raki: loss diverged at step " << step << " for channel " << l;
                throw std::runtime_error(msg.str());
            }
            result.loss_history[step] += loss;

            std::copy(cn.f1.weights.begin(), cn.f1.weights.end(), flat.begin());
            std::copy(cn.f2.weights.begin(), cn.f2.weights.end(), flat.begin() + static_cast<std::ptrdiff_t>(s1));
            std::copy(cn.f3.weights.begin(), cn.f3.weights.end(),
                      flat.begin() + static_cast<std::ptrdiff_t>(s1 + s2));
            neuralk::adam_step(flat.data(), grad.data(), flat.size(), adam);
            std::copy(flat.begin(), flat.begin() + static_cast<std::ptrdiff_t>(s1), cn.f1.weights.begin());
            std::copy(flat.begin() + static_cast<std::ptrdiff_t>(s1),
                      flat.begin() + static_cast<std::ptrdiff_t>(s1 + s2), cn.f2.weights.begin());
            std::copy(flat.begin() + static_cast<std::ptrdiff_t>(s1 + s2), flat.end(), cn.f3.weights.begin());
        }
        net.nets.push_back(std::move(cn));
    }
    return result;
}

KSpace apply_raki(const KSpace& d_zp, const RakiNet& net, const LocalConfigSet& configs) {
    if (d_zp.channels != net.complex_channels) throw std::invalid_argument("apply_raki: channel count mismatch");
    if (configs.n1 != d_zp.n1 || configs.n2 != d_zp.n2)
        throw std::invalid_argument("apply_raki: configuration grid mismatch");
    // Map each configuration to its trained output channel.
    std::vector<int> config_to_j(configs.configs.size(), -1);
    for (std::size_t k = 0; k < configs.configs.size(); ++k) {
        for (std::size_t j = 0; j < net.configs.size(); ++j)
            if (net.configs[j] == configs.configs[k].offsets) {
                config_to_j[k] = static_cast<int>(j);
                break;
            }
        if (config_to_j[k] < 0)
            throw std::invalid_argument("apply_raki: network was not trained for configuration " +
                                        format_offsets(configs.configs[k].offsets));
    }

    const neuralk::Tensor x = split_complex_to_real(d_zp);
    neuralk::Tensor out = x;
    const std::size_t npx = static_cast<std::size_t>(d_zp.n1) * d_zp.n2;
    for (std::size_t l = 0; l < net.nets.size(); ++l) {
        const RakiNet::ChannelNet& cn = net.nets[l];
        const neuralk::Tensor y =
            neuralk::conv2d_same(neuralk::relu(neuralk::conv2d_same(neuralk::relu(neuralk::conv2d_same(x, cn.f1)), cn.f2)), cn.f3);
        for (std::size_t k = 0; k < configs.configs.size(); ++k) {
            const LocalConfig& cfg = configs.configs[k];
            const int j = config_to_j[k];
            for (std::size_t p = 0; p < npx; ++p)
                if (cfg.g[p]) out.data[p * out.channels + l] += y.data[p * y.channels + j];
        }
    }
    return merge_real_to_complex(out);
}

} // namespace krecon
