#pragma once

#include "krecon/kspace.hpp"
#include "krecon/neuralk.hpp"
#include "krecon/sampling.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace krecon {

// Network hyperparameters; kernel extents are (readout x phase).
struct RakiHyper {
    int c1 = 32;
    int c2 = 8;
    int r11 = 5, r21 = 2;
    int r12 = 1, r22 = 1;
    int r13 = 3, r23 = 2;
    int adam_steps = 300;
    double lr = 3e-3;
    int max_train_masks = 4;
};

// One three-layer convolutional network (2L -> C1 -> C2 -> J) per output
// real channel, operating on the real-split representation.
struct RakiNet {
    int complex_channels = 0; // L
    RakiHyper hyper;
    std::vector<std::vector<std::pair<int, int>>> configs; // canonical Lambda_j order

    struct ChannelNet {
        neuralk::ConvLayerParams f1, f2, f3;
    };
    std::vector<ChannelNet> nets; // one per real channel (2L)
};

struct RakiTrainResult {
    RakiNet net;
    std::vector<double> loss_history; // summed over channels, per step
};

// Trains per-channel networks on the ACS block. Training inputs are the
// block subsampled by crops of the acquisition mask (reconstructed from
// the configuration set), so every local sampling configuration that
// must be filled at apply time receives training targets.
RakiTrainResult train_raki(const KSpace& acs, const LocalConfigSet& configs, const RakiHyper& hyper,
                           std::uint64_t seed);

// d_zp plus per-configuration network predictions at the unsampled
// locations; sampled entries pass through bit-identical.
KSpace apply_raki(const KSpace& d_zp, const RakiNet& net, const LocalConfigSet& configs);

} // namespace krecon
