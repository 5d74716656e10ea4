#pragma once

#include "krecon/loraks.hpp"
#include "krecon/neuralk.hpp"
#include "krecon/sampling.hpp"

#include <cstdint>
#include <vector>

namespace krecon {

// Unrolled K-step convolutional RNN over the 4L-channel (virtual
// conjugate coil + real split) representation. Both layers share their
// weights across iterations.
struct LorakiNetwork {
    neuralk::ConvLayerParams g1; // 4L -> C
    neuralk::ConvLayerParams g2; // C -> 4L
    neuralk::ScalarParam lambda{1.0};
    int k_iters = 5;
    bool train_lambda = true;
};

struct TrainingPair {
    neuralk::Tensor input;              // zero-filled 4L block
    neuralk::Tensor target;             // fully known 4L block
    SamplingMask mask;                  // training mask over the block
    std::vector<std::uint8_t> sampled;  // per-entry indicator, 4L channels
};

enum class MaskKind { Uniform, Random, PartialFourier };

struct MaskStyle {
    MaskKind kind = MaskKind::Uniform;
    double accel = 4.0;
    double pf_fraction = 1.0;
    double density_exponent = 3.0;
};

struct LorakiTrainConfig {
    int steps = 600;
    double lr = 3e-3;
    // Linear decay of the learning rate to lr * lr_floor over the run.
    double lr_floor = 0.1;
    bool train_lambda = true;
    // Damping of the output layer's initialization; keeps the unrolled
    // update contractive at the start of training (the step scale itself
    // starts at 1 and is absorbable into g2).
    double g2_init_scale = 0.1;
};

struct LorakiTrainResult {
    LorakiNetwork net;
    std::vector<double> loss_history;
};

// Selector: d_zp where sampled, x elsewhere. Idempotent.
neuralk::Tensor data_consistency(const neuralk::Tensor& x, const std::vector<std::uint8_t>& sampled,
                                 const neuralk::Tensor& d_zp);
neuralk::Tensor data_consistency(const neuralk::Tensor& x, const SamplingMask& mask, const neuralk::Tensor& d_zp);

// KSpace with L channels -> 4L real channels (VCC then real split), and
// back (merge, drop virtual channels).
neuralk::Tensor to_vcc_real(const KSpace& k);
KSpace from_vcc_real(const neuralk::Tensor& t);
// Per-entry indicator for the 4L representation of a masked acquisition.
std::vector<std::uint8_t> vcc_real_indicator(const SamplingMask& mask, int physical_channels);

// Exactly K iterations of
//   d <- U(d - lambda * g2(relu(g1(d)))) + d_zp
// starting from d_zp; sampled entries of the output equal d_zp.
neuralk::Tensor loraki_forward(const neuralk::Tensor& d_zp, const std::vector<std::uint8_t>& sampled,
                               const LorakiNetwork& net, bool use_relu = true);

// Tape-recorded variant used for training and gradient checks; returns
// the node id of the final iterate.
int loraki_forward_tape(neuralk::Tape& tape, const neuralk::Tensor& d_zp,
                        const std::vector<std::uint8_t>& sampled, LorakiNetwork& net, bool use_relu = true);

// Draws `count` fresh masks of the requested style over the ACS block
// and pairs the zero-filled block with the fully known block. When
// patch dimensions are given and are smaller than the source, the
// source is VCC-augmented on its full grid first and patches are cut
// from the augmented stack (anchors drawn per pair).
std::vector<TrainingPair> make_training_pairs(const KSpace& acs_source, const MaskStyle& style, int count,
                                              std::uint64_t seed, int patch_n1 = 0, int patch_n2 = 0);

// Adaptive-moment training of (g1, g2, lambda) on the mean squared error
// between the K-step forward pass and the pair targets. The template
// fixes C, K, supports and the lambda setup; empty template weights are
// initialized from the seed.
LorakiTrainResult train_loraki(const std::vector<TrainingPair>& pairs, const LorakiNetwork& net_template,
                               const LorakiTrainConfig& config, std::uint64_t seed);

// Full-grid reconstruction: VCC + split, K forward iterations, merge,
// drop virtual channels. Sampled physical-channel entries equal the
// acquired data exactly.
KSpace reconstruct_loraki(const KSpace& d_zp, const SamplingMask& mask, const LorakiNetwork& net);

// Fast linear full-k-space reconstruction used as a synthetic ACS source
// when little real ACS data was acquired. Fully sampled input passes
// through unchanged.
KSpace synthesize_acs(const KSpace& d_zp, const SamplingMask& mask, const AcLoraksOptions& opts);

// Loads the two convolution layers from an AC-LORAKS nullspace basis so
// that, with ReLU disabled, the forward pass reproduces the Landweber
// iteration on interior pixels: g1 realizes P(.)N and g2 realizes
// P*(. N^H) as real-valued same-size convolutions.
LorakiNetwork loraki_from_nullspace(const NullspaceBasis& nsb, const KernelSupport& support, double lambda,
                                    int physical_channels, int k_iters);

} // namespace krecon
