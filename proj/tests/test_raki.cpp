#include "krecon/raki.hpp"

#include "krecon/grappa.hpp"
#include "krecon/metrics.hpp"
#include "krecon/phantom.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace krecon;

namespace {

KSpace exponential_kspace(int n1, int n2, int channels, int modes, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-M_PI, M_PI);
    std::vector<double> u(modes), v(modes);
    std::vector<std::vector<cplx>> amp(channels, std::vector<cplx>(modes));
    for (int t = 0; t < modes; ++t) {
        u[t] = unif(rng);
        v[t] = unif(rng);
        for (int c = 0; c < channels; ++c) amp[c][t] = cplx(unif(rng), unif(rng)) / M_PI;
    }
    KSpace k(n1, n2, channels);
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j)
            for (int c = 0; c < channels; ++c) {
                cplx acc(0, 0);
                for (int t = 0; t < modes; ++t) acc += amp[c][t] * std::exp(cplx(0.0, u[t] * i + v[t] * j));
                k.at(i, j, c) = acc;
            }
    return k;
}

double rel_err(const KSpace& a, const KSpace& b) {
    double num = 0, den = 0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        num += std::norm(a.data[i] - b.data[i]);
        den += std::norm(b.data[i]);
    }
    return std::sqrt(num / den);
}

// Wraps trained GRAPPA kernels into the three-layer network shape using a
// +/- channel pair through the activations, so the overall map is the
// same linear interpolation. Used as the linear-collapse oracle.
RakiNet raki_from_grappa(const GrappaKernelSet& kernels, const LocalConfigSet& configs, int window_r1,
                         int window_r2) {
    const int l_cplx = kernels.channels;
    const int j_count = static_cast<int>(configs.configs.size());
    RakiNet net;
    net.complex_channels = l_cplx;
    for (const LocalConfig& cfg : configs.configs) net.configs.push_back(cfg.offsets);

    const KernelSupport window = rect_support(window_r1, window_r2);
    for (int l = 0; l < 2 * l_cplx; ++l) {
        const int lc = l / 2;
        const bool imag_part = l % 2 != 0;
        RakiNet::ChannelNet cn;
        cn.f1.in_channels = 2 * l_cplx;
        cn.f1.out_channels = 2 * j_count;
        cn.f1.support = window;
        cn.f1.weights.assign(cn.f1.weight_count(), 0.0);
        for (int j = 0; j < j_count; ++j) {
            const LocalConfig& cfg = configs.configs[j];
            const GrappaKernelSet::ConfigKernel* kernel = nullptr;
            for (const auto& kk : kernels.kernels)
                if (kk.offsets == cfg.offsets) kernel = &kk;
            REQUIRE(kernel != nullptr);
            for (int c = 0; c < l_cplx; ++c)
                for (std::size_t mi = 0; mi < cfg.offsets.size(); ++mi) {
                    const cplx w = kernel->weights[lc][static_cast<std::size_t>(c) * cfg.offsets.size() + mi];
                    int wi = -1;
                    for (int t = 0; t < window.count(); ++t)
                        if (window.offsets[t] == cfg.offsets[mi]) wi = t;
                    REQUIRE(wi >= 0);
                    // Real/imaginary expansion of the complex product.
                    const double wr = imag_part ? w.imag() : w.real();
                    const double wi2 = imag_part ? w.real() : -w.imag();
                    cn.f1.w(j, 2 * c, wi) += wr;
                    cn.f1.w(j, 2 * c + 1, wi) += wi2;
                    cn.f1.w(j_count + j, 2 * c, wi) -= wr;
                    cn.f1.w(j_count + j, 2 * c + 1, wi) -= wi2;
                }
        }
        cn.f2.in_channels = cn.f2.out_channels = 2 * j_count;
        cn.f2.support = rect_support(1, 1);
        cn.f2.weights.assign(cn.f2.weight_count(), 0.0);
        for (int j = 0; j < 2 * j_count; ++j) cn.f2.w(j, j, 0) = 1.0;
        cn.f3.in_channels = 2 * j_count;
        cn.f3.out_channels = j_count;
        cn.f3.support = rect_support(1, 1);
        cn.f3.weights.assign(cn.f3.weight_count(), 0.0);
        for (int j = 0; j < j_count; ++j) {
            cn.f3.w(j, j, 0) = 1.0;
            cn.f3.w(j, j_count + j, 0) = -1.0;
        }
        net.nets.push_back(std::move(cn));
    }
    return net;
}

} // namespace

TEST_CASE("positive-negative channel pairing reproduces the linear interpolation exactly") {
    const KSpace full = exponential_kspace(24, 24, 2, 3, 5);
    const SamplingMask mask = uniform_mask(24, 24, 2, 8);
    const KSpace d_zp = apply_mask(full, mask);
    const LocalConfigSet configs = enumerate_local_configs(mask, grappa_window(2));
    const GrappaKernelSet kernels = train_grappa(extract_acs(d_zp, mask), configs, 3, 3);
    const KSpace grappa_out = apply_grappa(d_zp, kernels, configs);

    const RakiNet net = raki_from_grappa(kernels, configs, 3, 3);
    const KSpace raki_out = apply_raki(d_zp, net, configs);
    CHECK(rel_err(raki_out, grappa_out) < 1e-8);
}

TEST_CASE("fully sampled input passes through unchanged") {
    const KSpace full = exponential_kspace(16, 16, 1, 2, 7);
    const SamplingMask mask = uniform_mask(16, 16, 1, 0);
    const LocalConfigSet configs = enumerate_local_configs(mask, grappa_window(2));
    RakiNet net;
    net.complex_channels = 1;
    const KSpace out = apply_raki(full, net, configs);
    for (std::size_t i = 0; i < full.data.size(); ++i) CHECK(out.data[i] == full.data[i]);
}

TEST_CASE("training is deterministic per seed") {
    const KSpace full = exponential_kspace(24, 24, 1, 2, 11);
    const SamplingMask mask = uniform_mask(24, 24, 2, 10);
    const LocalConfigSet configs = enumerate_local_configs(mask, grappa_window(2));
    const KSpace acs = extract_acs(apply_mask(full, mask), mask);
    RakiHyper hyper;
    hyper.c1 = 6;
    hyper.c2 = 4;
    hyper.adam_steps = 10;
    const RakiTrainResult a = train_raki(acs, configs, hyper, 99);
    const RakiTrainResult b = train_raki(acs, configs, hyper, 99);
    REQUIRE(a.net.nets.size() == b.net.nets.size());
    for (std::size_t l = 0; l < a.net.nets.size(); ++l) {
        CHECK(a.net.nets[l].f1.weights == b.net.nets[l].f1.weights);
        CHECK(a.net.nets[l].f2.weights == b.net.nets[l].f2.weights);
        CHECK(a.net.nets[l].f3.weights == b.net.nets[l].f3.weights);
    }
    const RakiTrainResult c = train_raki(acs, configs, hyper, 100);
    CHECK(a.net.nets[0].f1.weights != c.net.nets[0].f1.weights);
}

TEST_CASE("training loss decreases") {
    const Phantom ph = make_phantom({48, 48, 2, 2, 0.005, 3});
    const SamplingMask mask = uniform_mask(48, 48, 2, 16);
    const LocalConfigSet configs = enumerate_local_configs(mask, grappa_window(2));
    const KSpace acs = extract_acs(apply_mask(ph.kspace, mask), mask);
    RakiHyper hyper;
    hyper.c1 = 8;
    hyper.c2 = 4;
    hyper.adam_steps = 120;
    const RakiTrainResult r = train_raki(acs, configs, hyper, 5);
    CHECK(r.loss_history.back() < r.loss_history.front());
}

TEST_CASE("trained network matches calibrated linear interpolation on held-in targets") {
    const KSpace full = exponential_kspace(32, 32, 2, 2, 13);
    const SamplingMask mask = uniform_mask(32, 32, 2, 14);
    const KSpace d_zp = apply_mask(full, mask);
    const LocalConfigSet configs = enumerate_local_configs(mask, grappa_window(2));
    const KSpace acs = extract_acs(d_zp, mask);

    const GrappaKernelSet kernels = train_grappa(acs, configs, 3, 3);

    RakiHyper hyper;
    hyper.c1 = 16;
    hyper.c2 = 8;
    hyper.adam_steps = 2500;
    hyper.lr = 5e-3;
    hyper.r21 = hyper.r23 = 3; // both neighboring lines at this acceleration
    const RakiTrainResult trained = train_raki(acs, configs, hyper, 17);

    // Validation domain: the first acquisition-pattern crop over the ACS
    // block, i.e. the held-in targets both methods calibrate on.
    SamplingMask crop(acs.n1, acs.n2);
    for (int i = 0; i < acs.n1; ++i)
        for (int j = 0; j < acs.n2; ++j) crop.at(i, j) = mask.at(i, j);
    const KSpace vin = apply_mask(acs, crop);
    LocalConfigSet vconfigs;
    vconfigs.n1 = acs.n1;
    vconfigs.n2 = acs.n2;
    vconfigs.window = configs.window;
    for (const LocalConfig& c : enumerate_local_configs(crop, grappa_window(2)).configs) {
        for (const LocalConfig& e : configs.configs)
            if (e.offsets == c.offsets) {
                vconfigs.configs.push_back(c);
                break;
            }
    }
    const KSpace raki_out = apply_raki(vin, trained.net, vconfigs);
    const KSpace grappa_out = apply_grappa(vin, kernels, vconfigs);
    double er = 0, eg = 0, den = 0;
    for (const LocalConfig& c : vconfigs.configs)
        for (int i = 0; i < acs.n1; ++i)
            for (int j = 0; j < acs.n2; ++j)
                if (c.g[static_cast<std::size_t>(i) * acs.n2 + j])
                    for (int ch = 0; ch < 2; ++ch) {
                        er += std::norm(raki_out.at(i, j, ch) - acs.at(i, j, ch));
                        eg += std::norm(grappa_out.at(i, j, ch) - acs.at(i, j, ch));
                        den += std::norm(acs.at(i, j, ch));
                    }
    const double raki_val = std::sqrt(er / den);
    const double grappa_val = std::sqrt(eg / den);
    CHECK(raki_val <= grappa_val + 1e-3);
}

TEST_CASE("sampled entries pass through bit-identically") {
    const Phantom ph = make_phantom({32, 32, 2, 2, 0.01, 7});
    const SamplingMask mask = uniform_mask(32, 32, 2, 12);
    const KSpace d_zp = apply_mask(ph.kspace, mask);
    const LocalConfigSet configs = enumerate_local_configs(mask, grappa_window(2));
    RakiHyper hyper;
    hyper.c1 = 6;
    hyper.c2 = 4;
    hyper.adam_steps = 30;
    const RakiTrainResult trained = train_raki(extract_acs(d_zp, mask), configs, hyper, 3);
    const KSpace out = apply_raki(d_zp, trained.net, configs);
    for (int i = 0; i < 32; ++i)
        for (int j = 0; j < 32; ++j)
            if (mask.at(i, j))
                for (int c = 0; c < 2; ++c) CHECK(out.at(i, j, c) == d_zp.at(i, j, c));
}

TEST_CASE("config mismatch at apply time is rejected") {
    const KSpace full = exponential_kspace(24, 24, 1, 2, 19);
    const SamplingMask mask = uniform_mask(24, 24, 2, 8);
    const LocalConfigSet configs = enumerate_local_configs(mask, grappa_window(2));
    RakiHyper hyper;
    hyper.c1 = 4;
    hyper.c2 = 4;
    hyper.adam_steps = 5;
    const RakiTrainResult trained = train_raki(extract_acs(apply_mask(full, mask), mask), configs, hyper, 7);

    const SamplingMask other = uniform_mask(24, 24, 3, 9);
    const LocalConfigSet other_configs = enumerate_local_configs(other, grappa_window(3));
    CHECK_THROWS_AS((void)apply_raki(apply_mask(full, other), trained.net, other_configs), std::invalid_argument);
}

TEST_CASE("ACS blocks below the receptive field are rejected") {
    const KSpace full = exponential_kspace(24, 24, 1, 2, 23);
    const SamplingMask mask = uniform_mask(24, 24, 2, 2);
    const LocalConfigSet configs = enumerate_local_configs(mask, grappa_window(2));
    const KSpace acs = extract_acs(apply_mask(full, mask), mask);
    RakiHyper hyper; // default phase extents need 2+1+2-2 = 3 columns
    CHECK(acs.n2 == 2);
    CHECK_THROWS_AS((void)train_raki(acs, configs, hyper, 1), std::invalid_argument);
}

TEST_CASE("more ACS lines do not hurt reconstruction quality") {
    // Trend over 16 -> 32 -> 64 central lines at fixed sampling, averaged
    // over seeds, with a 5 percent tolerance for inversions.
    const int acs_sizes[3] = {16, 32, 64};
    double mean_err[3] = {0, 0, 0};
    for (int a = 0; a < 3; ++a) {
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
            const Phantom ph = make_phantom({48, 96, 2, 2, 0.01, seed});
            const SamplingMask mask = uniform_mask(48, 96, 2, acs_sizes[a]);
            const KSpace d_zp = apply_mask(ph.kspace, mask);
            const LocalConfigSet configs = enumerate_local_configs(mask, grappa_window(2));
            RakiHyper hyper;
            hyper.c1 = 16;
            hyper.c2 = 4;
            hyper.adam_steps = 200;
            hyper.r21 = hyper.r23 = 3;
            const RakiTrainResult trained = train_raki(extract_acs(d_zp, mask), configs, hyper, seed);
            mean_err[a] += rel_err(apply_raki(d_zp, trained.net, configs), ph.kspace) / 3.0;
        }
    }
    CHECK(mean_err[1] <= mean_err[0] * 1.05);
    CHECK(mean_err[2] <= mean_err[1] * 1.05);
}
