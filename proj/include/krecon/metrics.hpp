#pragma once

#include "krecon/kspace.hpp"

#include <string>
#include <utility>
#include <vector>

namespace krecon {

struct ReconReport {
    std::string method;
    double nrmse = 0.0;
    double ssim = 0.0;
    double runtime_seconds = 0.0;
    std::vector<std::pair<double, double>> esp; // (radius bin center, error ratio)
    std::string config_snapshot;
    bool failed = false;
    std::string error;
};

// ||recon - gold||_2 / ||gold||_2 on magnitude images.
double nrmse(const MagnitudeImage& recon, const MagnitudeImage& gold);

// Mean local SSIM over the valid window positions, 11x11 Gaussian window
// with sigma 1.5, K1 = 0.01, K2 = 0.03, dynamic range 1 (the gold image
// is expected to be normalized to [0,1]).
double ssim(const MagnitudeImage& recon, const MagnitudeImage& gold);

// Radially binned spectral error: per annulus b of frequency radius,
// ||F(recon - gold)|_b|| / ||F(gold)|_b||. Annuli without content are
// omitted from the result.
std::vector<std::pair<double, double>> error_spectrum(const MagnitudeImage& recon, const MagnitudeImage& gold,
                                                      int n_bins);

} // namespace krecon
