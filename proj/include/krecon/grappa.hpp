#pragma once

#include "krecon/kernel_support.hpp"
#include "krecon/kspace.hpp"
#include "krecon/sampling.hpp"

#include <utility>
#include <vector>

namespace krecon {

// Calibrated interpolation weights: for each local sampling
// configuration j and output channel l, one complex weight per
// (source channel, offset in Lambda_j) pair.
struct GrappaKernelSet {
    int channels = 0; // L
    int r1 = 0;
    int r2 = 0;

    struct ConfigKernel {
        std::vector<std::pair<int, int>> offsets;  // Lambda_j, canonical order
        std::vector<std::vector<cplx>> weights;    // [l][c * |Lambda| + mi]
    };
    std::vector<ConfigKernel> kernels;
};

// Kernel window used for config enumeration: (A+1) x (A+1).
KernelSupport grappa_window(int accel);

// Least-squares calibration from the fully sampled ACS block, one solve
// per (output channel, configuration), Tikhonov-regularized with
// reg_scale times the mean squared ACS magnitude.
GrappaKernelSet train_grappa(const KSpace& acs, const LocalConfigSet& configs, int r1, int r2,
                             double reg_scale = 1e-6);

// Fills each unsampled location from its configuration's kernel; sampled
// locations pass through bit-identical.
KSpace apply_grappa(const KSpace& d_zp, const GrappaKernelSet& kernels, const LocalConfigSet& configs);

} // namespace krecon
