#pragma once

#include "krecon/kspace.hpp"

#include <cstdint>

namespace krecon {

// Synthetic multi-coil dataset: piecewise-smooth ellipse composite with
// limited support, smooth polynomial phase and smooth coil sensitivities,
// so k-space carries the autoregressive structure the reconstruction
// methods rely on.
struct PhantomSpec {
    int n1 = 128;
    int n2 = 128;
    int coils = 4;
    int phase_order = 2;      // polynomial degree of the smooth phase; 0 disables it
    double noise_sigma = 0.0; // complex white noise std in k-space units
    std::uint64_t seed = 1;
};

struct Phantom {
    KSpace kspace;       // per-coil k-space, noise included
    MagnitudeImage gold; // noiseless root-sum-of-squares magnitude
};

Phantom make_phantom(const PhantomSpec& spec);

} // namespace krecon
