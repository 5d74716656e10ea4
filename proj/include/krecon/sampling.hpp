#pragma once

#include "krecon/kernel_support.hpp"
#include "krecon/kspace.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace krecon {

// Inclusive rectangle; all coordinates -1 when absent.
struct AcsRegion {
    int row0 = -1;
    int row1 = -1;
    int col0 = -1;
    int col1 = -1;

    bool empty() const { return row0 < 0; }
    int rows() const { return empty() ? 0 : row1 - row0 + 1; }
    int cols() const { return empty() ? 0 : col1 - col0 + 1; }
};

// Binary Cartesian sampling indicator. Dimension 1 is the fully sampled
// readout direction for the line-based generators; dimension 2 is phase
// encoding.
struct SamplingMask {
    int n1 = 0;
    int n2 = 0;
    std::vector<std::uint8_t> sampled; // row-major [k1][k2]
    AcsRegion acs;

    SamplingMask() = default;
    SamplingMask(int n1_, int n2_) : n1(n1_), n2(n2_), sampled(static_cast<std::size_t>(n1_) * n2_, 0) {}

    std::uint8_t& at(int k1, int k2) { return sampled[static_cast<std::size_t>(k1) * n2 + k2]; }
    std::uint8_t at(int k1, int k2) const { return sampled[static_cast<std::size_t>(k1) * n2 + k2]; }
    std::size_t sample_count() const;
};

// Throws std::invalid_argument when the ACS region is not fully sampled
// or the mask has no samples at all.
void validate(const SamplingMask& m);

// One distinct local sampling configuration: the offsets of the kernel
// window that land on sampled locations, plus the binary map of the
// unsampled targets sharing that configuration.
struct LocalConfig {
    std::vector<std::pair<int, int>> offsets; // sorted canonical order
    std::vector<std::uint8_t> g;              // n1 x n2 indicator
};

struct LocalConfigSet {
    int n1 = 0;
    int n2 = 0;
    KernelSupport window;
    std::vector<LocalConfig> configs;
    // Unsampled locations with no sampled neighbor inside the window;
    // these cannot be interpolated and are reported separately.
    std::vector<std::pair<int, int>> empty_locations;
};

// Every A-th phase encoding line (anchored so the DC line is sampled)
// plus `acs_lines` fully sampled central lines.
SamplingMask uniform_mask(int n1, int n2, int accel, int acs_lines);

// Fully sampled centered ACS rectangle plus random samples drawn without
// replacement, density decaying polynomially with k-space radius, until
// round(n1*n2 / target_accel) samples are placed.
SamplingMask variable_density_mask(int n1, int n2, double target_accel, int acs_rows, int acs_cols,
                                   std::uint64_t seed, double density_exponent = 3.0);

// Restricts candidates to the first ceil(pf_fraction * n2) phase lines,
// then applies uniform-A sampling plus central ACS lines within them.
SamplingMask partial_fourier_mask(int n1, int n2, double pf_fraction, int accel, int acs_lines);

// Central ACS lines plus evenly spread remaining lines so that the total
// line count is exact; used for sweeps that hold the effective
// acceleration fixed while the ACS size varies.
SamplingMask budget_line_mask(int n1, int n2, int total_lines, int acs_lines);

double effective_acceleration(const SamplingMask& m);

// Zeroes unsampled locations in every channel.
KSpace apply_mask(const KSpace& k, const SamplingMask& m);

// Copies the fully sampled ACS block out with its own grid metadata.
KSpace extract_acs(const KSpace& k, const SamplingMask& m);

// Groups every unsampled location by the configuration of sampled
// neighbors inside the (clipped) kernel window.
LocalConfigSet enumerate_local_configs(const SamplingMask& m, const KernelSupport& window);

} // namespace krecon
