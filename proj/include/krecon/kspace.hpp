#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace krecon {

using cplx = std::complex<double>;

// Multi-channel Cartesian k-space (or image-domain) samples.
// Layout is row-major with the channel index fastest:
//   data[(k1*n2 + k2)*channels + ch]
struct KSpace {
    int n1 = 0;
    int n2 = 0;
    int channels = 0;
    std::vector<cplx> data;

    KSpace() = default;
    KSpace(int n1_, int n2_, int L) : n1(n1_), n2(n2_), channels(L), data(static_cast<std::size_t>(n1_) * n2_ * L) {}

    cplx& at(int k1, int k2, int ch) { return data[(static_cast<std::size_t>(k1) * n2 + k2) * channels + ch]; }
    const cplx& at(int k1, int k2, int ch) const { return data[(static_cast<std::size_t>(k1) * n2 + k2) * channels + ch]; }
    std::size_t size() const { return data.size(); }
};

// Real-valued channel stack; complex channel l maps to real channels
// 2l (real part) and 2l+1 (imaginary part).
struct RealChannelStack {
    int n1 = 0;
    int n2 = 0;
    int channels = 0;
    std::vector<double> data;

    RealChannelStack() = default;
    RealChannelStack(int n1_, int n2_, int C) : n1(n1_), n2(n2_), channels(C), data(static_cast<std::size_t>(n1_) * n2_ * C) {}

    double& at(int k1, int k2, int ch) { return data[(static_cast<std::size_t>(k1) * n2 + k2) * channels + ch]; }
    const double& at(int k1, int k2, int ch) const { return data[(static_cast<std::size_t>(k1) * n2 + k2) * channels + ch]; }
    std::size_t size() const { return data.size(); }
};

struct MagnitudeImage {
    int n1 = 0;
    int n2 = 0;
    std::vector<double> data;

    MagnitudeImage() = default;
    MagnitudeImage(int n1_, int n2_) : n1(n1_), n2(n2_), data(static_cast<std::size_t>(n1_) * n2_) {}

    double& at(int k1, int k2) { return data[static_cast<std::size_t>(k1) * n2 + k2]; }
    const double& at(int k1, int k2) const { return data[static_cast<std::size_t>(k1) * n2 + k2]; }
};

// Throws std::invalid_argument on non-finite samples or an unworkably
// small grid (anything below 8x8).
void validate(const KSpace& k);

bool all_finite(const KSpace& k);
bool all_finite(const RealChannelStack& s);

// Unitary centered 2D DFT applied per channel: DC lands on the center
// sample (floor(n/2) per dimension), norm is preserved.
KSpace fft2_centered(const KSpace& image);
KSpace ifft2_centered(const KSpace& kspace);

// Complex <-> interleaved real/imag channel mapping (L -> 2L and back).
RealChannelStack split_complex_to_real(const KSpace& k);
KSpace merge_real_to_complex(const RealChannelStack& s);

// Appends virtual conjugate coils: channel L+l at index k holds
// conj(d_l[(N-k) mod N]) with the reflection taken per dimension.
// On even grids this is conjugate reflection about the centered DC
// sample; the unpaired edge row/column (index 0) maps to itself.
KSpace vcc_augment(const KSpace& k);

// SVD-based channel compression onto the top `target` left singular
// vectors of the channels x samples matrix.
KSpace coil_compress(const KSpace& k, int target);

// Per-channel inverse FFT followed by root-sum-of-squares across channels.
MagnitudeImage rss_image(const KSpace& k);

} // namespace krecon
