#pragma once

#include "krecon/kernel_support.hpp"
#include "krecon/kspace.hpp"
#include "krecon/sampling.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace krecon {

// Convolution-structured data matrix: one row per placement of the
// kernel support fully inside the grid, one column per (channel, offset)
// pair with columns ordered channel-major (offsets contiguous).
struct StructuredMatrix {
    int grid_n1 = 0;
    int grid_n2 = 0;
    int channels = 0;
    KernelSupport support;
    Eigen::MatrixXcd m; // P x Q

    Eigen::Index rows() const { return m.rows(); }
    Eigen::Index cols() const { return m.cols(); }
};

// Orthonormal basis of the (approximate) nullspace of a calibration
// matrix; columns reshape to per-channel annihilation kernels.
struct NullspaceBasis {
    Eigen::MatrixXcd n; // Q x C, orthonormal columns

    int dim() const { return static_cast<int>(n.rows()); }
    int count() const { return static_cast<int>(n.cols()); }
};

struct divergence_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

StructuredMatrix build_P(const KSpace& d, const KernelSupport& support);
StructuredMatrix build_P(const RealChannelStack& d, const KernelSupport& support);

// Exact adjoint of build_P: scatter-accumulate matrix entries back onto
// the grid so that <P(x), Y> == <x, P*(Y)> for all x, Y.
KSpace apply_P_adjoint(const Eigen::MatrixXcd& y, const KernelSupport& support, int n1, int n2, int channels);
RealChannelStack apply_P_adjoint_real(const Eigen::MatrixXd& y, const KernelSupport& support, int n1, int n2,
                                      int channels);

StructuredMatrix calibration_matrix(const KSpace& acs, const KernelSupport& support);

// The c right singular vectors with smallest singular values.
NullspaceBasis estimate_nullspace(const StructuredMatrix& calib, int c);
// All right singular vectors with sigma <= tau * sigma_max.
NullspaceBasis estimate_nullspace_threshold(const StructuredMatrix& calib, double tau);

// Power-iteration estimate (50 steps, fixed seed) of the largest
// eigenvalue mu of x -> P*(P(x) N N^H); returns 1/mu, safely below the
// 2/mu convergence bound of the Landweber iteration.
double estimate_step_size(int n1, int n2, int channels, const KernelSupport& support, const NullspaceBasis& nsb);

struct LandweberResult {
    KSpace recon;
    std::vector<double> objective; // ||P(d)N||_F^2 at iterates 0..iters
};

// Iterates d <- U(d - lambda * P*(P(d) N N^H)) + d_zp with U zeroing the
// sampled locations, starting from d_zp. Sampled entries of the output
// are bit-identical to d_zp. Throws divergence_error when the objective
// grows for three consecutive iterations.
LandweberResult ac_loraks_landweber(const KSpace& d_zp, const SamplingMask& mask, const NullspaceBasis& nsb,
                                    const KernelSupport& support, double lambda, int iters);
// Per-sample variant for channel-dependent sampling (virtual conjugate
// coils): `sampled` has one entry per (k1,k2,ch) in data order.
LandweberResult ac_loraks_landweber(const KSpace& d_zp, const std::vector<std::uint8_t>& sampled,
                                    const NullspaceBasis& nsb, const KernelSupport& support, double lambda,
                                    int iters);

// Per-sample indicator for a VCC-augmented dataset with 2L channels:
// physical channels follow the mask, virtual channels the reflected mask.
std::vector<std::uint8_t> vcc_sample_indicator(const SamplingMask& mask, int physical_channels);

// Largest rectangle inside the ACS region whose conjugate reflection is
// also fully sampled; calibration on a VCC-augmented dataset is
// restricted to this core so virtual channels carry no zero-filled gaps.
AcsRegion vcc_core_region(const SamplingMask& mask);

struct AcLoraksOptions {
    int r1 = 7;
    int r2 = 7;
    int nullspace_count = 0;   // >0: fixed C
    double nullspace_tau = 0.0; // >0 and count==0: threshold rule
    int iters = 200;
    double lambda = 0.0; // <=0: estimated
};

// Full linear reconstruction: VCC augment, calibrate on the symmetric
// ACS core, estimate the nullspace and step size, run the Landweber
// iteration, drop the virtual channels.
KSpace ac_loraks_reconstruct(const KSpace& d_zp, const SamplingMask& mask, const AcLoraksOptions& opts);

} // namespace krecon
