#include "krecon/loraks.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <random>
#include <sstream>

namespace krecon {

namespace {

struct Placement {
    int lo1, hi1, lo2, hi2; // inclusive placement ranges

    int count1() const { return hi1 - lo1 + 1; }
    int count2() const { return hi2 - lo2 + 1; }
    Eigen::Index rows() const { return static_cast<Eigen::Index>(count1()) * count2(); }
};

Placement placements(int n1, int n2, const KernelSupport& s) {
    if (n1 <= s.r1 || n2 <= s.r2) {
        std::ostringstream msg;
        msg << "structured matrix: grid " << n1 << "x" << n2 << " must be strictly larger than the " << s.r1 << "x"
            << s.r2 << " support";
        throw std::invalid_argument(msg.str());
    }
    return {s.max_p(), n1 - 1 + s.min_p(), s.max_q(), n2 - 1 + s.min_q()};
}

template <typename Scalar, typename Container>
void gather(const Container& d, const KernelSupport& s, const Placement& pl,
            Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& out) {
    const int m = s.count();
    out.resize(pl.rows(), static_cast<Eigen::Index>(m) * d.channels);
    Eigen::Index row = 0;
    for (int k1 = pl.lo1; k1 <= pl.hi1; ++k1) {
        for (int k2 = pl.lo2; k2 <= pl.hi2; ++k2, ++row) {
            for (int c = 0; c < d.channels; ++c) {
                for (int mi = 0; mi < m; ++mi) {
                    const auto& [p, q] = s.offsets[mi];
                    out(row, static_cast<Eigen::Index>(c) * m + mi) = d.at(k1 - p, k2 - q, c);
                }
            }
        }
    }
}

template <typename Scalar, typename Container>
void scatter(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& y, const KernelSupport& s,
             const Placement& pl, Container& out) {
    const int m = s.count();
    if (y.rows() != pl.rows() || y.cols() != static_cast<Eigen::Index>(m) * out.channels)
        throw std::invalid_argument("apply_P_adjoint: matrix dimensions inconsistent with support and grid");
    Eigen::Index row = 0;
    for (int k1 = pl.lo1; k1 <= pl.hi1; ++k1) {
        for (int k2 = pl.lo2; k2 <= pl.hi2; ++k2, ++row) {
            for (int c = 0; c < out.channels; ++c) {
                for (int mi = 0; mi < m; ++mi) {
                    const auto& [p, q] = s.offsets[mi];
                    out.at(k1 - p, k2 - q, c) += y(row, static_cast<Eigen::Index>(c) * m + mi);
                }
            }
        }
    }
}

} // namespace

StructuredMatrix build_P(const KSpace& d, const KernelSupport& support) {
    StructuredMatrix sm;
    sm.grid_n1 = d.n1;
    sm.grid_n2 = d.n2;
    sm.channels = d.channels;
    sm.support = support;
    gather(d, support, placements(d.n1, d.n2, support), sm.m);
    return sm;
}

StructuredMatrix build_P(const RealChannelStack& d, const KernelSupport& support) {
    StructuredMatrix sm;
    sm.grid_n1 = d.n1;
    sm.grid_n2 = d.n2;
    sm.channels = d.channels;
    sm.support = support;
    Eigen::MatrixXd real;
    gather(d, support, placements(d.n1, d.n2, support), real);
    sm.m = real.cast<cplx>();
    return sm;
}

KSpace apply_P_adjoint(const Eigen::MatrixXcd& y, const KernelSupport& support, int n1, int n2, int channels) {
    KSpace out(n1, n2, channels);
    scatter(y, support, placements(n1, n2, support), out);
    return out;
}

RealChannelStack apply_P_adjoint_real(const Eigen::MatrixXd& y, const KernelSupport& support, int n1, int n2,
                                      int channels) {
    RealChannelStack out(n1, n2, channels);
    scatter(y, support, placements(n1, n2, support), out);
    return out;
}

StructuredMatrix calibration_matrix(const KSpace& acs, const KernelSupport& support) {
    return build_P(acs, support);
}

namespace {

NullspaceBasis trailing_vectors(const StructuredMatrix& calib, int c) {
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(calib.m, Eigen::ComputeFullV);
    NullspaceBasis nsb;
    nsb.n = svd.matrixV().rightCols(c);
    return nsb;
}

} // namespace

NullspaceBasis estimate_nullspace(const StructuredMatrix& calib, int c) {
    if (c < 1 || c >= calib.cols()) throw std::invalid_argument("estimate_nullspace: need 1 <= c < Q");
    return trailing_vectors(calib, c);
}

NullspaceBasis estimate_nullspace_threshold(const StructuredMatrix& calib, double tau) {
    if (tau <= 0.0 || tau >= 1.0) throw std::invalid_argument("estimate_nullspace: threshold must be in (0,1)");
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(calib.m, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double cutoff = tau * sv(0);
    // Columns of V beyond min(P,Q) correspond to exact zeros.
    Eigen::Index c = calib.cols() - sv.size();
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) <= cutoff) ++c;
    if (c < 1) throw std::invalid_argument("estimate_nullspace: no singular values below threshold");
    if (c >= calib.cols()) c = calib.cols() - 1;
    NullspaceBasis nsb;
    nsb.n = svd.matrixV().rightCols(c);
    return nsb;
}

double estimate_step_size(int n1, int n2, int channels, const KernelSupport& support, const NullspaceBasis& nsb) {
    if (nsb.count() < 1) throw std::invalid_argument("estimate_step_size: empty nullspace basis");
    const Placement pl = placements(n1, n2, support);
    std::mt19937_64 rng(0x6b72656bULL);
    std::normal_distribution<double> gauss(0.0, 1.0);
    KSpace x(n1, n2, channels);
    for (cplx& v : x.data) v = cplx(gauss(rng), gauss(rng));

    Eigen::MatrixXcd g;
    double mu = 0.0;
    for (int it = 0; it < 50; ++it) {
        double norm = 0.0;
        for (const cplx& v : x.data) norm += std::norm(v);
        norm = std::sqrt(norm);
        if (norm == 0.0) throw std::runtime_error("estimate_step_size: operator annihilated the probe vector");
        for (cplx& v : x.data) v /= norm;

        gather<cplx>(x, support, pl, g);
        const Eigen::MatrixXcd z = (g * nsb.n) * nsb.n.adjoint();
        KSpace tx(n1, n2, channels);
        scatter(z, support, pl, tx);

        mu = 0.0;
        for (const cplx& v : tx.data) mu += std::norm(v);
        mu = std::sqrt(mu);
        x = std::move(tx);
    }
    if (mu <= 0.0) throw std::runtime_error("estimate_step_size: zero spectral norm");
    return 1.0 / mu;
}

LandweberResult ac_loraks_landweber(const KSpace& d_zp, const std::vector<std::uint8_t>& sampled,
                                    const NullspaceBasis& nsb, const KernelSupport& support, double lambda,
                                    int iters) {
    if (iters < 1) throw std::invalid_argument("ac_loraks_landweber: need at least one iteration");
    if (lambda <= 0.0) throw std::invalid_argument("ac_loraks_landweber: step size must be positive");
    if (sampled.size() != d_zp.data.size())
        throw std::invalid_argument("ac_loraks_landweber: sampling indicator size mismatch");
    if (nsb.dim() != support.count() * d_zp.channels)
        throw std::invalid_argument("ac_loraks_landweber: nullspace dimension inconsistent with support");

    const Placement pl = placements(d_zp.n1, d_zp.n2, support);
    LandweberResult res;
    res.recon = d_zp;
    res.objective.reserve(static_cast<std::size_t>(iters) + 1);

    Eigen::MatrixXcd g;
    int growth_streak = 0;
    for (int it = 0; it < iters; ++it) {
        gather<cplx>(res.recon, support, pl, g);
        const Eigen::MatrixXcd y = g * nsb.n;
        res.objective.push_back(y.squaredNorm());
        // Growth below the floating-point floor of the data scale is noise,
        // not divergence.
        const double floor = 1e-20 * g.squaredNorm();
        if (res.objective.size() >= 2 && res.objective.back() > floor &&
            res.objective.back() > res.objective[res.objective.size() - 2] * (1.0 + 1e-9)) {
            if (++growth_streak >= 3) {
                std::ostringstream msg;
                msg << "ac_loraks_landweber: objective grew for 3 consecutive iterations (at iteration " << it
                    << "); use a smaller step size";
                throw divergence_error(msg.str());
            }
        } else {
            growth_streak = 0;
        }
        const Eigen::MatrixXcd z = y * nsb.n.adjoint();
        KSpace grad(d_zp.n1, d_zp.n2, d_zp.channels);
        scatter(z, support, pl, grad);
        for (std::size_t i = 0; i < res.recon.data.size(); ++i) {
            if (sampled[i])
                res.recon.data[i] = d_zp.data[i];
            else
                res.recon.data[i] -= lambda * grad.data[i];
        }
    }
    gather<cplx>(res.recon, support, pl, g);
    res.objective.push_back((g * nsb.n).squaredNorm());
    return res;
}

LandweberResult ac_loraks_landweber(const KSpace& d_zp, const SamplingMask& mask, const NullspaceBasis& nsb,
                                    const KernelSupport& support, double lambda, int iters) {
    if (mask.n1 != d_zp.n1 || mask.n2 != d_zp.n2)
        throw std::invalid_argument("ac_loraks_landweber: mask dimension mismatch");
    std::vector<std::uint8_t> sampled(d_zp.data.size());
    for (int i = 0; i < d_zp.n1; ++i)
        for (int j = 0; j < d_zp.n2; ++j)
            for (int c = 0; c < d_zp.channels; ++c)
                sampled[(static_cast<std::size_t>(i) * d_zp.n2 + j) * d_zp.channels + c] = mask.at(i, j);
    return ac_loraks_landweber(d_zp, sampled, nsb, support, lambda, iters);
}

std::vector<std::uint8_t> vcc_sample_indicator(const SamplingMask& mask, int physical_channels) {
    const int channels = 2 * physical_channels;
    std::vector<std::uint8_t> sampled(static_cast<std::size_t>(mask.n1) * mask.n2 * channels);
    for (int i = 0; i < mask.n1; ++i) {
        const int ri = (mask.n1 - i) % mask.n1;
        for (int j = 0; j < mask.n2; ++j) {
            const int rj = (mask.n2 - j) % mask.n2;
            const std::size_t base = (static_cast<std::size_t>(i) * mask.n2 + j) * channels;
            for (int c = 0; c < physical_channels; ++c) {
                sampled[base + c] = mask.at(i, j);
                sampled[base + physical_channels + c] = mask.at(ri, rj);
            }
        }
    }
    return sampled;
}

AcsRegion vcc_core_region(const SamplingMask& mask) {
    if (mask.acs.empty()) throw std::invalid_argument("vcc_core_region: mask has no ACS region");
    auto shrink = [](int a, int b, int n) -> std::pair<int, int> {
        if (a == 0 && b == n - 1) return {a, b}; // full axis reflects onto itself
        // Intersect [a,b] with its reflection [n-b, n-a], dropping the
        // unpaired index 0 when present.
        const int a1 = std::max(a, 1);
        return {std::max(a1, n - b), std::min(b, n - a1)};
    };
    auto [r0, r1] = shrink(mask.acs.row0, mask.acs.row1, mask.n1);
    auto [c0, c1] = shrink(mask.acs.col0, mask.acs.col1, mask.n2);
    if (r0 > r1 || c0 > c1) throw std::invalid_argument("vcc_core_region: ACS region has no symmetric core");
    return {r0, r1, c0, c1};
}

KSpace ac_loraks_reconstruct(const KSpace& d_zp, const SamplingMask& mask, const AcLoraksOptions& opts) {
    const KSpace aug = vcc_augment(d_zp);
    const AcsRegion core = vcc_core_region(mask);
    KSpace calib_block(core.rows(), core.cols(), aug.channels);
    for (int i = 0; i < calib_block.n1; ++i)
        for (int j = 0; j < calib_block.n2; ++j)
            for (int c = 0; c < aug.channels; ++c)
                calib_block.at(i, j, c) = aug.at(core.row0 + i, core.col0 + j, c);

    const KernelSupport support = kernel_support(opts.r1, opts.r2, SupportShape::Ellipsoidal);
    const StructuredMatrix calib = calibration_matrix(calib_block, support);
    NullspaceBasis nsb;
    if (opts.nullspace_count > 0)
        nsb = estimate_nullspace(calib, opts.nullspace_count);
    else
        nsb = estimate_nullspace_threshold(calib, opts.nullspace_tau > 0.0 ? opts.nullspace_tau : 0.05);

    const double lambda =
        opts.lambda > 0.0 ? opts.lambda : estimate_step_size(aug.n1, aug.n2, aug.channels, support, nsb);
    const std::vector<std::uint8_t> sampled = vcc_sample_indicator(mask, d_zp.channels);
    const LandweberResult result = ac_loraks_landweber(aug, sampled, nsb, support, lambda, opts.iters);

    KSpace out(d_zp.n1, d_zp.n2, d_zp.channels);
    for (int i = 0; i < out.n1; ++i)
        for (int j = 0; j < out.n2; ++j)
            for (int c = 0; c < out.channels; ++c) out.at(i, j, c) = result.recon.at(i, j, c);
    return out;
}

} // namespace krecon
