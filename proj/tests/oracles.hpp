#pragma once

// Independent reference computations used by the unit and acceptance
// suites. Everything here is deliberately written against the public
// operator definitions rather than the solver internals.

#include "krecon/loraks.hpp"

#include <Eigen/Dense>

#include <random>
#include <vector>

namespace krecon::oracles {

inline KSpace random_kspace(int n1, int n2, int ch, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    KSpace k(n1, n2, ch);
    for (cplx& v : k.data) v = cplx(gauss(rng), gauss(rng));
    return k;
}

inline NullspaceBasis random_orthonormal_basis(int q, int c, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXcd m(q, c);
    for (int i = 0; i < q; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = cplx(gauss(rng), gauss(rng));
    const Eigen::HouseholderQR<Eigen::MatrixXcd> qr(m);
    NullspaceBasis nsb;
    nsb.n = Eigen::MatrixXcd(qr.householderQ()).leftCols(c);
    return nsb;
}

// Solves min ||P(d) N||_F^2 subject to d = d_zp at sampled entries by an
// explicit dense least-squares solve over the unsampled entries.
inline KSpace constrained_least_squares(const KSpace& d_zp, const std::vector<std::uint8_t>& sampled,
                                        const NullspaceBasis& nsb, const KernelSupport& support) {
    std::vector<std::size_t> unknowns;
    for (std::size_t i = 0; i < sampled.size(); ++i)
        if (!sampled[i]) unknowns.push_back(i);

    const StructuredMatrix base = build_P(d_zp, support);
    const Eigen::MatrixXcd b_mat = base.m * nsb.n;
    const Eigen::Index rows = b_mat.rows() * b_mat.cols();

    Eigen::MatrixXcd a(rows, unknowns.size());
    KSpace basis(d_zp.n1, d_zp.n2, d_zp.channels);
    for (std::size_t u = 0; u < unknowns.size(); ++u) {
        basis.data[unknowns[u]] = cplx(1.0, 0.0);
        const Eigen::MatrixXcd col = build_P(basis, support).m * nsb.n;
        a.col(static_cast<Eigen::Index>(u)) = Eigen::Map<const Eigen::VectorXcd>(col.data(), rows);
        basis.data[unknowns[u]] = cplx(0.0, 0.0);
    }
    const Eigen::VectorXcd b = Eigen::Map<const Eigen::VectorXcd>(b_mat.data(), rows);
    // Minimum-norm least squares: the Landweber iteration started from the
    // zero-filled data never leaves range(A*), so its limit is exactly the
    // pseudo-inverse solution even when A is rank deficient.
    const Eigen::VectorXcd u =
        Eigen::BDCSVD<Eigen::MatrixXcd>(a, Eigen::ComputeThinU | Eigen::ComputeThinV).solve(-b);

    KSpace out = d_zp;
    for (std::size_t i = 0; i < unknowns.size(); ++i) out.data[unknowns[i]] += u(static_cast<Eigen::Index>(i));
    return out;
}

inline double rel_err(const KSpace& a, const KSpace& b) {
    double num = 0, den = 0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        num += std::norm(a.data[i] - b.data[i]);
        den += std::norm(b.data[i]);
    }
    return std::sqrt(num / den);
}

} // namespace krecon::oracles
