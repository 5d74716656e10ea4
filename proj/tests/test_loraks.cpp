#include "krecon/loraks.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <random>

using namespace krecon;
using oracles::random_kspace;

TEST_CASE("3x3 ellipsoidal support is the five-offset cross") {
    const KernelSupport s = kernel_support(3, 3, SupportShape::Ellipsoidal);
    CHECK(s.count() == 5);
    CHECK(s.contains(0, 0));
    CHECK(s.contains(1, 0));
    CHECK(s.contains(-1, 0));
    CHECK(s.contains(0, 1));
    CHECK(s.contains(0, -1));
    CHECK(!s.contains(1, 1));
}

TEST_CASE("3x3 rectangular support has all nine offsets") {
    CHECK(kernel_support(3, 3, SupportShape::Rectangular).count() == 9);
}

TEST_CASE("7x7 ellipsoidal support matches the integer-grid enumeration") {
    const KernelSupport s = kernel_support(7, 7, SupportShape::Ellipsoidal);
    int oracle = 0;
    for (int p = -3; p <= 3; ++p)
        for (int q = -3; q <= 3; ++q)
            if (p * p + q * q <= 9) ++oracle;
    CHECK(oracle == 29);
    CHECK(s.count() == 29);
    for (int p = -3; p <= 3; ++p)
        for (int q = -3; q <= 3; ++q) CHECK(s.contains(p, q) == (p * p + q * q <= 9));
}

TEST_CASE("even kernel extents are rejected") {
    CHECK_THROWS_AS((void)kernel_support(4, 3, SupportShape::Rectangular), std::invalid_argument);
    CHECK_THROWS_AS((void)kernel_support(3, 2, SupportShape::Ellipsoidal), std::invalid_argument);
}

TEST_CASE("ellipsoidal offsets are a subset of the rectangular ones") {
    const KernelSupport e = kernel_support(5, 7, SupportShape::Ellipsoidal);
    const KernelSupport r = kernel_support(5, 7, SupportShape::Rectangular);
    for (const auto& [p, q] : e.offsets) CHECK(r.contains(p, q));
    CHECK(e.count() < r.count());
}

TEST_CASE("1x1 support embeds the data as a column vector") {
    const KSpace d = random_kspace(8, 8, 1, 3);
    const StructuredMatrix sm = build_P(d, kernel_support(1, 1, SupportShape::Rectangular));
    REQUIRE(sm.rows() == 64);
    REQUIRE(sm.cols() == 1);
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) CHECK(sm.m(i * 8 + j, 0) == d.at(i, j, 0));
}

TEST_CASE("constant data builds a rank-1 structured matrix") {
    KSpace d(8, 8, 2);
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) {
            d.at(i, j, 0) = cplx(2.0, -1.0);
            d.at(i, j, 1) = cplx(0.5, 0.25);
        }
    const StructuredMatrix sm = build_P(d, kernel_support(3, 3, SupportShape::Ellipsoidal));
    for (Eigen::Index r = 1; r < sm.rows(); ++r) CHECK((sm.m.row(r) - sm.m.row(0)).norm() < 1e-14);
}

TEST_CASE("structured matrix entries match direct indexing") {
    const KSpace d = random_kspace(8, 8, 2, 5);
    const KernelSupport s = kernel_support(3, 3, SupportShape::Ellipsoidal);
    const StructuredMatrix sm = build_P(d, s);
    REQUIRE(sm.rows() == 36);
    REQUIRE(sm.cols() == 10);
    Eigen::Index row = 0;
    for (int k1 = 1; k1 <= 6; ++k1)
        for (int k2 = 1; k2 <= 6; ++k2, ++row)
            for (int c = 0; c < 2; ++c)
                for (int mi = 0; mi < s.count(); ++mi)
                    CHECK(sm.m(row, c * s.count() + mi) ==
                          d.at(k1 - s.offsets[mi].first, k2 - s.offsets[mi].second, c));
}

TEST_CASE("grids not strictly larger than the support are rejected") {
    const KSpace d = random_kspace(8, 8, 1, 1);
    KernelSupport s = kernel_support(7, 7, SupportShape::Rectangular);
    CHECK_NOTHROW((void)build_P(d, s));
    KSpace tiny(7, 8, 1);
    CHECK_THROWS_AS((void)build_P(tiny, s), std::invalid_argument);
}

TEST_CASE("adjoint identity holds on random instances") {
    std::mt19937_64 rng(99);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 20; ++trial) {
        const KSpace x = random_kspace(10, 9, 2, 1000 + trial);
        const KernelSupport s = kernel_support(3, 3, SupportShape::Ellipsoidal);
        const StructuredMatrix px = build_P(x, s);
        Eigen::MatrixXcd y(px.rows(), px.cols());
        for (Eigen::Index i = 0; i < y.rows(); ++i)
            for (Eigen::Index j = 0; j < y.cols(); ++j) y(i, j) = cplx(gauss(rng), gauss(rng));
        const KSpace adj = apply_P_adjoint(y, s, 10, 9, 2);
        cplx lhs = (px.m.array() * y.array().conjugate()).sum();
        cplx rhs(0, 0);
        for (std::size_t i = 0; i < x.data.size(); ++i) rhs += x.data[i] * std::conj(adj.data[i]);
        CHECK(std::abs(lhs - rhs) / (px.m.norm() * y.norm()) < 1e-10);
    }
}

TEST_CASE("adjoint of P applied to P(constant) accumulates placement multiplicities") {
    KSpace x(8, 8, 1);
    for (cplx& v : x.data) v = cplx(1.0, 0.5);
    const KernelSupport s = kernel_support(3, 3, SupportShape::Rectangular);
    const StructuredMatrix px = build_P(x, s);
    const KSpace adj = apply_P_adjoint(px.m, s, 8, 8, 1);
    // Multiplicity oracle: how many (placement, offset) pairs touch each index.
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) {
            int mult = 0;
            for (int k1 = 1; k1 <= 6; ++k1)
                for (int k2 = 1; k2 <= 6; ++k2)
                    for (const auto& [p, q] : s.offsets)
                        if (k1 - p == i && k2 - q == j) ++mult;
            CHECK(std::abs(adj.at(i, j, 0) - static_cast<double>(mult) * x.at(i, j, 0)) < 1e-12);
        }
}

TEST_CASE("adjoint of the zero matrix is zero") {
    const KernelSupport s = kernel_support(3, 3, SupportShape::Ellipsoidal);
    const Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(36, 5);
    const KSpace adj = apply_P_adjoint(y, s, 8, 8, 1);
    for (const cplx& v : adj.data) CHECK(v == cplx(0.0, 0.0));
}

TEST_CASE("planted annihilation relation shows up in the nullspace") {
    // Channel 1 is channel 0 convolved with a known kernel, so one exact
    // annihilator exists for interior placements.
    const KernelSupport s = kernel_support(3, 3, SupportShape::Ellipsoidal);
    const KSpace base = random_kspace(12, 12, 1, 17);
    KSpace d(12, 12, 2);
    std::mt19937_64 rng(18);
    std::normal_distribution<double> gauss;
    std::vector<cplx> h(s.count());
    for (cplx& v : h) v = cplx(gauss(rng), gauss(rng));
    for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 12; ++j) {
            d.at(i, j, 0) = base.at(i, j, 0);
            cplx acc(0, 0);
            for (int mi = 0; mi < s.count(); ++mi) {
                const int si = i - s.offsets[mi].first, sj = j - s.offsets[mi].second;
                if (si >= 0 && si < 12 && sj >= 0 && sj < 12) acc += h[mi] * base.at(si, sj, 0);
            }
            d.at(i, j, 1) = acc;
        }
    const StructuredMatrix calib = calibration_matrix(d, s);
    const Eigen::BDCSVD<Eigen::MatrixXcd> svd(calib.m);
    const auto& sv = svd.singularValues();
    CHECK(sv(sv.size() - 1) < 1e-10 * sv(0));

    const NullspaceBasis nsb = estimate_nullspace(calib, 1);
    CHECK((calib.m * nsb.n).norm() < 1e-9 * calib.m.norm());
    // The planted annihilator (h, -delta) spans the same direction.
    Eigen::VectorXcd planted = Eigen::VectorXcd::Zero(calib.cols());
    for (int mi = 0; mi < s.count(); ++mi) planted(mi) = h[mi];
    for (int mi = 0; mi < s.count(); ++mi)
        if (s.offsets[mi] == std::make_pair(0, 0)) planted(s.count() + mi) = cplx(-1.0, 0.0);
    planted.normalize();
    const cplx overlap = (planted.adjoint() * nsb.n.col(0))(0, 0);
    CHECK(std::abs(overlap) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("c = 1 returns the last right singular vector of a full-rank matrix") {
    const KSpace d = random_kspace(9, 9, 1, 23);
    const StructuredMatrix calib = calibration_matrix(d, kernel_support(3, 3, SupportShape::Ellipsoidal));
    const NullspaceBasis nsb = estimate_nullspace(calib, 1);
    const Eigen::BDCSVD<Eigen::MatrixXcd> svd(calib.m);
    CHECK((calib.m * nsb.n.col(0)).norm() == doctest::Approx(svd.singularValues()(calib.cols() - 1)).epsilon(1e-10));
}

TEST_CASE("nullspace columns are orthonormal") {
    const KSpace d = random_kspace(10, 10, 2, 29);
    const StructuredMatrix calib = calibration_matrix(d, kernel_support(3, 3, SupportShape::Ellipsoidal));
    const NullspaceBasis nsb = estimate_nullspace(calib, 3);
    const Eigen::MatrixXcd gram = nsb.n.adjoint() * nsb.n;
    CHECK((gram - Eigen::MatrixXcd::Identity(3, 3)).norm() < 1e-10);
}

TEST_CASE("nullspace size request must stay below the column count") {
    const KSpace d = random_kspace(9, 9, 1, 31);
    const StructuredMatrix calib = calibration_matrix(d, kernel_support(3, 3, SupportShape::Ellipsoidal));
    CHECK_THROWS_AS((void)estimate_nullspace(calib, calib.cols()), std::invalid_argument);
}

TEST_CASE("threshold rule collects exactly the small singular directions") {
    const KernelSupport s = kernel_support(3, 3, SupportShape::Ellipsoidal);
    const KSpace base = random_kspace(12, 12, 1, 37);
    KSpace d(12, 12, 2);
    for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 12; ++j) {
            d.at(i, j, 0) = base.at(i, j, 0);
            d.at(i, j, 1) = 2.0 * base.at(i, j, 0); // one exact scaling relation
        }
    const StructuredMatrix calib = calibration_matrix(d, s);
    const NullspaceBasis nsb = estimate_nullspace_threshold(calib, 1e-8);
    CHECK(nsb.count() == s.count()); // per-offset annihilators of the scaling relation
    CHECK((calib.m * nsb.n).norm() < 1e-8 * calib.m.norm());
}

TEST_CASE("identity composite map yields unit step size") {
    NullspaceBasis nsb;
    nsb.n = Eigen::MatrixXcd::Identity(1, 1);
    const double lambda = estimate_step_size(8, 8, 1, kernel_support(1, 1, SupportShape::Rectangular), nsb);
    CHECK(lambda == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("power iteration tracks the explicit spectral norm within 5 percent") {
    const KernelSupport s = kernel_support(3, 3, SupportShape::Ellipsoidal);
    const NullspaceBasis nsb = oracles::random_orthonormal_basis(s.count(), 2, 43);
    const int n = 6;
    // Explicit matrix of x -> P*(P(x) N N^H) over the 36-dim complex space.
    Eigen::MatrixXcd t(n * n, n * n);
    for (int i = 0; i < n * n; ++i) {
        KSpace e(n, n, 1);
        e.data[static_cast<std::size_t>(i)] = cplx(1.0, 0.0);
        const StructuredMatrix pe = build_P(e, s);
        const KSpace col = apply_P_adjoint((pe.m * nsb.n) * nsb.n.adjoint(), s, n, n, 1);
        for (int j = 0; j < n * n; ++j) t(j, i) = col.data[static_cast<std::size_t>(j)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(t);
    const double mu = eig.eigenvalues().maxCoeff();
    const double lambda = estimate_step_size(n, n, 1, s, nsb);
    CHECK(std::abs(1.0 / lambda - mu) < 0.05 * mu);
}

TEST_CASE("landweber matches the explicit constrained least-squares solution") {
    const KernelSupport s = kernel_support(3, 3, SupportShape::Ellipsoidal);
    const KSpace full = random_kspace(8, 8, 1, 47);
    SamplingMask mask(8, 8);
    std::mt19937_64 rng(48);
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) mask.at(i, j) = (rng() % 4 != 0) ? 1 : 0;
    mask.at(4, 4) = 1;
    mask.at(0, 0) = mask.at(0, 7) = mask.at(7, 0) = mask.at(7, 7) = 1;
    const KSpace d_zp = apply_mask(full, mask);
    const NullspaceBasis nsb = oracles::random_orthonormal_basis(s.count(), 2, 49);
    const double lambda = estimate_step_size(8, 8, 1, s, nsb);

    const LandweberResult res = ac_loraks_landweber(d_zp, mask, nsb, s, lambda, 2000);
    for (std::size_t i = 1; i < res.objective.size(); ++i)
        CHECK(res.objective[i] <= res.objective[i - 1] + 1e-12);

    std::vector<std::uint8_t> sampled(d_zp.data.size());
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) sampled[static_cast<std::size_t>(i) * 8 + j] = mask.at(i, j);
    const KSpace direct = oracles::constrained_least_squares(d_zp, sampled, nsb, s);
    CHECK(oracles::rel_err(res.recon, direct) < 1e-6);

    // Hard data consistency, bit-identical.
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j)
            if (mask.at(i, j)) CHECK(res.recon.at(i, j, 0) == d_zp.at(i, j, 0));
}

TEST_CASE("data already annihilated by the basis is a fixed point") {
    const KernelSupport s = kernel_support(7, 7, SupportShape::Ellipsoidal);
    const KSpace full = random_kspace(8, 8, 1, 53);
    SamplingMask mask(8, 8);
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) mask.at(i, j) = (i + j) % 3 == 0 ? 0 : 1;
    const KSpace d_zp = apply_mask(full, mask);
    // Exact nullspace of P(d_zp): 4 rows vs 29 columns leaves room.
    const StructuredMatrix p = build_P(d_zp, s);
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(p.m, Eigen::ComputeFullV);
    NullspaceBasis nsb;
    nsb.n = svd.matrixV().rightCols(2);
    REQUIRE((p.m * nsb.n).norm() < 1e-12 * p.m.norm());

    const LandweberResult res = ac_loraks_landweber(d_zp, mask, nsb, s, 0.5, 50);
    CHECK(oracles::rel_err(res.recon, d_zp) < 1e-12);
}

TEST_CASE("divergent step sizes raise a descriptive error") {
    const KernelSupport s = kernel_support(3, 3, SupportShape::Ellipsoidal);
    const KSpace full = random_kspace(8, 8, 1, 59);
    SamplingMask mask(8, 8);
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) mask.at(i, j) = (j % 2 == 0) ? 1 : 0;
    const KSpace d_zp = apply_mask(full, mask);
    const NullspaceBasis nsb = oracles::random_orthonormal_basis(s.count(), 2, 61);
    const double lambda = estimate_step_size(8, 8, 1, s, nsb);
    CHECK_THROWS_AS((void)ac_loraks_landweber(d_zp, mask, nsb, s, 40.0 * lambda, 100), divergence_error);
}

TEST_CASE("single-annihilator fixed point solves the one-kernel least-squares problem") {
    const KernelSupport s = kernel_support(3, 3, SupportShape::Ellipsoidal);
    const KSpace full = random_kspace(8, 8, 2, 67);
    SamplingMask mask(8, 8);
    // A handful of spread-out interior holes keeps the single-annihilator
    // problem well posed (unique minimizer) on this tiny grid.
    for (auto& v : mask.sampled) v = 1;
    mask.at(2, 3) = mask.at(3, 5) = mask.at(5, 2) = mask.at(4, 4) = mask.at(6, 5) = 0;
    const KSpace d_zp = apply_mask(full, mask);
    const NullspaceBasis nsb = oracles::random_orthonormal_basis(2 * s.count(), 1, 69);
    const double lambda = estimate_step_size(8, 8, 2, s, nsb);
    const LandweberResult res = ac_loraks_landweber(d_zp, mask, nsb, s, lambda, 4000);

    std::vector<std::uint8_t> sampled(d_zp.data.size());
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j)
            for (int c = 0; c < 2; ++c)
                sampled[(static_cast<std::size_t>(i) * 8 + j) * 2 + c] = mask.at(i, j);
    const KSpace direct = oracles::constrained_least_squares(d_zp, sampled, nsb, s);
    CHECK(oracles::rel_err(res.recon, direct) < 1e-6);
}

TEST_CASE("vcc sampling indicator reflects the mask for virtual channels") {
    SamplingMask mask(8, 8);
    mask.at(1, 2) = 1;
    const std::vector<std::uint8_t> ind = vcc_sample_indicator(mask, 1);
    auto at = [&](int i, int j, int c) { return ind[(static_cast<std::size_t>(i) * 8 + j) * 2 + c]; };
    CHECK(at(1, 2, 0) == 1);
    CHECK(at(7, 6, 1) == 1); // reflected location
    CHECK(at(1, 2, 1) == 0);
}

TEST_CASE("vcc core region drops the unpaired ACS edge") {
    SamplingMask m(64, 64);
    for (auto& v : m.sampled) v = 1;
    m.acs = {0, 63, 24, 39}; // centered 16 columns on an even grid
    const AcsRegion core = vcc_core_region(m);
    CHECK(core.row0 == 0);
    CHECK(core.row1 == 63);
    CHECK(core.col0 == 25);
    CHECK(core.col1 == 39);
    // Every kept column's reflection is inside the ACS.
    for (int j = core.col0; j <= core.col1; ++j) {
        const int r = (64 - j) % 64;
        CHECK(r >= m.acs.col0);
        CHECK(r <= m.acs.col1);
    }
}
