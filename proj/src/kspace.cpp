#include "krecon/kspace.hpp"

#include <Eigen/Dense>
#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <stdexcept>

namespace krecon {

bool all_finite(const KSpace& k) {
    for (const cplx& v : k.data) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    }
    return true;
}

bool all_finite(const RealChannelStack& s) {
    for (double v : s.data) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

void validate(const KSpace& k) {
    if (k.n1 < 8 || k.n2 < 8) throw std::invalid_argument("KSpace: grid must be at least 8x8");
    if (k.channels < 1) throw std::invalid_argument("KSpace: need at least one channel");
    if (k.data.size() != static_cast<std::size_t>(k.n1) * k.n2 * k.channels)
        throw std::invalid_argument("KSpace: data size does not match dimensions");
    if (!all_finite(k)) throw std::invalid_argument("KSpace: non-finite samples");
}

namespace {

// FFTW planning is not thread safe; execution of a cached plan on fresh
// arrays is (plans are created with FFTW_UNALIGNED so new-array execute
// has no alignment requirements).
std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

fftw_plan make_plan(int n1, int n2, int howmany, int sign, fftw_complex* in, fftw_complex* out) {
    const int n[2] = {n1, n2};
    return fftw_plan_many_dft(2, n, howmany, in, nullptr, howmany, 1, out, nullptr, howmany, 1, sign,
                              FFTW_ESTIMATE | FFTW_UNALIGNED);
}

// dst[i] = src[(i + shift) mod n] applied per dimension, all channels.
KSpace circular_remap(const KSpace& src, int s1, int s2) {
    KSpace dst(src.n1, src.n2, src.channels);
    for (int i = 0; i < src.n1; ++i) {
        const int j1 = (i + s1) % src.n1;
        for (int k = 0; k < src.n2; ++k) {
            const int j2 = (k + s2) % src.n2;
            const cplx* sp = &src.at(j1, j2, 0);
            cplx* dp = &dst.at(i, k, 0);
            for (int c = 0; c < src.channels; ++c) dp[c] = sp[c];
        }
    }
    return dst;
}

KSpace fftshift(const KSpace& x) { return circular_remap(x, (x.n1 + 1) / 2, (x.n2 + 1) / 2); }
KSpace ifftshift(const KSpace& x) { return circular_remap(x, x.n1 / 2, x.n2 / 2); }

KSpace transform(const KSpace& in, int sign) {
    if (!all_finite(in)) throw std::invalid_argument("fft2: non-finite input");
    KSpace shifted = ifftshift(in);
    KSpace out(in.n1, in.n2, in.channels);
    {
        std::lock_guard<std::mutex> lock(plan_mutex());
        fftw_plan plan = make_plan(in.n1, in.n2, in.channels, sign,
                                   reinterpret_cast<fftw_complex*>(shifted.data.data()),
                                   reinterpret_cast<fftw_complex*>(out.data.data()));
        fftw_execute(plan);
        fftw_destroy_plan(plan);
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(in.n1) * in.n2);
    for (cplx& v : out.data) v *= scale;
    return fftshift(out);
}

} // namespace

KSpace fft2_centered(const KSpace& image) { return transform(image, FFTW_FORWARD); }
KSpace ifft2_centered(const KSpace& kspace) { return transform(kspace, FFTW_BACKWARD); }

RealChannelStack split_complex_to_real(const KSpace& k) {
    RealChannelStack s(k.n1, k.n2, 2 * k.channels);
    const std::size_t npx = static_cast<std::size_t>(k.n1) * k.n2;
    for (std::size_t p = 0; p < npx; ++p) {
        for (int c = 0; c < k.channels; ++c) {
            const cplx v = k.data[p * k.channels + c];
            s.data[p * s.channels + 2 * c] = v.real();
            s.data[p * s.channels + 2 * c + 1] = v.imag();
        }
    }
    return s;
}

KSpace merge_real_to_complex(const RealChannelStack& s) {
    if (s.channels % 2 != 0) throw std::invalid_argument("merge_real_to_complex: channel count must be even");
    KSpace k(s.n1, s.n2, s.channels / 2);
    const std::size_t npx = static_cast<std::size_t>(s.n1) * s.n2;
    for (std::size_t p = 0; p < npx; ++p) {
        for (int c = 0; c < k.channels; ++c) {
            k.data[p * k.channels + c] = cplx(s.data[p * s.channels + 2 * c], s.data[p * s.channels + 2 * c + 1]);
        }
    }
    return k;
}

KSpace vcc_augment(const KSpace& k) {
    KSpace out(k.n1, k.n2, 2 * k.channels);
    for (int i = 0; i < k.n1; ++i) {
        const int ri = (k.n1 - i) % k.n1;
        for (int j = 0; j < k.n2; ++j) {
            const int rj = (k.n2 - j) % k.n2;
            for (int c = 0; c < k.channels; ++c) {
                out.at(i, j, c) = k.at(i, j, c);
                out.at(i, j, k.channels + c) = std::conj(k.at(ri, rj, c));
            }
        }
    }
    return out;
}

KSpace coil_compress(const KSpace& k, int target) {
    if (target < 1 || target > k.channels)
        throw std::invalid_argument("coil_compress: target must be in [1, channels]");
    const std::size_t npx = static_cast<std::size_t>(k.n1) * k.n2;
    // Channels x samples matrix; its top left singular vectors are the
    // eigenvectors of the small L x L Gram matrix.
    Eigen::MatrixXcd a(k.channels, npx);
    for (std::size_t p = 0; p < npx; ++p)
        for (int c = 0; c < k.channels; ++c) a(c, static_cast<Eigen::Index>(p)) = k.data[p * k.channels + c];
    const Eigen::MatrixXcd gram = a * a.adjoint();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram);
    // Eigenvalues come out ascending; take the trailing `target` vectors.
    Eigen::MatrixXcd u(k.channels, target);
    for (int t = 0; t < target; ++t) u.col(t) = eig.eigenvectors().col(k.channels - 1 - t);
    const Eigen::MatrixXcd compressed = u.adjoint() * a;
    KSpace out(k.n1, k.n2, target);
    for (std::size_t p = 0; p < npx; ++p)
        for (int c = 0; c < target; ++c) out.data[p * target + c] = compressed(c, static_cast<Eigen::Index>(p));
    return out;
}

MagnitudeImage rss_image(const KSpace& k) {
    const KSpace img = ifft2_centered(k);
    MagnitudeImage out(k.n1, k.n2);
    const std::size_t npx = static_cast<std::size_t>(k.n1) * k.n2;
    for (std::size_t p = 0; p < npx; ++p) {
        double acc = 0.0;
        for (int c = 0; c < k.channels; ++c) acc += std::norm(img.data[p * k.channels + c]);
        out.data[p] = std::sqrt(acc);
    }
    return out;
}

} // namespace krecon
