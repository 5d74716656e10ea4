#include "krecon/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace krecon {

double nrmse(const MagnitudeImage& recon, const MagnitudeImage& gold) {
    if (recon.n1 != gold.n1 || recon.n2 != gold.n2) throw std::invalid_argument("nrmse: dimension mismatch");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < gold.data.size(); ++i) {
        const double d = recon.data[i] - gold.data[i];
        num += d * d;
        den += gold.data[i] * gold.data[i];
    }
    if (den == 0.0) throw std::invalid_argument("nrmse: reference image is all zero");
    return std::sqrt(num / den);
}

double ssim(const MagnitudeImage& recon, const MagnitudeImage& gold) {
    if (recon.n1 != gold.n1 || recon.n2 != gold.n2) throw std::invalid_argument("ssim: dimension mismatch");
    constexpr int kWindow = 11;
    constexpr int kHalf = kWindow / 2;
    constexpr double kSigma = 1.5;
    constexpr double kC1 = 0.01 * 0.01; // (K1 * dynamic range)^2
    constexpr double kC2 = 0.03 * 0.03;
    if (recon.n1 < kWindow || recon.n2 < kWindow)
        throw std::invalid_argument("ssim: image smaller than the 11x11 window");

    double w[kWindow][kWindow];
    double wsum = 0.0;
    for (int a = 0; a < kWindow; ++a)
        for (int b = 0; b < kWindow; ++b) {
            const double da = a - kHalf, db = b - kHalf;
            w[a][b] = std::exp(-(da * da + db * db) / (2.0 * kSigma * kSigma));
            wsum += w[a][b];
        }
    for (int a = 0; a < kWindow; ++a)
        for (int b = 0; b < kWindow; ++b) w[a][b] /= wsum;

    double acc = 0.0;
    std::size_t count = 0;
    for (int i = kHalf; i < recon.n1 - kHalf; ++i) {
        for (int j = kHalf; j < recon.n2 - kHalf; ++j) {
            double mx = 0, my = 0, xx = 0, yy = 0, xy = 0;
            for (int a = 0; a < kWindow; ++a) {
                for (int b = 0; b < kWindow; ++b) {
                    const double x = recon.at(i + a - kHalf, j + b - kHalf);
                    const double y = gold.at(i + a - kHalf, j + b - kHalf);
                    mx += w[a][b] * x;
                    my += w[a][b] * y;
                    xx += w[a][b] * x * x;
                    yy += w[a][b] * y * y;
                    xy += w[a][b] * x * y;
                }
            }
            const double vx = xx - mx * mx;
            const double vy = yy - my * my;
            const double cxy = xy - mx * my;
            acc += ((2.0 * mx * my + kC1) * (2.0 * cxy + kC2)) /
                   ((mx * mx + my * my + kC1) * (vx + vy + kC2));
            ++count;
        }
    }
    return acc / static_cast<double>(count);
}

std::vector<std::pair<double, double>> error_spectrum(const MagnitudeImage& recon, const MagnitudeImage& gold,
                                                      int n_bins) {
    if (recon.n1 != gold.n1 || recon.n2 != gold.n2) throw std::invalid_argument("error_spectrum: dimension mismatch");
    if (n_bins < 4) throw std::invalid_argument("error_spectrum: need at least 4 bins");

    KSpace diff(recon.n1, recon.n2, 1), ref(recon.n1, recon.n2, 1);
    for (std::size_t i = 0; i < gold.data.size(); ++i) {
        diff.data[i] = cplx(recon.data[i] - gold.data[i], 0.0);
        ref.data[i] = cplx(gold.data[i], 0.0);
    }
    const KSpace fd = fft2_centered(diff);
    const KSpace fg = fft2_centered(ref);

    const int c1 = recon.n1 / 2, c2 = recon.n2 / 2;
    const double rmax = std::sqrt(static_cast<double>(std::max(c1, recon.n1 - 1 - c1)) *
                                      std::max(c1, recon.n1 - 1 - c1) +
                                  static_cast<double>(std::max(c2, recon.n2 - 1 - c2)) *
                                      std::max(c2, recon.n2 - 1 - c2));
    const double width = rmax / n_bins;

    std::vector<double> num(n_bins, 0.0), den(n_bins, 0.0);
    std::vector<bool> seen(n_bins, false);
    for (int i = 0; i < recon.n1; ++i) {
        for (int j = 0; j < recon.n2; ++j) {
            const double r = std::sqrt(static_cast<double>(i - c1) * (i - c1) +
                                       static_cast<double>(j - c2) * (j - c2));
            int b = static_cast<int>(r / width);
            if (b >= n_bins) b = n_bins - 1; // r == rmax lands in the last bin
            num[b] += std::norm(fd.at(i, j, 0));
            den[b] += std::norm(fg.at(i, j, 0));
            seen[b] = true;
        }
    }
    std::vector<std::pair<double, double>> out;
    for (int b = 0; b < n_bins; ++b) {
        if (!seen[b] || den[b] == 0.0) continue; // empty annulus reported as absent
        out.emplace_back((b + 0.5) * width, std::sqrt(num[b] / den[b]));
    }
    return out;
}

} // namespace krecon
