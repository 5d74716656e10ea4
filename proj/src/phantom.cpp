#include "krecon/phantom.hpp"

#include "krecon/seeds.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace krecon {

namespace {

struct Ellipse {
    double cx, cy;    // center in [-1,1] coordinates
    double a, b;      // semi-axes
    double angle;     // rotation, radians
    double intensity; // additive
};

// Smooth indicator: 1 well inside, 0 outside, cubic rolloff across the
// boundary band so k-space decays quickly.
double soft_inside(double q, double rolloff) {
    const double t = (1.0 - q) / rolloff;
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return t * t * (3.0 - 2.0 * t);
}

} // namespace

Phantom make_phantom(const PhantomSpec& spec) {
    if (spec.n1 < 8 || spec.n2 < 8) throw std::invalid_argument("make_phantom: grid must be at least 8x8");
    if (spec.coils < 1) throw std::invalid_argument("make_phantom: need at least one coil");
    if (spec.phase_order < 0 || spec.noise_sigma < 0.0)
        throw std::invalid_argument("make_phantom: bad phase order or noise level");

    // Composite confined to radius <= 0.8, leaving a >= 10% support
    // margin on every side of the field of view. Small sharp features
    // spread signal energy across k-space.
    const Ellipse parts[] = {
        {0.00, 0.00, 0.72, 0.62, 0.0, 1.00},
        {0.00, 0.02, 0.58, 0.50, 0.0, -0.35},
        {0.22, 0.18, 0.14, 0.22, 0.5, 0.35},
        {-0.22, 0.16, 0.16, 0.12, -0.4, 0.30},
        {0.00, -0.28, 0.26, 0.10, 0.0, 0.25},
        {-0.08, -0.05, 0.05, 0.05, 0.0, -0.25},
        {0.12, -0.10, 0.04, 0.07, 0.3, 0.30},
        {-0.30, -0.22, 0.07, 0.04, 1.1, 0.35},
        {0.33, -0.18, 0.05, 0.09, -0.8, -0.28},
        {0.05, 0.33, 0.09, 0.035, 0.2, 0.40},
        {-0.12, 0.34, 0.03, 0.03, 0.0, -0.30},
        {0.24, 0.38, 0.025, 0.025, 0.0, 0.45},
        {-0.36, 0.05, 0.03, 0.06, 0.6, 0.38},
        {0.40, 0.10, 0.035, 0.025, -0.3, -0.26},
        {-0.02, -0.40, 0.02, 0.02, 0.0, 0.50},
        {0.15, 0.08, 0.02, 0.05, 0.9, -0.22},
        {-0.25, -0.05, 0.045, 0.02, -1.0, 0.30},
    };
    const double rolloff = 0.035;

    const int n1 = spec.n1, n2 = spec.n2, nc = spec.coils;
    std::vector<double> magnitude(static_cast<std::size_t>(n1) * n2, 0.0);
    for (int i = 0; i < n1; ++i) {
        const double x = (i - n1 / 2) / (n1 / 2.0);
        for (int j = 0; j < n2; ++j) {
            const double y = (j - n2 / 2) / (n2 / 2.0);
            double v = 0.0;
            for (const Ellipse& e : parts) {
                const double dx = x - e.cx, dy = y - e.cy;
                const double c = std::cos(e.angle), s = std::sin(e.angle);
                const double u1 = (c * dx + s * dy) / e.a;
                const double u2 = (-s * dx + c * dy) / e.b;
                v += e.intensity * soft_inside(u1 * u1 + u2 * u2, rolloff);
            }
            magnitude[static_cast<std::size_t>(i) * n2 + j] = std::max(v, 0.0);
        }
    }

    // Smooth multiplicative texture keeps tissue regions from being
    // perfectly flat while leaving the support untouched.
    std::mt19937_64 tex_rng(derive_seed(spec.seed, "phantom-texture"));
    std::uniform_real_distribution<double> tunif(-1.0, 1.0);
    struct Wave {
        double f1, f2, phase, amp;
    };
    std::vector<Wave> waves;
    for (int h = 0; h < 10; ++h)
        waves.push_back({2.5 * tunif(tex_rng), 2.5 * tunif(tex_rng), M_PI * tunif(tex_rng), tunif(tex_rng)});
    for (int i = 0; i < n1; ++i) {
        const double x = (i - n1 / 2) / (n1 / 2.0);
        for (int j = 0; j < n2; ++j) {
            const double y = (j - n2 / 2) / (n2 / 2.0);
            double t = 0.0;
            for (const Wave& w : waves) t += w.amp * std::cos(M_PI * (w.f1 * x + w.f2 * y) + w.phase);
            magnitude[static_cast<std::size_t>(i) * n2 + j] *= 1.0 + 0.08 * t;
        }
    }

    // Smooth polynomial phase, coefficients drawn once per seed.
    std::mt19937_64 phase_rng(derive_seed(spec.seed, "phantom-phase"));
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::vector<double> phase_coef;
    for (int dx = 0; dx <= spec.phase_order; ++dx)
        for (int dy = 0; dy + dx <= spec.phase_order; ++dy) phase_coef.push_back(1.2 * unif(phase_rng));

    // Gaussian-profile sensitivities centered on a ring, linear phase ramps.
    std::mt19937_64 coil_rng(derive_seed(spec.seed, "phantom-coils"));
    struct Coil {
        double cx, cy, alpha, beta, gamma;
    };
    std::vector<Coil> coil_defs;
    for (int c = 0; c < nc; ++c) {
        const double theta = 2.0 * M_PI * c / nc;
        coil_defs.push_back({1.1 * std::cos(theta), 1.1 * std::sin(theta), 0.8 * unif(coil_rng),
                             0.8 * unif(coil_rng), M_PI * unif(coil_rng)});
    }
    const double sens_sigma = 0.9;

    KSpace coil_images(n1, n2, nc);
    MagnitudeImage gold(n1, n2);
    for (int i = 0; i < n1; ++i) {
        const double x = (i - n1 / 2) / (n1 / 2.0);
        for (int j = 0; j < n2; ++j) {
            const double y = (j - n2 / 2) / (n2 / 2.0);
            const double m = magnitude[static_cast<std::size_t>(i) * n2 + j];

            double phi = 0.0;
            if (spec.phase_order > 0) {
                std::size_t t = 0;
                for (int dx = 0; dx <= spec.phase_order; ++dx)
                    for (int dy = 0; dy + dx <= spec.phase_order; ++dy)
                        phi += phase_coef[t++] * std::pow(x, dx) * std::pow(y, dy);
            }
            const cplx base = m * cplx(std::cos(phi), std::sin(phi));

            double rss = 0.0;
            for (int c = 0; c < nc; ++c) {
                cplx sens(1.0, 0.0);
                if (nc > 1) {
                    const Coil& cd = coil_defs[c];
                    const double dx = x - cd.cx, dy = y - cd.cy;
                    const double mag = std::exp(-(dx * dx + dy * dy) / (2.0 * sens_sigma * sens_sigma));
                    const double ph = cd.alpha * x + cd.beta * y + cd.gamma;
                    sens = mag * cplx(std::cos(ph), std::sin(ph));
                }
                coil_images.at(i, j, c) = base * sens;
                rss += std::norm(sens);
            }
            gold.at(i, j) = m * std::sqrt(rss);
        }
    }

    Phantom out;
    out.gold = std::move(gold);
    out.kspace = fft2_centered(coil_images);
    if (spec.noise_sigma > 0.0) {
        std::mt19937_64 noise_rng(derive_seed(spec.seed, "phantom-noise"));
        std::normal_distribution<double> gauss(0.0, spec.noise_sigma);
        for (cplx& v : out.kspace.data) v += cplx(gauss(noise_rng), gauss(noise_rng));
    }
    return out;
}

} // namespace krecon
