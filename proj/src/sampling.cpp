#include "krecon/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>

namespace krecon {

std::size_t SamplingMask::sample_count() const {
    std::size_t c = 0;
    for (std::uint8_t v : sampled) c += v ? 1 : 0;
    return c;
}

void validate(const SamplingMask& m) {
    if (m.n1 < 1 || m.n2 < 1 || m.sampled.size() != static_cast<std::size_t>(m.n1) * m.n2)
        throw std::invalid_argument("SamplingMask: bad dimensions");
    if (m.sample_count() == 0) throw std::invalid_argument("SamplingMask: no samples");
    if (!m.acs.empty()) {
        if (m.acs.row0 < 0 || m.acs.row1 >= m.n1 || m.acs.col0 < 0 || m.acs.col1 >= m.n2 ||
            m.acs.row0 > m.acs.row1 || m.acs.col0 > m.acs.col1)
            throw std::invalid_argument("SamplingMask: ACS rectangle out of range");
        for (int i = m.acs.row0; i <= m.acs.row1; ++i)
            for (int j = m.acs.col0; j <= m.acs.col1; ++j)
                if (!m.at(i, j)) throw std::invalid_argument("SamplingMask: ACS region not fully sampled");
    }
}

namespace {

// Central range of `count` indices on a length-n axis: [c - count/2, ...]
// with c = n/2, matching the DC-anchored conventions used throughout.
std::pair<int, int> central_range(int n, int count) {
    const int c = n / 2;
    const int first = c - count / 2;
    return {first, first + count - 1};
}

void fill_acs_lines(SamplingMask& m, int acs_lines) {
    if (acs_lines <= 0) return;
    auto [first, last] = central_range(m.n2, acs_lines);
    for (int i = 0; i < m.n1; ++i)
        for (int j = first; j <= last; ++j) m.at(i, j) = 1;
    m.acs = {0, m.n1 - 1, first, last};
}

} // namespace

SamplingMask uniform_mask(int n1, int n2, int accel, int acs_lines) {
    if (accel < 1) throw std::invalid_argument("uniform_mask: acceleration must be >= 1");
    if (acs_lines < 0 || acs_lines > n2) throw std::invalid_argument("uniform_mask: acs_lines out of range");
    SamplingMask m(n1, n2);
    const int dc = n2 / 2;
    for (int j = dc % accel; j < n2; j += accel)
        for (int i = 0; i < n1; ++i) m.at(i, j) = 1;
    fill_acs_lines(m, acs_lines);
    validate(m);
    return m;
}

SamplingMask variable_density_mask(int n1, int n2, double target_accel, int acs_rows, int acs_cols,
                                   std::uint64_t seed, double density_exponent) {
    if (target_accel <= 1.0) throw std::invalid_argument("variable_density_mask: target acceleration must exceed 1");
    if (acs_rows < 0 || acs_rows > n1 || acs_cols < 0 || acs_cols > n2)
        throw std::invalid_argument("variable_density_mask: ACS region does not fit the grid");
    const std::size_t total = static_cast<std::size_t>(n1) * n2;
    const std::size_t target_count = static_cast<std::size_t>(std::llround(total / target_accel));

    SamplingMask m(n1, n2);
    std::size_t acs_count = 0;
    if (acs_rows > 0 && acs_cols > 0) {
        auto [r0, r1] = central_range(n1, acs_rows);
        auto [c0, c1] = central_range(n2, acs_cols);
        for (int i = r0; i <= r1; ++i)
            for (int j = c0; j <= c1; ++j) m.at(i, j) = 1;
        m.acs = {r0, r1, c0, c1};
        acs_count = static_cast<std::size_t>(acs_rows) * acs_cols;
    }
    if (target_count < acs_count)
        throw std::invalid_argument("variable_density_mask: sample budget smaller than the ACS region");

    // Weighted sampling without replacement (exponential-sort scheme):
    // candidates ranked by -log(u)/w, smallest keys kept.
    const double c1f = n1 / 2.0, c2f = n2 / 2.0;
    const double rmax = std::sqrt(c1f * c1f + c2f * c2f);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(std::numeric_limits<double>::min(), 1.0);
    struct Cand {
        double key;
        int i, j;
    };
    std::vector<Cand> cands;
    cands.reserve(total - acs_count);
    for (int i = 0; i < n1; ++i) {
        for (int j = 0; j < n2; ++j) {
            const double u = unif(rng); // one draw per location keeps the stream deterministic
            if (m.at(i, j)) continue;
            const double di = i - n1 / 2, dj = j - n2 / 2;
            const double r = std::sqrt(di * di + dj * dj) / rmax;
            const double w = std::pow(1.0 - 0.95 * r, density_exponent);
            cands.push_back({-std::log(u) / w, i, j});
        }
    }
    const std::size_t need = target_count - acs_count;
    if (need > cands.size()) throw std::invalid_argument("variable_density_mask: sample budget exceeds the grid");
    std::partial_sort(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(need), cands.end(),
                      [](const Cand& a, const Cand& b) {
                          if (a.key != b.key) return a.key < b.key;
                          return std::make_pair(a.i, a.j) < std::make_pair(b.i, b.j);
                      });
    for (std::size_t t = 0; t < need; ++t) m.at(cands[t].i, cands[t].j) = 1;
    validate(m);
    return m;
}

SamplingMask partial_fourier_mask(int n1, int n2, double pf_fraction, int accel, int acs_lines) {
    if (pf_fraction <= 0.5 || pf_fraction > 1.0)
        throw std::invalid_argument("partial_fourier_mask: fraction must be in (0.5, 1]");
    if (accel < 1) throw std::invalid_argument("partial_fourier_mask: acceleration must be >= 1");
    const int candidates = static_cast<int>(std::ceil(pf_fraction * n2));
    SamplingMask m(n1, n2);
    const int dc = n2 / 2;
    for (int j = dc % accel; j < candidates; j += accel)
        for (int i = 0; i < n1; ++i) m.at(i, j) = 1;
    if (acs_lines > 0) {
        auto [first, last] = central_range(n2, acs_lines);
        if (last >= candidates)
            throw std::invalid_argument("partial_fourier_mask: ACS lines exceed the sampled fraction");
        for (int i = 0; i < n1; ++i)
            for (int j = first; j <= last; ++j) m.at(i, j) = 1;
        m.acs = {0, n1 - 1, first, last};
    }
    validate(m);
    return m;
}

SamplingMask budget_line_mask(int n1, int n2, int total_lines, int acs_lines) {
    if (acs_lines < 0 || total_lines < acs_lines || total_lines > n2)
        throw std::invalid_argument("budget_line_mask: inconsistent line budget");
    SamplingMask m(n1, n2);
    auto [first, last] = central_range(n2, acs_lines);
    std::vector<int> outside;
    for (int j = 0; j < n2; ++j)
        if (acs_lines == 0 || j < first || j > last) outside.push_back(j);
    const int extra = total_lines - acs_lines;
    std::vector<int> chosen;
    if (extra > 0) {
        // Evenly spread (Bresenham-style) over the non-ACS lines.
        const double step = static_cast<double>(outside.size()) / extra;
        for (int t = 0; t < extra; ++t) {
            const std::size_t idx = std::min(static_cast<std::size_t>(t * step), outside.size() - 1);
            chosen.push_back(outside[idx]);
        }
    }
    for (int j : chosen)
        for (int i = 0; i < n1; ++i) m.at(i, j) = 1;
    if (acs_lines > 0) {
        for (int i = 0; i < n1; ++i)
            for (int j = first; j <= last; ++j) m.at(i, j) = 1;
        m.acs = {0, n1 - 1, first, last};
    }
    validate(m);
    return m;
}

double effective_acceleration(const SamplingMask& m) {
    validate(m);
    return static_cast<double>(m.n1) * m.n2 / static_cast<double>(m.sample_count());
}

KSpace apply_mask(const KSpace& k, const SamplingMask& m) {
    if (k.n1 != m.n1 || k.n2 != m.n2) throw std::invalid_argument("apply_mask: dimension mismatch");
    KSpace out = k;
    for (int i = 0; i < k.n1; ++i)
        for (int j = 0; j < k.n2; ++j)
            if (!m.at(i, j))
                for (int c = 0; c < k.channels; ++c) out.at(i, j, c) = cplx(0.0, 0.0);
    return out;
}

KSpace extract_acs(const KSpace& k, const SamplingMask& m) {
    if (m.acs.empty()) throw std::invalid_argument("extract_acs: mask has no ACS region");
    if (k.n1 != m.n1 || k.n2 != m.n2) throw std::invalid_argument("extract_acs: dimension mismatch");
    KSpace out(m.acs.rows(), m.acs.cols(), k.channels);
    for (int i = 0; i < out.n1; ++i)
        for (int j = 0; j < out.n2; ++j)
            for (int c = 0; c < k.channels; ++c) out.at(i, j, c) = k.at(m.acs.row0 + i, m.acs.col0 + j, c);
    return out;
}

LocalConfigSet enumerate_local_configs(const SamplingMask& m, const KernelSupport& window) {
    validate(m);
    LocalConfigSet set;
    set.n1 = m.n1;
    set.n2 = m.n2;
    set.window = window;
    std::map<std::vector<std::pair<int, int>>, std::size_t> index;
    for (int i = 0; i < m.n1; ++i) {
        for (int j = 0; j < m.n2; ++j) {
            if (m.at(i, j)) continue;
            std::vector<std::pair<int, int>> lambda;
            for (const auto& [p, q] : window.offsets) {
                const int si = i - p, sj = j - q;
                if (si < 0 || si >= m.n1 || sj < 0 || sj >= m.n2) continue;
                if (m.at(si, sj)) lambda.emplace_back(p, q);
            }
            if (lambda.empty()) {
                set.empty_locations.emplace_back(i, j);
                continue;
            }
            std::sort(lambda.begin(), lambda.end());
            auto [it, inserted] = index.try_emplace(lambda, set.configs.size());
            if (inserted) {
                LocalConfig cfg;
                cfg.offsets = lambda;
                cfg.g.assign(static_cast<std::size_t>(m.n1) * m.n2, 0);
                set.configs.push_back(std::move(cfg));
            }
            set.configs[it->second].g[static_cast<std::size_t>(i) * m.n2 + j] = 1;
        }
    }
    return set;
}

} // namespace krecon
