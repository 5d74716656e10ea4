#include "krecon/sampling.hpp"

#include <doctest.h>

#include <map>
#include <random>
#include <set>

using namespace krecon;

namespace {

KSpace random_kspace(int n1, int n2, int ch, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    KSpace k(n1, n2, ch);
    for (cplx& v : k.data) v = cplx(gauss(rng), gauss(rng));
    return k;
}

int sampled_lines(const SamplingMask& m) {
    int count = 0;
    for (int j = 0; j < m.n2; ++j)
        if (m.at(0, j)) ++count;
    return count;
}

} // namespace

TEST_CASE("uniform mask reproduces the 4x-with-32-ACS line count") {
    const SamplingMask m = uniform_mask(256, 187, 4, 32);
    CHECK(sampled_lines(m) == 71); // 47 lattice + 32 ACS - 8 overlap
    CHECK(effective_acceleration(m) == doctest::Approx(187.0 / 71.0));
    CHECK(std::abs(effective_acceleration(m) - 2.63) < 0.05);
    CHECK(m.at(0, 187 / 2)); // DC line is on the lattice
}

TEST_CASE("acceleration 1 with no ACS is fully sampled") {
    const SamplingMask m = uniform_mask(16, 16, 1, 0);
    CHECK(m.sample_count() == 256);
    CHECK(effective_acceleration(m) == 1.0);
}

TEST_CASE("uniform 16-line example: 8 lattice + 4 ACS - 2 overlap") {
    const SamplingMask m = uniform_mask(16, 16, 2, 4);
    // Direct enumeration oracle.
    std::set<int> lines;
    for (int j = 8 % 2; j < 16; j += 2) lines.insert(j);
    for (int j = 6; j <= 9; ++j) lines.insert(j);
    CHECK(sampled_lines(m) == static_cast<int>(lines.size()));
    CHECK(sampled_lines(m) == 10);
    for (int j = 0; j < 16; ++j) CHECK(static_cast<bool>(m.at(3, j)) == static_cast<bool>(lines.count(j)));
}

TEST_CASE("uniform mask rejects out-of-range ACS") {
    CHECK_THROWS_AS((void)uniform_mask(16, 16, 2, 17), std::invalid_argument);
}

TEST_CASE("variable density hits the target acceleration") {
    const SamplingMask m = variable_density_mask(208, 256, 5.2, 64, 64, 123);
    const double eff = effective_acceleration(m);
    CHECK(eff >= 5.15);
    CHECK(eff <= 5.25);
    CHECK(!m.acs.empty());
    CHECK(m.acs.rows() == 64);
    CHECK(m.acs.cols() == 64);
}

TEST_CASE("variable density near acceleration 1 with full-grid ACS is fully sampled") {
    const SamplingMask m = variable_density_mask(32, 32, 1.0 + 1e-9, 32, 32, 5);
    CHECK(m.sample_count() == 32 * 32);
}

TEST_CASE("variable density is deterministic per seed") {
    const SamplingMask a = variable_density_mask(64, 64, 4.0, 16, 16, 77);
    const SamplingMask b = variable_density_mask(64, 64, 4.0, 16, 16, 77);
    CHECK(a.sampled == b.sampled);
    const SamplingMask c = variable_density_mask(64, 64, 4.0, 16, 16, 78);
    CHECK(a.sampled != c.sampled);
}

TEST_CASE("variable density rejects budgets below the ACS size") {
    CHECK_THROWS_AS((void)variable_density_mask(32, 32, 8.0, 24, 24, 1), std::invalid_argument);
}

TEST_CASE("partial Fourier keeps only the early candidate lines") {
    const SamplingMask m = partial_fourier_mask(16, 16, 5.0 / 8.0, 2, 2);
    for (int j = 10; j < 16; ++j)
        for (int i = 0; i < 16; ++i) CHECK(!m.at(i, j));
    bool any = false;
    for (int j = 0; j < 10; ++j) any = any || m.at(0, j);
    CHECK(any);
}

TEST_CASE("partial Fourier at fraction 1 reduces to the uniform mask") {
    const SamplingMask pf = partial_fourier_mask(16, 16, 1.0, 2, 4);
    const SamplingMask uni = uniform_mask(16, 16, 2, 4);
    CHECK(pf.sampled == uni.sampled);
}

TEST_CASE("5/8 partial Fourier with tuned acceleration lands near 3x") {
    const SamplingMask m = partial_fourier_mask(256, 187, 5.0 / 8.0, 3, 32);
    CHECK(std::abs(effective_acceleration(m) - 3.0) < 0.2);
}

TEST_CASE("partial Fourier rejects fractions at or below one half") {
    CHECK_THROWS_AS((void)partial_fourier_mask(16, 16, 0.5, 2, 0), std::invalid_argument);
}

TEST_CASE("budget mask meets its line budget exactly") {
    const SamplingMask m = budget_line_mask(64, 160, 64, 8);
    CHECK(sampled_lines(m) == 64);
    CHECK(effective_acceleration(m) == doctest::Approx(2.5));
    CHECK(m.acs.cols() == 8);
}

TEST_CASE("effective acceleration basics") {
    SamplingMask half(8, 8);
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 4; ++j) half.at(i, j) = 1;
    CHECK(effective_acceleration(half) == 2.0);
}

TEST_CASE("apply_mask is the identity for a full mask and idempotent otherwise") {
    const KSpace k = random_kspace(16, 16, 2, 3);
    const SamplingMask full = uniform_mask(16, 16, 1, 0);
    const KSpace same = apply_mask(k, full);
    for (std::size_t i = 0; i < k.data.size(); ++i) CHECK(same.data[i] == k.data[i]);

    const SamplingMask m = variable_density_mask(16, 16, 2.0, 4, 4, 9);
    const KSpace once = apply_mask(k, m);
    const KSpace twice = apply_mask(once, m);
    for (std::size_t i = 0; i < k.data.size(); ++i) CHECK(once.data[i] == twice.data[i]);
}

TEST_CASE("apply_mask preserves ACS samples bit-identically") {
    const KSpace k = random_kspace(16, 16, 2, 13);
    const SamplingMask m = uniform_mask(16, 16, 4, 6);
    const KSpace zp = apply_mask(k, m);
    for (int i = 0; i < 16; ++i)
        for (int j = m.acs.col0; j <= m.acs.col1; ++j)
            for (int c = 0; c < 2; ++c) CHECK(zp.at(i, j, c) == k.at(i, j, c));
}

TEST_CASE("apply_mask rejects dimension mismatch") {
    const KSpace k = random_kspace(16, 16, 1, 1);
    const SamplingMask m = uniform_mask(16, 8, 2, 2);
    CHECK_THROWS_AS((void)apply_mask(k, m), std::invalid_argument);
}

TEST_CASE("extract_acs copies the block with its own metadata") {
    const KSpace k = random_kspace(32, 24, 2, 15);
    SamplingMask m(32, 24);
    for (auto& v : m.sampled) v = 1;
    m.acs = {0, 31, 8, 15};
    const KSpace acs = extract_acs(k, m);
    CHECK(acs.n1 == 32);
    CHECK(acs.n2 == 8);
    for (int i = 0; i < 32; ++i)
        for (int j = 0; j < 8; ++j)
            for (int c = 0; c < 2; ++c) CHECK(acs.at(i, j, c) == k.at(i, 8 + j, c));

    SamplingMask no_acs(16, 16);
    no_acs.at(0, 0) = 1;
    CHECK_THROWS_AS((void)extract_acs(random_kspace(16, 16, 1, 2), no_acs), std::invalid_argument);
}

TEST_CASE("32-line ACS on a 256x187 grid extracts a 256x32 block") {
    const SamplingMask m = uniform_mask(256, 187, 4, 32);
    const KSpace acs = extract_acs(random_kspace(256, 187, 1, 4), m);
    CHECK(acs.n1 == 256);
    CHECK(acs.n2 == 32);
}

namespace {

// Independent brute-force grouping used as the enumeration oracle.
std::map<std::vector<std::pair<int, int>>, std::vector<std::pair<int, int>>> brute_force_groups(
    const SamplingMask& m, const KernelSupport& w) {
    std::map<std::vector<std::pair<int, int>>, std::vector<std::pair<int, int>>> groups;
    for (int i = 0; i < m.n1; ++i)
        for (int j = 0; j < m.n2; ++j) {
            if (m.at(i, j)) continue;
            std::vector<std::pair<int, int>> lambda;
            for (const auto& [p, q] : w.offsets) {
                const int si = i - p, sj = j - q;
                if (si >= 0 && si < m.n1 && sj >= 0 && sj < m.n2 && m.at(si, sj)) lambda.emplace_back(p, q);
            }
            std::sort(lambda.begin(), lambda.end());
            if (!lambda.empty()) groups[lambda].emplace_back(i, j);
        }
    return groups;
}

} // namespace

TEST_CASE("uniform 2x sampling has one interior configuration") {
    const SamplingMask m = uniform_mask(16, 16, 2, 0);
    const KernelSupport w = kernel_support(3, 3, SupportShape::Rectangular);
    const LocalConfigSet set = enumerate_local_configs(m, w);
    // Away from the grid boundary every unsampled location shares one config.
    std::set<std::size_t> interior_configs;
    for (std::size_t c = 0; c < set.configs.size(); ++c)
        for (int i = 2; i < 14; ++i)
            for (int j = 2; j < 14; ++j)
                if (set.configs[c].g[static_cast<std::size_t>(i) * 16 + j]) interior_configs.insert(c);
    CHECK(interior_configs.size() == 1);
}

TEST_CASE("uniform 4x grouping matches the brute-force oracle exactly") {
    const SamplingMask m = uniform_mask(24, 24, 4, 6);
    const KernelSupport w = rect_support(5, 5);
    const LocalConfigSet set = enumerate_local_configs(m, w);
    const auto oracle = brute_force_groups(m, w);
    CHECK(set.configs.size() == oracle.size());
    CHECK(set.configs.size() <= 40); // a handful, boundary variants included
    // Away from grid and ACS boundaries only the three line phases remain.
    std::set<std::size_t> interior;
    for (std::size_t c = 0; c < set.configs.size(); ++c)
        for (int i = 4; i < 20; ++i)
            for (int j = 16; j < 20; ++j)
                if (set.configs[c].g[static_cast<std::size_t>(i) * 24 + j]) interior.insert(c);
    CHECK(interior.size() == 3);
    for (const LocalConfig& cfg : set.configs) {
        auto it = oracle.find(cfg.offsets);
        REQUIRE(it != oracle.end());
        std::size_t members = 0;
        for (const auto& [i, j] : it->second) {
            CHECK(cfg.g[static_cast<std::size_t>(i) * 24 + j]);
            ++members;
        }
        std::size_t gcount = 0;
        for (auto v : cfg.g) gcount += v;
        CHECK(gcount == members);
    }
}

TEST_CASE("random masks motivate many configurations") {
    const SamplingMask m = variable_density_mask(32, 32, 3.0, 8, 8, 31);
    const LocalConfigSet set = enumerate_local_configs(m, rect_support(5, 5));
    CHECK(set.configs.size() > 40);
}

TEST_CASE("config groups are disjoint and cover the reconstructible unsampled set") {
    const SamplingMask m = variable_density_mask(24, 24, 2.5, 6, 6, 17);
    const LocalConfigSet set = enumerate_local_configs(m, kernel_support(3, 3, SupportShape::Ellipsoidal));
    std::vector<int> cover(m.sampled.size(), 0);
    for (const LocalConfig& cfg : set.configs)
        for (std::size_t p = 0; p < cfg.g.size(); ++p) cover[p] += cfg.g[p] ? 1 : 0;
    for (const auto& [i, j] : set.empty_locations) cover[static_cast<std::size_t>(i) * m.n2 + j] += 1;
    for (std::size_t p = 0; p < cover.size(); ++p) {
        CHECK(cover[p] <= 1);
        CHECK(cover[p] == (m.sampled[p] ? 0 : 1));
    }
}
