#include "krecon/grappa.hpp"

#include <Eigen/Dense>

#include <sstream>
#include <stdexcept>

namespace krecon {

KernelSupport grappa_window(int accel) {
    if (accel < 1) throw std::invalid_argument("grappa_window: acceleration must be >= 1");
    return rect_support(accel + 1, accel + 1);
}

GrappaKernelSet train_grappa(const KSpace& acs, const LocalConfigSet& configs, int r1, int r2, double reg_scale) {
    if (acs.data.empty() || !all_finite(acs)) throw std::invalid_argument("train_grappa: ACS data empty or non-finite");
    GrappaKernelSet set;
    set.channels = acs.channels;
    set.r1 = r1;
    set.r2 = r2;

    double mean_sq = 0.0;
    for (const cplx& v : acs.data) mean_sq += std::norm(v);
    mean_sq /= static_cast<double>(acs.data.size());
    const double reg = reg_scale * mean_sq;

    for (const LocalConfig& cfg : configs.configs) {
        const int taps = static_cast<int>(cfg.offsets.size());
        const int unknowns = taps * acs.channels;

        // Target positions: every ACS location whose Lambda_j sources all
        // stay inside the block.
        std::vector<std::pair<int, int>> targets;
        for (int i = 0; i < acs.n1; ++i) {
            for (int j = 0; j < acs.n2; ++j) {
                bool ok = true;
                for (const auto& [p, q] : cfg.offsets) {
                    const int si = i - p, sj = j - q;
                    if (si < 0 || si >= acs.n1 || sj < 0 || sj >= acs.n2) {
                        ok = false;
                        break;
                    }
                }
                if (ok) targets.emplace_back(i, j);
            }
        }
        if (static_cast<int>(targets.size()) < unknowns) {
            std::ostringstream msg;
            msg << "train_grappa: configuration with " << taps << " offsets needs at least " << unknowns
                << " training rows but the ACS block provides only " << targets.size();
            throw std::invalid_argument(msg.str());
        }

        Eigen::MatrixXcd a(targets.size(), unknowns);
        for (std::size_t r = 0; r < targets.size(); ++r) {
            const auto& [i, j] = targets[r];
            for (int c = 0; c < acs.channels; ++c)
                for (int mi = 0; mi < taps; ++mi) {
                    const auto& [p, q] = cfg.offsets[mi];
                    a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c) * taps + mi) =
                        acs.at(i - p, j - q, c);
                }
        }
        Eigen::MatrixXcd normal = a.adjoint() * a;
        normal.diagonal().array() += reg;
        const Eigen::LDLT<Eigen::MatrixXcd> solver(normal);

        GrappaKernelSet::ConfigKernel kernel;
        kernel.offsets = cfg.offsets;
        kernel.weights.resize(acs.channels);
        for (int l = 0; l < acs.channels; ++l) {
            Eigen::VectorXcd b(targets.size());
            for (std::size_t r = 0; r < targets.size(); ++r) b(static_cast<Eigen::Index>(r)) =
                acs.at(targets[r].first, targets[r].second, l);
            const Eigen::VectorXcd w = solver.solve(a.adjoint() * b);
            kernel.weights[l].assign(w.data(), w.data() + w.size());
        }
        set.kernels.push_back(std::move(kernel));
    }
    return set;
}

namespace {

std::string format_offsets(const std::vector<std::pair<int, int>>& offsets) {
    std::ostringstream s;
    s << "{";
    for (std::size_t i = 0; i < offsets.size(); ++i) {
        if (i) s << ", ";
        s << "(" << offsets[i].first << "," << offsets[i].second << ")";
    }
    s << "}";
    return s.str();
}

} // namespace

KSpace apply_grappa(const KSpace& d_zp, const GrappaKernelSet& kernels, const LocalConfigSet& configs) {
    if (d_zp.channels != kernels.channels) throw std::invalid_argument("apply_grappa: channel count mismatch");
    if (configs.n1 != d_zp.n1 || configs.n2 != d_zp.n2)
        throw std::invalid_argument("apply_grappa: configuration grid mismatch");
    KSpace out = d_zp;
    for (const LocalConfig& cfg : configs.configs) {
        const GrappaKernelSet::ConfigKernel* kernel = nullptr;
        for (const auto& k : kernels.kernels)
            if (k.offsets == cfg.offsets) {
                kernel = &k;
                break;
            }
        if (!kernel)
            throw std::invalid_argument("apply_grappa: no kernel trained for configuration " +
                                        format_offsets(cfg.offsets));
        const int taps = static_cast<int>(cfg.offsets.size());
        for (int i = 0; i < d_zp.n1; ++i) {
            for (int j = 0; j < d_zp.n2; ++j) {
                if (!cfg.g[static_cast<std::size_t>(i) * d_zp.n2 + j]) continue;
                for (int l = 0; l < d_zp.channels; ++l) {
                    cplx acc(0.0, 0.0);
                    const std::vector<cplx>& w = kernel->weights[l];
                    for (int c = 0; c < d_zp.channels; ++c)
                        for (int mi = 0; mi < taps; ++mi)
                            acc += w[static_cast<std::size_t>(c) * taps + mi] *
                                   d_zp.at(i - cfg.offsets[mi].first, j - cfg.offsets[mi].second, c);
                    out.at(i, j, l) += acc;
                }
            }
        }
    }
    return out;
}

} // namespace krecon
