#include "krecon/experiment.hpp"
#include "krecon/io.hpp"
#include "krecon/phantom.hpp"
#include "krecon/seeds.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <iomanip>
#include <iostream>

namespace {

int cmd_phantom(const std::string& out_prefix, int n1, int n2, int coils, int phase_order, double noise,
                std::uint64_t seed) {
    krecon::PhantomSpec spec;
    spec.n1 = n1;
    spec.n2 = n2;
    spec.coils = coils;
    spec.phase_order = phase_order;
    spec.noise_sigma = noise;
    spec.seed = seed;
    const krecon::Phantom ph = krecon::make_phantom(spec);
    krecon::write_kspace(ph.kspace, out_prefix + ".ksp");
    const double peak = *std::max_element(ph.gold.data.begin(), ph.gold.data.end());
    krecon::write_pgm(ph.gold, out_prefix + ".pgm", peak > 0 ? peak : 1.0);
    std::cout << "wrote " << out_prefix << ".ksp (" << n1 << "x" << n2 << "x" << coils << ") and " << out_prefix
              << ".pgm\n";
    return 0;
}

int cmd_mask(const std::string& style, const std::string& out, int n1, int n2, int accel, double target_accel,
             int acs_lines, int acs_rows, int acs_cols, double pf_fraction, int total_lines, std::uint64_t seed) {
    krecon::SamplingMask mask;
    if (style == "uniform")
        mask = krecon::uniform_mask(n1, n2, accel, acs_lines);
    else if (style == "random")
        mask = krecon::variable_density_mask(n1, n2, target_accel, acs_rows, acs_cols, seed);
    else if (style == "pf")
        mask = krecon::partial_fourier_mask(n1, n2, pf_fraction, accel, acs_lines);
    else if (style == "budget")
        mask = krecon::budget_line_mask(n1, n2, total_lines, acs_lines);
    else
        throw CLI::ValidationError("--style must be uniform, random, pf or budget");
    krecon::write_mask(mask, out);
    std::cout << "wrote " << out << ", effective acceleration " << std::setprecision(4)
              << krecon::effective_acceleration(mask) << "\n";
    return 0;
}

int cmd_recon(const std::string& config_path) {
    const krecon::ExperimentConfig cfg = krecon::parse_config_file(config_path);
    const std::vector<krecon::ReconReport> reports = krecon::run_experiment(cfg);
    bool any_failed = false;
    std::cout << std::left << std::setw(14) << "method" << std::setw(12) << "nrmse" << std::setw(12) << "ssim"
              << "runtime_s\n";
    for (const auto& r : reports) {
        if (r.failed) {
            any_failed = true;
            std::cout << std::left << std::setw(14) << r.method << "FAILED: " << r.error << "\n";
        } else {
            std::cout << std::left << std::setw(14) << r.method << std::setw(12) << std::setprecision(5) << r.nrmse
                      << std::setw(12) << r.ssim << std::setprecision(3) << r.runtime_seconds << "\n";
        }
    }
    std::cout << "outputs in " << cfg.out_dir << "\n";
    return any_failed ? 1 : 0;
}

int cmd_metrics(const std::string& recon_path, const std::string& gold_path, int bins, const std::string& out_csv) {
    const krecon::KSpace recon_k = krecon::read_kspace(recon_path);
    const krecon::KSpace gold_k = krecon::read_kspace(gold_path);
    krecon::MagnitudeImage recon = krecon::rss_image(recon_k);
    krecon::MagnitudeImage gold = krecon::rss_image(gold_k);
    const double peak = *std::max_element(gold.data.begin(), gold.data.end());
    if (peak <= 0.0) throw std::invalid_argument("metrics: reference image is empty");
    for (double& v : recon.data) v /= peak;
    for (double& v : gold.data) v /= peak;
    std::cout << "nrmse = " << std::setprecision(6) << krecon::nrmse(recon, gold) << "\n"
              << "ssim  = " << krecon::ssim(recon, gold) << "\n";
    const auto esp = krecon::error_spectrum(recon, gold, bins);
    if (!out_csv.empty()) {
        std::vector<std::vector<std::string>> rows{{"bin_center", "ratio"}};
        for (const auto& [c, r] : esp) rows.push_back({krecon::format_double(c), krecon::format_double(r)});
        krecon::write_csv(rows, out_csv);
        std::cout << "wrote " << out_csv << "\n";
    }
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& axis, const std::vector<double>& values) {
    const krecon::ExperimentConfig cfg = krecon::parse_config_file(config_path);
    const auto rows = krecon::sweep(cfg, axis, values);
    bool any_failed = false;
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) std::cout << (i ? "  " : "") << row[i];
        std::cout << "\n";
        if (row.size() > 2 && row[2] == "failed") any_failed = true;
    }
    return any_failed ? 1 : 0;
}

int cmd_report(const std::string& dir) {
    const auto rows = krecon::read_csv(dir + "/metrics.csv");
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) std::cout << std::left << std::setw(16) << row[i];
        std::cout << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"scan-specific autocalibrated k-space reconstruction toolkit"};
    app.require_subcommand(1);

    // phantom
    auto* phantom = app.add_subcommand("phantom", "generate a synthetic multi-coil dataset");
    std::string ph_out = "phantom";
    int ph_n1 = 128, ph_n2 = 128, ph_coils = 4, ph_order = 2;
    double ph_noise = 0.0;
    std::uint64_t ph_seed = 1;
    phantom->add_option("--out", ph_out, "output prefix");
    phantom->add_option("--n1", ph_n1, "readout grid size");
    phantom->add_option("--n2", ph_n2, "phase grid size");
    phantom->add_option("--coils", ph_coils, "coil count");
    phantom->add_option("--phase-order", ph_order, "polynomial phase degree");
    phantom->add_option("--noise", ph_noise, "k-space noise sigma");
    phantom->add_option("--seed", ph_seed, "random seed");

    // mask
    auto* mask = app.add_subcommand("mask", "generate a sampling mask");
    std::string mk_style = "uniform", mk_out = "mask.msk";
    int mk_n1 = 128, mk_n2 = 128, mk_accel = 4, mk_acs_lines = 32, mk_acs_rows = 64, mk_acs_cols = 64,
        mk_total = 0;
    double mk_target = 4.0, mk_pf = 0.625;
    std::uint64_t mk_seed = 1;
    mask->add_option("--style", mk_style, "uniform | random | pf | budget");
    mask->add_option("--out", mk_out, "output path");
    mask->add_option("--n1", mk_n1, "grid size 1");
    mask->add_option("--n2", mk_n2, "grid size 2");
    mask->add_option("--accel", mk_accel, "integer acceleration");
    mask->add_option("--target-accel", mk_target, "target acceleration (random style)");
    mask->add_option("--acs-lines", mk_acs_lines, "central fully sampled lines");
    mask->add_option("--acs-rows", mk_acs_rows, "ACS rows (random style)");
    mask->add_option("--acs-cols", mk_acs_cols, "ACS cols (random style)");
    mask->add_option("--pf", mk_pf, "partial Fourier fraction");
    mask->add_option("--total-lines", mk_total, "total line budget (budget style)");
    mask->add_option("--seed", mk_seed, "random seed");

    // recon
    auto* recon = app.add_subcommand("recon", "run a configured experiment");
    std::string rc_config;
    recon->add_option("--config", rc_config, "experiment config file")->required();

    // metrics
    auto* metrics = app.add_subcommand("metrics", "compare two k-space files");
    std::string mt_recon, mt_gold, mt_csv;
    int mt_bins = 24;
    metrics->add_option("--recon", mt_recon, "reconstructed KSP1 file")->required();
    metrics->add_option("--gold", mt_gold, "reference KSP1 file")->required();
    metrics->add_option("--bins", mt_bins, "error spectrum bins");
    metrics->add_option("--esp-csv", mt_csv, "write the error spectrum CSV here");

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "run a parameter sweep");
    std::string sw_config, sw_axis;
    std::vector<double> sw_values;
    sweep_cmd->add_option("--config", sw_config, "experiment config file")->required();
    sweep_cmd->add_option("--axis", sw_axis, "C | K | R | acs_lines | acs_size | accel")->required();
    sweep_cmd->add_option("--values", sw_values, "axis values")->required();

    // report
    auto* report = app.add_subcommand("report", "print the metrics table of a finished run");
    std::string rp_dir;
    report->add_option("--dir", rp_dir, "experiment output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (phantom->parsed()) return cmd_phantom(ph_out, ph_n1, ph_n2, ph_coils, ph_order, ph_noise, ph_seed);
        if (mask->parsed())
            return cmd_mask(mk_style, mk_out, mk_n1, mk_n2, mk_accel, mk_target, mk_acs_lines, mk_acs_rows,
                            mk_acs_cols, mk_pf, mk_total, mk_seed);
        if (recon->parsed()) return cmd_recon(rc_config);
        if (metrics->parsed()) return cmd_metrics(mt_recon, mt_gold, mt_bins, mt_csv);
        if (sweep_cmd->parsed()) return cmd_sweep(sw_config, sw_axis, sw_values);
        if (report->parsed()) return cmd_report(rp_dir);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
