#pragma once

#include "krecon/loraki.hpp"
#include "krecon/loraks.hpp"
#include "krecon/metrics.hpp"
#include "krecon/phantom.hpp"
#include "krecon/raki.hpp"
#include "krecon/sampling.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace krecon {

struct LorakiSettings {
    int c = 64;
    int k = 5;
    int r = 3;
    int steps = 600;
    double lr = 3e-3;
    int pairs = 4;
    bool train_lambda = true;
};

// Fully resolved experiment description; parsed from a sectioned
// key = value text file (see docs/FORMATS.md for the format).
struct ExperimentConfig {
    // [data]
    std::string source = "phantom"; // phantom | file
    std::string kspace_path;
    PhantomSpec phantom;
    int compress_to = 0; // 0 disables coil compression

    // [mask]
    std::string mask_style = "uniform"; // uniform | random | pf | budget
    int accel = 4;
    double target_accel = 4.0;
    int acs_lines = 32;
    int acs_rows = 64;
    int acs_cols = 64;
    double pf_fraction = 0.625;
    int total_lines = 0;
    double density_exponent = 3.0;

    // [methods]
    std::vector<std::string> methods{"zero-fill"};

    // per-method sections
    double grappa_reg = 1e-6;
    RakiHyper raki;
    AcLoraksOptions acloraks;
    std::vector<int> acloraks_c_values{16, 32, 64};
    LorakiSettings loraki;
    AcLoraksOptions synth; // settings of the synthetic-ACS generator
    int synth_patch = 48;
    int synth_pairs = 8;

    // [output]
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    int esp_bins = 24;
    bool write_images = true;
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

// Runs every configured method on the shared data/mask, writes the
// reconstructions, images, metrics CSV, ESP CSVs and the manifest into
// the output directory, and returns one report per method (failures are
// recorded, not thrown).
std::vector<ReconReport> run_experiment(const ExperimentConfig& config);

// One run per axis value with shared seeds; returns the aggregated
// (value, method, nrmse, ssim) rows that are also written to
// sweep_<axis>.csv. Valid axes: C, K, R, acs_lines, acs_size, accel.
std::vector<std::vector<std::string>> sweep(const ExperimentConfig& config, const std::string& axis,
                                            const std::vector<double>& values);

// The generated inputs of a run, exposed for tests and tooling.
struct ExperimentData {
    KSpace full;
    SamplingMask mask;
    KSpace d_zp;
    MagnitudeImage gold; // normalized to [0,1]
    double gold_max = 1.0;
};
ExperimentData prepare_experiment_data(const ExperimentConfig& config);

} // namespace krecon
