#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <string>

#include "ares/backtest.hpp"
#include "ares/synth.hpp"

namespace ares {

enum class SynthMode { Seasonal, LinearTruth };

/// Everything a CLI run needs, read from one `key = value` file.
///
/// Lines are `key = value`; `#` starts a comment; blank lines are ignored.
/// Unknown or repeated keys are errors. Relative paths resolve against the
/// directory holding the config file. Recognized keys:
///
///   athena, cdc, out_dir                          input tables and output directory
///   training_start, first_prediction, last_prediction   YYYY-MM-DD Sundays
///   models            comma list of ares, ar2, linear
///   regions           comma list of national, hhs1 .. hhs10
///   include_vaccine   true | false
///   seed              unsigned integer (synthetic data and CV)
///   hyper_cadence     every_week | N (weeks between hyperparameter searches)
///   cv_folds, cv_c, cv_epsilon, cv_gamma, cv_kernels (linear,rbf)
///   svr_tolerance, svr_max_iterations, cv_max_iterations, on_failure (abort | skip), jobs
///   synth_mode (seasonal | linear_truth), synth_start, synth_weeks,
///   synth_amplitude, synth_period, synth_phase (region:weeks,...),
///   synth_baseline_ili, synth_noise_sd, synth_reporting_scale,
///   synth_spikes (offset:magnitude:width;...), synth_total_visits_mean,
///   synth_visit_multiplier (region:factor,...), synth_link (w_viral,w_ar,bias)
struct RunConfig {
    std::filesystem::path athena_path;
    std::filesystem::path cdc_path;
    std::filesystem::path out_dir;
    BacktestConfig backtest;
    SynthSpec synth;
    SynthMode synth_mode = SynthMode::Seasonal;
    LinearTruth link;
};

/// Throws ConfigError on syntax errors, unknown keys or bad values.
RunConfig parse_run_config(std::istream& in, const std::filesystem::path& base_dir = {});
/// Throws IoError if the file cannot be read.
RunConfig load_run_config(const std::filesystem::path& path);

/// Writes through a sibling temporary file and renames it into place.
/// Throws IoError on any failure; the destination is never left truncated.
void write_file_atomic(const std::filesystem::path& path, const std::function<void(std::ostream&)>& writer);

/// Opens a file for reading or throws IoError.
std::ifstream open_input(const std::filesystem::path& path);

/// Synthesizes data per the run config (seasonal or linear-truth mode).
SyntheticData synthesize(const RunConfig& cfg);

/// Loads both tables and assembles them over [training_start, last_prediction]
/// for the configured regions (all regions present in the athena table if none).
Dataset load_dataset(const RunConfig& cfg);

}  // namespace ares
