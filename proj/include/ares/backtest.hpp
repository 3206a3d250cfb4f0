#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ares/evaluation.hpp"
#include "ares/features.hpp"
#include "ares/svr.hpp"

namespace ares {

enum class ModelKind { Ares, Ar2, Linear };

/// "ares", "ar2", "linear".
std::string_view model_code(ModelKind m) noexcept;
/// Throws ConfigError for unknown codes.
ModelKind parse_model(std::string_view code);

/// Hyperparameter grid searched with forward-chaining folds.
struct CvSpec {
    std::size_t folds = 5;
    std::vector<double> c_values{0.1, 1.0, 10.0, 100.0};
    std::vector<double> epsilon_values{0.01, 0.05, 0.1, 0.25};
    std::vector<Kernel> kernels{Kernel::linear(), Kernel::rbf(0.01), Kernel::rbf(0.1), Kernel::rbf(1.0)};
    double tolerance = 1e-3;
    /// SMO cap for the weekly fits; 0 keeps the solver default.
    std::size_t max_iterations = 0;
    /// SMO cap inside cross-validation. Grid points that fail to converge
    /// within it on some fold are dropped from the search.
    std::size_t cv_max_iterations = 50'000;

    /// Grid points in tie-break order: Linear before Rbf, then C, epsilon, gamma ascending.
    std::vector<SvrParams> grid() const;
    void validate() const;
};

enum class FailurePolicy { Abort, Skip };

struct BacktestConfig {
    WeekId training_start = WeekId::parse("2009-06-28");
    WeekId first_prediction = WeekId::parse("2012-01-08");
    WeekId last_prediction = WeekId::parse("2015-06-28");
    std::vector<ModelKind> models{ModelKind::Ares, ModelKind::Ar2, ModelKind::Linear};
    /// Empty means every region of the data set.
    std::vector<Region> regions;
    CvSpec cv;
    /// Hyperparameters are re-selected every this many prediction weeks (1 = weekly).
    std::size_t hyper_every_weeks = 13;
    bool include_vaccine = false;
    std::uint64_t seed = 0;
    FailurePolicy on_failure = FailurePolicy::Abort;
    /// Regions backtested concurrently.
    std::size_t jobs = 1;

    /// Throws ConfigError unless training_start + 2 <= first_prediction <= last_prediction.
    void validate() const;
    std::size_t prediction_weeks() const noexcept {
        return static_cast<std::size_t>(last_prediction - first_prediction) + 1;
    }
};

struct HyperparamRecord {
    WeekId week;
    SvrParams params;
};

struct CoefficientRecord {
    WeekId week;
    ModelKind model;
    std::string feature;
    double value;
};

struct FailureRecord {
    WeekId week;
    ModelKind model;
    std::string message;
};

struct RegionReport {
    Region region;
    std::map<ModelKind, WeeklySeries> predictions;
    WeeklySeries observed;
    std::vector<HyperparamRecord> hyperparams;
    std::vector<CoefficientRecord> coefficients;
    std::vector<FailureRecord> failures;
    /// Training rows used for each prediction week.
    std::vector<std::size_t> training_rows;
};

struct BacktestReport {
    std::vector<RegionReport> regions;

    std::vector<PredictionTrack> tracks() const;
};

/// Weekly expanding-window replay. For prediction week t every model trains
/// on target weeks [training_start + 2, t - 1] and predicts t from athena data
/// through t and CDC data through t - 1. ARES coefficients are exported in
/// standardized feature units for linear-kernel weeks.
BacktestReport run_backtest(const Dataset& ds, const BacktestConfig& cfg);

/// Grid point with the lowest mean validation RMSE over forward-chaining folds:
/// rows are split into folds + 1 time-ordered blocks and fold k trains on the
/// first k blocks (the first block absorbs the remainder) and validates on
/// block k. Grid points whose fit fails to converge are skipped. The folds
/// draw no random numbers, so `seed` does not change the result.
SvrParams select_hyperparams(const DesignMatrix& train, const CvSpec& spec, std::uint64_t seed = 0);

void write_predictions_csv(std::ostream& out, const BacktestReport& r);
void write_coefficients_csv(std::ostream& out, const BacktestReport& r);
void write_hyperparams_csv(std::ostream& out, const BacktestReport& r);

/// Reads predictions.csv back into aligned tracks (used to recompute metrics).
std::vector<PredictionTrack> read_predictions_csv(std::istream& in);

}  // namespace ares
