#pragma once

#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "ares/core_types.hpp"

namespace ares {

/// sqrt(mean((pred - obs)^2)). Throws ShapeError on length mismatch or empty input.
double rmse(std::span<const double> pred, std::span<const double> obs);

/// 100 * sqrt(mean(((pred - obs) / obs)^2)), in percent. Throws DomainError if any obs <= 0.
double relative_rmse(std::span<const double> pred, std::span<const double> obs);

/// Sample Pearson correlation. Throws DomainError if either input is constant.
double pearson(std::span<const double> pred, std::span<const double> obs);

struct MetricsRow {
    Region region;
    std::string model;  // model code: ares, ar2, linear
    double rmse = 0.0;
    double rel_rmse = 0.0;  // NaN when some observation is not positive
    double pearson = 0.0;   // NaN when a series is constant
};

/// Aligned prediction and observation series of one (region, model).
struct PredictionTrack {
    Region region;
    std::string model;
    std::vector<double> predicted;
    std::vector<double> observed;
};

struct MetricsSummary {
    std::vector<MetricsRow> rows;
    /// Per model: mean over the HHS regions present (National excluded).
    std::vector<MetricsRow> regional_averages;
};

MetricsSummary summarize(std::span<const PredictionTrack> tracks);

/// metrics.csv: region,model,rmse,rel_rmse_pct,pearson with six decimals.
void write_metrics_csv(std::ostream& out, std::span<const MetricsRow> rows);

/// Human-readable region-by-model table with display labels.
void print_summary_table(std::ostream& out, const MetricsSummary& s);

/// Display label for a model code ("ares" -> "SVM (linear) + AR(2)").
std::string model_label(std::string_view code);

}  // namespace ares
