#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ares/core_types.hpp"
#include "ares/ingestion.hpp"

namespace ares {

/// Visit counts as percent of total visits.
struct VisitRates {
    double viral = 0.0;
    double ili = 0.0;
    double flu = 0.0;
    double vaccine = 0.0;
};

/// Each rate is 100 * count / total_visits. Requires total_visits > 0.
VisitRates make_rates(const VisitCounts& c) noexcept;

/// Fixed column order of the nowcasting design matrix:
///   viral_t2 viral_t1 viral_t0 ili_t2 ili_t1 ili_t0 flu_t2 flu_t1 flu_t0 cdc_t2 cdc_t1
/// followed by vacc_t2 vacc_t1 vacc_t0 when vaccine visits are enabled.
std::vector<std::string> feature_names(bool include_vaccine = false);
std::size_t feature_count(bool include_vaccine = false) noexcept;

/// Per-column centering and scaling fitted on training rows.
struct ColumnStats {
    std::vector<double> mean;
    std::vector<double> sd;  // 0 marks a zero-variance column

    /// (x - mean) / sd per column; zero-variance columns map to 0.
    std::vector<double> apply(std::span<const double> row) const;
    void apply_in_place(std::span<double> row) const;
};

/// Sample (n-1) statistics of every column of a row-major matrix. Columns
/// whose sd is negligible relative to their mean are marked zero-variance.
ColumnStats fit_column_stats(std::span<const double> data, std::size_t cols);

/// Row-major feature matrix with one target per row; row k is week first_week + k.
struct DesignMatrix {
    Region region = Region::National;
    WeekId first_week = WeekId::parse("2009-06-28");
    std::size_t cols = 0;
    std::vector<double> data;
    std::vector<double> targets;
    std::vector<std::string> feature_names;
    std::optional<ColumnStats> standardization;

    std::size_t rows() const noexcept { return targets.size(); }
    std::span<const double> row(std::size_t i) const noexcept { return {data.data() + i * cols, cols}; }
    WeekId week(std::size_t i) const noexcept { return first_week + static_cast<std::int64_t>(i); }
};

/// Features for prediction week t. Reads athena visits at t-2..t and CDC
/// %ILI at t-2..t-1 only. Throws MissingLagError if t-2 precedes the data.
std::vector<double> feature_row(const Dataset& ds, Region region, WeekId t, bool include_vaccine = false);

/// One row per week in [from, to] with target cdc(t).
DesignMatrix build_matrix(const Dataset& ds, Region region, WeekId from, WeekId to,
                          bool include_vaccine = false);

/// Z-scores every column with statistics fitted on `m` itself and records them.
DesignMatrix standardize(const DesignMatrix& m);

}  // namespace ares
