#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "ares/core_types.hpp"
#include "ares/ingestion.hpp"

namespace ares {

/// Ordinary least squares with an unpenalized intercept.
struct OlsModel {
    std::vector<double> coefficients;
    double intercept = 0.0;
    std::vector<std::string> regressor_names;

    double predict(std::span<const double> x) const;
};

/// Least squares on row-major `rows` (cols regressors) plus an intercept.
/// Regressors are centered first and the slope vector is the minimum-norm
/// solution, so collinear or constant columns still give a unique answer.
OlsModel fit_ols(std::span<const double> rows, std::size_t cols, std::span<const double> targets,
                 std::vector<std::string> names = {});

/// (cdc(t-2), cdc(t-1)). Throws MissingLagError when t-2 precedes the series.
std::array<double, 2> ar2_features(const WeeklySeries& cdc, WeekId t);

/// athena ILI visit rate at week t. Throws MissingLagError when t is absent.
std::array<double, 1> linear_univariate_features(const AthenaSeries& athena, WeekId t);

}  // namespace ares
