#include "ares/baselines.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "ares/errors.hpp"
#include "ares/features.hpp"

namespace ares {

double OlsModel::predict(std::span<const double> x) const {
    if (x.size() != coefficients.size())
        throw ShapeError("OLS model expects " + std::to_string(coefficients.size()) + " regressors, got " +
                         std::to_string(x.size()));
    double y = intercept;
    for (std::size_t j = 0; j < x.size(); ++j) y += coefficients[j] * x[j];
    return y;
}

OlsModel fit_ols(std::span<const double> rows, std::size_t cols, std::span<const double> targets,
                 std::vector<std::string> names) {
    const std::size_t n = targets.size();
    if (n < 2) throw ShapeError("OLS needs at least 2 rows");
    if (rows.size() != n * cols) throw ShapeError("OLS regressor matrix does not match target count");

    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::Map<const RowMajor> x(rows.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cols));
    Eigen::Map<const Eigen::VectorXd> y(targets.data(), static_cast<Eigen::Index>(n));

    const Eigen::RowVectorXd x_mean = x.colwise().mean();
    const double y_mean = y.mean();
    Eigen::MatrixXd xc = x.rowwise() - x_mean;
    const Eigen::VectorXd yc = y.array() - y_mean;
    // Columns that are constant up to rounding carry no information.
    for (Eigen::Index j = 0; j < xc.cols(); ++j)
        if (xc.col(j).norm() <= 1e-12 * (1.0 + std::abs(x_mean(j))) * std::sqrt(static_cast<double>(n)))
            xc.col(j).setZero();

    Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cols));
    if (cols > 0) {
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(xc);
        cod.setThreshold(1e-10);
        w = cod.solve(yc);
    }

    OlsModel m;
    m.coefficients.assign(w.data(), w.data() + w.size());
    m.intercept = y_mean - x_mean.dot(w);
    if (names.size() != cols) names.assign(cols, std::string{});
    m.regressor_names = std::move(names);
    return m;
}

std::array<double, 2> ar2_features(const WeeklySeries& cdc, WeekId t) {
    if (cdc.empty() || t < cdc.first_week() + 2)
        throw MissingLagError((cdc.first_week() + 2).to_string(),
                              "AR(2) lags unavailable for week " + t.to_string());
    return {cdc.at(t - 2), cdc.at(t - 1)};
}

std::array<double, 1> linear_univariate_features(const AthenaSeries& athena, WeekId t) {
    if (!athena.contains(t))
        throw MissingLagError(athena.first_week().to_string(),
                              "athena data missing for week " + t.to_string());
    return {make_rates(athena.at(t)).ili};
}

}  // namespace ares
