#include "ares/features.hpp"

#include <algorithm>
#include <cmath>

#include "ares/errors.hpp"

namespace ares {

namespace {

constexpr double kZeroVarianceRatio = 1e-12;

void require_lags(const Dataset& ds, Region region, WeekId t) {
    const WeekId first_feasible = ds.first_week + 2;
    if (t < first_feasible)
        throw MissingLagError(first_feasible.to_string(),
                              std::string(region_code(region)) + " week " + t.to_string() +
                                  " lacks two weeks of lag history");
    if (t > ds.last_week)
        throw RangeError("week " + t.to_string() + " beyond dataset end " + ds.last_week.to_string());
}

}  // namespace

VisitRates make_rates(const VisitCounts& c) noexcept {
    const double total = static_cast<double>(c.total_visits);
    return {
        100.0 * static_cast<double>(c.viral_ili_visits) / total,
        100.0 * static_cast<double>(c.ili_visits) / total,
        100.0 * static_cast<double>(c.flu_visits) / total,
        100.0 * static_cast<double>(c.flu_vaccine_visits) / total,
    };
}

std::vector<std::string> feature_names(bool include_vaccine) {
    std::vector<std::string> names = {"viral_t2", "viral_t1", "viral_t0", "ili_t2", "ili_t1", "ili_t0",
                                      "flu_t2",   "flu_t1",   "flu_t0",   "cdc_t2", "cdc_t1"};
    if (include_vaccine) names.insert(names.end(), {"vacc_t2", "vacc_t1", "vacc_t0"});
    return names;
}

std::size_t feature_count(bool include_vaccine) noexcept { return include_vaccine ? 14 : 11; }

std::vector<double> ColumnStats::apply(std::span<const double> row) const {
    std::vector<double> out(row.begin(), row.end());
    apply_in_place(out);
    return out;
}

void ColumnStats::apply_in_place(std::span<double> row) const {
    if (row.size() != mean.size())
        throw ShapeError("row has " + std::to_string(row.size()) + " columns, stats have " +
                         std::to_string(mean.size()));
    for (std::size_t j = 0; j < row.size(); ++j) row[j] = sd[j] > 0.0 ? (row[j] - mean[j]) / sd[j] : 0.0;
}

ColumnStats fit_column_stats(std::span<const double> data, std::size_t cols) {
    const std::size_t rows = cols ? data.size() / cols : 0;
    if (rows < 2) throw ShapeError("column statistics need at least 2 rows");
    ColumnStats s{std::vector<double>(cols, 0.0), std::vector<double>(cols, 0.0)};
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) s.mean[j] += data[i * cols + j];
    for (auto& m : s.mean) m /= static_cast<double>(rows);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) {
            const double d = data[i * cols + j] - s.mean[j];
            s.sd[j] += d * d;
        }
    for (std::size_t j = 0; j < cols; ++j) {
        const double sd = std::sqrt(s.sd[j] / static_cast<double>(rows - 1));
        s.sd[j] = sd > kZeroVarianceRatio * std::max(1.0, std::abs(s.mean[j])) ? sd : 0.0;
    }
    return s;
}

std::vector<double> feature_row(const Dataset& ds, Region region, WeekId t, bool include_vaccine) {
    require_lags(ds, region, t);
    const auto& athena = ds.athena_for(region);
    const auto& cdc = ds.cdc_for(region);
    const VisitRates r2 = make_rates(athena.at(t - 2));
    const VisitRates r1 = make_rates(athena.at(t - 1));
    const VisitRates r0 = make_rates(athena.at(t));
    std::vector<double> row = {r2.viral, r1.viral, r0.viral, r2.ili,         r1.ili,        r0.ili,
                               r2.flu,   r1.flu,   r0.flu,   cdc.at(t - 2), cdc.at(t - 1)};
    if (include_vaccine) row.insert(row.end(), {r2.vaccine, r1.vaccine, r0.vaccine});
    return row;
}

DesignMatrix build_matrix(const Dataset& ds, Region region, WeekId from, WeekId to, bool include_vaccine) {
    if (from > to) throw RangeError("design matrix range " + from.to_string() + " after " + to.to_string());
    require_lags(ds, region, from);
    require_lags(ds, region, to);
    DesignMatrix m;
    m.region = region;
    m.first_week = from;
    m.cols = feature_count(include_vaccine);
    m.feature_names = feature_names(include_vaccine);
    const auto n = static_cast<std::size_t>(to - from) + 1;
    m.data.reserve(n * m.cols);
    m.targets.reserve(n);
    const auto& cdc = ds.cdc_for(region);
    for (WeekId t = from; t <= to; t = t.successor()) {
        const auto row = feature_row(ds, region, t, include_vaccine);
        m.data.insert(m.data.end(), row.begin(), row.end());
        m.targets.push_back(cdc.at(t));
    }
    return m;
}

DesignMatrix standardize(const DesignMatrix& m) {
    DesignMatrix out = m;
    out.standardization = fit_column_stats(m.data, m.cols);
    for (std::size_t i = 0; i < out.rows(); ++i)
        out.standardization->apply_in_place({out.data.data() + i * out.cols, out.cols});
    return out;
}

}  // namespace ares
