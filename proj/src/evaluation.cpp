#include "ares/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <tuple>

#include "ares/errors.hpp"

namespace ares {

namespace {

void check_aligned(std::span<const double> a, std::span<const double> b, std::size_t min_len) {
    if (a.size() != b.size())
        throw ShapeError("series lengths differ: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    if (a.size() < min_len) throw ShapeError("need at least " + std::to_string(min_len) + " aligned values");
}

std::string fixed6(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

// Table ordering: univariate baseline, autoregression, then the combined model.
int model_rank(std::string_view code) {
    if (code == "linear") return 0;
    if (code == "ar2") return 1;
    if (code == "ares") return 2;
    return 3;
}

}  // namespace

double rmse(std::span<const double> pred, std::span<const double> obs) {
    check_aligned(pred, obs, 1);
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) s += (pred[i] - obs[i]) * (pred[i] - obs[i]);
    return std::sqrt(s / static_cast<double>(pred.size()));
}

double relative_rmse(std::span<const double> pred, std::span<const double> obs) {
    check_aligned(pred, obs, 1);
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (!(obs[i] > 0.0)) throw DomainError("relative RMSE undefined for non-positive observation");
        const double r = (pred[i] - obs[i]) / obs[i];
        s += r * r;
    }
    return 100.0 * std::sqrt(s / static_cast<double>(pred.size()));
}

double pearson(std::span<const double> pred, std::span<const double> obs) {
    check_aligned(pred, obs, 2);
    const double n = static_cast<double>(pred.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) mx += pred[i], my += obs[i];
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double dx = pred[i] - mx, dy = obs[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw DomainError("Pearson correlation undefined for a constant series");
    // (n-1) factors cancel; kept explicit so the sample convention is visible.
    const double r = (sxy / (n - 1)) / std::sqrt((sxx / (n - 1)) * (syy / (n - 1)));
    return std::clamp(r, -1.0, 1.0);
}

std::string model_label(std::string_view code) {
    if (code == "ares") return "SVM (linear) + AR(2)";
    if (code == "ar2") return "AR(2)";
    if (code == "linear") return "Linear (univariate)";
    return std::string(code);
}

MetricsSummary summarize(std::span<const PredictionTrack> tracks) {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    MetricsSummary out;
    for (const auto& t : tracks) {
        MetricsRow row{t.region, t.model, rmse(t.predicted, t.observed), nan, nan};
        try {
            row.rel_rmse = relative_rmse(t.predicted, t.observed);
        } catch (const DomainError&) {
        }
        try {
            row.pearson = pearson(t.predicted, t.observed);
        } catch (const DomainError&) {
        }
        out.rows.push_back(row);
    }
    std::sort(out.rows.begin(), out.rows.end(), [](const MetricsRow& a, const MetricsRow& b) {
        return std::tuple(a.region, model_rank(a.model), a.model) <
               std::tuple(b.region, model_rank(b.model), b.model);
    });

    std::map<std::pair<int, std::string>, std::vector<const MetricsRow*>> by_model;
    for (const auto& r : out.rows)
        if (r.region != Region::National) by_model[{model_rank(r.model), r.model}].push_back(&r);
    for (const auto& [model, rows] : by_model) {
        MetricsRow avg{Region::National, model.second, 0.0, 0.0, 0.0};
        for (const auto* r : rows) {
            avg.rmse += r->rmse;
            avg.rel_rmse += r->rel_rmse;
            avg.pearson += r->pearson;
        }
        const double k = static_cast<double>(rows.size());
        avg.rmse /= k;
        avg.rel_rmse /= k;
        avg.pearson /= k;
        out.regional_averages.push_back(avg);
    }
    return out;
}

void write_metrics_csv(std::ostream& out, std::span<const MetricsRow> rows) {
    out << "region,model,rmse,rel_rmse_pct,pearson\n";
    for (const auto& r : rows)
        out << region_code(r.region) << ',' << r.model << ',' << fixed6(r.rmse) << ',' << fixed6(r.rel_rmse)
            << ',' << fixed6(r.pearson) << '\n';
}

void print_summary_table(std::ostream& out, const MetricsSummary& s) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%-24s %10s %16s %12s\n", "Algorithm", "RMSE", "Rel. RMSE (%)", "Correlation");
    out << buf;
    auto line = [&](const MetricsRow& r) {
        std::snprintf(buf, sizeof buf, "%-24s %10.2f %15.2f%% %12.3f\n", model_label(r.model).c_str(), r.rmse,
                      r.rel_rmse, r.pearson);
        out << buf;
    };
    bool first = true;
    Region current{};
    for (const auto& r : s.rows) {
        if (first || r.region != current) {
            out << region_label(r.region) << '\n';
            current = r.region;
            first = false;
        }
        line(r);
    }
    if (!s.regional_averages.empty()) {
        out << "Average over HHS regions\n";
        for (const auto& r : s.regional_averages) line(r);
    }
}

}  // namespace ares
