#include "ares/backtest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <future>
#include <limits>
#include <tuple>

#include "ares/baselines.hpp"
#include "ares/errors.hpp"

namespace ares {

namespace {

DesignMatrix prefix_rows(const DesignMatrix& m, std::size_t n) {
    DesignMatrix out;
    out.region = m.region;
    out.first_week = m.first_week;
    out.cols = m.cols;
    out.feature_names = m.feature_names;
    out.data.assign(m.data.begin(), m.data.begin() + static_cast<std::ptrdiff_t>(n * m.cols));
    out.targets.assign(m.targets.begin(), m.targets.begin() + static_cast<std::ptrdiff_t>(n));
    return out;
}

// Regressor rows for the two baselines over target weeks [from, to].
struct BaselineRows {
    std::vector<double> ar2;     // (cdc(t-2), cdc(t-1))
    std::vector<double> linear;  // ili_rate(t)
    std::vector<double> targets;
};

BaselineRows baseline_rows(const Dataset& ds, Region r, WeekId from, WeekId to) {
    BaselineRows b;
    const auto& cdc = ds.cdc_for(r);
    const auto& athena = ds.athena_for(r);
    for (WeekId t = from; t <= to; t = t.successor()) {
        const auto lags = ar2_features(cdc, t);
        b.ar2.insert(b.ar2.end(), lags.begin(), lags.end());
        b.linear.push_back(linear_univariate_features(athena, t)[0]);
        b.targets.push_back(cdc.at(t));
    }
    return b;
}

class RegionBacktest {
public:
    RegionBacktest(const Dataset& ds, const BacktestConfig& cfg, Region r)
        : ds_(ds), cfg_(cfg), region_(r), train_from_(cfg.training_start + 2) {}

    RegionReport run() {
        const WeekId last_train = cfg_.last_prediction - 1;
        const bool want_ares = has(ModelKind::Ares);
        if (want_ares) ares_rows_ = build_matrix(ds_, region_, train_from_, last_train, cfg_.include_vaccine);
        baseline_ = baseline_rows(ds_, region_, train_from_, last_train);

        std::map<ModelKind, std::vector<double>> preds;
        std::vector<double> observed;
        RegionReport rep{region_, {}, WeeklySeries(region_, cfg_.first_prediction, {}), {}, {}, {}, {}};
        for (WeekId t = cfg_.first_prediction; t <= cfg_.last_prediction; t = t.successor()) {
            const auto n = static_cast<std::size_t>(t - train_from_);
            rep.training_rows.push_back(n);
            for (ModelKind m : cfg_.models) preds[m].push_back(predict(m, t, n, rep));
            observed.push_back(ds_.cdc_for(region_).at(t));
        }
        for (auto& [m, v] : preds) rep.predictions.emplace(m, WeeklySeries(region_, cfg_.first_prediction, std::move(v)));
        rep.observed = WeeklySeries(region_, cfg_.first_prediction, std::move(observed));
        return rep;
    }

private:
    bool has(ModelKind m) const {
        return std::find(cfg_.models.begin(), cfg_.models.end(), m) != cfg_.models.end();
    }

    double predict(ModelKind m, WeekId t, std::size_t n, RegionReport& rep) {
        switch (m) {
            case ModelKind::Ares: return predict_ares(t, n, rep);
            case ModelKind::Ar2: {
                const auto model = fit_ols({baseline_.ar2.data(), 2 * n}, 2, {baseline_.targets.data(), n},
                                           {"cdc_t2", "cdc_t1"});
                record_ols(model, t, m, rep);
                const auto x = ar2_features(ds_.cdc_for(region_), t);
                return model.predict(x);
            }
            case ModelKind::Linear: {
                const auto model = fit_ols({baseline_.linear.data(), n}, 1, {baseline_.targets.data(), n}, {"ili_t0"});
                record_ols(model, t, m, rep);
                const auto x = linear_univariate_features(ds_.athena_for(region_), t);
                return model.predict(x);
            }
        }
        return 0.0;
    }

    double predict_ares(WeekId t, std::size_t n, RegionReport& rep) {
        const DesignMatrix train = prefix_rows(ares_rows_, n);
        const auto week_index = static_cast<std::size_t>(t - cfg_.first_prediction);
        if (!params_ || week_index % cfg_.hyper_every_weeks == 0)
            params_ = select_hyperparams(train, cfg_.cv, cfg_.seed);
        rep.hyperparams.push_back({t, *params_});
        try {
            auto fit = svr_fit_from(train, *params_, warm_start(*params_));
            model_.emplace(std::move(fit.model));
            last_beta_ = std::move(fit.beta);
            last_c_ = params_->c;
        } catch (const ConvergenceError& e) {
            if (cfg_.on_failure == FailurePolicy::Abort || !model_) throw;
            // Skip policy: keep last week's model for this prediction.
            rep.failures.push_back({t, ModelKind::Ares, e.what()});
        }
        if (model_->params().kernel.type == KernelType::Linear) {
            const auto w = extract_weights(*model_);
            for (std::size_t j = 0; j < w.w.size(); ++j)
                rep.coefficients.push_back({t, ModelKind::Ares, w.names[j], w.w[j]});
        }
        return svr_predict(*model_, feature_row(ds_, region_, t, cfg_.include_vaccine));
    }

    // Last week's dual solution rescaled to the current C; it stays feasible
    // for the extended training set once padded with zeros.
    std::vector<double> warm_start(const SvrParams& p) const {
        std::vector<double> start = last_beta_;
        if (!start.empty() && last_c_ != p.c)
            for (double& b : start) b *= p.c / last_c_;
        return start;
    }

    void record_ols(const OlsModel& model, WeekId t, ModelKind m, RegionReport& rep) const {
        for (std::size_t j = 0; j < model.coefficients.size(); ++j)
            rep.coefficients.push_back({t, m, model.regressor_names[j], model.coefficients[j]});
    }

    const Dataset& ds_;
    const BacktestConfig& cfg_;
    Region region_;
    WeekId train_from_;
    DesignMatrix ares_rows_;
    BaselineRows baseline_;
    std::optional<SvrParams> params_;
    std::optional<SvrModel> model_;
    std::vector<double> last_beta_;
    double last_c_ = 0.0;
};

}  // namespace

std::string_view model_code(ModelKind m) noexcept {
    switch (m) {
        case ModelKind::Ares: return "ares";
        case ModelKind::Ar2: return "ar2";
        case ModelKind::Linear: return "linear";
    }
    return "?";
}

ModelKind parse_model(std::string_view code) {
    if (code == "ares") return ModelKind::Ares;
    if (code == "ar2") return ModelKind::Ar2;
    if (code == "linear") return ModelKind::Linear;
    throw ConfigError("unknown model '" + std::string(code) + "' (expected ares, ar2 or linear)");
}

std::vector<SvrParams> CvSpec::grid() const {
    std::vector<SvrParams> g;
    for (const auto& k : kernels)
        for (double c : c_values)
            for (double e : epsilon_values) g.push_back({c, e, k, tolerance, max_iterations});
    std::stable_sort(g.begin(), g.end(), [](const SvrParams& a, const SvrParams& b) {
        return std::tuple(a.kernel.type, a.c, a.epsilon, a.kernel.gamma) <
               std::tuple(b.kernel.type, b.c, b.epsilon, b.kernel.gamma);
    });
    return g;
}

void CvSpec::validate() const {
    if (folds < 2) throw ConfigError("cross-validation needs at least 2 folds");
    if (c_values.empty() || epsilon_values.empty() || kernels.empty())
        throw ConfigError("hyperparameter grid is empty");
    for (const auto& p : grid()) {
        try {
            p.validate();
        } catch (const DomainError& e) {
            throw ConfigError(std::string("invalid grid point: ") + e.what());
        }
    }
}

void BacktestConfig::validate() const {
    if (training_start + 2 > first_prediction)
        throw ConfigError("first prediction must come at least two weeks after training start");
    if (first_prediction > last_prediction) throw ConfigError("first prediction is after last prediction");
    if (models.empty()) throw ConfigError("no models selected");
    if (hyper_every_weeks == 0) throw ConfigError("hyperparameter cadence must be at least one week");
    if (first_prediction - training_start < 4)
        throw ConfigError("training window too short: need at least two target weeks before the first prediction");
    cv.validate();
}

SvrParams select_hyperparams(const DesignMatrix& train, const CvSpec& spec, std::uint64_t /*seed*/) {
    const auto grid = spec.grid();
    if (grid.empty()) throw CvError("hyperparameter grid is empty");
    if (grid.size() == 1) return grid.front();
    const std::size_t n = train.rows();
    const std::size_t block = n / (spec.folds + 1);
    if (spec.folds < 2 || block < 1 || n - spec.folds * block < 2)
        throw CvError("too few training rows (" + std::to_string(n) + ") for " + std::to_string(spec.folds) +
                      " forward-chaining folds");
    const std::size_t first_train = n - spec.folds * block;

    std::vector<DesignMatrix> fold_train;
    for (std::size_t k = 0; k < spec.folds; ++k) fold_train.push_back(prefix_rows(train, first_train + k * block));

    // Each (kernel, fold) pair walks the grid in order and seeds every fit with
    // the previous solution, rescaled to the new C.
    struct Chain {
        Kernel kernel;
        std::vector<double> beta;
        double c = 0.0;
    };
    std::vector<Chain> chains(spec.folds);

    double best = std::numeric_limits<double>::infinity();
    std::optional<SvrParams> chosen;
    for (const auto& p : grid) {
        double total = 0.0;
        bool failed = false;
        for (std::size_t k = 0; k < spec.folds && !failed; ++k) {
            const std::size_t lo = first_train + k * block;
            Chain& chain = chains[k];
            if (!(chain.kernel == p.kernel)) chain = {p.kernel, {}, 0.0};
            std::vector<double> start = chain.beta;
            if (!start.empty() && chain.c != p.c)
                for (double& b : start) b *= p.c / chain.c;
            try {
                SvrParams capped = p;
                capped.max_iterations = spec.cv_max_iterations;
                auto fit = svr_fit_from(fold_train[k], capped, start);
                chain.beta = std::move(fit.beta);
                chain.c = p.c;
                const auto& model = fit.model;
                double sse = 0.0;
                for (std::size_t i = lo; i < lo + block; ++i) {
                    const double e = svr_predict(model, train.row(i)) - train.targets[i];
                    sse += e * e;
                }
                total += std::sqrt(sse / static_cast<double>(block));
            } catch (const ConvergenceError&) {
                failed = true;
            }
        }
        if (failed) continue;
        const double mean = total / static_cast<double>(spec.folds);
        if (mean < best) best = mean, chosen = p;
    }
    if (!chosen) throw CvError("no grid point converged on any fold");
    return *chosen;
}

BacktestReport run_backtest(const Dataset& ds, const BacktestConfig& cfg) {
    cfg.validate();
    const std::vector<Region> regions = cfg.regions.empty() ? ds.regions : cfg.regions;
    std::vector<std::string> holes;
    if (cfg.training_start < ds.first_week)
        holes.push_back("dataset:" + ds.first_week.to_string() + " starts after training start " +
                        cfg.training_start.to_string());
    if (cfg.last_prediction > ds.last_week)
        holes.push_back("dataset:" + ds.last_week.to_string() + " ends before last prediction " +
                        cfg.last_prediction.to_string());
    for (Region r : regions)
        if (!ds.athena.contains(r) || !ds.cdc.contains(r)) holes.push_back(std::string(region_code(r)) + ":all");
    if (!holes.empty()) throw CoverageError(std::move(holes));

    BacktestReport report;
    const std::size_t jobs = std::max<std::size_t>(1, cfg.jobs);
    for (std::size_t start = 0; start < regions.size(); start += jobs) {
        std::vector<std::future<RegionReport>> running;
        const std::size_t end = std::min(regions.size(), start + jobs);
        for (std::size_t i = start; i < end; ++i)
            running.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred,
                                         [&, r = regions[i]] { return RegionBacktest(ds, cfg, r).run(); }));
        for (auto& f : running) report.regions.push_back(f.get());
    }
    std::sort(report.regions.begin(), report.regions.end(),
              [](const RegionReport& a, const RegionReport& b) { return a.region < b.region; });
    return report;
}

std::vector<PredictionTrack> BacktestReport::tracks() const {
    std::vector<PredictionTrack> out;
    for (const auto& r : regions)
        for (const auto& [m, s] : r.predictions)
            out.push_back({r.region, std::string(model_code(m)), {s.values().begin(), s.values().end()},
                           {r.observed.values().begin(), r.observed.values().end()}});
    return out;
}

void write_predictions_csv(std::ostream& out, const BacktestReport& r) {
    out << "region,week_start,model,prediction,observed\n";
    for (const auto& reg : r.regions) {
        for (std::size_t k = 0; k < reg.observed.size(); ++k) {
            const WeekId w = reg.observed.first_week() + static_cast<std::int64_t>(k);
            for (const auto& [m, s] : reg.predictions)
                out << region_code(reg.region) << ',' << w.to_string() << ',' << model_code(m) << ','
                    << format_real(s.values()[k]) << ',' << format_real(reg.observed.values()[k]) << '\n';
        }
    }
}

void write_coefficients_csv(std::ostream& out, const BacktestReport& r) {
    out << "region,week_start,model,feature,value\n";
    for (const auto& reg : r.regions) {
        auto coefs = reg.coefficients;
        std::stable_sort(coefs.begin(), coefs.end(), [](const CoefficientRecord& a, const CoefficientRecord& b) {
            return std::tuple(a.week, a.model) < std::tuple(b.week, b.model);
        });
        for (const auto& c : coefs)
            out << region_code(reg.region) << ',' << c.week.to_string() << ',' << model_code(c.model) << ','
                << c.feature << ',' << format_real(c.value) << '\n';
    }
}

void write_hyperparams_csv(std::ostream& out, const BacktestReport& r) {
    out << "region,week_start,kernel,c,epsilon,gamma\n";
    for (const auto& reg : r.regions)
        for (const auto& h : reg.hyperparams)
            out << region_code(reg.region) << ',' << h.week.to_string() << ',' << h.params.kernel.name() << ','
                << format_real(h.params.c) << ',' << format_real(h.params.epsilon) << ','
                << format_real(h.params.kernel.gamma) << '\n';
}

std::vector<PredictionTrack> read_predictions_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "region,week_start,model,prediction,observed")
        throw ParseError(1, "unexpected predictions.csv header");
    std::map<std::pair<Region, std::string>, PredictionTrack> tracks;
    std::map<std::pair<Region, std::string>, WeekId> last_week;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        std::vector<std::string_view> f;
        std::string_view rest(line);
        for (std::size_t pos; (pos = rest.find(',')) != std::string_view::npos; rest.remove_prefix(pos + 1))
            f.push_back(rest.substr(0, pos));
        f.push_back(rest);
        if (f.size() != 5) throw ParseError(lineno, "expected 5 fields");
        try {
            const Region region = parse_region(f[0]);
            const WeekId week = WeekId::parse(f[1]);
            const std::string model(f[2]);
            auto parse = [&](std::string_view s) {
                double v = 0.0;
                auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
                if (ec != std::errc{} || ptr != s.data() + s.size()) throw ParseError("bad number '" + std::string(s) + "'");
                return v;
            };
            const auto key = std::pair(region, model);
            auto [it, fresh] = tracks.try_emplace(key, PredictionTrack{region, model, {}, {}});
            if (!fresh && week != last_week.at(key).successor())
                throw ParseError("weeks for " + std::string(f[0]) + "/" + model + " are not consecutive");
            last_week.insert_or_assign(key, week);
            it->second.predicted.push_back(parse(f[3]));
            it->second.observed.push_back(parse(f[4]));
        } catch (const ParseError& e) {
            throw ParseError(lineno, e.what());
        } catch (const RangeError& e) {
            throw ParseError(lineno, e.what());
        }
    }
    std::vector<PredictionTrack> out;
    for (auto& [k, t] : tracks) out.push_back(std::move(t));
    return out;
}

}  // namespace ares
