// Acceptance checks: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset. Exit status is nonzero if any check fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ares/backtest.hpp"
#include "ares/baselines.hpp"
#include "ares/errors.hpp"
#include "ares/evaluation.hpp"
#include "ares/ingestion.hpp"
#include "ares/svr.hpp"
#include "ares/synth.hpp"
#include "cli_runner.hpp"
#include "oracles/ols_oracle.hpp"
#include "oracles/qp_oracle.hpp"

using namespace ares;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// 1 ------------------------------------------------------------------------

Outcome published_numbers_documented() {
    const auto readme = cli::slurp(fs::path(ARES_SOURCE_DIR) / "README.md");
    const bool says = readme.find("cannot be reproduced") != std::string::npos &&
                      readme.find("context only") != std::string::npos;
    return {says, says ? "README states published figures are context only"
                       : "README lacks the statement on published figures"};
}

// 2 ------------------------------------------------------------------------

Outcome svr_matches_oracle() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst_obj = 0.0, worst_pred = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < 40; ++k) {
        const std::size_t n = 2 + k % 7, d = 1 + k % 3;
        const double c = (k / 2) % 2 ? 100.0 : 1.0;
        const double eps = k % 2 ? 0.1 : 0.0;
        const Kernel kern = (k / 4) % 2 ? Kernel::rbf(0.5) : Kernel::linear();
        std::vector<double> x(n * d), y(n);
        for (auto& v : x) v = u(rng);
        for (auto& v : y) v = 2.0 * u(rng);
        const auto gram = gram_matrix(x, d, kern);
        const auto ref = oracle::solve_svr_dual(gram, y, c, eps);
        const auto sol = solve_svr_dual(gram, y, c, eps, 1e-8, 0);
        worst_obj = std::max(worst_obj, std::abs(dual_objective(gram, y, sol.beta, eps) - ref.objective));
        for (int q = 0; q < 5; ++q) {
            std::vector<double> z(d);
            for (auto& v : z) v = 1.5 * u(rng);
            double a = sol.bias, b = ref.bias;
            for (std::size_t i = 0; i < n; ++i) {
                const double kv = kern({x.data() + i * d, d}, z);
                a += sol.beta[i] * kv;
                b += ref.beta[i] * kv;
            }
            worst_pred = std::max(worst_pred, std::abs(a - b));
        }
        ++count;
    }
    const double t = seconds_since(t0);
    return {count >= 20 && worst_obj <= 1e-6 && worst_pred <= 1e-4 && t < 10.0,
            fmt("%zu instances, max objective gap %.2e, max prediction gap %.2e, %.2fs", count, worst_obj,
                worst_pred, t)};
}

// 3 ------------------------------------------------------------------------

Outcome ols_matches_normal_equations() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    std::normal_distribution<double> noise(0.0, 0.5);
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
        const std::size_t cols = 1 + k % 4, n = 20 + 3 * static_cast<std::size_t>(k);
        std::vector<double> x, y, w(cols);
        for (auto& v : w) v = u(rng);
        for (std::size_t i = 0; i < n; ++i) {
            double t = 0.7;
            for (std::size_t j = 0; j < cols; ++j) {
                x.push_back(u(rng));
                t += w[j] * x.back();
            }
            y.push_back(t + noise(rng));
        }
        const auto got = fit_ols(x, cols, y);
        const auto ref = oracle::normal_equations(x, cols, y);
        worst = std::max(worst, std::abs(got.intercept - ref.intercept));
        for (std::size_t j = 0; j < cols; ++j) worst = std::max(worst, std::abs(got.coefficients[j] - ref.coefficients[j]));
    }
    const double t = seconds_since(t0);
    return {worst <= 1e-10 && t < 1.0, fmt("50 instances, max deviation %.2e, %.3fs", worst, t)};
}

// 4 ------------------------------------------------------------------------

Outcome no_lookahead() {
    const auto t0 = Clock::now();
    SynthSpec s;
    s.weeks = 300;
    s.regions = {Region::Hhs4};
    s.spikes = {{150.0, 2.0, 3.0}};
    const auto data = generate(s);
    const Dataset& ds = data.dataset;

    BacktestConfig cfg;
    cfg.training_start = ds.first_week;
    cfg.first_prediction = ds.first_week + 130;
    cfg.last_prediction = ds.last_week;
    cfg.cv.c_values = {0.1, 1.0, 10.0};
    cfg.cv.epsilon_values = {0.05, 0.1};
    cfg.cv.kernels = {Kernel::linear(), Kernel::rbf(0.1)};

    std::mt19937_64 rng(4);
    std::uniform_int_distribution<std::int64_t> pick(130, 299);
    std::set<std::int64_t> offsets;
    while (offsets.size() < 10) offsets.insert(pick(rng));
    cfg.last_prediction = ds.first_week + *offsets.rbegin();
    const auto clean = run_backtest(ds, cfg);

    std::size_t identical = 0, compared = 0;
    for (const std::int64_t off : offsets) {
        const WeekId t = ds.first_week + off;
        const auto& counts = ds.athena_for(Region::Hhs4).weeks();
        const auto& ili = ds.cdc_for(Region::Hhs4).values();
        std::vector<VisitCounts> visits(counts.begin(), counts.end());
        std::vector<double> cdc(ili.begin(), ili.end());
        std::uniform_real_distribution<double> junk(0.0, 100.0);
        for (std::size_t k = 0; k < visits.size(); ++k) {
            const WeekId w = ds.first_week + static_cast<std::int64_t>(k);
            if (w > t) {
                auto& c = visits[k];
                c.total_visits *= 3;
                c.viral_ili_visits = c.total_visits / 2;
                c.ili_visits = c.viral_ili_visits / 2;
                c.flu_visits = c.ili_visits / 2;
            }
            if (w >= t) cdc[k] = junk(rng);
        }
        Dataset poisoned = ds;
        poisoned.athena.insert_or_assign(Region::Hhs4, AthenaSeries(Region::Hhs4, ds.first_week, std::move(visits)));
        poisoned.cdc.insert_or_assign(Region::Hhs4, WeeklySeries(Region::Hhs4, ds.first_week, std::move(cdc)));
        BacktestConfig upto = cfg;
        upto.last_prediction = t;
        const auto dirty = run_backtest(poisoned, upto);
        for (const auto& [m, series] : clean.regions.front().predictions) {
            ++compared;
            identical += dirty.regions.front().predictions.at(m).at(t) == series.at(t);
        }
    }
    const double secs = seconds_since(t0);
    return {identical == compared && compared == 30 && secs < 60.0,
            fmt("%zu/%zu predictions bit-identical over 10 weeks, %.1fs", identical, compared, secs)};
}

// 5 ------------------------------------------------------------------------

Outcome linear_truth_recovery() {
    const auto t0 = Clock::now();
    SynthSpec s;
    s.weeks = 300;
    s.noise_sd = 0.05;
    s.regions = {Region::Hhs1, Region::Hhs8};
    const auto data = generate_linear_truth(s, {});
    BacktestConfig cfg;
    cfg.training_start = data.dataset.first_week;
    cfg.first_prediction = data.dataset.first_week + 130;
    cfg.last_prediction = data.dataset.last_week;
    cfg.models = {ModelKind::Ares, ModelKind::Ar2};
    cfg.cv.kernels = {Kernel::linear()};
    cfg.hyper_every_weeks = 13;
    const auto report = run_backtest(data.dataset, cfg);

    bool ok = true;
    std::string detail;
    for (const auto& r : report.regions) {
        const auto& obs = r.observed.values();
        const auto& a = r.predictions.at(ModelKind::Ares).values();
        const auto& b = r.predictions.at(ModelKind::Ar2).values();
        const double ra = rmse(a, obs), rb = rmse(b, obs), pa = pearson(a, obs);
        ok = ok && pa >= 0.97 && ra <= 0.10 && ra < rb;
        detail += fmt("%s: ARES rmse %.4f r %.4f, AR(2) rmse %.4f; ", std::string(region_code(r.region)).c_str(), ra,
                      pa, rb);
    }
    const double secs = seconds_since(t0);
    return {ok && secs < 300.0, detail + fmt("%.1fs", secs)};
}

// 6 ------------------------------------------------------------------------

// Shift L >= 0 maximizing corr(pred[k + L], truth[k]): how many weeks the
// predictions trail the truth.
int best_lag(std::span<const double> pred, std::span<const double> truth, int max_lag) {
    int best = 0;
    double best_r = -2.0;
    for (int lag = 0; lag <= max_lag; ++lag) {
        const auto n = truth.size() - static_cast<std::size_t>(lag);
        const double r = pearson(pred.subspan(static_cast<std::size_t>(lag), n), truth.subspan(0, n));
        if (r > best_r) best_r = r, best = lag;
    }
    return best;
}

Outcome baseline_lags_truth() {
    SynthSpec s;
    s.weeks = 300;
    s.noise_sd = 0.05;
    s.regions = {Region::National};
    // Abrupt outbreaks (about one week wide) every 17 weeks on a weak seasonal background.
    s.amplitude = 0.3;
    for (int k = 0; k < 17; ++k)
        s.spikes.push_back({10.0 + 17.0 * k, 2.0 + (k % 4), 0.6 + 0.1 * (k % 3)});
    const auto data = generate(s);
    BacktestConfig cfg;
    cfg.training_start = data.dataset.first_week;
    cfg.first_prediction = data.dataset.first_week + 130;
    cfg.last_prediction = data.dataset.last_week;
    cfg.models = {ModelKind::Ares, ModelKind::Ar2};
    const auto report = run_backtest(data.dataset, cfg);
    const auto& r = report.regions.front();
    const auto& obs = r.observed.values();
    const int ar2 = best_lag(r.predictions.at(ModelKind::Ar2).values(), obs, 4);
    const int ares = best_lag(r.predictions.at(ModelKind::Ares).values(), obs, 4);
    return {ar2 >= 1 && ares == 0, fmt("AR(2) lag %d weeks, ARES lag %d weeks", ar2, ares)};
}

// 7 ------------------------------------------------------------------------

template <class E, class F>
bool throws(F&& f) {
    try {
        f();
    } catch (const E&) {
        return true;
    } catch (...) {
        return false;
    }
    return false;
}

Outcome metric_examples() {
    using V = std::vector<double>;
    std::vector<std::pair<const char*, bool>> checks{
        {"rmse identical", rmse(V{1.5, 2.5, 9}, V{1.5, 2.5, 9}) == 0.0},
        {"rmse [1,2,3]/[1,2,5]", std::abs(rmse(V{1, 2, 3}, V{1, 2, 5}) - 1.154701) <= 1e-6},
        {"rmse single pair", rmse(V{2}, V{5}) == 3.0},
        {"rmse shape", throws<ShapeError>([] { rmse(V{1, 2}, V{1}); })},
        {"relative identical", relative_rmse(V{1, 2}, V{1, 2}) == 0.0},
        {"relative 10%", std::abs(relative_rmse(V{1.1, 2.2}, V{1, 2}) - 10.0) <= 1e-12},
        {"relative zero obs", throws<DomainError>([] { relative_rmse(V{1, 1}, V{1, 0}); })},
        {"pearson +1", std::abs(pearson(V{1, 2, 3}, V{2, 4, 6}) - 1.0) <= 1e-15},
        {"pearson -1", std::abs(pearson(V{1, 2, 3}, V{6, 5, 4}) + 1.0) <= 1e-15},
        {"pearson 0.8", std::abs(pearson(V{1, 2, 3, 4}, V{1, 3, 2, 4}) - 0.8) <= 1e-12},
        {"pearson constant", throws<DomainError>([] { pearson(V{2, 2, 2}, V{1, 2, 3}); })},
    };
    std::string failed;
    for (const auto& [name, ok] : checks)
        if (!ok) failed += std::string(name) + "; ";
    return {failed.empty(), failed.empty() ? fmt("%zu examples exact", checks.size()) : "failed: " + failed};
}

// 8 ------------------------------------------------------------------------

enum class Expect { Parse, Validation, Gap };

const char* expect_name(Expect e) {
    switch (e) {
        case Expect::Parse: return "ParseError";
        case Expect::Validation: return "ValidationError";
        case Expect::Gap: return "GapError";
    }
    return "?";
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

std::string join(const std::vector<std::string>& lines) {
    std::string out;
    for (const auto& l : lines) out += l + '\n';
    return out;
}

std::vector<std::string> fields_of(const std::string& line) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string x; std::getline(ss, x, ',');) f.push_back(x);
    return f;
}

std::string join_fields(const std::vector<std::string>& f) {
    std::string out;
    for (std::size_t i = 0; i < f.size(); ++i) out += (i ? "," : "") + f[i];
    return out;
}

// Applies mutation `kind` to one random data row and names the error it must raise.
Expect mutate(std::vector<std::string>& lines, bool athena, int kind, std::mt19937_64& rng) {
    // Interior rows keep a region's first and last weeks intact, so a deletion is a gap.
    std::uniform_int_distribution<std::size_t> row(2, lines.size() - 2);
    std::size_t i = row(rng);
    while (fields_of(lines[i - 1])[0] != fields_of(lines[i])[0] || fields_of(lines[i + 1])[0] != fields_of(lines[i])[0])
        i = row(rng);
    auto f = fields_of(lines[i]);
    switch (kind) {
        case 0: f[2] = "x" + f[2]; break;
        case 1: f.pop_back(); break;
        case 2: f[0] = "hhs11"; break;
        case 3: f[1] = "2013-02-30"; break;
        case 4: lines.insert(lines.begin() + static_cast<std::ptrdiff_t>(i), lines[i]); return Expect::Validation;
        case 5: lines.erase(lines.begin() + static_cast<std::ptrdiff_t>(i)); return Expect::Gap;
        case 6: {
            const auto w = WeekId::parse(f[1]);
            // Move the date to the Tuesday of the same week.
            const auto tue = std::chrono::year_month_day(std::chrono::sys_days(w.start()) + std::chrono::days(2));
            f[1] = fmt("%04d-%02u-%02u", int(tue.year()), unsigned(tue.month()), unsigned(tue.day()));
            lines[i] = join_fields(f);
            return Expect::Validation;
        }
        default:
            if (athena) {
                // Break the nesting: flu above ili, ili above viral, viral above total or a negative count.
                const int which = kind % 4;
                if (which == 0) f[4] = std::to_string(std::stoll(f[5]) + 1);
                if (which == 1) f[5] = std::to_string(std::stoll(f[6]) + 1);
                if (which == 2) f[6] = std::to_string(std::stoll(f[2]) + 1);
                if (which == 3) f[3] = "-1";
            } else {
                f[2] = kind % 2 ? "100.5" : "-0.25";
            }
            lines[i] = join_fields(f);
            return Expect::Validation;
    }
    lines[i] = join_fields(f);
    return Expect::Parse;
}

Outcome ingestion_closure() {
    SynthSpec s;
    s.spikes = {{20.0, 3.0, 2.0}};
    s.visit_multiplier[Region::Hhs7] = 0.01;
    std::ostringstream a, c;
    {
        const auto d = generate(s);
        write_athena(a, d.dataset.athena);
        write_cdc(c, d.dataset.cdc);
    }
    std::istringstream ai(a.str()), ci(c.str());
    try {
        const auto athena = load_athena(ai);
        const auto cdc = load_cdc(ci);
        const auto ds = assemble(athena, cdc, {kAllRegions.begin(), kAllRegions.end()}, s.start,
                                 s.start + static_cast<std::int64_t>(s.weeks) - 1);
        const auto lt = generate_linear_truth(s, {});
        std::ostringstream lc;
        write_cdc(lc, lt.dataset.cdc);
        std::istringstream lci(lc.str());
        load_cdc(lci);
    } catch (const Error& e) {
        return {false, std::string("clean synthetic output rejected: ") + e.what()};
    }

    const auto athena_lines = lines_of(a.str()), cdc_lines = lines_of(c.str());
    std::mt19937_64 rng(8);
    std::size_t correct = 0;
    std::string first_wrong;
    for (int k = 0; k < 100; ++k) {
        const bool athena = k % 2 == 0;
        auto lines = athena ? athena_lines : cdc_lines;
        const int kind = std::uniform_int_distribution<int>(0, 10)(rng);
        const Expect want = mutate(lines, athena, kind, rng);
        std::istringstream in(join(lines));
        const char* got = "no error";
        try {
            if (athena) load_athena(in);
            else load_cdc(in);
        } catch (const ParseError&) {
            got = "ParseError";
        } catch (const ValidationError&) {
            got = "ValidationError";
        } catch (const GapError&) {
            got = "GapError";
        } catch (const std::exception&) {
            got = "other";
        }
        if (std::string(got) == expect_name(want)) ++correct;
        else if (first_wrong.empty())
            first_wrong = fmt("; mutation %d on %s expected %s, got %s", kind, athena ? "athena" : "cdc",
                              expect_name(want), got);
    }
    return {correct == 100, fmt("clean output ingested; %zu/100 mutations rejected with the right class", correct) +
                                first_wrong};
}

// 9 and 10 ----------------------------------------------------------------------

struct FullRun {
    fs::path dir;
    int code = -1;
    double seconds = 0.0;
    std::string output;
};

// Full-span configuration: 11 regions, training from 2009-06-28, weekly
// nowcasts 2012-01-08 .. 2015-06-28 with the default grid.
FullRun full_span_run(const fs::path& root, const std::string& name) {
    FullRun r;
    r.dir = root / name;
    fs::create_directories(r.dir);
    const auto t0 = Clock::now();
    const auto res = cli::run("backtest " + (root / "run.conf").string() + " --out " + r.dir.string());
    r.code = res.code;
    r.output = res.out;
    r.seconds = seconds_since(t0);
    return r;
}

fs::path full_span_setup() {
    const auto root = cli::scratch("ares_acceptance_full");
    cli::spit(root / "run.conf",
              "athena = " + (root / "athena.csv").string() + "\n" +
                  "cdc = " + (root / "cdc.csv").string() + "\n" +
                  "out_dir = " + root.string() + "\n" +
                  "seed = 20151015\n"
                  "training_start = 2009-06-28\n"
                  "first_prediction = 2012-01-08\n"
                  "last_prediction = 2015-06-28\n"
                  "synth_spikes = 18:2.0:3;230:1.5:4\n"
                  "synth_visit_multiplier = hhs7:0.05\n");
    cli::run("synth " + (root / "run.conf").string());
    return root;
}

std::optional<FullRun> g_first_full_run;

Outcome scale_check() {
    const auto root = full_span_setup();
    auto run = full_span_run(root, "run1");
    const auto metrics = cli::slurp(run.dir / "metrics.csv");
    const auto preds = cli::slurp(run.dir / "predictions.csv");
    const bool shape = cli::line_count(metrics) == 1 + 11 * 3 && cli::line_count(preds) == 1 + 11 * 3 * 182;
    g_first_full_run = run;
    return {run.code == 0 && shape && run.seconds < 600.0,
            fmt("exit %d, %s, %.1fs for 11 regions x 182 weeks", run.code,
                shape ? "11x3 metrics rows and 6006 predictions" : "unexpected output shape", run.seconds)};
}

Outcome backtest_determinism() {
    const auto root = fs::temp_directory_path() / "ares_acceptance_full";
    if (!g_first_full_run || g_first_full_run->code != 0) {
        full_span_setup();
        g_first_full_run = full_span_run(root, "run1");
    }
    const auto second = full_span_run(root, "run2");
    std::size_t same = 0;
    const std::vector<std::string> files{"predictions.csv", "coefficients.csv", "hyperparams.csv", "metrics.csv"};
    for (const auto& f : files) {
        const auto a = cli::slurp(g_first_full_run->dir / f), b = cli::slurp(second.dir / f);
        same += !a.empty() && a == b;
    }
    return {second.code == 0 && same == files.size(),
            fmt("%zu/%zu output files byte-identical across two full runs", same, files.size())};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"published figures documented as context only", published_numbers_documented},
        {"SVR solver matches QP oracle", svr_matches_oracle},
        {"OLS matches normal equations", ols_matches_normal_equations},
        {"no lookahead", no_lookahead},
        {"linear-truth recovery", linear_truth_recovery},
        {"baseline lag on epidemic spikes", baseline_lags_truth},
        {"metric examples", metric_examples},
        {"ingestion closure", ingestion_closure},
        // Scale runs before determinism so the second full run can reuse the first.
        {"scale: 11 regions x 182 weeks", scale_check},
        {"end-to-end determinism", backtest_determinism},
    };
    const std::vector<int> number{1, 2, 3, 4, 5, 6, 7, 8, 10, 9};

    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (!only.empty() && !only.contains(number[i])) continue;
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        failures += !o.pass;
        const auto line = fmt("criterion %2d %s  %s: ", number[i], o.pass ? "PASS" : "FAIL", criteria[i].first) + o.detail;
        std::printf("%s\n", line.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
