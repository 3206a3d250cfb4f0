// ares: synthesize surveillance data, validate input tables, replay the
// weekly nowcasting backtest and recompute accuracy metrics.
//
// Exit codes: 0 success, 1 other error, 2 I/O, 3 validation, 4 convergence, 5 config.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <sstream>

#include "ares/backtest.hpp"
#include "ares/config.hpp"
#include "ares/errors.hpp"
#include "ares/evaluation.hpp"
#include "ares/ingestion.hpp"

namespace fs = std::filesystem;

namespace {

struct Overrides {
    std::string models;
    std::string regions;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::optional<std::size_t> jobs;
};

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');)
        if (!item.empty()) out.push_back(item);
    return out;
}

void apply(const Overrides& o, ares::RunConfig& cfg) {
    try {
        if (!o.models.empty()) {
            cfg.backtest.models.clear();
            for (const auto& m : split_list(o.models)) cfg.backtest.models.push_back(ares::parse_model(m));
        }
        if (!o.regions.empty()) {
            cfg.backtest.regions.clear();
            for (const auto& r : split_list(o.regions)) cfg.backtest.regions.push_back(ares::parse_region(r));
            cfg.synth.regions = cfg.backtest.regions;
        }
    } catch (const ares::ParseError& e) {
        throw ares::ConfigError(e.what());
    }
    if (o.seed) cfg.backtest.seed = cfg.synth.seed = *o.seed;
    if (!o.out.empty()) cfg.out_dir = o.out;
    if (o.jobs) cfg.backtest.jobs = *o.jobs;
    cfg.backtest.validate();
}

void ensure_dir(const fs::path& dir) {
    if (dir.empty()) throw ares::ConfigError("no output directory (set out_dir or pass --out)");
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw ares::IoError("cannot create output directory " + dir.string());
}

int cmd_synth(const std::string& config_path, const Overrides& o) {
    auto cfg = ares::load_run_config(config_path);
    apply(o, cfg);
    ensure_dir(cfg.out_dir);
    const auto data = ares::synthesize(cfg);
    ares::write_file_atomic(cfg.out_dir / "athena.csv", [&](std::ostream& out) { ares::write_athena(out, data.dataset.athena); });
    ares::write_file_atomic(cfg.out_dir / "cdc.csv", [&](std::ostream& out) { ares::write_cdc(out, data.dataset.cdc); });
    ares::write_file_atomic(cfg.out_dir / "truth.csv", [&](std::ostream& out) { ares::write_truth(out, data.truth); });
    std::cout << "seed " << cfg.synth.seed << '\n';
    std::cout << "wrote " << data.dataset.regions.size() << " regions x " << data.dataset.weeks() << " weeks to "
              << cfg.out_dir.string() << '\n';
    return 0;
}

int cmd_validate(const std::string& athena_path, const std::string& cdc_path) {
    auto athena_in = ares::open_input(athena_path);
    auto cdc_in = ares::open_input(cdc_path);
    const auto athena = ares::load_athena(athena_in);
    const auto cdc = ares::load_cdc(cdc_in);
    std::cout << "source region     first_week  last_week   rows\n";
    char buf[128];
    for (const auto& [r, s] : athena) {
        std::snprintf(buf, sizeof buf, "athena %-10s %s  %s  %zu\n", std::string(ares::region_code(r)).c_str(),
                      s.first_week().to_string().c_str(), s.last_week().to_string().c_str(), s.size());
        std::cout << buf;
    }
    for (const auto& [r, s] : cdc) {
        std::snprintf(buf, sizeof buf, "cdc    %-10s %s  %s  %zu\n", std::string(ares::region_code(r)).c_str(),
                      s.first_week().to_string().c_str(), s.last_week().to_string().c_str(), s.size());
        std::cout << buf;
    }
    std::cout << "ok\n";
    return 0;
}

int cmd_backtest(const std::string& config_path, const Overrides& o) {
    auto cfg = ares::load_run_config(config_path);
    apply(o, cfg);
    const auto ds = ares::load_dataset(cfg);
    ensure_dir(cfg.out_dir);
    const auto report = ares::run_backtest(ds, cfg.backtest);
    const auto tracks = report.tracks();
    const auto summary = ares::summarize(tracks);
    ares::write_file_atomic(cfg.out_dir / "predictions.csv", [&](std::ostream& out) { ares::write_predictions_csv(out, report); });
    ares::write_file_atomic(cfg.out_dir / "coefficients.csv", [&](std::ostream& out) { ares::write_coefficients_csv(out, report); });
    ares::write_file_atomic(cfg.out_dir / "hyperparams.csv", [&](std::ostream& out) { ares::write_hyperparams_csv(out, report); });
    ares::write_file_atomic(cfg.out_dir / "metrics.csv", [&](std::ostream& out) { ares::write_metrics_csv(out, summary.rows); });
    ares::print_summary_table(std::cout, summary);
    for (const auto& r : report.regions)
        for (const auto& f : r.failures)
            std::cerr << "warning: " << ares::region_code(r.region) << ' ' << f.week.to_string() << ' '
                      << ares::model_code(f.model) << ": " << f.message << '\n';
    return 0;
}

int cmd_metrics(const std::string& predictions_path, std::string out_dir) {
    auto in = ares::open_input(predictions_path);
    const auto tracks = ares::read_predictions_csv(in);
    const auto summary = ares::summarize(tracks);
    if (out_dir.empty()) out_dir = fs::path(predictions_path).parent_path().string();
    if (out_dir.empty()) out_dir = ".";
    ensure_dir(out_dir);
    ares::write_file_atomic(fs::path(out_dir) / "metrics.csv", [&](std::ostream& out) { ares::write_metrics_csv(out, summary.rows); });
    ares::print_summary_table(std::cout, summary);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Real-time influenza nowcasting from EHR visit counts and CDC %ILI history"};
    app.require_subcommand(1);

    Overrides o;
    std::string config_path, athena_path, cdc_path, predictions_path, metrics_out;

    auto add_overrides = [&](CLI::App* sub) {
        sub->add_option("--models", o.models, "Comma list of ares, ar2, linear");
        sub->add_option("--regions", o.regions, "Comma list of national, hhs1..hhs10");
        sub->add_option("--seed", o.seed, "Override the configured seed");
        sub->add_option("--out", o.out, "Output directory");
        sub->add_option("--jobs", o.jobs, "Regions processed concurrently");
    };

    auto* synth = app.add_subcommand("synth", "Write synthetic athena.csv, cdc.csv and truth.csv");
    synth->add_option("config", config_path, "Run config file")->required();
    add_overrides(synth);

    auto* validate = app.add_subcommand("validate", "Check athena.csv and cdc.csv against the input schema");
    validate->add_option("athena", athena_path, "athena.csv")->required();
    validate->add_option("cdc", cdc_path, "cdc.csv")->required();

    auto* backtest = app.add_subcommand("backtest", "Replay weekly nowcasts and write predictions and metrics");
    backtest->add_option("config", config_path, "Run config file")->required();
    add_overrides(backtest);

    auto* metrics = app.add_subcommand("metrics", "Recompute metrics.csv from an existing predictions.csv");
    metrics->add_option("predictions", predictions_path, "predictions.csv")->required();
    metrics->add_option("--out", metrics_out, "Output directory (defaults to the predictions directory)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 5;
    }

    try {
        if (*synth) return cmd_synth(config_path, o);
        if (*validate) return cmd_validate(athena_path, cdc_path);
        if (*backtest) return cmd_backtest(config_path, o);
        if (*metrics) return cmd_metrics(predictions_path, metrics_out);
    } catch (const ares::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.exit_code();
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
