#include "ares/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <system_error>

#include "ares/errors.hpp"

namespace ares {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    if (trim(s).empty()) return out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) return out;
        start = pos + 1;
    }
}

class Values {
public:
    Values(std::string key, std::string value, std::size_t line)
        : key_(std::move(key)), value_(std::move(value)), line_(line) {}

    [[noreturn]] void fail(const std::string& why) const {
        throw ConfigError("config line " + std::to_string(line_) + " (" + key_ + "): " + why);
    }

    const std::string& str() const { return value_; }

    double real(std::string_view s) const {
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) fail("not a number: '" + std::string(s) + "'");
        return v;
    }
    double real() const { return real(value_); }

    std::uint64_t uint() const {
        std::uint64_t v = 0;
        auto [ptr, ec] = std::from_chars(value_.data(), value_.data() + value_.size(), v);
        if (ec != std::errc{} || ptr != value_.data() + value_.size() || value_.empty())
            fail("not an unsigned integer: '" + value_ + "'");
        return v;
    }

    bool boolean() const {
        if (value_ == "true") return true;
        if (value_ == "false") return false;
        fail("expected true or false");
    }

    WeekId week() const {
        try {
            return WeekId::parse(value_);
        } catch (const Error& e) {
            fail(e.what());
        }
    }

    Region region(std::string_view s) const {
        try {
            return parse_region(s);
        } catch (const Error& e) {
            fail(e.what());
        }
    }

    std::vector<double> reals() const {
        std::vector<double> out;
        for (auto p : split(value_, ',')) out.push_back(real(p));
        if (out.empty()) fail("empty list");
        return out;
    }

    std::vector<Region> regions() const {
        std::vector<Region> out;
        for (auto p : split(value_, ',')) out.push_back(region(p));
        return out;
    }

    std::map<Region, double> region_map() const {
        std::map<Region, double> out;
        for (auto p : split(value_, ',')) {
            const auto kv = split(p, ':');
            if (kv.size() != 2) fail("expected region:value pairs");
            out[region(kv[0])] = real(kv[1]);
        }
        return out;
    }

private:
    std::string key_;
    std::string value_;
    std::size_t line_;
};

std::vector<Kernel> kernels_from(const std::vector<std::string>& names, const std::vector<double>& gammas,
                                 const Values& v) {
    std::vector<Kernel> out;
    for (const auto& n : names) {
        if (n == "linear") out.push_back(Kernel::linear());
        else if (n == "rbf")
            for (double g : gammas) out.push_back(Kernel::rbf(g));
        else v.fail("unknown kernel '" + n + "'");
    }
    return out;
}

}  // namespace

RunConfig parse_run_config(std::istream& in, const std::filesystem::path& base_dir) {
    RunConfig cfg;
    std::set<std::string> seen;
    std::vector<std::string> kernel_names = {"linear", "rbf"};
    std::vector<double> gammas = {0.01, 0.1, 1.0};
    std::optional<Values> kernel_origin;
    auto path = [&](const std::string& p) {
        std::filesystem::path q(p);
        return q.is_relative() ? base_dir / q : q;
    };

    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string_view line(raw);
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key(trim(line.substr(0, eq)));
        const Values v(key, std::string(trim(line.substr(eq + 1))), lineno);
        if (!seen.insert(key).second) v.fail("key given twice");

        auto& bt = cfg.backtest;
        auto& sp = cfg.synth;
        if (key == "athena") cfg.athena_path = path(v.str());
        else if (key == "cdc") cfg.cdc_path = path(v.str());
        else if (key == "out_dir") cfg.out_dir = path(v.str());
        else if (key == "training_start") bt.training_start = v.week();
        else if (key == "first_prediction") bt.first_prediction = v.week();
        else if (key == "last_prediction") bt.last_prediction = v.week();
        else if (key == "models") {
            bt.models.clear();
            for (auto m : split(v.str(), ',')) bt.models.push_back(parse_model(m));
        } else if (key == "regions") {
            bt.regions = v.regions();
            sp.regions = bt.regions;
        } else if (key == "include_vaccine") bt.include_vaccine = v.boolean();
        else if (key == "seed") bt.seed = sp.seed = v.uint();
        else if (key == "hyper_cadence") bt.hyper_every_weeks = v.str() == "every_week" ? 1 : v.uint();
        else if (key == "cv_folds") bt.cv.folds = v.uint();
        else if (key == "cv_c") bt.cv.c_values = v.reals();
        else if (key == "cv_epsilon") bt.cv.epsilon_values = v.reals();
        else if (key == "cv_gamma") gammas = v.reals();
        else if (key == "cv_kernels") {
            kernel_names.clear();
            for (auto k : split(v.str(), ',')) kernel_names.emplace_back(k);
            kernel_origin = v;
        } else if (key == "svr_tolerance") bt.cv.tolerance = v.real();
        else if (key == "svr_max_iterations") bt.cv.max_iterations = v.uint();
        else if (key == "cv_max_iterations") bt.cv.cv_max_iterations = v.uint();
        else if (key == "on_failure") {
            if (v.str() == "abort") bt.on_failure = FailurePolicy::Abort;
            else if (v.str() == "skip") bt.on_failure = FailurePolicy::Skip;
            else v.fail("expected abort or skip");
        } else if (key == "jobs") bt.jobs = v.uint();
        else if (key == "synth_mode") {
            if (v.str() == "seasonal") cfg.synth_mode = SynthMode::Seasonal;
            else if (v.str() == "linear_truth") cfg.synth_mode = SynthMode::LinearTruth;
            else v.fail("expected seasonal or linear_truth");
        } else if (key == "synth_start") sp.start = v.week();
        else if (key == "synth_weeks") sp.weeks = v.uint();
        else if (key == "synth_amplitude") sp.amplitude = v.real();
        else if (key == "synth_period") sp.period = v.real();
        else if (key == "synth_phase") sp.phase = v.region_map();
        else if (key == "synth_baseline_ili") sp.baseline_ili = v.real();
        else if (key == "synth_noise_sd") sp.noise_sd = v.real();
        else if (key == "synth_reporting_scale") sp.reporting_scale = v.real();
        else if (key == "synth_total_visits_mean") sp.total_visits_mean = v.real();
        else if (key == "synth_visit_multiplier") sp.visit_multiplier = v.region_map();
        else if (key == "synth_spikes") {
            sp.spikes.clear();
            for (auto s : split(v.str(), ';')) {
                const auto parts = split(s, ':');
                if (parts.size() != 3) v.fail("expected offset:magnitude:width");
                sp.spikes.push_back({v.real(parts[0]), v.real(parts[1]), v.real(parts[2])});
            }
        } else if (key == "synth_link") {
            const auto w = v.reals();
            if (w.size() != 3) v.fail("expected w_viral,w_ar,bias");
            cfg.link = {w[0], w[1], w[2]};
        } else {
            v.fail("unknown key");
        }
    }
    const Values kv = kernel_origin.value_or(Values("cv_kernels", "", 0));
    cfg.backtest.cv.kernels = kernels_from(kernel_names, gammas, kv);
    try {
        cfg.synth.validate();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("synthetic spec: ") + e.what());
    }
    cfg.backtest.validate();
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_run_config(in, path.parent_path());
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return in;
}

void write_file_atomic(const std::filesystem::path& path, const std::function<void(std::ostream&)>& writer) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        writer(out);
        out.flush();
        if (!out) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw IoError("write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot move " + tmp.string() + " into place: " + ec.message());
    }
}

SyntheticData synthesize(const RunConfig& cfg) {
    return cfg.synth_mode == SynthMode::LinearTruth ? generate_linear_truth(cfg.synth, cfg.link)
                                                    : generate(cfg.synth);
}

Dataset load_dataset(const RunConfig& cfg) {
    if (cfg.athena_path.empty() || cfg.cdc_path.empty()) throw ConfigError("config must name athena and cdc files");
    auto athena_in = open_input(cfg.athena_path);
    auto cdc_in = open_input(cfg.cdc_path);
    const auto athena = load_athena(athena_in);
    const auto cdc = load_cdc(cdc_in);
    std::vector<Region> regions = cfg.backtest.regions;
    if (regions.empty())
        for (const auto& [r, s] : athena) regions.push_back(r);
    return assemble(athena, cdc, regions, cfg.backtest.training_start, cfg.backtest.last_prediction);
}

}  // namespace ares
