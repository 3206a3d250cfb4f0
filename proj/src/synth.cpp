#include "ares/synth.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <random>

#include "ares/errors.hpp"
#include "ares/features.hpp"

namespace ares {

namespace {

constexpr double kIncidenceFloor = 0.05;
constexpr double kFluShareOfIli = 0.6;
constexpr double kViralExtraShare = 0.5;  // expected non-ILI viral visits relative to ILI
constexpr double kVaccineRate = 1.0;      // mean percent of visits with a vaccination

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

class RegionRng {
public:
    RegionRng(std::uint64_t seed, Region r) : eng_(splitmix64(seed ^ splitmix64(region_index(r) + 1))) {}

    double normal() { return normal_(eng_); }

    // Rounded Gaussian with Poisson-like spread, floored at 0.
    std::int64_t count(double mean) {
        const double v = std::round(mean + std::sqrt(std::max(mean, 0.0)) * normal());
        return static_cast<std::int64_t>(std::max(0.0, v));
    }

private:
    std::mt19937_64 eng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

struct RegionDraw {
    std::vector<VisitCounts> visits;
    std::vector<double> incidence;
};

RegionDraw draw_visits(const SynthSpec& spec, Region r, RegionRng& rng) {
    RegionDraw d;
    d.visits.reserve(spec.weeks);
    d.incidence.reserve(spec.weeks);
    const double mult = spec.visit_multiplier.contains(r) ? spec.visit_multiplier.at(r) : 1.0;
    const double mean_total = spec.total_visits_mean * mult;
    const double phase = spec.phase_of(r);
    for (std::size_t k = 0; k < spec.weeks; ++k) {
        const double lambda = latent_incidence(spec, r, static_cast<double>(k));
        VisitCounts c;
        c.total_visits = std::max<std::int64_t>(1, rng.count(mean_total));
        const double total = static_cast<double>(c.total_visits);
        const double ili_mean = total * spec.reporting_scale * lambda / 100.0;
        c.ili_visits = std::min(c.total_visits, rng.count(ili_mean));
        const double ili = static_cast<double>(c.ili_visits);
        const double flu = std::round(kFluShareOfIli * ili +
                                      std::sqrt(kFluShareOfIli * (1.0 - kFluShareOfIli) * ili) * rng.normal());
        c.flu_visits = static_cast<std::int64_t>(std::clamp(flu, 0.0, ili));
        c.viral_ili_visits = std::min(c.total_visits, c.ili_visits + rng.count(kViralExtraShare * ili_mean));
        // Vaccination peaks in the autumn, ahead of the flu season.
        const double season = std::cos(2.0 * std::numbers::pi * (static_cast<double>(k) - phase + 13.0) / spec.period);
        c.flu_vaccine_visits =
            std::min(c.total_visits, rng.count(total * kVaccineRate * (1.0 + 0.8 * season) / 100.0));
        d.visits.push_back(c);
        d.incidence.push_back(lambda);
    }
    return d;
}

void add_spec_truth(std::vector<TruthEntry>& truth, const SynthSpec& spec, Region r) {
    truth.push_back({r, "seed", static_cast<double>(spec.seed)});
    truth.push_back({r, "baseline_ili", spec.baseline_ili});
    truth.push_back({r, "amplitude", spec.amplitude});
    truth.push_back({r, "period", spec.period});
    truth.push_back({r, "phase", spec.phase_of(r)});
    truth.push_back({r, "noise_sd", spec.noise_sd});
    truth.push_back({r, "reporting_scale", spec.reporting_scale});
}

template <class CdcFn>
SyntheticData generate_with(const SynthSpec& spec, CdcFn&& cdc_values) {
    spec.validate();
    const WeekId last = spec.start + static_cast<std::int64_t>(spec.weeks) - 1;
    SyntheticData out{Dataset{spec.start, last, spec.regions, {}, {}}, {}};
    for (Region r : spec.regions) {
        RegionRng rng(spec.seed, r);
        RegionDraw draw = draw_visits(spec, r, rng);
        std::vector<double> cdc = cdc_values(r, draw, rng);
        out.dataset.athena.emplace(r, AthenaSeries(r, spec.start, std::move(draw.visits)));
        out.dataset.cdc.emplace(r, WeeklySeries(r, spec.start, std::move(cdc)));
        add_spec_truth(out.truth, spec, r);
    }
    return out;
}

double clamp_percent(double v) { return std::clamp(v, kIncidenceFloor, 100.0); }

}  // namespace

void SynthSpec::validate() const {
    if (weeks < 3) throw DomainError("synthetic series need at least 3 weeks");
    if (regions.empty()) throw DomainError("synthetic spec lists no regions");
    if (!(noise_sd >= 0.0)) throw DomainError("noise_sd must be non-negative");
    if (!(reporting_scale > 0.0 && reporting_scale <= 1.0)) throw DomainError("reporting_scale must lie in (0, 1]");
    if (!(period > 0.0)) throw DomainError("period must be positive");
    if (!(total_visits_mean >= 1.0)) throw DomainError("total_visits_mean must be at least 1");
    for (const auto& [r, m] : visit_multiplier)
        if (!(m > 0.0)) throw DomainError("visit multiplier must be positive");
    for (const auto& s : spikes)
        if (!(s.width > 0.0)) throw DomainError("spike width must be positive");
}

double SynthSpec::default_phase(Region r) noexcept {
    // Peak near late January for a late-June start, staggered by region.
    return 30.0 + static_cast<double>(region_index(r) % 4);
}

double SynthSpec::phase_of(Region r) const {
    auto it = phase.find(r);
    return it != phase.end() ? it->second : default_phase(r);
}

double latent_incidence(const SynthSpec& spec, Region r, double k) {
    double v = spec.baseline_ili +
               spec.amplitude * std::cos(2.0 * std::numbers::pi * (k - spec.phase_of(r)) / spec.period);
    for (const auto& s : spec.spikes) {
        const double z = (k - s.week_offset) / s.width;
        v += s.magnitude * std::exp(-0.5 * z * z);
    }
    return std::max(v, kIncidenceFloor);
}

SyntheticData generate(const SynthSpec& spec) {
    return generate_with(spec, [&](Region, const RegionDraw& draw, RegionRng& rng) {
        std::vector<double> cdc;
        cdc.reserve(draw.incidence.size());
        for (double lambda : draw.incidence) cdc.push_back(clamp_percent(lambda + spec.noise_sd * rng.normal()));
        return cdc;
    });
}

SyntheticData generate_linear_truth(const SynthSpec& spec, const LinearTruth& link) {
    auto data = generate_with(spec, [&](Region, const RegionDraw& draw, RegionRng& rng) {
        std::vector<double> cdc;
        cdc.reserve(draw.incidence.size());
        cdc.push_back(clamp_percent(draw.incidence.front()));
        for (std::size_t k = 1; k < draw.visits.size(); ++k) {
            const double viral = make_rates(draw.visits[k]).viral;
            cdc.push_back(clamp_percent(link.w_viral * viral + link.w_ar * cdc.back() + link.bias +
                                        spec.noise_sd * rng.normal()));
        }
        return cdc;
    });
    for (Region r : spec.regions) {
        data.truth.push_back({r, "w_viral", link.w_viral});
        data.truth.push_back({r, "w_ar", link.w_ar});
        data.truth.push_back({r, "bias", link.bias});
    }
    std::stable_sort(data.truth.begin(), data.truth.end(),
                     [](const TruthEntry& a, const TruthEntry& b) { return a.region < b.region; });
    return data;
}

void write_truth(std::ostream& out, const std::vector<TruthEntry>& truth) {
    out << "region,param,value\n";
    for (const auto& t : truth) out << region_code(t.region) << ',' << t.param << ',' << format_real(t.value) << '\n';
}

std::vector<TruthEntry> read_truth(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "region,param,value") throw ParseError(1, "unexpected truth.csv header");
    std::vector<TruthEntry> out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        const auto c1 = line.find(',');
        const auto c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
        if (c2 == std::string::npos) throw ParseError(lineno, "expected 3 fields");
        Region r;
        try {
            r = parse_region(std::string_view(line).substr(0, c1));
        } catch (const ParseError& e) {
            throw ParseError(lineno, e.what());
        }
        const std::string_view num = std::string_view(line).substr(c2 + 1);
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), v);
        if (ec != std::errc{} || ptr != num.data() + num.size()) throw ParseError(lineno, "bad value");
        out.push_back({r, line.substr(c1 + 1, c2 - c1 - 1), v});
    }
    return out;
}

}  // namespace ares
