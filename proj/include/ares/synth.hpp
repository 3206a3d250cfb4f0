#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ares/ingestion.hpp"

namespace ares {

/// Gaussian bump added to the latent incidence: magnitude * exp(-0.5 ((k - week_offset) / width)^2).
struct EpidemicSpike {
    double week_offset = 0.0;
    double magnitude = 0.0;
    double width = 1.0;
};

struct SynthSpec {
    std::uint64_t seed = 20090628;
    WeekId start = WeekId::parse("2009-06-28");
    std::size_t weeks = 314;  // 2009-06-28 .. 2015-06-28 inclusive
    std::vector<Region> regions{kAllRegions.begin(), kAllRegions.end()};

    double amplitude = 1.5;  // seasonal harmonic amplitude, %ILI
    double period = 52.0;    // weeks
    /// Week offset of the seasonal peak; regions without an entry use default_phase(region).
    std::map<Region, double> phase;
    double baseline_ili = 2.2;
    double noise_sd = 0.1;
    /// Expected athena ILI rate relative to latent incidence, in (0, 1].
    double reporting_scale = 0.6;
    std::vector<EpidemicSpike> spikes;
    double total_visits_mean = 50000.0;
    /// Per-region multiplier on total visits, e.g. to emulate a sparsely covered region.
    std::map<Region, double> visit_multiplier;

    /// Throws DomainError when a field is out of range.
    void validate() const;
    double phase_of(Region r) const;
    static double default_phase(Region r) noexcept;
};

/// Linear link used by generate_linear_truth:
///   cdc(t) = w_viral * viral_rate(t) + w_ar * cdc(t-1) + bias + noise.
struct LinearTruth {
    double w_viral = 0.6;
    double w_ar = 0.5;
    double bias = 0.1;
};

struct TruthEntry {
    Region region;
    std::string param;
    double value;

    bool operator==(const TruthEntry&) const = default;
};

struct SyntheticData {
    Dataset dataset;
    std::vector<TruthEntry> truth;
};

/// Latent incidence at week offset k, floored at 0.05.
double latent_incidence(const SynthSpec& spec, Region r, double k);

/// Seasonal data set: cdc = latent + noise; athena ILI rate tracks
/// reporting_scale * latent with flu within ILI within viral by construction.
SyntheticData generate(const SynthSpec& spec);

/// Same athena counts as generate(); CDC follows the recorded linear link.
SyntheticData generate_linear_truth(const SynthSpec& spec, const LinearTruth& link);

/// truth.csv: region,param,value.
void write_truth(std::ostream& out, const std::vector<TruthEntry>& truth);
std::vector<TruthEntry> read_truth(std::istream& in);

}  // namespace ares
