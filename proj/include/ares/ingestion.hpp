#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <string_view>
#include <vector>

#include "ares/core_types.hpp"

namespace ares {

inline constexpr std::string_view kAthenaHeader =
    "region,week_start,total_visits,flu_vaccine_visits,flu_visits,ili_visits,viral_ili_visits";
inline constexpr std::string_view kCdcHeader = "region,week_start,unweighted_ili_percent";

/// Weekly visit counts for one region. Nesting: flu <= ili <= viral_ili <= total.
struct VisitCounts {
    std::int64_t total_visits = 0;
    std::int64_t flu_vaccine_visits = 0;
    std::int64_t flu_visits = 0;
    std::int64_t ili_visits = 0;
    std::int64_t viral_ili_visits = 0;

    bool operator==(const VisitCounts&) const = default;
};

struct AthenaRecord {
    Region region;
    WeekId week;
    VisitCounts counts;
};

/// Name of the first broken invariant, or empty when the counts are valid.
std::string_view violated_rule(const VisitCounts& c) noexcept;

/// Contiguous weekly counts for one region.
class AthenaSeries {
public:
    AthenaSeries(Region region, WeekId first_week, std::vector<VisitCounts> weeks);

    Region region() const noexcept { return region_; }
    WeekId first_week() const noexcept { return first_week_; }
    WeekId last_week() const noexcept { return first_week_ + static_cast<std::int64_t>(weeks_.size()) - 1; }
    std::size_t size() const noexcept { return weeks_.size(); }
    bool contains(WeekId w) const noexcept { return !weeks_.empty() && w >= first_week_ && w <= last_week(); }
    const VisitCounts& at(WeekId w) const;
    std::span<const VisitCounts> weeks() const noexcept { return weeks_; }

    bool operator==(const AthenaSeries&) const = default;

private:
    Region region_;
    WeekId first_week_;
    std::vector<VisitCounts> weeks_;
};

using AthenaTable = std::map<Region, AthenaSeries>;
using CdcTable = std::map<Region, WeeklySeries>;

/// Parses athena.csv. Throws ParseError (malformed row), ValidationError
/// (broken invariant or duplicate) or GapError (missing week within a region).
AthenaTable load_athena(std::istream& in);
/// Parses cdc.csv with the same error contract; values must lie in [0, 100].
CdcTable load_cdc(std::istream& in);

/// Both sources restricted to one common span for a fixed set of regions.
struct Dataset {
    WeekId first_week;
    WeekId last_week;
    std::vector<Region> regions;
    AthenaTable athena;
    CdcTable cdc;

    const AthenaSeries& athena_for(Region r) const;
    const WeeklySeries& cdc_for(Region r) const;
    std::size_t weeks() const noexcept { return static_cast<std::size_t>(last_week - first_week) + 1; }
};

/// Intersects both sources to [first, last] for `regions`. Throws
/// CoverageError listing every region/week hole rather than truncating.
Dataset assemble(const AthenaTable& athena, const CdcTable& cdc, std::vector<Region> regions,
                 WeekId first, WeekId last);

/// Writes the exact athena.csv / cdc.csv schemas, sorted by region then week.
void write_athena(std::ostream& out, const AthenaTable& table);
void write_cdc(std::ostream& out, const CdcTable& table);

/// Shortest decimal text that round-trips a double.
std::string format_real(double v);

}  // namespace ares
