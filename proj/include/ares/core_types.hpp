#pragma once

#include <array>
#include <chrono>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ares {

/// A surveillance week, identified by the Sunday it starts on.
class WeekId {
public:
    /// Throws RangeError if `sunday` is not a Sunday.
    explicit WeekId(std::chrono::sys_days sunday);

    static WeekId parse(std::string_view iso_date);

    std::chrono::sys_days start() const noexcept { return start_; }
    std::string to_string() const;

    WeekId operator+(std::int64_t weeks) const noexcept { return WeekId(start_ + std::chrono::days(7 * weeks), 0); }
    WeekId operator-(std::int64_t weeks) const noexcept { return *this + (-weeks); }
    WeekId successor() const noexcept { return *this + 1; }

    /// Signed number of weeks from `other` to `*this`.
    std::int64_t operator-(const WeekId& other) const noexcept {
        return (start_ - other.start_).count() / 7;
    }

    auto operator<=>(const WeekId&) const = default;

private:
    WeekId(std::chrono::sys_days sunday, int) : start_(sunday) {}
    std::chrono::sys_days start_;
};

/// Parses YYYY-MM-DD; throws ParseError on malformed or impossible dates.
std::chrono::sys_days parse_date(std::string_view iso_date);
std::string format_date(std::chrono::sys_days d);

/// Sunday-start week containing `d`.
WeekId week_from_date(std::chrono::sys_days d);
WeekId week_from_date(std::string_view iso_date);

enum class Region : std::uint8_t {
    National,
    Hhs1,
    Hhs2,
    Hhs3,
    Hhs4,
    Hhs5,
    Hhs6,
    Hhs7,
    Hhs8,
    Hhs9,
    Hhs10,
};

inline constexpr std::array<Region, 11> kAllRegions = {
    Region::National, Region::Hhs1, Region::Hhs2, Region::Hhs3, Region::Hhs4, Region::Hhs5,
    Region::Hhs6,     Region::Hhs7, Region::Hhs8, Region::Hhs9, Region::Hhs10,
};

/// File code: "national", "hhs1" .. "hhs10".
std::string_view region_code(Region r) noexcept;
/// Display label: "National", "Region 1" .. "Region 10".
std::string_view region_label(Region r) noexcept;
/// Throws ParseError for anything outside the eleven codes.
Region parse_region(std::string_view code);
/// States and territories making up an HHS region; every state for National.
std::span<const std::string_view> region_states(Region r) noexcept;
inline std::size_t region_index(Region r) noexcept { return static_cast<std::size_t>(r); }

/// Contiguous weekly values for one region. Value k belongs to first_week + k.
class WeeklySeries {
public:
    WeeklySeries(Region region, WeekId first_week, std::vector<double> values);

    Region region() const noexcept { return region_; }
    WeekId first_week() const noexcept { return first_week_; }
    WeekId last_week() const noexcept { return first_week_ + static_cast<std::int64_t>(values_.size()) - 1; }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }
    bool contains(WeekId w) const noexcept { return !empty() && w >= first_week_ && w <= last_week(); }

    std::span<const double> values() const noexcept { return values_; }
    std::size_t offset(WeekId w) const;
    /// Throws RangeError outside the span.
    double at(WeekId w) const;

    bool operator==(const WeeklySeries&) const = default;

private:
    Region region_;
    WeekId first_week_;
    std::vector<double> values_;
};

/// Throws RangeError unless every value lies in [0, 100].
void check_percent_range(const WeeklySeries& s);

/// Sub-series covering exactly [from, to]. Throws RangeError if the range
/// is inverted or leaves the source span.
WeeklySeries series_slice(const WeeklySeries& s, WeekId from, WeekId to);

}  // namespace ares
