#include "ares/core_types.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "ares/errors.hpp"

namespace ares {

namespace {

constexpr std::array<std::string_view, 11> kCodes = {
    "national", "hhs1", "hhs2", "hhs3", "hhs4", "hhs5", "hhs6", "hhs7", "hhs8", "hhs9", "hhs10",
};

constexpr std::array<std::string_view, 11> kLabels = {
    "National", "Region 1", "Region 2", "Region 3", "Region 4",  "Region 5",
    "Region 6", "Region 7", "Region 8", "Region 9", "Region 10",
};

constexpr std::array<std::string_view, 6> kHhs1 = {
    "Connecticut", "Maine", "Massachusetts", "New Hampshire", "Rhode Island", "Vermont"};
constexpr std::array<std::string_view, 4> kHhs2 = {
    "New Jersey", "New York", "Puerto Rico", "U.S. Virgin Islands"};
constexpr std::array<std::string_view, 6> kHhs3 = {
    "Delaware", "District of Columbia", "Maryland", "Pennsylvania", "Virginia", "West Virginia"};
constexpr std::array<std::string_view, 8> kHhs4 = {
    "Alabama", "Florida", "Georgia", "Kentucky", "Mississippi", "North Carolina", "South Carolina",
    "Tennessee"};
constexpr std::array<std::string_view, 6> kHhs5 = {
    "Illinois", "Indiana", "Michigan", "Minnesota", "Ohio", "Wisconsin"};
constexpr std::array<std::string_view, 5> kHhs6 = {
    "Arkansas", "Louisiana", "New Mexico", "Oklahoma", "Texas"};
constexpr std::array<std::string_view, 4> kHhs7 = {"Iowa", "Kansas", "Missouri", "Nebraska"};
constexpr std::array<std::string_view, 6> kHhs8 = {
    "Colorado", "Montana", "North Dakota", "South Dakota", "Utah", "Wyoming"};
constexpr std::array<std::string_view, 4> kHhs9 = {"Arizona", "California", "Hawaii", "Nevada"};
constexpr std::array<std::string_view, 4> kHhs10 = {"Alaska", "Idaho", "Oregon", "Washington"};

// National covers every region; built once from the HHS lists.
const std::vector<std::string_view>& national_states() {
    static const std::vector<std::string_view> all = [] {
        std::vector<std::string_view> v;
        auto add = [&v](auto const& arr) { v.insert(v.end(), arr.begin(), arr.end()); };
        add(kHhs1), add(kHhs2), add(kHhs3), add(kHhs4), add(kHhs5);
        add(kHhs6), add(kHhs7), add(kHhs8), add(kHhs9), add(kHhs10);
        return v;
    }();
    return all;
}

bool is_sunday(std::chrono::sys_days d) {
    return std::chrono::weekday{d} == std::chrono::Sunday;
}

template <class Int>
bool parse_fixed(std::string_view s, Int& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

std::chrono::sys_days parse_date(std::string_view iso) {
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-')
        throw ParseError("malformed date '" + std::string(iso) + "' (expected YYYY-MM-DD)");
    int y = 0;
    unsigned m = 0, d = 0;
    if (!parse_fixed(iso.substr(0, 4), y) || !parse_fixed(iso.substr(5, 2), m) ||
        !parse_fixed(iso.substr(8, 2), d))
        throw ParseError("malformed date '" + std::string(iso) + "'");
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                          std::chrono::day{d}};
    if (!ymd.ok()) throw ParseError("invalid calendar date '" + std::string(iso) + "'");
    return std::chrono::sys_days{ymd};
}

std::string format_date(std::chrono::sys_days d) {
    const std::chrono::year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

WeekId::WeekId(std::chrono::sys_days sunday) : start_(sunday) {
    if (!is_sunday(sunday)) throw RangeError("week start " + format_date(sunday) + " is not a Sunday");
}

WeekId WeekId::parse(std::string_view iso_date) { return WeekId(parse_date(iso_date)); }

std::string WeekId::to_string() const { return format_date(start_); }

WeekId week_from_date(std::chrono::sys_days d) {
    const auto back = std::chrono::weekday{d}.c_encoding();  // Sunday == 0
    return WeekId(d - std::chrono::days(back));
}

WeekId week_from_date(std::string_view iso_date) { return week_from_date(parse_date(iso_date)); }

std::string_view region_code(Region r) noexcept { return kCodes[region_index(r)]; }
std::string_view region_label(Region r) noexcept { return kLabels[region_index(r)]; }

Region parse_region(std::string_view code) {
    for (std::size_t i = 0; i < kCodes.size(); ++i)
        if (kCodes[i] == code) return static_cast<Region>(i);
    throw ParseError("unknown region '" + std::string(code) + "'");
}

std::span<const std::string_view> region_states(Region r) noexcept {
    switch (r) {
        case Region::National: return national_states();
        case Region::Hhs1: return kHhs1;
        case Region::Hhs2: return kHhs2;
        case Region::Hhs3: return kHhs3;
        case Region::Hhs4: return kHhs4;
        case Region::Hhs5: return kHhs5;
        case Region::Hhs6: return kHhs6;
        case Region::Hhs7: return kHhs7;
        case Region::Hhs8: return kHhs8;
        case Region::Hhs9: return kHhs9;
        case Region::Hhs10: return kHhs10;
    }
    return {};
}

WeeklySeries::WeeklySeries(Region region, WeekId first_week, std::vector<double> values)
    : region_(region), first_week_(first_week), values_(std::move(values)) {
    for (double v : values_)
        if (!std::isfinite(v)) throw RangeError("non-finite value in weekly series");
}

std::size_t WeeklySeries::offset(WeekId w) const {
    if (!contains(w))
        throw RangeError("week " + w.to_string() + " outside series span for " +
                         std::string(region_code(region_)));
    return static_cast<std::size_t>(w - first_week_);
}

double WeeklySeries::at(WeekId w) const { return values_[offset(w)]; }

void check_percent_range(const WeeklySeries& s) {
    for (std::size_t k = 0; k < s.size(); ++k) {
        const double v = s.values()[k];
        if (v < 0.0 || v > 100.0)
            throw RangeError("percent value " + std::to_string(v) + " outside [0, 100] at " +
                             (s.first_week() + static_cast<std::int64_t>(k)).to_string());
    }
}

WeeklySeries series_slice(const WeeklySeries& s, WeekId from, WeekId to) {
    if (from > to)
        throw RangeError("slice start " + from.to_string() + " after end " + to.to_string());
    if (!s.contains(from) || !s.contains(to))
        throw RangeError("slice [" + from.to_string() + ", " + to.to_string() +
                         "] outside series span");
    const auto vals = s.values();
    const auto lo = s.offset(from);
    const auto hi = s.offset(to);
    return WeeklySeries(s.region(), from,
                        std::vector<double>(vals.begin() + static_cast<std::ptrdiff_t>(lo),
                                            vals.begin() + static_cast<std::ptrdiff_t>(hi) + 1));
}

}  // namespace ares
