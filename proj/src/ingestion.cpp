#include "ares/ingestion.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <string>
#include <utility>

#include "ares/errors.hpp"

namespace ares {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

std::int64_t parse_count(std::string_view field, std::string_view column, std::size_t line) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty())
        throw ParseError(line, std::string(column) + " is not an integer: '" + std::string(field) + "'");
    if (v < 0)
        throw ValidationError(line, "non-negative", std::string(column) + " = " + std::to_string(v));
    return v;
}

double parse_real(std::string_view field, std::string_view column, std::size_t line) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty() || !std::isfinite(v))
        throw ParseError(line, std::string(column) + " is not a number: '" + std::string(field) + "'");
    return v;
}

WeekId parse_week(std::string_view field, std::size_t line) {
    std::chrono::sys_days d;
    try {
        d = parse_date(field);
    } catch (const ParseError& e) {
        throw ParseError(line, e.what());
    }
    if (std::chrono::weekday{d} != std::chrono::Sunday)
        throw ValidationError(line, "sunday", "week_start " + std::string(field) + " is not a Sunday");
    return WeekId(d);
}

Region parse_region_at(std::string_view field, std::size_t line) {
    try {
        return parse_region(field);
    } catch (const ParseError& e) {
        throw ParseError(line, e.what());
    }
}

// Reads the header and yields (line number, fields) for every data row.
template <class RowFn>
void for_each_row(std::istream& in, std::string_view header, std::size_t field_count, RowFn&& fn) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError(1, "missing header");
    if (line != header) throw ParseError(1, "unexpected header '" + line + "'");
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) throw ParseError(lineno, "empty line");
        auto fields = split_fields(line);
        if (fields.size() != field_count)
            throw ParseError(lineno, "expected " + std::to_string(field_count) + " fields, got " +
                                         std::to_string(fields.size()));
        fn(lineno, fields);
    }
}

template <class Value>
struct Row {
    WeekId week;
    Value value;
};

// Groups rows by region, rejects duplicates, sorts by week and enforces contiguity.
template <class Value>
class RowCollector {
public:
    void add(Region r, WeekId w, Value v, std::size_t line) {
        auto [it, inserted] = seen_.try_emplace({r, w}, line);
        if (!inserted)
            throw ValidationError(line, "duplicate",
                                  std::string(region_code(r)) + " " + w.to_string() +
                                      " already given on line " + std::to_string(it->second));
        rows_[r].push_back({w, std::move(v)});
    }

    template <class Build>
    void finish(Build&& build) {
        for (auto& [region, rows] : rows_) {
            std::sort(rows.begin(), rows.end(),
                      [](const Row<Value>& a, const Row<Value>& b) { return a.week < b.week; });
            std::vector<Value> values;
            values.reserve(rows.size());
            for (std::size_t k = 0; k < rows.size(); ++k) {
                if (k > 0 && rows[k].week != rows[k - 1].week.successor())
                    throw GapError(std::string(region_code(region)), rows[k - 1].week.successor().to_string());
                values.push_back(std::move(rows[k].value));
            }
            build(region, rows.front().week, std::move(values));
        }
    }

private:
    std::map<std::pair<Region, WeekId>, std::size_t> seen_;
    std::map<Region, std::vector<Row<Value>>> rows_;
};

}  // namespace

std::string_view violated_rule(const VisitCounts& c) noexcept {
    if (c.total_visits < 0 || c.flu_vaccine_visits < 0 || c.flu_visits < 0 || c.ili_visits < 0 ||
        c.viral_ili_visits < 0)
        return "non-negative";
    if (c.total_visits == 0) return "positive-total";
    if (c.flu_visits > c.ili_visits) return "flu<=ili";
    if (c.ili_visits > c.viral_ili_visits) return "ili<=viral_ili";
    if (c.viral_ili_visits > c.total_visits) return "viral_ili<=total";
    if (c.flu_vaccine_visits > c.total_visits) return "vaccine<=total";
    return {};
}

AthenaSeries::AthenaSeries(Region region, WeekId first_week, std::vector<VisitCounts> weeks)
    : region_(region), first_week_(first_week), weeks_(std::move(weeks)) {}

const VisitCounts& AthenaSeries::at(WeekId w) const {
    if (!contains(w))
        throw RangeError("week " + w.to_string() + " outside athena span for " +
                         std::string(region_code(region_)));
    return weeks_[static_cast<std::size_t>(w - first_week_)];
}

AthenaTable load_athena(std::istream& in) {
    RowCollector<VisitCounts> rows;
    for_each_row(in, kAthenaHeader, 7, [&](std::size_t line, const std::vector<std::string_view>& f) {
        const Region region = parse_region_at(f[0], line);
        const WeekId week = parse_week(f[1], line);
        VisitCounts c;
        c.total_visits = parse_count(f[2], "total_visits", line);
        c.flu_vaccine_visits = parse_count(f[3], "flu_vaccine_visits", line);
        c.flu_visits = parse_count(f[4], "flu_visits", line);
        c.ili_visits = parse_count(f[5], "ili_visits", line);
        c.viral_ili_visits = parse_count(f[6], "viral_ili_visits", line);
        if (auto rule = violated_rule(c); !rule.empty())
            throw ValidationError(line, std::string(rule),
                                  std::string(region_code(region)) + " " + week.to_string());
        rows.add(region, week, c, line);
    });
    AthenaTable table;
    rows.finish([&](Region r, WeekId first, std::vector<VisitCounts> values) {
        table.emplace(r, AthenaSeries(r, first, std::move(values)));
    });
    return table;
}

CdcTable load_cdc(std::istream& in) {
    RowCollector<double> rows;
    for_each_row(in, kCdcHeader, 3, [&](std::size_t line, const std::vector<std::string_view>& f) {
        const Region region = parse_region_at(f[0], line);
        const WeekId week = parse_week(f[1], line);
        const double v = parse_real(f[2], "unweighted_ili_percent", line);
        if (!(v >= 0.0 && v <= 100.0))
            throw ValidationError(line, "percent-range", "value " + std::string(f[2]) + " outside [0, 100]");
        rows.add(region, week, v, line);
    });
    CdcTable table;
    rows.finish([&](Region r, WeekId first, std::vector<double> values) {
        table.emplace(r, WeeklySeries(r, first, std::move(values)));
    });
    return table;
}

const AthenaSeries& Dataset::athena_for(Region r) const {
    auto it = athena.find(r);
    if (it == athena.end()) throw RangeError("region " + std::string(region_code(r)) + " not in dataset");
    return it->second;
}

const WeeklySeries& Dataset::cdc_for(Region r) const {
    auto it = cdc.find(r);
    if (it == cdc.end()) throw RangeError("region " + std::string(region_code(r)) + " not in dataset");
    return it->second;
}

Dataset assemble(const AthenaTable& athena, const CdcTable& cdc, std::vector<Region> regions,
                 WeekId first, WeekId last) {
    if (first > last) throw RangeError("dataset span start after end");
    std::vector<std::string> holes;
    auto check = [&](std::string_view source, Region r, bool present, WeekId lo, WeekId hi) {
        const std::string tag = std::string(source) + ":" + std::string(region_code(r));
        if (!present) {
            holes.push_back(tag + ":all");
            return;
        }
        if (lo > first) holes.push_back(tag + ":" + first.to_string() + ".." + (lo - 1).to_string());
        if (hi < last) holes.push_back(tag + ":" + (hi + 1).to_string() + ".." + last.to_string());
    };
    for (Region r : regions) {
        auto a = athena.find(r);
        auto c = cdc.find(r);
        check("athena", r, a != athena.end(), a != athena.end() ? a->second.first_week() : first,
              a != athena.end() ? a->second.last_week() : last);
        check("cdc", r, c != cdc.end(), c != cdc.end() ? c->second.first_week() : first,
              c != cdc.end() ? c->second.last_week() : last);
    }
    if (!holes.empty()) throw CoverageError(std::move(holes));

    Dataset ds{first, last, std::move(regions), {}, {}};
    for (Region r : ds.regions) {
        const auto& a = athena.at(r);
        const auto offset = static_cast<std::size_t>(first - a.first_week());
        const auto weeks = a.weeks().subspan(offset, static_cast<std::size_t>(last - first) + 1);
        ds.athena.emplace(r, AthenaSeries(r, first, {weeks.begin(), weeks.end()}));
        ds.cdc.emplace(r, series_slice(cdc.at(r), first, last));
    }
    return ds;
}

std::string format_real(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

void write_athena(std::ostream& out, const AthenaTable& table) {
    out << kAthenaHeader << '\n';
    for (const auto& [region, series] : table) {
        WeekId w = series.first_week();
        for (const auto& c : series.weeks()) {
            out << region_code(region) << ',' << w.to_string() << ',' << c.total_visits << ','
                << c.flu_vaccine_visits << ',' << c.flu_visits << ',' << c.ili_visits << ','
                << c.viral_ili_visits << '\n';
            w = w.successor();
        }
    }
}

void write_cdc(std::ostream& out, const CdcTable& table) {
    out << kCdcHeader << '\n';
    for (const auto& [region, series] : table) {
        WeekId w = series.first_week();
        for (double v : series.values()) {
            out << region_code(region) << ',' << w.to_string() << ',' << format_real(v) << '\n';
            w = w.successor();
        }
    }
}

}  // namespace ares
