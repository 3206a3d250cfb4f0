// Small hand-built data sets shared by the unit tests.
#pragma once

#include <vector>

#include "ares/ingestion.hpp"

namespace fixture {

// One region whose week k has total 10000 visits and the given counts.
struct Week {
    std::int64_t vaccine, flu, ili, viral;
    double cdc;
};

inline ares::Dataset dataset(const std::vector<Week>& weeks, ares::Region r = ares::Region::National,
                             ares::WeekId first = ares::WeekId::parse("2012-01-01")) {
    std::vector<ares::VisitCounts> counts;
    std::vector<double> cdc;
    for (const auto& w : weeks) {
        counts.push_back({10000, w.vaccine, w.flu, w.ili, w.viral});
        cdc.push_back(w.cdc);
    }
    ares::Dataset ds{first, first + static_cast<std::int64_t>(weeks.size()) - 1, {r}, {}, {}};
    ds.athena.emplace(r, ares::AthenaSeries(r, first, std::move(counts)));
    ds.cdc.emplace(r, ares::WeeklySeries(r, first, std::move(cdc)));
    return ds;
}

// Week k: flu 10+k, ili 20+2k, viral 40+3k, vaccine 5+k, cdc 1 + 0.1 k.
inline std::vector<Week> ramp(std::size_t n) {
    std::vector<Week> w;
    for (std::size_t k = 0; k < n; ++k) {
        const auto i = static_cast<std::int64_t>(k);
        w.push_back({5 + i, 10 + i, 20 + 2 * i, 40 + 3 * i, 1.0 + 0.1 * static_cast<double>(k)});
    }
    return w;
}

}  // namespace fixture
