#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "ulsim/phy.hpp"
#include "ulsim/util.hpp"

namespace ulsim {

/// UL data-burst capacity of one frame, in symbol slots. MAC overhead
/// (preambles, maps, ranging, CQICH) lives outside this budget.
struct FrameBudget {
    int ul_data_symbols = 2950;
    double frame_duration_s = 0.005;
};

struct BandwidthRequest {
    int ss_id = 0;
    std::int64_t backlog_bits = 0; // queued MAC bytes * 8, refreshed by piggyback
};

struct Allocation {
    int ss_id = 0;
    int symbols = 0;
    int mcs_index = 0;
    std::int64_t payload_bits = 0; // floor(symbols * efficiency)
};

inline double uplink_capacity_bps(const FrameBudget& budget, const McsProfile& mcs) {
    contract_check(budget.ul_data_symbols >= 0, "uplink_capacity: negative budget");
    contract_check(budget.frame_duration_s > 0.0, "uplink_capacity: frame duration must be > 0");
    return static_cast<double>(budget.ul_data_symbols) * mcs.efficiency / budget.frame_duration_s;
}

/// Deficit-round-robin over stations in fixed id order. Each sweep hands every
/// backlogged station up to an equal share of what is left; the residue is
/// redistributed in further sweeps within the same frame until backlog or
/// budget exhausts. Deterministic in (requests, MCS map, budget).
inline std::vector<Allocation> schedule(const std::vector<BandwidthRequest>& requests,
                                        const std::vector<int>& mcs_of,
                                        const FrameBudget& budget) {
    struct Item {
        int ss_id;
        int mcs_index;
        std::int64_t demand_symbols;
        std::int64_t granted = 0;
    };

    std::vector<Item> items;
    items.reserve(requests.size());
    for (const BandwidthRequest& req : requests) {
        contract_check(req.backlog_bits >= 0, "schedule: negative backlog");
        if (req.backlog_bits == 0) continue;
        contract_check(req.ss_id >= 0 && req.ss_id < static_cast<int>(mcs_of.size()),
                       "schedule: ss_id outside MCS map");
        const int mcs_index = mcs_of[static_cast<std::size_t>(req.ss_id)];
        const double eff = mcs_profile(mcs_index).efficiency;
        const auto demand =
            static_cast<std::int64_t>(std::ceil(static_cast<double>(req.backlog_bits) / eff));
        items.push_back({req.ss_id, mcs_index, demand});
    }

    std::int64_t remaining = budget.ul_data_symbols;
    while (remaining > 0) {
        std::int64_t active = 0;
        for (const Item& it : items)
            if (it.demand_symbols > 0) ++active;
        if (active == 0) break;

        const std::int64_t share = std::max<std::int64_t>(1, remaining / active);
        bool progressed = false;
        for (Item& it : items) {
            if (remaining == 0) break;
            if (it.demand_symbols == 0) continue;
            const std::int64_t grant = std::min({it.demand_symbols, share, remaining});
            it.granted += grant;
            it.demand_symbols -= grant;
            remaining -= grant;
            if (grant > 0) progressed = true;
        }
        if (!progressed) break;
    }

    std::vector<Allocation> out;
    std::int64_t total = 0;
    for (const Item& it : items) {
        if (it.granted == 0) continue;
        Allocation a;
        a.ss_id = it.ss_id;
        a.symbols = static_cast<int>(it.granted);
        a.mcs_index = it.mcs_index;
        a.payload_bits = static_cast<std::int64_t>(
            std::floor(static_cast<double>(it.granted) * mcs_profile(it.mcs_index).efficiency));
        total += it.granted;
        out.push_back(a);
    }
    contract_check(total <= budget.ul_data_symbols, "schedule: allocations exceed frame budget");
    return out;
}

inline double frame_usage_pct(const std::vector<Allocation>& allocations,
                              const FrameBudget& budget) {
    contract_check(budget.ul_data_symbols > 0, "frame_usage: budget must be > 0");
    std::int64_t total = 0;
    for (const Allocation& a : allocations) {
        contract_check(a.symbols >= 0, "frame_usage: negative allocation");
        total += a.symbols;
    }
    contract_check(total <= budget.ul_data_symbols, "frame_usage: allocations exceed frame budget");
    return 100.0 * static_cast<double>(total) / static_cast<double>(budget.ul_data_symbols);
}

} // namespace ulsim
