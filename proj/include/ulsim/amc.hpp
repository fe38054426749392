#pragma once

#include <cstring>
#include <deque>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "ulsim/config.hpp"
#include "ulsim/phy.hpp"
#include "ulsim/util.hpp"

namespace ulsim {

struct AmcRow {
    int index;
    double exit_db;  // mandatory exit threshold
    double entry_db; // minimum entry threshold
    int mcs_index;
};

struct AmcTable {
    std::string label;
    std::vector<AmcRow> rows;

    const AmcRow& row(int index) const {
        contract_check(index >= 0 && index < static_cast<int>(rows.size()),
                       "AmcTable: row index out of range");
        return rows[static_cast<std::size_t>(index)];
    }
    int row_count() const { return static_cast<int>(rows.size()); }
};

inline void validate_amc_table(const AmcTable& t) {
    using K = ConfigError::Kind;
    if (t.rows.empty()) throw ConfigError(K::Semantic, "AMC table '" + t.label + "' is empty");
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const AmcRow& r = t.rows[i];
        if (r.index != static_cast<int>(i))
            throw ConfigError(K::Semantic, "AMC table '" + t.label + "': row indexes must be 0..n-1");
        if (r.mcs_index < 0 || r.mcs_index >= kMcsCount)
            throw ConfigError(K::Semantic, "AMC table '" + t.label + "': bad MCS index");
        if (!(r.exit_db < r.entry_db))
            throw ConfigError(K::Semantic,
                              "AMC table '" + t.label + "': exit threshold must be below entry");
        if (i > 0 && !(r.entry_db > t.rows[i - 1].entry_db))
            throw ConfigError(K::Semantic,
                              "AMC table '" + t.label + "': entry thresholds must strictly increase");
    }
}

inline const AmcTable& amc_table_a() {
    static const AmcTable t{"A",
                            {{0, -20.0, 2.0, 0},
                             {1, 5.0, 5.9, 1},
                             {2, 8.0, 8.9, 2},
                             {3, 11.0, 11.9, 3},
                             {4, 14.0, 14.9, 4},
                             {5, 17.0, 17.9, 5},
                             {6, 19.0, 19.9, 6}}};
    return t;
}

inline const AmcTable& amc_table_b() {
    static const AmcTable t{"B",
                            {{0, -20.0, 2.0, 0},
                             {1, 11.0, 11.9, 1},
                             {2, 14.0, 14.9, 2},
                             {3, 17.0, 17.9, 3},
                             {4, 20.0, 20.9, 4},
                             {5, 23.0, 23.9, 5},
                             {6, 25.0, 25.9, 6}}};
    return t;
}

/// Degenerate one-row table pinning QPSK 1/2 (scenario 1).
inline const AmcTable& static_mode() {
    static const AmcTable t{"StaticQpsk12", {{0, -20.0, 2.0, 0}}};
    return t;
}

inline int mcs_index_by_name(std::string_view name) {
    for (const McsProfile& m : mcs_profiles())
        if (name == m.name) return m.index;
    return -1;
}

/// Loads a table from CSV rows `index,exit_db,entry_db,mcs_name`.
inline AmcTable load_amc_table(std::istream& in, const std::string& label) {
    AmcTable t;
    t.label = label;
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line{raw};
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;

        std::vector<std::string> fields;
        std::size_t start = 0;
        for (int i = 0; i < 3; ++i) {
            const std::size_t comma = line.find(',', start);
            if (comma == std::string_view::npos)
                throw ConfigError(ConfigError::Kind::Parse,
                                  "AMC table line " + std::to_string(line_no) +
                                      ": expected index,exit_db,entry_db,mcs_name");
            fields.emplace_back(detail::trim(line.substr(start, comma - start)));
            start = comma + 1;
        }
        fields.emplace_back(detail::trim(line.substr(start)));

        AmcRow r;
        r.index = static_cast<int>(detail::parse_int(fields[0], line_no, "index"));
        r.exit_db = detail::parse_double(fields[1], line_no, "exit_db");
        r.entry_db = detail::parse_double(fields[2], line_no, "entry_db");
        r.mcs_index = mcs_index_by_name(fields[3]);
        if (r.mcs_index < 0)
            throw ConfigError(ConfigError::Kind::Parse,
                              "AMC table line " + std::to_string(line_no) + ": unknown MCS name '" +
                                  fields[3] + "'");
        t.rows.push_back(r);
    }
    validate_amc_table(t);
    return t;
}

inline AmcTable load_amc_table_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError(ConfigError::Kind::Parse, "cannot open AMC table file: " + path);
    return load_amc_table(in, "file:" + path);
}

inline const AmcTable& select_amc_table(const AmcConfig& cfg) {
    switch (cfg.table) {
        case AmcTableId::A: return amc_table_a();
        case AmcTableId::B: return amc_table_b();
        case AmcTableId::StaticQpsk12: return static_mode();
        case AmcTableId::File: {
            // Cached per path; file tables are loaded once per process.
            static std::vector<std::pair<std::string, AmcTable>> cache;
            for (const auto& [path, table] : cache)
                if (path == cfg.table_file) return table;
            cache.emplace_back(cfg.table_file, load_amc_table_file(cfg.table_file));
            return cache.back().second;
        }
    }
    contract_fail("select_amc_table: bad table id");
}

/// Threshold decision with entry/exit hysteresis. Upgrades jump straight to
/// the highest admissible row; below the current row's exit threshold the
/// station drops to the highest row whose entry threshold is met, or to the
/// floor row 0 (which never exits downward).
inline int amc_select(const AmcTable& table, int current_index, double reported_snr_db) {
    contract_check(current_index >= 0 && current_index < table.row_count(),
                   "amc_select: current_index out of range");
    int best = -1;
    for (const AmcRow& r : table.rows) {
        if (reported_snr_db >= r.entry_db) best = r.index;
    }
    if (reported_snr_db >= table.row(current_index).exit_db)
        return std::max(current_index, best);
    return best < 0 ? 0 : best;
}

/// Per-station controller state: ring of per-frame SNR measurements so the
/// decision at frame k sees the measurement from frame k - cqi_period, plus
/// the currently selected row.
class AmcState {
  public:
    explicit AmcState(int cqi_period) : period_(cqi_period) {
        contract_check(cqi_period >= 0, "AmcState: cqi_period must be >= 0");
    }

    /// Records this frame's measurement; call exactly once per frame.
    void report_cqi(double instant_snr_db) {
        history_.push_back(instant_snr_db);
        if (static_cast<int>(history_.size()) > period_ + 1) history_.pop_front();
    }

    /// Measurement from cqi_period frames ago (earliest available during
    /// warm-up of the ring).
    double last_report_db() const {
        contract_check(!history_.empty(), "AmcState: no CQI measurement recorded yet");
        return history_.front();
    }

    int current_index() const { return current_index_; }
    void set_current_index(int index) { current_index_ = index; }

    int cqi_period() const { return period_; }

  private:
    int period_;
    std::deque<double> history_;
    int current_index_ = 0;
};

} // namespace ulsim
