#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "ulsim/config.hpp"
#include "ulsim/util.hpp"

namespace ulsim {

/// Per-frame observables. Exactly the CSV schema: two index fields, seven
/// scalars, seven MCS histogram counters. Optional fields are emitted as
/// empty cells when the frame produced no matching events.
struct StatsRecord {
    std::int64_t frame_index = 0;
    double time_s = 0.0;
    double offered_load_bps = 0.0;
    double mac_throughput_bps = 0.0;
    std::optional<double> mean_wimax_delay_s;
    std::int64_t delivered_sdus = 0;
    double ul_usage_pct = 0.0;
    std::optional<double> pre_harq_bler;
    std::optional<double> post_harq_loss_rate;
    std::array<std::int64_t, 7> mcs_histogram{};

    bool operator==(const StatsRecord&) const = default;
};

inline constexpr const char* kCsvHeader =
    "frame,time_s,offered_load_bps,mac_throughput_bps,mean_wimax_delay_s,delivered_sdus,"
    "ul_usage_pct,pre_harq_bler,post_harq_loss_rate,mcs0,mcs1,mcs2,mcs3,mcs4,mcs5,mcs6";

class CsvError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void csv_put(std::ostream& os, double v) { format_double(os, v); }
inline void csv_put(std::ostream& os, std::int64_t v) { os << v; }
inline void csv_put(std::ostream& os, const std::optional<double>& v) {
    if (v) format_double(os, *v);
}

inline double csv_double(std::string_view cell, std::size_t line) {
    double out = 0.0;
    auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
    if (ec != std::errc() || p != cell.data() + cell.size())
        throw CsvError("CSV line " + std::to_string(line) + ": bad number '" + std::string(cell) +
                       "'");
    return out;
}

inline std::int64_t csv_int(std::string_view cell, std::size_t line) {
    std::int64_t out = 0;
    auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
    if (ec != std::errc() || p != cell.data() + cell.size())
        throw CsvError("CSV line " + std::to_string(line) + ": bad integer '" + std::string(cell) +
                       "'");
    return out;
}

} // namespace detail

inline void emit_csv(const std::vector<StatsRecord>& records, std::ostream& os) {
    os << kCsvHeader << "\n";
    for (const StatsRecord& r : records) {
        detail::csv_put(os, r.frame_index);
        os << ',';
        detail::csv_put(os, r.time_s);
        os << ',';
        detail::csv_put(os, r.offered_load_bps);
        os << ',';
        detail::csv_put(os, r.mac_throughput_bps);
        os << ',';
        detail::csv_put(os, r.mean_wimax_delay_s);
        os << ',';
        detail::csv_put(os, r.delivered_sdus);
        os << ',';
        detail::csv_put(os, r.ul_usage_pct);
        os << ',';
        detail::csv_put(os, r.pre_harq_bler);
        os << ',';
        detail::csv_put(os, r.post_harq_loss_rate);
        for (std::int64_t h : r.mcs_histogram) {
            os << ',';
            detail::csv_put(os, h);
        }
        os << "\n";
    }
}

inline std::string emit_csv_string(const std::vector<StatsRecord>& records) {
    std::ostringstream os;
    emit_csv(records, os);
    return os.str();
}

inline void emit_csv_file(const std::vector<StatsRecord>& records, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CsvError("cannot open for writing: " + path);
    emit_csv(records, out);
    out.flush();
    if (!out) throw CsvError("write failed: " + path);
}

inline std::vector<StatsRecord> parse_csv(std::istream& in) {
    std::vector<StatsRecord> out;
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw CsvError("CSV: empty input");
    ++line_no;
    if (line != kCsvHeader) throw CsvError("CSV: unexpected header");
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::array<std::string_view, 16> cells;
        std::string_view rest{line};
        for (int i = 0; i < 16; ++i) {
            const std::size_t comma = rest.find(',');
            if (i < 15) {
                if (comma == std::string_view::npos)
                    throw CsvError("CSV line " + std::to_string(line_no) + ": expected 16 columns");
                cells[static_cast<std::size_t>(i)] = rest.substr(0, comma);
                rest.remove_prefix(comma + 1);
            } else {
                if (comma != std::string_view::npos)
                    throw CsvError("CSV line " + std::to_string(line_no) + ": too many columns");
                cells[static_cast<std::size_t>(i)] = rest;
            }
        }
        StatsRecord r;
        r.frame_index = detail::csv_int(cells[0], line_no);
        r.time_s = detail::csv_double(cells[1], line_no);
        r.offered_load_bps = detail::csv_double(cells[2], line_no);
        r.mac_throughput_bps = detail::csv_double(cells[3], line_no);
        if (!cells[4].empty()) r.mean_wimax_delay_s = detail::csv_double(cells[4], line_no);
        r.delivered_sdus = detail::csv_int(cells[5], line_no);
        r.ul_usage_pct = detail::csv_double(cells[6], line_no);
        if (!cells[7].empty()) r.pre_harq_bler = detail::csv_double(cells[7], line_no);
        if (!cells[8].empty()) r.post_harq_loss_rate = detail::csv_double(cells[8], line_no);
        for (int i = 0; i < 7; ++i)
            r.mcs_histogram[static_cast<std::size_t>(i)] =
                detail::csv_int(cells[static_cast<std::size_t>(9 + i)], line_no);
        out.push_back(r);
    }
    return out;
}

inline std::vector<StatsRecord> parse_csv_string(const std::string& text) {
    std::istringstream in(text);
    return parse_csv(in);
}

inline std::vector<StatsRecord> parse_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CsvError("cannot open for reading: " + path);
    return parse_csv(in);
}

/// Averages records into fixed-width time bins (for figure-style plots).
/// Rate fields are averaged, the delay mean is weighted by delivered SDUs,
/// error rates are averaged over frames where they were defined, and the
/// count fields are summed.
inline std::vector<StatsRecord> downsample(const std::vector<StatsRecord>& records,
                                           double bin_seconds, double frame_duration_s) {
    contract_check(bin_seconds > 0.0, "downsample: bin must be > 0");
    const auto frames_per_bin =
        static_cast<std::int64_t>(bin_seconds / frame_duration_s + 1e-9);
    contract_check(frames_per_bin >= 1, "downsample: bin below one frame");

    std::vector<StatsRecord> out;
    std::size_t i = 0;
    while (i < records.size()) {
        const std::size_t end = std::min(records.size(), i + static_cast<std::size_t>(frames_per_bin));
        StatsRecord bin = records[i];
        double offered = 0.0, throughput = 0.0, usage = 0.0;
        double delay_sum = 0.0;
        std::int64_t delivered = 0;
        double bler_sum = 0.0, loss_sum = 0.0;
        std::int64_t bler_n = 0, loss_n = 0;
        std::array<std::int64_t, 7> hist{};
        for (std::size_t j = i; j < end; ++j) {
            const StatsRecord& r = records[j];
            offered += r.offered_load_bps;
            throughput += r.mac_throughput_bps;
            usage += r.ul_usage_pct;
            if (r.mean_wimax_delay_s) delay_sum += *r.mean_wimax_delay_s *
                                                   static_cast<double>(r.delivered_sdus);
            delivered += r.delivered_sdus;
            if (r.pre_harq_bler) { bler_sum += *r.pre_harq_bler; ++bler_n; }
            if (r.post_harq_loss_rate) { loss_sum += *r.post_harq_loss_rate; ++loss_n; }
            for (int k = 0; k < 7; ++k) hist[static_cast<std::size_t>(k)] += r.mcs_histogram[static_cast<std::size_t>(k)];
        }
        const auto n = static_cast<double>(end - i);
        bin.offered_load_bps = offered / n;
        bin.mac_throughput_bps = throughput / n;
        bin.ul_usage_pct = usage / n;
        bin.delivered_sdus = delivered;
        bin.mean_wimax_delay_s =
            delivered > 0 ? std::optional<double>(delay_sum / static_cast<double>(delivered))
                          : std::nullopt;
        bin.pre_harq_bler =
            bler_n > 0 ? std::optional<double>(bler_sum / static_cast<double>(bler_n)) : std::nullopt;
        bin.post_harq_loss_rate =
            loss_n > 0 ? std::optional<double>(loss_sum / static_cast<double>(loss_n)) : std::nullopt;
        bin.mcs_histogram = hist;
        out.push_back(bin);
        i = end;
    }
    return out;
}

/// Steady-state means of the record fields, warm-up excluded. The delay mean
/// is weighted by delivered SDU count; error rates average over the frames
/// where they were defined; everything else is a plain arithmetic mean.
struct ScenarioSummary {
    ScenarioId scenario = ScenarioId::Qpsk12;
    std::uint64_t seed = 0;
    std::string config_digest;
    std::int64_t frames = 0; // steady-state frames included
    double warmup_s = 0.0;

    double offered_load_bps = 0.0;
    double mac_throughput_bps = 0.0;
    double mean_wimax_delay_s = 0.0;
    double delivered_sdus_per_frame = 0.0;
    double ul_usage_pct = 0.0;
    double pre_harq_bler = 0.0;
    double post_harq_loss_rate = 0.0;
    std::array<double, 7> mcs_histogram_mean{};
};

inline ScenarioSummary summarize(const std::vector<StatsRecord>& records, double warmup_s) {
    ScenarioSummary s;
    s.warmup_s = warmup_s;

    double offered = 0.0, throughput = 0.0, usage = 0.0;
    double delay_sum = 0.0;
    std::int64_t delivered = 0;
    double bler_sum = 0.0, loss_sum = 0.0;
    std::int64_t bler_n = 0, loss_n = 0, n = 0;
    std::array<double, 7> hist{};

    for (const StatsRecord& r : records) {
        if (r.time_s < warmup_s) continue;
        ++n;
        offered += r.offered_load_bps;
        throughput += r.mac_throughput_bps;
        usage += r.ul_usage_pct;
        if (r.mean_wimax_delay_s) delay_sum += *r.mean_wimax_delay_s *
                                               static_cast<double>(r.delivered_sdus);
        delivered += r.delivered_sdus;
        if (r.pre_harq_bler) { bler_sum += *r.pre_harq_bler; ++bler_n; }
        if (r.post_harq_loss_rate) { loss_sum += *r.post_harq_loss_rate; ++loss_n; }
        for (int k = 0; k < 7; ++k) hist[static_cast<std::size_t>(k)] += static_cast<double>(r.mcs_histogram[static_cast<std::size_t>(k)]);
    }
    if (n == 0) throw std::runtime_error("no steady-state window");

    const auto dn = static_cast<double>(n);
    s.frames = n;
    s.offered_load_bps = offered / dn;
    s.mac_throughput_bps = throughput / dn;
    s.ul_usage_pct = usage / dn;
    s.delivered_sdus_per_frame = static_cast<double>(delivered) / dn;
    s.mean_wimax_delay_s = delivered > 0 ? delay_sum / static_cast<double>(delivered) : 0.0;
    s.pre_harq_bler = bler_n > 0 ? bler_sum / static_cast<double>(bler_n) : 0.0;
    s.post_harq_loss_rate = loss_n > 0 ? loss_sum / static_cast<double>(loss_n) : 0.0;
    for (int k = 0; k < 7; ++k) s.mcs_histogram_mean[static_cast<std::size_t>(k)] = hist[static_cast<std::size_t>(k)] / dn;
    return s;
}

inline std::string summary_text(const ScenarioSummary& s) {
    std::ostringstream os;
    auto kv = [&](const char* k, auto v) {
        os << k << "=";
        if constexpr (std::is_floating_point_v<decltype(v)>) detail::format_double(os, v);
        else os << v;
        os << "\n";
    };
    kv("scenario", scenario_name(s.scenario));
    kv("seed", s.seed);
    kv("config_digest", s.config_digest.c_str());
    kv("steady_state_frames", s.frames);
    kv("warmup_s", s.warmup_s);
    kv("offered_load_bps", s.offered_load_bps);
    kv("mac_throughput_bps", s.mac_throughput_bps);
    kv("mean_wimax_delay_s", s.mean_wimax_delay_s);
    kv("delivered_sdus_per_frame", s.delivered_sdus_per_frame);
    kv("ul_usage_pct", s.ul_usage_pct);
    kv("pre_harq_bler", s.pre_harq_bler);
    kv("post_harq_loss_rate", s.post_harq_loss_rate);
    for (int k = 0; k < 7; ++k) {
        os << "mcs" << k << "_mean=";
        detail::format_double(os, s.mcs_histogram_mean[static_cast<std::size_t>(k)]);
        os << "\n";
    }
    return os.str();
}

/// Scenario comparison on (usage, delay, transport-visible loss), all
/// minimized. A scenario is Pareto-optimal when no other strictly dominates
/// it on all three axes.
struct ComparisonRow {
    ScenarioId scenario = ScenarioId::Qpsk12;
    double ul_usage_pct = 0.0;
    double mean_wimax_delay_s = 0.0;
    double post_harq_loss_rate = 0.0;
    double mac_throughput_bps = 0.0;
    double pre_harq_bler = 0.0;
    int dominates = 0;
    bool pareto_optimal = false;
    bool tie = false;
};

struct ComparisonReport {
    std::vector<ComparisonRow> rows; // ranked best-first
};

inline bool strictly_dominates(const ComparisonRow& a, const ComparisonRow& b) {
    return a.ul_usage_pct < b.ul_usage_pct && a.mean_wimax_delay_s < b.mean_wimax_delay_s &&
           a.post_harq_loss_rate < b.post_harq_loss_rate;
}

inline ComparisonReport compare(const std::vector<ScenarioSummary>& summaries) {
    contract_check(summaries.size() >= 2, "compare: need at least two summaries");
    ComparisonReport rep;
    for (const ScenarioSummary& s : summaries) {
        ComparisonRow r;
        r.scenario = s.scenario;
        r.ul_usage_pct = s.ul_usage_pct;
        r.mean_wimax_delay_s = s.mean_wimax_delay_s;
        r.post_harq_loss_rate = s.post_harq_loss_rate;
        r.mac_throughput_bps = s.mac_throughput_bps;
        r.pre_harq_bler = s.pre_harq_bler;
        rep.rows.push_back(r);
    }
    for (ComparisonRow& a : rep.rows) {
        bool dominated = false;
        for (const ComparisonRow& b : rep.rows) {
            if (&a == &b) continue;
            if (strictly_dominates(a, b)) ++a.dominates;
            if (strictly_dominates(b, a)) dominated = true;
        }
        a.pareto_optimal = !dominated;
    }
    for (ComparisonRow& a : rep.rows) {
        for (const ComparisonRow& b : rep.rows) {
            if (&a == &b) continue;
            if (a.pareto_optimal && b.pareto_optimal && a.ul_usage_pct == b.ul_usage_pct &&
                a.mean_wimax_delay_s == b.mean_wimax_delay_s &&
                a.post_harq_loss_rate == b.post_harq_loss_rate)
                a.tie = true;
        }
    }
    std::stable_sort(rep.rows.begin(), rep.rows.end(),
                     [](const ComparisonRow& a, const ComparisonRow& b) {
                         if (a.pareto_optimal != b.pareto_optimal) return a.pareto_optimal;
                         if (a.dominates != b.dominates) return a.dominates > b.dominates;
                         if (a.post_harq_loss_rate != b.post_harq_loss_rate)
                             return a.post_harq_loss_rate < b.post_harq_loss_rate;
                         if (a.mean_wimax_delay_s != b.mean_wimax_delay_s)
                             return a.mean_wimax_delay_s < b.mean_wimax_delay_s;
                         return a.ul_usage_pct < b.ul_usage_pct;
                     });
    return rep;
}

inline std::string comparison_csv(const ComparisonReport& rep) {
    std::ostringstream os;
    os << "rank,scenario,ul_usage_pct,mean_wimax_delay_s,post_harq_loss_rate,pre_harq_bler,"
          "mac_throughput_bps,dominates,pareto_optimal,tie\n";
    int rank = 1;
    for (const ComparisonRow& r : rep.rows) {
        os << rank++ << ',' << scenario_name(r.scenario) << ',';
        detail::format_double(os, r.ul_usage_pct);
        os << ',';
        detail::format_double(os, r.mean_wimax_delay_s);
        os << ',';
        detail::format_double(os, r.post_harq_loss_rate);
        os << ',';
        detail::format_double(os, r.pre_harq_bler);
        os << ',';
        detail::format_double(os, r.mac_throughput_bps);
        os << ',' << r.dominates << ',' << (r.pareto_optimal ? "true" : "false") << ','
           << (r.tie ? "true" : "false") << "\n";
    }
    return os.str();
}

inline std::string comparison_text(const ComparisonReport& rep) {
    std::ostringstream os;
    os << "rank  scenario     usage%   delay_ms   loss        bler        pareto\n";
    int rank = 1;
    for (const ComparisonRow& r : rep.rows) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%-5d %-12s %-8.2f %-10.3f %-11.3e %-11.3e %s%s\n", rank++,
                      scenario_name(r.scenario), r.ul_usage_pct, r.mean_wimax_delay_s * 1e3,
                      r.post_harq_loss_rate, r.pre_harq_bler, r.pareto_optimal ? "yes" : "no",
                      r.tie ? " (tie)" : "");
        os << buf;
    }
    return os.str();
}

} // namespace ulsim
