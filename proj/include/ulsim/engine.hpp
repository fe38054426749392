#pragma once

#include <cstdint>
#include <deque>
#include <span>
#include <vector>

#include "ulsim/amc.hpp"
#include "ulsim/config.hpp"
#include "ulsim/harq.hpp"
#include "ulsim/mac.hpp"
#include "ulsim/phy.hpp"
#include "ulsim/rng.hpp"
#include "ulsim/scenario.hpp"
#include "ulsim/stats.hpp"
#include "ulsim/transport.hpp"

namespace ulsim {

/// Frame counter; simulation time is always the exact product, never an
/// accumulated sum.
struct SimClock {
    std::int64_t frame_index = 0;
    double frame_duration_s = 0.005;

    double time_s() const { return static_cast<double>(frame_index) * frame_duration_s; }
};

struct RunTotals {
    std::int64_t segments_generated = 0;
    std::int64_t segments_delivered = 0;
    std::int64_t rto_firings = 0;
    std::int64_t transmission_attempts = 0;
    std::int64_t attempt_failures = 0;
    std::int64_t blocks_resolved = 0;
    std::int64_t blocks_failed = 0;
};

/// Optional per-frame observer used by tests and tools; the run itself never
/// depends on it.
class FrameProbe {
  public:
    virtual ~FrameProbe() = default;
    virtual void on_frame(std::int64_t /*frame_index*/, std::span<const double> /*instant_snr_db*/,
                          std::span<const int> /*mcs_index*/) {}
    virtual void on_run_end(const RunTotals&) {}
};

/// Station placement: explicit distances when configured, otherwise free-space
/// distances chosen so the long-term mean SNRs are evenly spaced over the
/// configured span.
inline std::vector<LinkBudget> compute_placement(const SimConfig& cfg) {
    const double noise = noise_floor_dbm(cfg.channel.noise_bandwidth_mhz,
                                         cfg.channel.noise_figure_db);
    std::vector<LinkBudget> budgets;
    budgets.reserve(static_cast<std::size_t>(cfg.ss_count));
    if (!cfg.channel.distances_m.empty()) {
        for (double d : cfg.channel.distances_m)
            budgets.push_back(LinkBudget::from_geometry(d, cfg.channel.frequency_mhz,
                                                        cfg.channel.tx_power_w,
                                                        cfg.channel.ss_antenna_gain_dbi,
                                                        cfg.channel.bs_antenna_gain_dbi, noise));
        return budgets;
    }
    const int n = cfg.ss_count;
    for (int i = 0; i < n; ++i) {
        const double target =
            n == 1 ? 0.5 * (cfg.channel.mean_snr_min_db + cfg.channel.mean_snr_max_db)
                   : cfg.channel.mean_snr_min_db +
                         (cfg.channel.mean_snr_max_db - cfg.channel.mean_snr_min_db) *
                             static_cast<double>(i) / static_cast<double>(n - 1);
        const double d = distance_for_mean_snr(target, cfg.channel.frequency_mhz,
                                               cfg.channel.tx_power_w,
                                               cfg.channel.ss_antenna_gain_dbi,
                                               cfg.channel.bs_antenna_gain_dbi, noise);
        budgets.push_back(LinkBudget::from_geometry(d, cfg.channel.frequency_mhz,
                                                    cfg.channel.tx_power_w,
                                                    cfg.channel.ss_antenna_gain_dbi,
                                                    cfg.channel.bs_antenna_gain_dbi, noise));
    }
    return budgets;
}

namespace detail {

/// One admitted MAC SDU instance. A transport segment produces a fresh
/// instance on every (re)admission; WiMAX delay is measured per instance.
struct MacSdu {
    std::uint64_t stream_seg_id = 0;
    std::int64_t wire_bits = 0;
    double enqueue_s = 0.0;
    std::int64_t queued_bits = 0;  // still waiting in the MAC queue
    std::int64_t unacked_bits = 0; // carried by unresolved blocks
    bool dropped = false;
    bool delivered = false;
};

struct BlockFragment {
    std::uint32_t sdu_index = 0;
    std::int64_t bits = 0;
};

struct Block {
    HarqProcess hp;
    std::vector<BlockFragment> fragments;
};

struct Station {
    ChannelState channel;
    AmcState amc;
    TrafficSource source;
    ReliableStream stream;
    std::vector<MacSdu> sdus;
    std::deque<std::uint32_t> queue;
    std::vector<Block> blocks;
    std::int64_t backlog_bits = 0;

    Station(int cqi_period, TrafficSource src, ReliableStream str)
        : amc(cqi_period), source(src), stream(std::move(str)) {}
};

struct FrameCounters {
    std::int64_t offered_bits = 0;
    std::int64_t delivered_bits = 0;
    std::int64_t delivered_sdus = 0;
    std::int64_t attempts = 0;
    std::int64_t attempt_failures = 0;
    std::int64_t blocks_resolved = 0;
    std::int64_t blocks_failed = 0;
    DelayAccumulator delay;
};

/// What one frame will carry: HARQ retransmissions reserved off the top of
/// the budget (oldest block first), then fair-scheduler grants for fresh data.
struct FramePlan {
    std::int64_t retx_symbols = 0;
    std::vector<std::pair<int, std::size_t>> retx; // (ss, block position)
    std::vector<Allocation> allocations;
};

class Engine {
  public:
    explicit Engine(const SimConfig& cfg)
        : cfg_(cfg),
          table_(select_amc_table(cfg.amc)),
          budget_{cfg.mac.ul_data_symbols, cfg.frame_duration_s()},
          rng_(cfg.seed, cfg.ss_count) {
        validate_config(cfg_);
        validate_amc_table(table_);
        clock_.frame_duration_s = cfg_.frame_duration_s();

        const std::vector<LinkBudget> placement = compute_placement(cfg_);
        stations_.reserve(static_cast<std::size_t>(cfg_.ss_count));
        for (int ss = 0; ss < cfg_.ss_count; ++ss) {
            TrafficSource src;
            src.app_rate_bps = cfg_.traffic.app_kbps * 1000.0;
            src.payload_bytes = cfg_.traffic.payload_bytes;
            src.header_bytes = cfg_.traffic.header_bytes;
            ReliableStream stream(cfg_.tcp.window, cfg_.tcp.rto_ms / 1000.0, cfg_.tcp.rto_backoff,
                                  cfg_.tcp.rto_max_ms / 1000.0);
            stations_.emplace_back(cfg_.amc.cqi_period, src, std::move(stream));

            Station& st = stations_.back();
            st.channel.mean_snr_db = placement[static_cast<std::size_t>(ss)].mean_snr_db();
            st.channel.sigma_db = cfg_.channel.sigma_db;
            st.channel.rho = cfg_.channel.rho;
            init_fading(st.channel, rng_.channel(ss));
            // Random initial phase spreads segment arrivals across frames.
            st.source.credit_bits =
                rng_.transport(ss).uniform01() * static_cast<double>(st.source.segment_app_bits());
        }
    }

    std::vector<StatsRecord> run(FrameProbe* probe) {
        const std::int64_t frames = cfg_.frame_count();
        std::vector<StatsRecord> records;
        records.reserve(static_cast<std::size_t>(frames));

        std::vector<double> snr(static_cast<std::size_t>(cfg_.ss_count), 0.0);
        std::vector<int> mcs_of(static_cast<std::size_t>(cfg_.ss_count), 0);

        for (clock_.frame_index = 0; clock_.frame_index < frames; ++clock_.frame_index) {
            FrameCounters fc;
            std::array<std::int64_t, 7> hist{};

            update_channel(snr);
            update_amc(snr, mcs_of, hist);
            update_transport(fc);
            const FramePlan plan = schedule_frame(mcs_of);
            transmit(snr, plan, fc);

            const std::int64_t used = plan.retx_symbols + allocated_symbols(plan.allocations);
            contract_check(used <= budget_.ul_data_symbols,
                           "engine: frame symbol budget exceeded");

            records.push_back(make_record(fc, used, hist));
            if (probe) probe->on_frame(clock_.frame_index, snr, mcs_of);
        }
        if (probe) probe->on_run_end(totals_);
        return records;
    }

    const RunTotals& totals() const { return totals_; }

  private:
    double now() const { return clock_.time_s(); }
    double frame_end() const {
        return static_cast<double>(clock_.frame_index + 1) * clock_.frame_duration_s;
    }

    void update_channel(std::vector<double>& snr) {
        for (int ss = 0; ss < cfg_.ss_count; ++ss) {
            Station& st = stations_[static_cast<std::size_t>(ss)];
            st.channel = step_fading(st.channel, rng_.channel(ss));
            snr[static_cast<std::size_t>(ss)] = st.channel.instant_snr_db();
        }
    }

    void update_amc(const std::vector<double>& snr, std::vector<int>& mcs_of,
                    std::array<std::int64_t, 7>& hist) {
        for (int ss = 0; ss < cfg_.ss_count; ++ss) {
            Station& st = stations_[static_cast<std::size_t>(ss)];
            st.amc.report_cqi(snr[static_cast<std::size_t>(ss)]);
            const int row = amc_select(table_, st.amc.current_index(), st.amc.last_report_db());
            st.amc.set_current_index(row);
            const int mcs = table_.row(row).mcs_index;
            mcs_of[static_cast<std::size_t>(ss)] = mcs;
            hist[static_cast<std::size_t>(mcs)] += 1;
        }
    }

    void enqueue_sdu(Station& st, std::uint64_t seg_id) {
        MacSdu sdu;
        sdu.stream_seg_id = seg_id;
        sdu.wire_bits = st.stream.wire_bits(seg_id);
        sdu.enqueue_s = now();
        sdu.queued_bits = sdu.wire_bits;
        st.sdus.push_back(sdu);
        st.queue.push_back(static_cast<std::uint32_t>(st.sdus.size() - 1));
        st.backlog_bits += sdu.wire_bits;
    }

    void update_transport(FrameCounters& fc) {
        for (int ss = 0; ss < cfg_.ss_count; ++ss) {
            Station& st = stations_[static_cast<std::size_t>(ss)];
            for (std::uint64_t seg_id : st.stream.collect_rto_expiries(now()))
                enqueue_sdu(st, seg_id);
            const int fresh = generate(st.source, clock_.frame_duration_s);
            for (int i = 0; i < fresh; ++i) {
                const std::uint64_t seg_id =
                    st.stream.push_segment(st.source.segment_wire_bits(), now());
                fc.offered_bits += st.stream.wire_bits(seg_id);
                totals_.segments_generated += 1;
            }
            while (st.stream.can_admit()) enqueue_sdu(st, st.stream.admit(now()));

            contract_check(st.stream.generated() == st.stream.delivered() +
                                                        st.stream.in_flight() +
                                                        st.stream.pending_count(),
                           "engine: transport segment conservation broken");
            contract_check(st.stream.in_flight() <= st.stream.window(),
                           "engine: transport window exceeded");
            contract_check(st.backlog_bits >= 0, "engine: negative MAC backlog");
        }
    }

    FramePlan schedule_frame(const std::vector<int>& mcs_of) {
        FramePlan plan;
        std::int64_t remaining = budget_.ul_data_symbols;

        std::vector<std::pair<int, std::size_t>> due; // (ss, block position)
        for (int ss = 0; ss < cfg_.ss_count; ++ss) {
            Station& st = stations_[static_cast<std::size_t>(ss)];
            for (std::size_t b = 0; b < st.blocks.size(); ++b) {
                const HarqProcess& hp = st.blocks[b].hp;
                if (hp.status == HarqStatus::Pending && hp.tx_count >= 1 &&
                    hp.next_tx_frame <= clock_.frame_index)
                    due.emplace_back(ss, b);
            }
        }
        std::stable_sort(due.begin(), due.end(), [&](const auto& a, const auto& b) {
            return stations_[static_cast<std::size_t>(a.first)].blocks[a.second].hp.block_id <
                   stations_[static_cast<std::size_t>(b.first)].blocks[b.second].hp.block_id;
        });

        for (const auto& ref : due) {
            const HarqProcess& hp =
                stations_[static_cast<std::size_t>(ref.first)].blocks[ref.second].hp;
            if (hp.symbols <= remaining) {
                remaining -= hp.symbols;
                plan.retx_symbols += hp.symbols;
                plan.retx.push_back(ref);
            } // else deferred to a later frame
        }

        std::vector<BandwidthRequest> requests;
        for (int ss = 0; ss < cfg_.ss_count; ++ss) {
            const Station& st = stations_[static_cast<std::size_t>(ss)];
            if (st.backlog_bits > 0) requests.push_back({ss, st.backlog_bits});
        }
        FrameBudget fresh_budget = budget_;
        fresh_budget.ul_data_symbols = static_cast<int>(remaining);
        if (remaining > 0) plan.allocations = schedule(requests, mcs_of, fresh_budget);
        return plan;
    }

    static std::int64_t allocated_symbols(const std::vector<Allocation>& allocations) {
        std::int64_t total = 0;
        for (const Allocation& a : allocations) total += a.symbols;
        return total;
    }

    void resolve_block(Station& st, Block& block, FrameCounters& fc) {
        if (block.hp.status == HarqStatus::Acked) {
            for (const BlockFragment& frag : block.fragments) {
                MacSdu& sdu = st.sdus[frag.sdu_index];
                if (sdu.dropped) continue;
                sdu.unacked_bits -= frag.bits;
                contract_check(sdu.unacked_bits >= 0, "engine: fragment accounting broken");
                if (sdu.unacked_bits == 0 && sdu.queued_bits == 0 && !sdu.delivered) {
                    sdu.delivered = true;
                    st.stream.on_mac_outcome(sdu.stream_seg_id, MacOutcome::Delivered, now());
                    DelaySample sample{sdu.stream_seg_id, sdu.enqueue_s, frame_end()};
                    record_delay(sample, fc.delay);
                    fc.delivered_bits += sdu.wire_bits;
                    fc.delivered_sdus += 1;
                    totals_.segments_delivered += 1;
                }
            }
            fc.blocks_resolved += 1;
            totals_.blocks_resolved += 1;
        } else if (block.hp.status == HarqStatus::Failed) {
            for (const BlockFragment& frag : block.fragments) {
                MacSdu& sdu = st.sdus[frag.sdu_index];
                if (sdu.dropped || sdu.delivered) continue;
                sdu.dropped = true;
                st.backlog_bits -= sdu.queued_bits;
                sdu.queued_bits = 0;
                st.stream.on_mac_outcome(sdu.stream_seg_id, MacOutcome::Dropped, now());
            }
            fc.blocks_resolved += 1;
            fc.blocks_failed += 1;
            totals_.blocks_resolved += 1;
            totals_.blocks_failed += 1;
        }
    }

    void step_block(Station& st, Block& block, double snr_db, FrameCounters& fc) {
        block.hp = harq_step(block.hp, snr_db, mcs_profile(block.hp.mcs_index),
                             rng_.error_draws(block.hp.ss_id), clock_.frame_index,
                             cfg_.channel.force_bler);
        fc.attempts += 1;
        totals_.transmission_attempts += 1;
        if (block.hp.status != HarqStatus::Acked) {
            fc.attempt_failures += 1;
            totals_.attempt_failures += 1;
        }
        resolve_block(st, block, fc);
    }

    void transmit(const std::vector<double>& snr, const FramePlan& plan, FrameCounters& fc) {
        for (const auto& [ss, pos] : plan.retx) {
            Station& st = stations_[static_cast<std::size_t>(ss)];
            step_block(st, st.blocks[pos], snr[static_cast<std::size_t>(ss)], fc);
        }

        for (const Allocation& a : plan.allocations) {
            Station& st = stations_[static_cast<std::size_t>(a.ss_id)];
            std::int64_t bits_left = a.payload_bits;
            std::vector<BlockFragment> frags;
            while (bits_left > 0 && !st.queue.empty()) {
                const std::uint32_t idx = st.queue.front();
                MacSdu& sdu = st.sdus[idx];
                if (sdu.dropped || sdu.queued_bits == 0) {
                    st.queue.pop_front();
                    continue;
                }
                const std::int64_t take = std::min(sdu.queued_bits, bits_left);
                sdu.queued_bits -= take;
                sdu.unacked_bits += take;
                st.backlog_bits -= take;
                bits_left -= take;
                frags.push_back({idx, take});
                if (sdu.queued_bits == 0) st.queue.pop_front();
            }
            if (frags.empty()) continue;

            Block block;
            block.hp.block_id = next_block_id_++;
            block.hp.ss_id = a.ss_id;
            block.hp.mcs_index = a.mcs_index;
            block.hp.symbols = a.symbols;
            block.hp.max_tx = cfg_.harq.enabled ? cfg_.harq.max_tx : 1;
            block.hp.rtt_frames = cfg_.harq.rtt_frames;
            block.hp.next_tx_frame = clock_.frame_index;
            block.fragments = std::move(frags);
            st.blocks.push_back(std::move(block));
            step_block(st, st.blocks.back(), snr[static_cast<std::size_t>(a.ss_id)], fc);
        }

        // Drop resolved blocks, preserving creation order of the rest.
        for (Station& st : stations_) {
            std::erase_if(st.blocks,
                          [](const Block& b) { return b.hp.status != HarqStatus::Pending; });
        }
    }

    StatsRecord make_record(const FrameCounters& fc, std::int64_t used_symbols,
                            const std::array<std::int64_t, 7>& hist) {
        StatsRecord r;
        r.frame_index = clock_.frame_index;
        r.time_s = now();
        const double dt = clock_.frame_duration_s;
        r.offered_load_bps = static_cast<double>(fc.offered_bits) / dt;
        r.mac_throughput_bps = static_cast<double>(fc.delivered_bits) / dt;
        if (!fc.delay.empty()) r.mean_wimax_delay_s = fc.delay.mean_s();
        r.delivered_sdus = fc.delivered_sdus;
        r.ul_usage_pct =
            100.0 * static_cast<double>(used_symbols) / static_cast<double>(budget_.ul_data_symbols);
        contract_check(r.ul_usage_pct >= 0.0 && r.ul_usage_pct <= 100.0,
                       "engine: usage outside [0,100]");
        if (fc.attempts > 0)
            r.pre_harq_bler =
                static_cast<double>(fc.attempt_failures) / static_cast<double>(fc.attempts);
        if (fc.blocks_resolved > 0)
            r.post_harq_loss_rate =
                static_cast<double>(fc.blocks_failed) / static_cast<double>(fc.blocks_resolved);
        r.mcs_histogram = hist;
        totals_.rto_firings = total_rto_firings();
        return r;
    }

    std::int64_t total_rto_firings() const {
        std::int64_t total = 0;
        for (const Station& st : stations_) total += st.stream.rto_firings();
        return total;
    }

    SimConfig cfg_;
    AmcTable table_;
    FrameBudget budget_;
    RandomStream rng_;
    SimClock clock_;
    std::vector<Station> stations_;
    std::uint64_t next_block_id_ = 0;
    RunTotals totals_;
};

} // namespace detail

/// Executes one deterministic run: floor(duration / frame) ticks, one record
/// per frame. Identical (seed, config) gives byte-identical records.
inline std::vector<StatsRecord> run(const SimConfig& cfg, FrameProbe* probe = nullptr) {
    detail::Engine engine(cfg);
    return engine.run(probe);
}

inline ScenarioSummary run_summary(const SimConfig& cfg, FrameProbe* probe = nullptr) {
    const std::vector<StatsRecord> records = run(cfg, probe);
    ScenarioSummary s = summarize(records, cfg.warmup_s);
    s.scenario = cfg.scenario;
    s.seed = cfg.seed;
    s.config_digest = config_digest(cfg);
    return s;
}

} // namespace ulsim
