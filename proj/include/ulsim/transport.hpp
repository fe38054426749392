#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <vector>

#include "ulsim/config.hpp"
#include "ulsim/util.hpp"

namespace ulsim {

/// Constant-rate application source. The credit accumulator fills at the
/// application rate and emits one fixed-size segment per payload worth of
/// credit, so the long-run wire rate is exact with no drift.
struct TrafficSource {
    double app_rate_bps = 20000.0;
    int payload_bytes = 200;
    int header_bytes = 40;
    double credit_bits = 0.0; // accumulated application bits

    std::int64_t segment_app_bits() const { return static_cast<std::int64_t>(payload_bytes) * 8; }
    std::int64_t segment_wire_bits() const {
        return static_cast<std::int64_t>(payload_bytes + header_bytes) * 8;
    }
    double wire_rate_bps() const {
        return app_rate_bps * static_cast<double>(payload_bytes + header_bytes) /
               static_cast<double>(payload_bytes);
    }
};

/// Advances the source by one frame; returns the number of segments emitted.
inline int generate(TrafficSource& source, double frame_duration_s) {
    contract_check(frame_duration_s > 0.0, "generate: frame duration must be > 0");
    source.credit_bits += source.app_rate_bps * frame_duration_s;
    int emitted = 0;
    const double seg_bits = static_cast<double>(source.segment_app_bits());
    while (source.credit_bits >= seg_bits) {
        source.credit_bits -= seg_bits;
        ++emitted;
    }
    return emitted;
}

enum class MacOutcome { Delivered, Dropped };

/// Simplified reliable transport for one station: fixed window of segments in
/// flight, in-order delivery bookkeeping at the sink, and timeout
/// retransmission with exponential backoff when the MAC drops a segment.
class ReliableStream {
  public:
    ReliableStream(int window, double rto_s, double backoff, double rto_max_s)
        : window_(window), rto_s_(rto_s), backoff_(backoff), rto_max_s_(rto_max_s) {
        contract_check(window >= 1, "ReliableStream: window must be >= 1");
        contract_check(rto_s > 0.0, "ReliableStream: rto must be > 0");
    }

    /// New segment from the application; queued until the window admits it.
    std::uint64_t push_segment(std::int64_t wire_bits, double now) {
        Seg s;
        s.wire_bits = wire_bits;
        s.created_s = now;
        s.rto_current_s = rto_s_;
        segments_.push_back(s);
        const std::uint64_t id = segments_.size() - 1;
        pending_.push_back(id);
        return id;
    }

    bool can_admit() const { return !pending_.empty() && in_flight_ < window_; }

    /// Moves the next pending segment into the MAC; counts against the window.
    std::uint64_t admit(double /*now*/) {
        contract_check(can_admit(), "ReliableStream: admit without window room");
        const std::uint64_t id = pending_.front();
        pending_.pop_front();
        seg(id).state = State::AtMac;
        ++in_flight_;
        return id;
    }

    /// Segments whose retransmission timer expired; they re-enter the MAC
    /// without touching the window (their slot is still held).
    std::vector<std::uint64_t> collect_rto_expiries(double now) {
        std::vector<std::uint64_t> due;
        for (std::uint64_t id = 0; id < segments_.size(); ++id) {
            Seg& s = segments_[id];
            if (s.state == State::AwaitingRto && s.rto_deadline_s <= now) {
                s.state = State::AtMac;
                ++rto_firings_;
                due.push_back(id);
            }
        }
        return due;
    }

    void on_mac_outcome(std::uint64_t segment_id, MacOutcome outcome, double now) {
        contract_check(segment_id < segments_.size(), "on_mac_outcome: unknown segment_id");
        Seg& s = seg(segment_id);
        if (s.state == State::Delivered) return; // duplicate outcome, idempotent
        contract_check(s.state != State::Pending, "on_mac_outcome: segment never admitted");

        if (outcome == MacOutcome::Delivered) {
            s.state = State::Delivered;
            --in_flight_;
            ++delivered_;
            while (next_in_order_ < segments_.size() &&
                   segments_[next_in_order_].state == State::Delivered)
                ++next_in_order_;
        } else {
            if (s.state == State::AwaitingRto) return; // duplicate drop
            s.state = State::AwaitingRto;
            s.rto_deadline_s = now + s.rto_current_s;
            s.rto_current_s = std::min(s.rto_current_s * backoff_, rto_max_s_);
            ++drop_notices_;
        }
    }

    std::int64_t wire_bits(std::uint64_t segment_id) const {
        contract_check(segment_id < segments_.size(), "wire_bits: unknown segment_id");
        return segments_[segment_id].wire_bits;
    }

    /// Highest sequence number below which everything is delivered in order.
    std::uint64_t acked_seq() const { return next_in_order_; }

    std::int64_t generated() const { return static_cast<std::int64_t>(segments_.size()); }
    std::int64_t delivered() const { return delivered_; }
    std::int64_t in_flight() const { return in_flight_; }
    std::int64_t pending_count() const { return static_cast<std::int64_t>(pending_.size()); }
    std::int64_t rto_firings() const { return rto_firings_; }
    std::int64_t drop_notices() const { return drop_notices_; }
    int window() const { return window_; }

  private:
    enum class State { Pending, AtMac, AwaitingRto, Delivered };

    struct Seg {
        std::int64_t wire_bits = 0;
        double created_s = 0.0;
        double rto_current_s = 0.0;
        double rto_deadline_s = 0.0;
        State state = State::Pending;
    };

    Seg& seg(std::uint64_t id) { return segments_[id]; }

    int window_;
    double rto_s_;
    double backoff_;
    double rto_max_s_;
    std::vector<Seg> segments_;
    std::deque<std::uint64_t> pending_;
    std::uint64_t next_in_order_ = 0;
    std::int64_t in_flight_ = 0;
    std::int64_t delivered_ = 0;
    std::int64_t rto_firings_ = 0;
    std::int64_t drop_notices_ = 0;
};

/// One delivered SDU measured MAC-enqueue to air-delivery.
struct DelaySample {
    std::uint64_t sdu_id = 0;
    double mac_enqueue_s = 0.0;
    double air_delivery_s = 0.0;

    double wimax_delay_s() const {
        contract_check(air_delivery_s >= mac_enqueue_s, "DelaySample: negative delay");
        return air_delivery_s - mac_enqueue_s;
    }
};

/// Running per-frame delay accumulator.
struct DelayAccumulator {
    double sum_s = 0.0;
    std::int64_t count = 0;

    void reset() { sum_s = 0.0; count = 0; }
    bool empty() const { return count == 0; }
    double mean_s() const {
        contract_check(count > 0, "DelayAccumulator: mean of empty window");
        return sum_s / static_cast<double>(count);
    }
};

inline void record_delay(const DelaySample& sample, DelayAccumulator& acc) {
    acc.sum_s += sample.wimax_delay_s();
    acc.count += 1;
}

} // namespace ulsim
