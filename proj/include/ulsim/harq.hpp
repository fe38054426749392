#pragma once

#include <cstdint>

#include "ulsim/phy.hpp"
#include "ulsim/rng.hpp"
#include "ulsim/util.hpp"

namespace ulsim {

enum class HarqStatus { Pending, Acked, Failed };

/// Stop-and-wait retransmission state for one MAC block. Chase combining:
/// every (re)transmission adds its linear SNR to the accumulator, and the
/// decode attempt sees the accumulated sum. Terminal statuses are absorbing.
struct HarqProcess {
    std::uint64_t block_id = 0;
    int ss_id = 0;
    int mcs_index = 0;
    int symbols = 0; // airtime cost of each (re)transmission
    int tx_count = 0;
    double accumulated_snr_linear = 0.0;
    int max_tx = 1;
    int rtt_frames = 2;
    std::int64_t next_tx_frame = 0;
    std::int64_t first_tx_frame = -1;
    HarqStatus status = HarqStatus::Pending;
};

/// Chase combining: accumulated effective SNR after adding one more copy.
inline double combine(double accumulated_snr_linear, double new_tx_snr_db) {
    contract_check(accumulated_snr_linear >= 0.0, "combine: accumulator must be >= 0");
    return accumulated_snr_linear + db_to_linear(new_tx_snr_db);
}

/// One transmission attempt: combine, draw the block error at the effective
/// SNR, then ack, schedule a retransmission, or fail out to transport.
inline HarqProcess harq_step(HarqProcess process, double channel_snr_db, const McsProfile& mcs,
                             Substream& rng, std::int64_t frame_index,
                             ForceBler force = ForceBler::None) {
    contract_check(process.status == HarqStatus::Pending, "harq_step: process already terminal");
    contract_check(frame_index >= process.next_tx_frame, "harq_step: stepped before next_tx_frame");
    contract_check(process.max_tx >= 1, "harq_step: max_tx must be >= 1");

    process.accumulated_snr_linear = combine(process.accumulated_snr_linear, channel_snr_db);
    process.tx_count += 1;
    if (process.first_tx_frame < 0) process.first_tx_frame = frame_index;

    const double effective_db = linear_to_db(process.accumulated_snr_linear);
    const double p = apply_force_bler(bler(mcs, effective_db), force);
    const bool errored = draw_block_error(p, rng);

    if (!errored) {
        process.status = HarqStatus::Acked;
    } else if (process.tx_count < process.max_tx) {
        process.next_tx_frame = frame_index + process.rtt_frames;
    } else {
        process.status = HarqStatus::Failed;
    }
    return process;
}

/// Probability that all max_tx attempts fail at a static channel SNR under
/// chase combining: the k-th attempt decodes at k equal copies combined,
/// i.e. at snr + 10*log10(k).
inline double residual_bler(const McsProfile& mcs, double snr_db, int max_tx) {
    contract_check(max_tx >= 1, "residual_bler: max_tx must be >= 1");
    double p_all_fail = 1.0;
    for (int k = 1; k <= max_tx; ++k)
        p_all_fail *= bler(mcs, snr_db + 10.0 * std::log10(static_cast<double>(k)));
    return p_all_fail;
}

} // namespace ulsim
