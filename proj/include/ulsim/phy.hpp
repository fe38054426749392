#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "ulsim/config.hpp"
#include "ulsim/rng.hpp"
#include "ulsim/util.hpp"

namespace ulsim {

inline constexpr int kMcsCount = 7;

/// One modulation + coding scheme. efficiency is information bits per data
/// symbol; bler_anchor_db is the SNR at which the block error rate is 0.1.
struct McsProfile {
    int index;
    const char* name;
    int bits_per_symbol;
    double code_rate;
    double efficiency;
    double bler_anchor_db;
};

inline const std::array<McsProfile, kMcsCount>& mcs_profiles() {
    static const std::array<McsProfile, kMcsCount> table = {{
        {0, "QPSK 1/2", 2, 1.0 / 2.0, 2 * (1.0 / 2.0), 2.0},
        {1, "QPSK 3/4", 2, 3.0 / 4.0, 2 * (3.0 / 4.0), 5.9},
        {2, "16-QAM 1/2", 4, 1.0 / 2.0, 4 * (1.0 / 2.0), 8.9},
        {3, "16-QAM 3/4", 4, 3.0 / 4.0, 4 * (3.0 / 4.0), 11.9},
        {4, "64-QAM 1/2", 6, 1.0 / 2.0, 6 * (1.0 / 2.0), 14.9},
        {5, "64-QAM 2/3", 6, 2.0 / 3.0, 6 * (2.0 / 3.0), 17.9},
        {6, "64-QAM 3/4", 6, 3.0 / 4.0, 6 * (3.0 / 4.0), 19.9},
    }};
    return table;
}

inline const McsProfile& mcs_profile(int index) {
    contract_check(index >= 0 && index < kMcsCount, "mcs_profile: index out of range");
    return mcs_profiles()[static_cast<std::size_t>(index)];
}

/// Free-space path loss, distance in meters, frequency in MHz.
inline double free_space_pathloss_db(double distance_m, double frequency_mhz) {
    contract_check(distance_m > 0.0, "free_space_pathloss: distance must be > 0");
    contract_check(frequency_mhz > 0.0, "free_space_pathloss: frequency must be > 0");
    const double d_km = distance_m / 1000.0;
    return 20.0 * std::log10(d_km) + 20.0 * std::log10(frequency_mhz) + 32.45;
}

/// Thermal noise floor over the occupied bandwidth plus receiver noise figure.
inline double noise_floor_dbm(double bandwidth_mhz, double noise_figure_db) {
    contract_check(bandwidth_mhz > 0.0, "noise_floor: bandwidth must be > 0");
    return -174.0 + 10.0 * std::log10(bandwidth_mhz * 1e6) + noise_figure_db;
}

/// Link budget for one station. gamma_per_watt is the linear channel SNR per
/// watt of transmit power (antenna gains, path loss and noise folded in), so
/// the received SNR is exactly tx_power_w * gamma_per_watt.
struct LinkBudget {
    double tx_power_w = 0.05;
    double gamma_per_watt = 1.0;
    double distance_m = 0.0;
    double frequency_mhz = 0.0;

    double gamma_r_linear() const {
        contract_check(tx_power_w > 0.0 && gamma_per_watt > 0.0,
                       "LinkBudget: linear quantities must be > 0");
        return tx_power_w * gamma_per_watt;
    }
    double mean_snr_db() const { return linear_to_db(gamma_r_linear()); }

    static LinkBudget from_geometry(double distance_m, double frequency_mhz, double tx_power_w,
                                    double ss_gain_dbi, double bs_gain_dbi,
                                    double noise_floor_dbm) {
        LinkBudget b;
        b.tx_power_w = tx_power_w;
        b.distance_m = distance_m;
        b.frequency_mhz = frequency_mhz;
        // dBm per watt of tx power: 30 = 10*log10(1 W / 1 mW)
        const double gamma_db = 30.0 + ss_gain_dbi + bs_gain_dbi -
                                free_space_pathloss_db(distance_m, frequency_mhz) -
                                noise_floor_dbm;
        b.gamma_per_watt = db_to_linear(gamma_db);
        return b;
    }
};

inline double mean_snr_db(const LinkBudget& budget) { return budget.mean_snr_db(); }

/// Inverse of the free-space budget: distance placing a station at the given
/// long-term mean SNR.
inline double distance_for_mean_snr(double target_snr_db, double frequency_mhz, double tx_power_w,
                                    double ss_gain_dbi, double bs_gain_dbi,
                                    double noise_floor_dbm) {
    const double budget_db = 10.0 * std::log10(tx_power_w) + 30.0 + ss_gain_dbi + bs_gain_dbi -
                             noise_floor_dbm - 32.45 - 20.0 * std::log10(frequency_mhz);
    const double d_km = std::pow(10.0, (budget_db - target_snr_db) / 20.0);
    return d_km * 1000.0;
}

/// Per-station fading state: AR(1) log-normal excursion around the link
/// budget mean, a stand-in for pedestrian-speed multipath fading.
struct ChannelState {
    double mean_snr_db = 0.0;
    double fade_db = 0.0;
    double sigma_db = 3.0;
    double rho = 0.9;

    double instant_snr_db() const { return mean_snr_db + fade_db; }
};

/// Draws the stationary initial fade so the process has no transient.
inline void init_fading(ChannelState& state, Substream& rng) {
    state.fade_db = state.sigma_db * rng.gaussian();
}

inline ChannelState step_fading(ChannelState state, Substream& rng) {
    const double innovation = std::sqrt(1.0 - state.rho * state.rho) * state.sigma_db;
    state.fade_db = state.rho * state.fade_db + innovation * rng.gaussian();
    return state;
}

inline constexpr double kBlerDecadeSlopeDb = 3.0;

/// Clamped decade model: BLER = 0.1 at the anchor, one decade per 3 dB,
/// saturating at 1 below anchor - 3 dB.
inline double bler(const McsProfile& mcs, double snr_db) {
    const double b = 0.1 * std::pow(10.0, -(snr_db - mcs.bler_anchor_db) / kBlerDecadeSlopeDb);
    return std::min(1.0, b);
}

inline bool draw_block_error(double bler_probability, Substream& rng) {
    contract_check(bler_probability >= 0.0 && bler_probability <= 1.0,
                   "draw_block_error: probability outside [0,1]");
    return rng.bernoulli(bler_probability);
}

inline double apply_force_bler(double bler_probability, ForceBler force) {
    switch (force) {
        case ForceBler::None: return bler_probability;
        case ForceBler::Zero: return 0.0;
        case ForceBler::One: return 1.0;
    }
    contract_fail("apply_force_bler: bad enum value");
}

} // namespace ulsim
