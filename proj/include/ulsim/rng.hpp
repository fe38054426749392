#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "ulsim/util.hpp"

namespace ulsim {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/// One independent draw sequence. All derived draws (uniform, gaussian,
/// bernoulli) use fixed arithmetic on top of mt19937_64 so a given seed
/// reproduces the same sequence on any host.
class Substream {
  public:
    explicit Substream(std::uint64_t seed) : gen_(seed) {}

    /// Uniform in [0, 1) with 53-bit resolution.
    double uniform01() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) {
        contract_check(p >= 0.0 && p <= 1.0, "bernoulli: p outside [0,1]");
        if (p <= 0.0) return false;
        if (p >= 1.0) return true;
        return uniform01() < p;
    }

    /// Standard normal via Box-Muller; the paired value is cached.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        double u2 = uniform01();
        if (u1 < 1e-300) u1 = 1e-300;
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    double gaussian(double mean, double sigma) { return mean + sigma * gaussian(); }

  private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

/// Seeded family of labeled substreams, one per (consumer, station):
/// fading draws, block-error draws and traffic phase jitter never share
/// a sequence, so toggling one mechanism cannot perturb another.
class RandomStream {
  public:
    RandomStream(std::uint64_t seed, int station_count) {
        contract_check(station_count >= 1, "RandomStream: station_count < 1");
        auto build = [&](std::uint64_t label, std::vector<Substream>& out) {
            out.reserve(static_cast<std::size_t>(station_count));
            for (int ss = 0; ss < station_count; ++ss) {
                const std::uint64_t s =
                    splitmix64(splitmix64(seed ^ (label * 0xa24baed4963ee407ull)) +
                               static_cast<std::uint64_t>(ss) + 1);
                out.emplace_back(s);
            }
        };
        build(1, channel_);
        build(2, error_draws_);
        build(3, transport_);
    }

    Substream& channel(int ss) { return channel_.at(static_cast<std::size_t>(ss)); }
    Substream& error_draws(int ss) { return error_draws_.at(static_cast<std::size_t>(ss)); }
    Substream& transport(int ss) { return transport_.at(static_cast<std::size_t>(ss)); }

  private:
    std::vector<Substream> channel_;
    std::vector<Substream> error_draws_;
    std::vector<Substream> transport_;
};

} // namespace ulsim
