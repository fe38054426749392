#pragma once

#include <array>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ulsim/util.hpp"

namespace ulsim {

enum class ScenarioId { Qpsk12, AmcA, AmcB, AmcAHarq };

inline const char* scenario_name(ScenarioId id) {
    switch (id) {
        case ScenarioId::Qpsk12: return "qpsk12";
        case ScenarioId::AmcA: return "amc-a";
        case ScenarioId::AmcB: return "amc-b";
        case ScenarioId::AmcAHarq: return "amc-a-harq";
    }
    contract_fail("scenario_name: bad enum value");
}

inline std::optional<ScenarioId> parse_scenario(std::string_view s) {
    if (s == "qpsk12") return ScenarioId::Qpsk12;
    if (s == "amc-a" || s == "amc_a" || s == "amca") return ScenarioId::AmcA;
    if (s == "amc-b" || s == "amc_b" || s == "amcb") return ScenarioId::AmcB;
    if (s == "amc-a-harq" || s == "amc_a_harq" || s == "amcaharq") return ScenarioId::AmcAHarq;
    return std::nullopt;
}

enum class AmcTableId { StaticQpsk12, A, B, File };
enum class ForceBler { None, Zero, One };

/// Configuration errors. kind() distinguishes malformed input (parse)
/// from well-formed but out-of-range values (semantic).
class ConfigError : public std::runtime_error {
  public:
    enum class Kind { Parse, Semantic };
    ConfigError(Kind k, const std::string& msg) : std::runtime_error(msg), kind_(k) {}
    Kind kind() const { return kind_; }

  private:
    Kind kind_;
};

struct ChannelConfig {
    double sigma_db = 3.0;           // fading std deviation
    double rho = 0.9;                // per-frame AR(1) coefficient
    double mean_snr_min_db = 8.0;    // placement fixture: evenly spaced means
    double mean_snr_max_db = 22.0;
    std::vector<double> distances_m; // explicit placement overrides the span
    double frequency_mhz = 2500.0;
    double tx_power_w = 0.05;
    double ss_antenna_gain_dbi = -1.0;
    double bs_antenna_gain_dbi = 15.0;
    double noise_figure_db = 7.0;
    double noise_bandwidth_mhz = 5.0;
    ForceBler force_bler = ForceBler::None;
};

struct AmcConfig {
    AmcTableId table = AmcTableId::A;
    std::string table_file; // used when table == File
    int cqi_period = 3;     // frames of feedback delay
};

struct HarqConfig {
    bool enabled = false;
    int max_tx = 4;
    int rtt_frames = 1; // retransmission turnaround, frames
};

struct MacConfig {
    int ul_data_symbols = 2950; // UL data-burst budget per frame
    double frame_ms = 5.0;
};

struct TrafficConfig {
    double app_kbps = 20.0;
    int payload_bytes = 200;
    int header_bytes = 40;
};

struct TcpConfig {
    int window = 8;
    double rto_ms = 600.0;
    double rto_backoff = 2.0;
    double rto_max_ms = 8000.0;
};

struct SimConfig {
    ScenarioId scenario = ScenarioId::Qpsk12;
    bool scenario_preset = false; // set once a preset or document names the scenario
    std::uint64_t seed = 1;
    double duration_s = 300.0;
    double warmup_s = 30.0;
    int ss_count = 20;
    ChannelConfig channel;
    AmcConfig amc;
    HarqConfig harq;
    MacConfig mac;
    TrafficConfig traffic;
    TcpConfig tcp;

    double frame_duration_s() const { return mac.frame_ms / 1000.0; }
    std::int64_t frame_count() const {
        return static_cast<std::int64_t>(duration_s / frame_duration_s() + 1e-9);
    }
};

/// Applies what a scenario choice pins down: the threshold table and the
/// HARQ switch. Everything else stays untouched so scenarios share one
/// channel realization under a common seed.
inline void apply_scenario_preset(SimConfig& c, ScenarioId id) {
    c.scenario = id;
    c.scenario_preset = true;
    switch (id) {
        case ScenarioId::Qpsk12:
            c.amc.table = AmcTableId::StaticQpsk12;
            c.harq.enabled = false;
            break;
        case ScenarioId::AmcA:
            c.amc.table = AmcTableId::A;
            c.harq.enabled = false;
            break;
        case ScenarioId::AmcB:
            c.amc.table = AmcTableId::B;
            c.harq.enabled = false;
            break;
        case ScenarioId::AmcAHarq:
            c.amc.table = AmcTableId::A;
            c.harq.enabled = true;
            break;
    }
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline double parse_double(std::string_view v, int line, std::string_view key) {
    double out = 0.0;
    const char* first = v.data();
    const char* last = v.data() + v.size();
    auto [p, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || p != last)
        throw ConfigError(ConfigError::Kind::Parse,
                          "line " + std::to_string(line) + ": key '" + std::string(key) +
                              "': not a number: '" + std::string(v) + "'");
    return out;
}

inline std::int64_t parse_int(std::string_view v, int line, std::string_view key) {
    std::int64_t out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
        throw ConfigError(ConfigError::Kind::Parse,
                          "line " + std::to_string(line) + ": key '" + std::string(key) +
                              "': not an integer: '" + std::string(v) + "'");
    return out;
}

inline std::uint64_t parse_uint(std::string_view v, int line, std::string_view key) {
    std::uint64_t out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
        throw ConfigError(ConfigError::Kind::Parse,
                          "line " + std::to_string(line) + ": key '" + std::string(key) +
                              "': not an unsigned integer: '" + std::string(v) + "'");
    return out;
}

inline bool parse_bool(std::string_view v, int line, std::string_view key) {
    if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "off" || v == "no") return false;
    throw ConfigError(ConfigError::Kind::Parse,
                      "line " + std::to_string(line) + ": key '" + std::string(key) +
                          "': not a boolean: '" + std::string(v) + "'");
}

inline std::vector<double> parse_double_list(std::string_view v, int line, std::string_view key) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= v.size()) {
        std::size_t comma = v.find(',', start);
        std::string_view tok =
            trim(v.substr(start, comma == std::string_view::npos ? v.size() - start : comma - start));
        if (!tok.empty()) out.push_back(parse_double(tok, line, key));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

inline void format_double(std::ostream& os, double v) {
    std::array<char, 64> buf{};
    auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    (void)ec;
    os << std::string_view(buf.data(), static_cast<std::size_t>(p - buf.data()));
}

} // namespace detail

inline void validate_config(const SimConfig& c) {
    using K = ConfigError::Kind;
    auto fail = [](const std::string& m) { throw ConfigError(K::Semantic, m); };
    if (!(c.duration_s > 0.0)) fail("duration must be > 0");
    if (c.warmup_s < 0.0) fail("warmup must be >= 0");
    if (c.warmup_s >= c.duration_s) fail("warmup must be < duration");
    if (c.ss_count < 1) fail("ss_count must be >= 1");
    if (c.channel.sigma_db < 0.0) fail("channel.sigma_db must be >= 0");
    if (c.channel.rho < 0.0 || c.channel.rho > 1.0) fail("channel.rho must be in [0,1]");
    if (!(c.channel.frequency_mhz > 0.0)) fail("channel.frequency_mhz must be > 0");
    if (!(c.channel.tx_power_w > 0.0)) fail("channel.tx_power_w must be > 0");
    if (!(c.channel.noise_bandwidth_mhz > 0.0)) fail("channel.noise_bandwidth_mhz must be > 0");
    if (c.channel.mean_snr_min_db > c.channel.mean_snr_max_db)
        fail("channel.mean_snr_min_db must be <= channel.mean_snr_max_db");
    if (!c.channel.distances_m.empty() &&
        c.channel.distances_m.size() != static_cast<std::size_t>(c.ss_count))
        fail("channel.distances_m must list exactly ss_count distances");
    for (double d : c.channel.distances_m)
        if (!(d > 0.0)) fail("channel.distances_m entries must be > 0");
    if (c.amc.cqi_period < 0) fail("amc.cqi_period must be >= 0");
    if (c.amc.table == AmcTableId::File && c.amc.table_file.empty())
        fail("amc.table=file:<path> requires a path");
    if (c.harq.max_tx < 1) fail("harq.max_tx must be >= 1");
    if (c.harq.rtt_frames < 1) fail("harq.rtt_frames must be >= 1");
    if (c.mac.ul_data_symbols < 1) fail("mac.ul_data_symbols must be >= 1");
    if (!(c.mac.frame_ms > 0.0)) fail("mac.frame_ms must be > 0");
    if (c.traffic.app_kbps < 0.0) fail("traffic.app_kbps must be >= 0");
    if (c.traffic.payload_bytes < 1) fail("traffic.payload_bytes must be >= 1");
    if (c.traffic.header_bytes < 0) fail("traffic.header_bytes must be >= 0");
    if (c.tcp.window < 1) fail("tcp.window must be >= 1");
    if (!(c.tcp.rto_ms > 0.0)) fail("tcp.rto_ms must be > 0");
    if (c.tcp.rto_backoff < 1.0) fail("tcp.rto_backoff must be >= 1");
    if (c.tcp.rto_max_ms < c.tcp.rto_ms) fail("tcp.rto_max_ms must be >= tcp.rto_ms");
}

/// Parses the flat key=value config document. Keys not present keep their
/// defaults. `base` lets the CLI layer scenario presets under a file.
inline SimConfig parse_config(std::string_view text, const SimConfig& base = SimConfig{}) {
    SimConfig c = base;
    bool scenario_seen = false;

    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line{raw};
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(ConfigError::Kind::Parse,
                              "line " + std::to_string(line_no) + ": expected key=value, got '" +
                                  std::string(line) + "'");
        const std::string key{detail::trim(line.substr(0, eq))};
        const std::string_view val = detail::trim(line.substr(eq + 1));

        if (key == "scenario") {
            auto id = parse_scenario(val);
            if (!id)
                throw ConfigError(ConfigError::Kind::Parse,
                                  "line " + std::to_string(line_no) + ": unknown scenario '" +
                                      std::string(val) + "'");
            apply_scenario_preset(c, *id); // later keys may override table/harq
            scenario_seen = true;
        } else if (key == "seed") {
            c.seed = detail::parse_uint(val, line_no, key);
        } else if (key == "duration") {
            c.duration_s = detail::parse_double(val, line_no, key);
        } else if (key == "warmup") {
            c.warmup_s = detail::parse_double(val, line_no, key);
        } else if (key == "ss_count") {
            c.ss_count = static_cast<int>(detail::parse_int(val, line_no, key));
        } else if (key == "channel.sigma_db") {
            c.channel.sigma_db = detail::parse_double(val, line_no, key);
        } else if (key == "channel.rho") {
            c.channel.rho = detail::parse_double(val, line_no, key);
        } else if (key == "channel.mean_snr_min_db") {
            c.channel.mean_snr_min_db = detail::parse_double(val, line_no, key);
        } else if (key == "channel.mean_snr_max_db") {
            c.channel.mean_snr_max_db = detail::parse_double(val, line_no, key);
        } else if (key == "channel.distances_m") {
            c.channel.distances_m = detail::parse_double_list(val, line_no, key);
        } else if (key == "channel.frequency_mhz") {
            c.channel.frequency_mhz = detail::parse_double(val, line_no, key);
        } else if (key == "channel.tx_power_w") {
            c.channel.tx_power_w = detail::parse_double(val, line_no, key);
        } else if (key == "channel.ss_antenna_gain_dbi") {
            c.channel.ss_antenna_gain_dbi = detail::parse_double(val, line_no, key);
        } else if (key == "channel.bs_antenna_gain_dbi") {
            c.channel.bs_antenna_gain_dbi = detail::parse_double(val, line_no, key);
        } else if (key == "channel.noise_figure_db") {
            c.channel.noise_figure_db = detail::parse_double(val, line_no, key);
        } else if (key == "channel.noise_bandwidth_mhz") {
            c.channel.noise_bandwidth_mhz = detail::parse_double(val, line_no, key);
        } else if (key == "channel.force_bler") {
            if (val == "none") c.channel.force_bler = ForceBler::None;
            else if (val == "zero") c.channel.force_bler = ForceBler::Zero;
            else if (val == "one") c.channel.force_bler = ForceBler::One;
            else
                throw ConfigError(ConfigError::Kind::Parse,
                                  "line " + std::to_string(line_no) +
                                      ": channel.force_bler must be none|zero|one");
        } else if (key == "amc.table") {
            if (val == "A" || val == "a") c.amc.table = AmcTableId::A;
            else if (val == "B" || val == "b") c.amc.table = AmcTableId::B;
            else if (val == "static") c.amc.table = AmcTableId::StaticQpsk12;
            else if (val.rfind("file:", 0) == 0) {
                c.amc.table = AmcTableId::File;
                c.amc.table_file = std::string(val.substr(5));
            } else
                throw ConfigError(ConfigError::Kind::Parse,
                                  "line " + std::to_string(line_no) +
                                      ": amc.table must be A|B|static|file:<path>");
        } else if (key == "amc.cqi_period") {
            c.amc.cqi_period = static_cast<int>(detail::parse_int(val, line_no, key));
        } else if (key == "harq.enabled") {
            c.harq.enabled = detail::parse_bool(val, line_no, key);
        } else if (key == "harq.max_tx") {
            c.harq.max_tx = static_cast<int>(detail::parse_int(val, line_no, key));
        } else if (key == "harq.rtt_frames") {
            c.harq.rtt_frames = static_cast<int>(detail::parse_int(val, line_no, key));
        } else if (key == "mac.ul_data_symbols") {
            c.mac.ul_data_symbols = static_cast<int>(detail::parse_int(val, line_no, key));
        } else if (key == "mac.frame_ms") {
            c.mac.frame_ms = detail::parse_double(val, line_no, key);
        } else if (key == "traffic.app_kbps") {
            c.traffic.app_kbps = detail::parse_double(val, line_no, key);
        } else if (key == "traffic.payload_bytes") {
            c.traffic.payload_bytes = static_cast<int>(detail::parse_int(val, line_no, key));
        } else if (key == "traffic.header_bytes") {
            c.traffic.header_bytes = static_cast<int>(detail::parse_int(val, line_no, key));
        } else if (key == "tcp.window") {
            c.tcp.window = static_cast<int>(detail::parse_int(val, line_no, key));
        } else if (key == "tcp.rto_ms") {
            c.tcp.rto_ms = detail::parse_double(val, line_no, key);
        } else if (key == "tcp.rto_backoff") {
            c.tcp.rto_backoff = detail::parse_double(val, line_no, key);
        } else if (key == "tcp.rto_max_ms") {
            c.tcp.rto_max_ms = detail::parse_double(val, line_no, key);
        } else {
            throw ConfigError(ConfigError::Kind::Parse,
                              "line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }

    if (!scenario_seen && !base.scenario_preset)
        throw ConfigError(ConfigError::Kind::Parse, "missing required key: scenario");
    validate_config(c);
    return c;
}

/// Convenience wrapper: a document with no surrounding preset.
inline SimConfig load_config(std::string_view text) { return parse_config(text); }

inline SimConfig load_config_file(const std::string& path, const SimConfig& base = SimConfig{}) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError(ConfigError::Kind::Parse, "cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), base);
}

/// Canonical serialization of the effective configuration; digest input and
/// documentation of every knob in one place.
inline std::string canonical_text(const SimConfig& c) {
    std::ostringstream os;
    auto kv = [&](const char* k, auto v) {
        os << k << "=";
        if constexpr (std::is_floating_point_v<decltype(v)>) detail::format_double(os, v);
        else os << v;
        os << "\n";
    };
    kv("scenario", scenario_name(c.scenario));
    kv("seed", c.seed);
    kv("duration", c.duration_s);
    kv("warmup", c.warmup_s);
    kv("ss_count", c.ss_count);
    kv("channel.sigma_db", c.channel.sigma_db);
    kv("channel.rho", c.channel.rho);
    kv("channel.mean_snr_min_db", c.channel.mean_snr_min_db);
    kv("channel.mean_snr_max_db", c.channel.mean_snr_max_db);
    if (!c.channel.distances_m.empty()) {
        os << "channel.distances_m=";
        for (std::size_t i = 0; i < c.channel.distances_m.size(); ++i) {
            if (i) os << ",";
            detail::format_double(os, c.channel.distances_m[i]);
        }
        os << "\n";
    }
    kv("channel.frequency_mhz", c.channel.frequency_mhz);
    kv("channel.tx_power_w", c.channel.tx_power_w);
    kv("channel.ss_antenna_gain_dbi", c.channel.ss_antenna_gain_dbi);
    kv("channel.bs_antenna_gain_dbi", c.channel.bs_antenna_gain_dbi);
    kv("channel.noise_figure_db", c.channel.noise_figure_db);
    kv("channel.noise_bandwidth_mhz", c.channel.noise_bandwidth_mhz);
    kv("channel.force_bler", c.channel.force_bler == ForceBler::None
                                 ? "none"
                                 : (c.channel.force_bler == ForceBler::Zero ? "zero" : "one"));
    switch (c.amc.table) {
        case AmcTableId::A: kv("amc.table", "A"); break;
        case AmcTableId::B: kv("amc.table", "B"); break;
        case AmcTableId::StaticQpsk12: kv("amc.table", "static"); break;
        case AmcTableId::File: kv("amc.table", ("file:" + c.amc.table_file).c_str()); break;
    }
    kv("amc.cqi_period", c.amc.cqi_period);
    kv("harq.enabled", c.harq.enabled ? "true" : "false");
    kv("harq.max_tx", c.harq.max_tx);
    kv("harq.rtt_frames", c.harq.rtt_frames);
    kv("mac.ul_data_symbols", c.mac.ul_data_symbols);
    kv("mac.frame_ms", c.mac.frame_ms);
    kv("traffic.app_kbps", c.traffic.app_kbps);
    kv("traffic.payload_bytes", c.traffic.payload_bytes);
    kv("traffic.header_bytes", c.traffic.header_bytes);
    kv("tcp.window", c.tcp.window);
    kv("tcp.rto_ms", c.tcp.rto_ms);
    kv("tcp.rto_backoff", c.tcp.rto_backoff);
    kv("tcp.rto_max_ms", c.tcp.rto_max_ms);
    return os.str();
}

inline std::string config_digest(const SimConfig& c) { return to_hex(fnv1a64(canonical_text(c))); }

} // namespace ulsim
