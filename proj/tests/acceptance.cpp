// Acceptance suite: runs the four link-adaptation scenarios end to end and
// checks every release criterion at its stated tolerance, one line per check.
// Exit code 0 only if every criterion passes.

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <future>
#include <string>
#include <vector>

#include "ulsim/engine.hpp"

using namespace ulsim;

namespace {

int g_failures = 0;

void report(const std::string& criterion, bool pass, const std::string& detail) {
    if (!pass) ++g_failures;
    std::printf("[%s] %s: %s\n", pass ? "PASS" : "FAIL", criterion.c_str(), detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list args;
    va_start(args, f);
    std::vsnprintf(buf, sizeof(buf), f, args);
    va_end(args);
    return buf;
}

constexpr std::uint64_t kSeed = 1;

struct ScenarioRun {
    ScenarioSummary summary;
    RunTotals totals;
};

struct TotalsProbe : FrameProbe {
    RunTotals totals;
    void on_run_end(const RunTotals& t) override { totals = t; }
};

ScenarioRun run_scenario(ScenarioId id, double duration_s, std::uint64_t seed,
                         ForceBler force = ForceBler::None) {
    SimConfig c = build_scenario(id);
    c.seed = seed;
    c.duration_s = duration_s;
    c.warmup_s = 30.0;
    c.channel.force_bler = force;
    TotalsProbe probe;
    const std::vector<StatsRecord> records = run(c, &probe);
    ScenarioSummary s = summarize(records, c.warmup_s);
    s.scenario = c.scenario;
    s.seed = c.seed;
    s.config_digest = config_digest(c);
    return {s, probe.totals};
}

// Independent oracle for the HARQ residual: enumerate the success/fail
// outcome tree, recomputing the per-attempt BLER from the combined SNR.
double attempt_tree_failure(const McsProfile& mcs, double snr_db, int max_tx) {
    const double per_copy = db_to_linear(snr_db);
    double fail_mass = 0.0;
    double path = 1.0;
    double acc = 0.0;
    for (int attempt = 1; attempt <= max_tx; ++attempt) {
        acc += per_copy;
        const double p_fail = bler(mcs, linear_to_db(acc));
        if (attempt == max_tx) {
            fail_mass = path * p_fail;
        } else {
            path *= p_fail;
        }
    }
    return fail_mass;
}

void criterion_1_capacity() {
    const FrameBudget budget{2950, 0.005};
    const double capacity = uplink_capacity_bps(budget, mcs_profile(0));
    const bool pass = std::abs(capacity - 590000.0) <= 0.005 * 590000.0;
    report("criterion 1 (capacity identity)", pass,
           fmt("uplink_capacity(QPSK 1/2) = %.0f bps, expected 590000 +- 0.5%%", capacity));
}

void criterion_2_qpsk(const ScenarioSummary& s1) {
    const bool load_ok = std::abs(s1.offered_load_bps - 480000.0) <= 0.02 * 480000.0;
    const bool thpt_ok = std::abs(s1.mac_throughput_bps - 480000.0) <= 0.02 * 480000.0;
    const bool usage_ok = std::abs(s1.ul_usage_pct - 81.0) <= 5.0;
    report("criterion 2 (scenario 1 load)", load_ok && thpt_ok,
           fmt("offered = %.0f bps, throughput = %.0f bps, expected 480000 +- 2%%",
               s1.offered_load_bps, s1.mac_throughput_bps));
    report("criterion 2 (scenario 1 usage)", usage_ok,
           fmt("UL usage = %.2f %%, expected 81 +- 5 points", s1.ul_usage_pct));
}

void criterion_3_amc_a(const ScenarioSummary& s1, const ScenarioSummary& s2,
                       const ScenarioSummary& s3) {
    const bool usage_ok = std::abs(s2.ul_usage_pct - 40.0) <= 10.0 &&
                          s2.ul_usage_pct < s1.ul_usage_pct;
    const bool delay_ok = s2.mean_wimax_delay_s < s1.mean_wimax_delay_s;
    const bool bler_ok = s2.pre_harq_bler > s3.pre_harq_bler;
    report("criterion 3 (scenario 2 usage)", usage_ok,
           fmt("UL usage = %.2f %%, expected 40 +- 10 and below scenario 1's %.2f %%",
               s2.ul_usage_pct, s1.ul_usage_pct));
    report("criterion 3 (scenario 2 delay)", delay_ok,
           fmt("delay = %.3f ms, expected below scenario 1's %.3f ms",
               s2.mean_wimax_delay_s * 1e3, s1.mean_wimax_delay_s * 1e3));
    report("criterion 3 (scenario 2 BLER)", bler_ok,
           fmt("BLER = %.4f, expected above scenario 3's %.5f", s2.pre_harq_bler,
               s3.pre_harq_bler));
}

void criterion_4_amc_b(const ScenarioSummary& s1, const ScenarioSummary& s2,
                       const ScenarioSummary& s3) {
    const bool bler_ok = s3.pre_harq_bler <= s2.pre_harq_bler / 10.0;
    const bool usage_ok = s3.ul_usage_pct > s2.ul_usage_pct;
    const bool order_ok = s2.mean_wimax_delay_s < s3.mean_wimax_delay_s &&
                          s3.mean_wimax_delay_s < s1.mean_wimax_delay_s;
    report("criterion 4 (BLER decade gap)", bler_ok,
           fmt("BLER(B) = %.5f <= BLER(A)/10 = %.5f", s3.pre_harq_bler,
               s2.pre_harq_bler / 10.0));
    report("criterion 4 (usage ordering)", usage_ok,
           fmt("usage(B) = %.2f %% > usage(A) = %.2f %%", s3.ul_usage_pct, s2.ul_usage_pct));
    report("criterion 4 (delay ordering)", order_ok,
           fmt("delay A %.3f < B %.3f < QPSK %.3f ms", s2.mean_wimax_delay_s * 1e3,
               s3.mean_wimax_delay_s * 1e3, s1.mean_wimax_delay_s * 1e3));
}

void criterion_5_harq(const ScenarioSummary& s1, const ScenarioSummary& s2,
                      const ScenarioSummary& s3, const ScenarioSummary& s4) {
    const bool usage_ok = std::abs(s4.ul_usage_pct - 40.0) <= 10.0 &&
                          std::abs(s4.ul_usage_pct - s2.ul_usage_pct) <= 3.0;
    const bool delay_ok = s4.mean_wimax_delay_s <= s3.mean_wimax_delay_s;
    const bool loss_ok = s4.post_harq_loss_rate <= s4.pre_harq_bler / 10.0;

    const ComparisonReport rep = compare({s1, s2, s3, s4});
    bool pareto = false;
    for (const ComparisonRow& r : rep.rows)
        if (r.scenario == ScenarioId::AmcAHarq) pareto = r.pareto_optimal;

    report("criterion 5 (scenario 4 usage)", usage_ok,
           fmt("UL usage = %.2f %%, expected 40 +- 10 and within 3 points of scenario 2's %.2f %%",
               s4.ul_usage_pct, s2.ul_usage_pct));
    report("criterion 5 (scenario 4 delay)", delay_ok,
           fmt("delay = %.3f ms <= scenario 3's %.3f ms", s4.mean_wimax_delay_s * 1e3,
               s3.mean_wimax_delay_s * 1e3));
    report("criterion 5 (HARQ loss factor)", loss_ok,
           fmt("post-HARQ loss = %.3e <= pre-HARQ BLER/10 = %.3e", s4.post_harq_loss_rate,
               s4.pre_harq_bler / 10.0));
    report("criterion 5 (Pareto flag)", pareto,
           pareto ? "compare() flags amc-a-harq Pareto-optimal"
                  : "compare() did not flag amc-a-harq");
}

void criterion_6_oracles() {
    bool bler_ok = true;
    std::string bler_detail = "every MCS within binomial 3 sigma at 5 SNR points";
    RandomStream streams(20250, 1);
    Substream& rng = streams.error_draws(0);
    const int n = 100000;
    for (int mi = 0; mi < kMcsCount && bler_ok; ++mi) {
        const McsProfile& m = mcs_profile(mi);
        for (double off : {-3.0, -1.0, 0.0, 1.5, 3.0}) {
            const double p = bler(m, m.bler_anchor_db + off);
            int hits = 0;
            for (int i = 0; i < n; ++i)
                if (draw_block_error(p, rng)) ++hits;
            const double p_hat = static_cast<double>(hits) / n;
            const double sigma = std::sqrt(p * (1.0 - p) / n);
            if (std::abs(p_hat - p) > 3.0 * sigma + 1e-12) {
                bler_ok = false;
                bler_detail = fmt("mcs %d offset %.1f: got %.5f expected %.5f (3s = %.5f)", mi,
                                  off, p_hat, p, 3.0 * sigma);
                break;
            }
        }
    }
    report("criterion 6 (BLER Monte-Carlo)", bler_ok, bler_detail);

    struct Point {
        int mcs;
        double offset;
        int max_tx;
    };
    const Point points[] = {{0, 0.0, 2}, {0, -3.0, 2}, {0, -6.0, 4},
                            {0, -3.0, 4}, {3, 0.0, 2}, {6, -6.0, 4}};
    bool harq_ok = true;
    std::string harq_detail = "HARQ Monte-Carlo matches the attempt-tree enumeration at 6 points";
    for (const Point& pt : points) {
        const McsProfile& m = mcs_profile(pt.mcs);
        const double snr = m.bler_anchor_db + pt.offset;
        const double p_tree = attempt_tree_failure(m, snr, pt.max_tx);
        const double p_closed = residual_bler(m, snr, pt.max_tx);
        if (std::abs(p_tree - p_closed) > 1e-12 * std::max(1.0, p_tree)) {
            harq_ok = false;
            harq_detail = fmt("analytic mismatch at mcs %d", pt.mcs);
            break;
        }
        const int trials = 200000;
        int failures = 0;
        for (int i = 0; i < trials; ++i) {
            HarqProcess p;
            p.mcs_index = pt.mcs;
            p.max_tx = pt.max_tx;
            p.rtt_frames = 1;
            std::int64_t frame = 0;
            while (p.status == HarqStatus::Pending) {
                frame = p.next_tx_frame;
                p = harq_step(p, snr, m, rng, frame);
            }
            if (p.status == HarqStatus::Failed) ++failures;
        }
        const double p_hat = static_cast<double>(failures) / trials;
        const double sigma = std::sqrt(p_tree * (1.0 - p_tree) / trials);
        if (std::abs(p_hat - p_tree) > 3.0 * sigma + 1e-12) {
            harq_ok = false;
            harq_detail = fmt("mcs %d offset %.1f max_tx %d: got %.3e expected %.3e (3s = %.3e)",
                              pt.mcs, pt.offset, pt.max_tx, p_hat, p_tree, 3.0 * sigma);
            break;
        }
    }
    report("criterion 6 (HARQ Monte-Carlo)", harq_ok, harq_detail);
}

void criterion_7_properties() {
    Substream rng(777);

    // AMC hysteresis fixed point and monotonicity over randomized sweeps.
    bool amc_ok = true;
    for (const AmcTable* t : {&amc_table_a(), &amc_table_b()}) {
        for (int iter = 0; iter < 5000 && amc_ok; ++iter) {
            const int i = static_cast<int>(rng.uniform01() * t->row_count()) % t->row_count();
            const double lo = t->row(i).exit_db;
            const double hi = i + 1 < t->row_count() ? t->row(i + 1).entry_db : lo + 15.0;
            const double snr = lo + (hi - lo) * (0.001 + 0.998 * rng.uniform01());
            if (amc_select(*t, i, snr) != i) amc_ok = false;
            const int cur = static_cast<int>(rng.uniform01() * t->row_count()) % t->row_count();
            const double s1 = -25.0 + 55.0 * rng.uniform01();
            const double s2 = -25.0 + 55.0 * rng.uniform01();
            if (amc_select(*t, cur, std::min(s1, s2)) > amc_select(*t, cur, std::max(s1, s2)))
                amc_ok = false;
        }
    }
    report("criterion 7 (AMC hysteresis/monotonicity)", amc_ok,
           "fixed point in hysteresis band and monotone selection over random sweeps");

    // Received SNR linearity in transmit power.
    bool gamma_ok = true;
    for (int iter = 0; iter < 5000 && gamma_ok; ++iter) {
        LinkBudget b;
        b.tx_power_w = 1e-3 + rng.uniform01();
        b.gamma_per_watt = db_to_linear(-30.0 + 80.0 * rng.uniform01());
        if (b.gamma_r_linear() != b.tx_power_w * b.gamma_per_watt) gamma_ok = false;
    }
    report("criterion 7 (gamma_r = P_t * gamma)", gamma_ok,
           "exact product over 5000 random budgets");

    // Chase combining gain identity.
    bool combine_ok = true;
    for (int iter = 0; iter < 2000 && combine_ok; ++iter) {
        const double snr = -5.0 + 25.0 * rng.uniform01();
        double acc = 0.0;
        for (int k = 1; k <= 6; ++k) {
            acc = combine(acc, snr);
            if (std::abs(linear_to_db(acc) - (snr + 10.0 * std::log10(k))) > 1e-9)
                combine_ok = false;
        }
    }
    report("criterion 7 (combining +10log10(k))", combine_ok,
           "k equal-SNR copies gain exactly 10*log10(k) dB");

    // Per-frame symbol conservation across all scenarios and 10 seeds. The
    // engine aborts the run if any frame exceeds its budget; usage <= 100 is
    // re-checked from the records.
    bool budget_ok = true;
    for (std::uint64_t seed = 1; seed <= 10 && budget_ok; ++seed) {
        for (ScenarioId id : {ScenarioId::Qpsk12, ScenarioId::AmcA, ScenarioId::AmcB,
                              ScenarioId::AmcAHarq}) {
            SimConfig c = build_scenario(id);
            c.seed = seed;
            c.duration_s = 10.0;
            c.warmup_s = 1.0;
            for (const StatsRecord& r : run(c))
                if (r.ul_usage_pct < 0.0 || r.ul_usage_pct > 100.0) budget_ok = false;
        }
    }
    report("criterion 7 (symbol conservation)", budget_ok,
           "no frame exceeds the UL budget over 4 scenarios x 10 seeds");

    // Determinism: byte-identical CSVs for an identical (seed, config).
    SimConfig det = build_scenario(ScenarioId::AmcAHarq);
    det.seed = 99;
    det.duration_s = 20.0;
    det.warmup_s = 2.0;
    const bool det_ok = emit_csv_string(run(det)) == emit_csv_string(run(det));
    report("criterion 7 (determinism)", det_ok, "two identical runs emit byte-identical CSV");

    // Cross-scenario channel invariance under a shared seed.
    struct SnrProbe : FrameProbe {
        std::vector<std::vector<double>> snr;
        void on_frame(std::int64_t, std::span<const double> s, std::span<const int>) override {
            snr.emplace_back(s.begin(), s.end());
        }
    };
    std::vector<SnrProbe> probes(4);
    int pi = 0;
    for (ScenarioId id :
         {ScenarioId::Qpsk12, ScenarioId::AmcA, ScenarioId::AmcB, ScenarioId::AmcAHarq}) {
        SimConfig c = build_scenario(id);
        c.seed = 17;
        c.duration_s = 10.0;
        c.warmup_s = 1.0;
        run(c, &probes[static_cast<std::size_t>(pi++)]);
    }
    const bool invariant = probes[1].snr == probes[0].snr && probes[2].snr == probes[0].snr &&
                           probes[3].snr == probes[0].snr;
    report("criterion 7 (channel invariance)", invariant,
           "per-SS SNR traces identical across the four scenarios at a shared seed");
}

void criterion_8_degenerate() {
    // BLER forced to zero: all four scenarios converge to the offered 480 kbps
    // and transport never retransmits.
    std::vector<std::future<ScenarioRun>> futs;
    const ScenarioId ids[4] = {ScenarioId::Qpsk12, ScenarioId::AmcA, ScenarioId::AmcB,
                               ScenarioId::AmcAHarq};
    for (ScenarioId id : ids)
        futs.push_back(std::async(std::launch::async,
                                  [id] { return run_scenario(id, 120.0, kSeed, ForceBler::Zero); }));
    double lo = 1e18, hi = 0.0;
    bool zero_ok = true;
    std::int64_t rto_total = 0;
    for (auto& f : futs) {
        const ScenarioRun r = f.get();
        lo = std::min(lo, r.summary.mac_throughput_bps);
        hi = std::max(hi, r.summary.mac_throughput_bps);
        rto_total += r.totals.rto_firings;
        if (std::abs(r.summary.mac_throughput_bps - 480000.0) > 0.01 * 480000.0) zero_ok = false;
        if (r.summary.post_harq_loss_rate != 0.0) zero_ok = false;
    }
    if (hi - lo > 1000.0) zero_ok = false;
    if (rto_total != 0) zero_ok = false;
    report("criterion 8 (BLER forced to 0)", zero_ok,
           fmt("throughputs within [%.0f, %.0f] bps of 480000, spread %.0f bps, RTO firings %lld",
               lo, hi, hi - lo, static_cast<long long>(rto_total)));

    // BLER forced to one without HARQ: zero goodput.
    bool one_ok = true;
    double worst = 0.0;
    for (ScenarioId id : {ScenarioId::Qpsk12, ScenarioId::AmcA, ScenarioId::AmcB}) {
        const ScenarioRun r = run_scenario(id, 60.0, kSeed, ForceBler::One);
        worst = std::max(worst, r.summary.mac_throughput_bps);
        if (r.summary.mac_throughput_bps != 0.0 || r.totals.segments_delivered != 0)
            one_ok = false;
    }
    report("criterion 8 (BLER forced to 1, no HARQ)", one_ok,
           fmt("max goodput across scenarios 1-3 = %.0f bps, expected 0", worst));
}

} // namespace

int main() {
    std::printf("acceptance suite: seed %llu, 300 s scenarios, 30 s warm-up\n",
                static_cast<unsigned long long>(kSeed));

    criterion_1_capacity();

    std::vector<std::future<ScenarioRun>> futs;
    const ScenarioId ids[4] = {ScenarioId::Qpsk12, ScenarioId::AmcA, ScenarioId::AmcB,
                               ScenarioId::AmcAHarq};
    for (ScenarioId id : ids)
        futs.push_back(std::async(std::launch::async, [id] { return run_scenario(id, 300.0, kSeed); }));
    const ScenarioSummary s1 = futs[0].get().summary;
    const ScenarioSummary s2 = futs[1].get().summary;
    const ScenarioSummary s3 = futs[2].get().summary;
    const ScenarioSummary s4 = futs[3].get().summary;

    criterion_2_qpsk(s1);
    criterion_3_amc_a(s1, s2, s3);
    criterion_4_amc_b(s1, s2, s3);
    criterion_5_harq(s1, s2, s3, s4);
    criterion_6_oracles();
    criterion_7_properties();
    criterion_8_degenerate();

    if (g_failures == 0) {
        std::printf("acceptance: all criteria passed\n");
        return 0;
    }
    std::printf("acceptance: %d check(s) failed\n", g_failures);
    return 1;
}
