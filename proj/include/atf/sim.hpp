#pragma once

#include <cmath>
#include <cstdint>
#include <future>
#include <ostream>
#include <random>
#include <thread>
#include <vector>

#include "atf/battery_chain.hpp"
#include "atf/fading.hpp"
#include "atf/params.hpp"

namespace atf {

enum class BatteryModel { continuous, discrete };

enum class Mode { I = 1, II = 2, III = 3 };

struct SimConfig {
    std::uint64_t blocks = 1'000'000;
    std::uint64_t warmup = 10'000;
    std::uint64_t seed = 1;
    BatteryModel battery_model = BatteryModel::continuous;
};

struct SimResult {
    std::uint64_t counted = 0;       // blocks after warmup
    std::uint64_t outages = 0;
    std::uint64_t mode_counts[3] = {0, 0, 0};
    std::vector<std::uint64_t> level_histogram;  // discrete model only
    double outage_rate = 0.0;
    double standard_error = 0.0;
};

struct StepResult {
    Mode mode;
    double battery;
    bool outage;
};

namespace detail {

inline void finalize(SimResult& r)
{
    if (r.counted > 0) {
        r.outage_rate = static_cast<double>(r.outages) / r.counted;
        r.standard_error =
            std::sqrt(r.outage_rate * (1.0 - r.outage_rate) / r.counted);
    }
}

}  // namespace detail

// Advances the relay battery through one transmission block. Mode and
// battery bookkeeping follow the protocol rules: cooperate only when the
// banked energy reaches the threshold, forward only on a successful decode.
// The discrete model quantizes harvested energy to the level grid and
// consumes exactly eps_T; the continuous model uses the raw amounts. The
// relay forwards at power 2 E_T in both models.
inline StepResult step(double battery, const ChannelDraw& draw,
                       const SystemParams& p, const BatteryGrid& grid,
                       BatteryModel model)
{
    const auto [gamma0, gamma1] = snr_thresholds(p);
    const bool discrete = model == BatteryModel::discrete;
    const double threshold = discrete ? grid.eps_T : p.E_T;
    const double gamma_SR = p.P_S * draw.H_SR / p.N0;

    if (battery < threshold) {  // Mode I: harvest the whole block
        const double harvest = p.eta * p.P_S * draw.H_SR;
        double next;
        if (discrete) {
            const int level = static_cast<int>(
                std::llround(battery / grid.C * grid.L));
            const int gained = discretize_harvest(harvest, grid);
            next = grid.levels[std::min(level + gained, grid.L)];
        } else {
            next = std::min(battery + harvest, grid.C);
        }
        const bool outage = p.P_S * draw.H_SD / p.N0 < gamma1;
        return StepResult{Mode::I, next, outage};
    }

    if (gamma_SR < gamma0) {  // Mode II: decode failed, harvest half block
        const double harvest = p.eta * p.P_S * draw.H_SR / 2.0;
        double next;
        if (discrete) {
            const int level = static_cast<int>(
                std::llround(battery / grid.C * grid.L));
            const int gained = discretize_harvest(harvest, grid);
            next = grid.levels[std::min(level + gained, grid.L)];
        } else {
            next = std::min(battery + harvest, grid.C);
        }
        const bool outage = 2.0 * p.P_S * draw.H_SD / p.N0 < gamma0;
        return StepResult{Mode::II, next, outage};
    }

    // Mode III: forward, spending the threshold energy
    double next;
    if (discrete) {
        const int level =
            static_cast<int>(std::llround(battery / grid.C * grid.L));
        next = grid.levels[level - grid.threshold_level];
    } else {
        next = battery - p.E_T;
    }
    const double snr_D =
        (p.P_S * draw.H_SD + 2.0 * p.E_T * draw.H_RD) / p.N0;
    return StepResult{Mode::III, next, snr_D < gamma0};
}

// Runs cfg.blocks i.i.d. blocks from an empty battery, counting outages,
// modes, and (discrete model) pre-block battery levels after the warmup.
// A fixed seed reproduces the result bit for bit. The optional trace
// stream receives one line per block: block,mode,battery,outage.
inline SimResult run(const SystemParams& p, const LinkGains& g,
                     const BatteryGrid& grid, const SimConfig& cfg,
                     std::ostream* trace = nullptr)
{
    validate(p);
    if (cfg.blocks < 1 || cfg.warmup >= cfg.blocks)
        throw invalid_parameter("sim::run: need blocks >= 1 and warmup < blocks");

    const bool discrete = cfg.battery_model == BatteryModel::discrete;
    SimResult r;
    if (discrete)
        r.level_histogram.assign(grid.L + 1, 0);

    std::mt19937_64 rng(cfg.seed);
    double battery = 0.0;
    for (std::uint64_t m = 0; m < cfg.blocks; ++m) {
        const ChannelDraw draw = sample_channels(p, g, rng);
        const bool counted = m >= cfg.warmup;
        if (counted && discrete) {
            const int level = static_cast<int>(
                std::llround(battery / grid.C * grid.L));
            ++r.level_histogram[level];
        }
        const StepResult s = step(battery, draw, p, grid, cfg.battery_model);
        if (counted) {
            ++r.counted;
            ++r.mode_counts[static_cast<int>(s.mode) - 1];
            r.outages += s.outage ? 1 : 0;
        }
        if (trace)
            *trace << m << ',' << static_cast<int>(s.mode) << ',' << battery
                   << ',' << (s.outage ? 1 : 0) << '\n';
        battery = s.battery;
    }
    detail::finalize(r);
    return r;
}

// Pools two results by adding their counts. Exact integer accumulation, so
// merging is associative and order-independent.
inline SimResult merge(const SimResult& a, const SimResult& b)
{
    if (a.level_histogram.size() != b.level_histogram.size())
        throw invalid_parameter("sim::merge: mismatched level histograms");
    SimResult r = a;
    r.counted += b.counted;
    r.outages += b.outages;
    for (int i = 0; i < 3; ++i) r.mode_counts[i] += b.mode_counts[i];
    for (std::size_t i = 0; i < r.level_histogram.size(); ++i)
        r.level_histogram[i] += b.level_histogram[i];
    detail::finalize(r);
    return r;
}

namespace detail {

// splitmix64 step; spreads replication seeds across the state space.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index)
{
    std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace detail

// Runs independent replications of cfg (each with its own derived seed)
// and pools them. Replications execute concurrently; the merged result is
// identical regardless of completion order.
inline SimResult run_replicated(const SystemParams& p, const LinkGains& g,
                                const BatteryGrid& grid, const SimConfig& cfg,
                                unsigned replications)
{
    if (replications == 0)
        throw invalid_parameter("sim::run_replicated: need >= 1 replication");
    if (replications == 1)
        return run(p, g, grid, cfg);

    std::vector<std::future<SimResult>> futures;
    futures.reserve(replications);
    for (unsigned i = 0; i < replications; ++i) {
        SimConfig rep = cfg;
        rep.seed = detail::mix_seed(cfg.seed, i);
        futures.push_back(std::async(std::launch::async, [=, &g] {
            return run(p, g, grid, rep);
        }));
    }
    SimResult total = futures[0].get();
    for (unsigned i = 1; i < replications; ++i)
        total = merge(total, futures[i].get());
    return total;
}

inline void write_sim_csv_header(std::ostream& os)
{
    os << "outage_rate,standard_error,counted,outages,mode_I,mode_II,mode_III\n";
}

inline void write_sim_csv_row(const SimResult& r, std::ostream& os)
{
    os << r.outage_rate << ',' << r.standard_error << ',' << r.counted << ','
       << r.outages << ',' << r.mode_counts[0] << ',' << r.mode_counts[1]
       << ',' << r.mode_counts[2] << '\n';
}

}  // namespace atf
