#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "atf/outage.hpp"
#include "atf/sim.hpp"

namespace atf {

// Chain solve plus outage assembly for one parameter point.
inline OutageReport analyze(const SystemParams& p)
{
    const LinkGains g = derive_link_gains(p);
    const BatteryGrid grid = make_battery_grid(p.C, p.L, p.E_T);
    const TransitionMatrix m = build_transition_matrix(p, g, grid);
    const StationaryDistribution pi = stationary_distribution(m);
    return atf_outage(p, g, grid, pi);
}

enum class SweepVariable { P_S, E_T, N, L };

enum class SweepMethod { analytic, sim_continuous, sim_discrete, direct };

inline const char* to_string(SweepVariable v)
{
    switch (v) {
        case SweepVariable::P_S: return "P_S";
        case SweepVariable::E_T: return "E_T";
        case SweepVariable::N: return "N";
        case SweepVariable::L: return "L";
    }
    return "?";
}

inline const char* to_string(SweepMethod m)
{
    switch (m) {
        case SweepMethod::analytic: return "analytic";
        case SweepMethod::sim_continuous: return "sim-continuous";
        case SweepMethod::sim_discrete: return "sim-discrete";
        case SweepMethod::direct: return "direct";
    }
    return "?";
}

// One experiment axis: which parameter varies, over which values, and which
// outputs to produce at each point. P_S grids may be given in dBm; the value
// column of the output keeps the grid value as written.
struct SweepSpec {
    SweepVariable variable = SweepVariable::P_S;
    std::vector<double> grid;
    bool grid_in_dbm = false;  // only meaningful for P_S
    SystemParams base;
    std::vector<SweepMethod> methods{SweepMethod::analytic};
};

struct SweepRow {
    double value = 0.0;
    SweepMethod method = SweepMethod::analytic;
    double outage = 0.0;
    double standard_error = 0.0;  // sims only
    double wall_time_s = 0.0;
    std::string error;  // nonempty when the point failed
};

namespace detail {

inline int integral_value(double value, const char* what)
{
    if (value != std::floor(value) || std::fabs(value) > 1e9)
        throw invalid_parameter(std::string(what) + " must be an integer");
    return static_cast<int>(value);
}

inline SystemParams with_variable(const SweepSpec& spec, double value)
{
    SystemParams p = spec.base;
    switch (spec.variable) {
        case SweepVariable::P_S:
            p.P_S = spec.grid_in_dbm ? dbm_to_watts(value) : value;
            break;
        case SweepVariable::E_T:
            p.E_T = value;
            break;
        case SweepVariable::N:
            p.N = integral_value(value, "swept N");
            break;
        case SweepVariable::L:
            p.L = integral_value(value, "swept L");
            break;
    }
    return p;
}

inline SweepRow evaluate_point(const SweepSpec& spec, const SimConfig& sim,
                               unsigned replications, std::size_t index,
                               SweepMethod method)
{
    SweepRow row;
    row.value = spec.grid[index];
    row.method = method;
    const auto start = std::chrono::steady_clock::now();
    try {
        const SystemParams p = with_variable(spec, spec.grid[index]);
        validate(p);
        switch (method) {
            case SweepMethod::analytic:
                row.outage = analyze(p).p_out;
                break;
            case SweepMethod::direct:
                row.outage = direct_outage(p, derive_link_gains(p));
                break;
            case SweepMethod::sim_continuous:
            case SweepMethod::sim_discrete: {
                SimConfig cfg = sim;
                cfg.battery_model = method == SweepMethod::sim_discrete
                                        ? BatteryModel::discrete
                                        : BatteryModel::continuous;
                // distinct stream per (point, method), stable across runs
                cfg.seed = mix_seed(sim.seed,
                                    index * 16 + static_cast<int>(method));
                const LinkGains g = derive_link_gains(p);
                const BatteryGrid grid = make_battery_grid(p.C, p.L, p.E_T);
                const SimResult r = run_replicated(p, g, grid, cfg, replications);
                row.outage = r.outage_rate;
                row.standard_error = r.standard_error;
                break;
            }
        }
    } catch (const std::exception& e) {
        row.error = e.what();
    }
    row.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    return row;
}

}  // namespace detail

// Evaluates every (grid point, method) pair. Points run in parallel across
// workers; failures become error rows and the sweep continues. Rows come
// back in (grid, method) order regardless of scheduling.
inline std::vector<SweepRow> sweep(const SweepSpec& spec, const SimConfig& sim,
                                   unsigned replications = 1,
                                   unsigned workers = 0)
{
    if (spec.grid.empty())
        throw invalid_parameter("sweep: grid must be nonempty");
    for (std::size_t i = 1; i < spec.grid.size(); ++i)
        if (!(spec.grid[i] > spec.grid[i - 1]))
            throw invalid_parameter("sweep: grid must be strictly increasing");

    struct Task { std::size_t point; SweepMethod method; };
    std::vector<Task> tasks;
    for (std::size_t i = 0; i < spec.grid.size(); ++i)
        for (SweepMethod m : spec.methods)
            tasks.push_back({i, m});

    std::vector<SweepRow> rows(tasks.size());
    if (workers == 0)
        workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, tasks.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t t = next.fetch_add(1);
            if (t >= tasks.size()) return;
            rows[t] = detail::evaluate_point(spec, sim, replications,
                                             tasks[t].point, tasks[t].method);
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    return rows;
}

inline void write_sweep_csv(const SweepSpec& spec,
                            const std::vector<SweepRow>& rows,
                            std::ostream& os)
{
    os << std::setprecision(12);
    os << "variable,value,method,outage,standard_error,wall_time_s,error\n";
    for (const SweepRow& r : rows) {
        os << to_string(spec.variable) << ',' << r.value << ','
           << to_string(r.method) << ',';
        if (r.error.empty()) {
            os << r.outage << ',';
            if (r.method == SweepMethod::sim_continuous ||
                r.method == SweepMethod::sim_discrete)
                os << r.standard_error;
        } else {
            os << ',';
        }
        os << ',' << r.wall_time_s << ',' << r.error << '\n';
    }
}

struct OptimalEt {
    double E_T = 0.0;
    OutageReport report;
};

// Exhaustive search of the discrete energy levels eps_1..eps_L for the
// threshold minimizing the analytic outage. Ties go to the smaller E_T.
inline OptimalEt optimal_et(const SystemParams& base)
{
    validate(base);
    const BatteryGrid grid = make_battery_grid(base.C, base.L, base.C);
    OptimalEt best;
    bool first = true;
    for (int k = 1; k <= base.L; ++k) {
        SystemParams p = base;
        p.E_T = grid.levels[k];
        const OutageReport r = analyze(p);
        if (first || r.p_out < best.report.p_out) {
            best.E_T = p.E_T;
            best.report = r;
            first = false;
        }
    }
    return best;
}

struct CompareRow {
    double value = 0.0;  // grid value as written (dBm when grid_in_dbm)
    double direct = 0.0;
    double atf_optimal = 0.0;
    double ratio = 0.0;
    double E_T_opt = 0.0;
    std::string error;
};

// Direct transmission versus the protocol at the per-point optimal E_T,
// across a P_S grid.
inline std::vector<CompareRow> compare_direct(const SystemParams& base,
                                              const std::vector<double>& ps_grid,
                                              bool grid_in_dbm = true,
                                              unsigned workers = 0)
{
    if (ps_grid.empty())
        throw invalid_parameter("compare_direct: grid must be nonempty");
    std::vector<CompareRow> rows(ps_grid.size());
    if (workers == 0)
        workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, ps_grid.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= ps_grid.size()) return;
            CompareRow& row = rows[i];
            row.value = ps_grid[i];
            try {
                SystemParams p = base;
                p.P_S = grid_in_dbm ? dbm_to_watts(ps_grid[i]) : ps_grid[i];
                validate(p);
                row.direct = direct_outage(p, derive_link_gains(p));
                const OptimalEt opt = optimal_et(p);
                row.atf_optimal = opt.report.p_out;
                row.E_T_opt = opt.E_T;
                row.ratio = row.direct > 0.0 ? row.atf_optimal / row.direct
                                             : 1.0;
            } catch (const std::exception& e) {
                row.error = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    return rows;
}

inline void write_compare_csv(const std::vector<CompareRow>& rows,
                              std::ostream& os, bool in_dbm = true)
{
    os << std::setprecision(12);
    os << (in_dbm ? "P_S_dbm" : "P_S_w")
       << ",direct_outage,atf_outage_optimal_et,ratio,E_T_opt,error\n";
    for (const CompareRow& r : rows) {
        os << r.value << ',';
        if (r.error.empty())
            os << r.direct << ',' << r.atf_optimal << ',' << r.ratio << ','
               << r.E_T_opt << ',';
        else
            os << ",,,,";
        os << r.error << '\n';
    }
}

}  // namespace atf
