// Acceptance suite: end-to-end checks of the analytic engine against the
// Monte Carlo simulator, the special functions against independent oracles,
// and the regime behavior of the three reference experiments. Prints one
// pass/fail line per criterion; the exit code is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "atf/atf.hpp"
#include "oracles.hpp"

using namespace atf;

namespace {

struct Check {
    bool ok = true;
    std::ostringstream detail;

    void require(bool cond, const std::string& what)
    {
        if (!cond) {
            ok = false;
            detail << (detail.str().empty() ? "" : "; ") << what;
        }
    }
};

SystemParams baseline_params()
{
    SystemParams p;  // defaults are the reference configuration
    return p;
}

double tv_distance(const std::vector<std::uint64_t>& hist, std::uint64_t n,
                   const std::vector<double>& pi)
{
    double tv = 0.0;
    for (std::size_t i = 0; i < pi.size(); ++i)
        tv += std::fabs(static_cast<double>(hist[i]) / n - pi[i]);
    return 0.5 * tv;
}

// ---- criterion 1: analytic vs continuous-battery simulation -------------

void criterion_convergence(Check& c)
{
    SystemParams p = baseline_params();
    const LinkGains g = derive_link_gains(p);
    const BatteryGrid grid = make_battery_grid(p.C, p.L, p.E_T);

    SimConfig cfg;
    cfg.blocks = 1'000'000;
    cfg.warmup = 10'000;
    cfg.seed = 1001;
    cfg.battery_model = BatteryModel::continuous;
    const SimResult sim = run(p, g, grid, cfg);

    const double analytic100 = analyze(p).p_out;
    SystemParams p10 = p;
    p10.L = 10;
    const double analytic10 = analyze(p10).p_out;

    const double tol = std::max(3.0 * sim.standard_error, 0.10 * analytic100);
    c.detail << "sim=" << sim.outage_rate << " analytic(L=100)=" << analytic100
             << " analytic(L=10)=" << analytic10;
    c.require(std::fabs(analytic100 - sim.outage_rate) <= tol,
              "analytic(L=100) disagrees with the simulation");
    c.require(std::fabs(analytic100 - sim.outage_rate) <
                  std::fabs(analytic10 - sim.outage_rate),
              "L=100 is not closer to the simulation than L=10");
}

// ---- criterion 2: discrete-chain exactness -------------------------------

void criterion_discrete_exactness(Check& c)
{
    for (int L : {4, 10}) {
        SystemParams p = baseline_params();
        p.L = L;
        const LinkGains g = derive_link_gains(p);
        const BatteryGrid grid = make_battery_grid(p.C, p.L, p.E_T);
        const TransitionMatrix m = build_transition_matrix(p, g, grid);
        const StationaryDistribution pi = stationary_distribution(m);

        SimConfig cfg;
        cfg.blocks = 1'000'000;
        cfg.warmup = 10'000;
        cfg.seed = 2000 + L;
        cfg.battery_model = BatteryModel::discrete;
        const SimResult sim = run(p, g, grid, cfg);

        const double tv = tv_distance(sim.level_histogram, sim.counted, pi.pi);
        const double analytic = atf_outage(p, g, grid, pi).p_out;
        c.detail << " L=" << L << ": tv=" << tv << " sim=" << sim.outage_rate
                 << " analytic=" << analytic;
        c.require(tv < 0.01, "level histogram far from pi at L=" +
                                 std::to_string(L));
        c.require(std::fabs(sim.outage_rate - analytic) <=
                      3.0 * sim.standard_error + 1e-12,
                  "simulated outage disagrees at L=" + std::to_string(L));
    }
}

// ---- criterion 3: row-sum partition check --------------------------------

void criterion_row_sums(Check& c)
{
    std::mt19937_64 rng(3003);
    auto uniform = [&](double lo, double hi) {
        return lo + (hi - lo) * oracle::uniform01(rng);
    };
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        SystemParams p;
        p.P_S = std::pow(10.0, uniform(-4.0, 1.0));
        p.N0 = std::pow(10.0, uniform(-12.0, -6.0));
        p.eta = uniform(0.05, 1.0);
        p.R = uniform(0.0, 3.0);
        p.N = 1 + static_cast<int>(uniform(0.0, 8.0));
        p.K = uniform(0.0, 15.0);
        p.d_SR = uniform(1.0, 20.0);
        p.alpha = uniform(2.0, 5.0);
        p.C = std::pow(10.0, uniform(-5.0, -1.0));
        p.L = 1 + static_cast<int>(uniform(0.0, 50.0));
        p.E_T = p.C * uniform(1e-9, 1.0);
        const LinkGains g = derive_link_gains(p);
        const BatteryGrid grid = make_battery_grid(p.C, p.L, p.E_T);
        const TransitionMatrix m = build_transition_matrix(p, g, grid);
        for (int i = 0; i <= p.L; ++i) {
            double sum = 0.0;
            for (int j = 0; j <= p.L; ++j) sum += m.at(i, j);
            worst = std::max(worst, std::fabs(sum - 1.0));
        }
    }
    c.detail << "200 draws, worst row-sum deviation " << worst;
    c.require(worst <= 1e-9, "a transition row does not sum to 1");
}

// ---- criterion 4: closed-form sum-SNR CDF vs sampling ---------------------

void criterion_sum_snr(Check& c)
{
    std::mt19937_64 rng(4004);
    auto uniform = [&](double lo, double hi) {
        return lo + (hi - lo) * oracle::uniform01(rng);
    };
    int failures = 0;
    double worst_z = 0.0;
    for (int point = 0; point < 20; ++point) {
        const double gs = std::pow(10.0, uniform(-1.0, 2.0));
        const double gr = std::pow(10.0, uniform(-1.0, 2.0));
        const int n_ant = 1 + static_cast<int>(uniform(0.0, 8.0));
        const double gamma = (gs + gr) * uniform(0.2, 2.0);

        const std::size_t n = 10'000'000;
        std::size_t hits = 0;
        for (std::size_t i = 0; i < n; ++i) {
            double rd = 0.0;
            for (int k = 0; k < n_ant; ++k)
                rd = std::max(rd, oracle::exponential(rng, gr));
            if (oracle::exponential(rng, gs) + rd < gamma) ++hits;
        }
        const double est = static_cast<double>(hits) / n;
        const double se = std::sqrt(std::max(est * (1.0 - est), 1e-12) / n);
        const double closed = sum_snr_cdf(gamma, gs, gr, n_ant);
        const double z = std::fabs(closed - est) / se;
        worst_z = std::max(worst_z, z);
        if (z > 3.0) ++failures;
    }
    c.detail << "20 sampled points, worst |z|=" << worst_z;
    c.require(failures == 0, std::to_string(failures) +
                                 " points beyond 3 standard errors");

    // N = 1 hand integral
    double worst_gap = 0.0;
    for (double gamma : {0.3, 1.0, 4.0})
        for (double s : {0.5, 3.0})
            for (double r : {1.1, 7.0})
                worst_gap = std::max(
                    worst_gap,
                    std::fabs(sum_snr_cdf(gamma, s, r, 1) -
                              oracle::two_exponential_sum_cdf(gamma, s, r)));
    c.detail << " hand-integral gap=" << worst_gap;
    c.require(worst_gap < 1e-10, "N=1 identity beyond 1e-10");

    // deliberately near-singular term: (k+1) gbar_SD == gbar_RD at k = 1
    const double base = sum_snr_cdf(1.5, 1.0, 2.0, 3);
    c.require(std::isfinite(base) && base >= 0.0 && base <= 1.0,
              "singular point not finite");
    for (double rel : {-1e-7, 1e-7}) {
        const double shifted = sum_snr_cdf(1.5, 1.0, 2.0 * (1.0 + rel), 3);
        c.require(std::fabs(shifted - base) < 1e-6,
                  "discontinuity under perturbation of gbar_RD");
    }
}

// ---- criterion 5: special-function correctness ----------------------------

void criterion_special_functions(Check& c)
{
    // 100-point grid against quadrature of the defining integral
    double worst = 0.0;
    for (int order : {1, 2, 3, 4, 8})
        for (double a : {0.1, 0.5, 1.0, 2.0})
            for (double b : {0.2, 0.8, 1.5, 3.0, 6.0})
                worst = std::max(worst,
                                 std::fabs(marcum_q(order, a, b) -
                                           oracle::marcum_q_quadrature(order, a, b)));
    c.detail << "quadrature gap=" << worst;
    c.require(worst < 1e-9, "marcum_q beyond 1e-9 of the quadrature oracle");

    for (int order : {1, 2, 5})
        for (double a : {0.0, 1.0, 3.0})
            c.require(std::fabs(marcum_q(order, a, 0.0) - 1.0) <= 1e-12,
                      "Q_N(a,0) != 1");
    for (double b : {0.3, 1.0, 2.5})
        c.require(std::fabs(marcum_q(1, 0.0, b) - std::exp(-0.5 * b * b)) <=
                      1e-12,
                  "Q_1(0,b) != exp(-b^2/2)");

    // Kolmogorov-Smirnov against 1e6 sampled sums of Rician element powers
    const struct { int N; double K; } cases[] = {{1, 0.0}, {2, 10.0}, {6, 10.0}};
    for (const auto& cs : cases) {
        SystemParams p = baseline_params();
        p.N = cs.N;
        p.K = cs.K;
        const LinkGains g = derive_link_gains(p);
        std::mt19937_64 rng(5000 + cs.N);
        const std::size_t n = 1'000'000;
        std::vector<double> samples(n);
        for (std::size_t i = 0; i < n; ++i)
            samples[i] = sample_channels(p, g, rng).H_SR;
        const RicianSumSpec spec{p.N, p.K, g.Omega_SR};
        const double d = oracle::ks_statistic(
            std::move(samples), [&](double x) { return cdf_H_SR(spec, x); });
        c.detail << " KS(N=" << cs.N << ",K=" << cs.K << ")=" << d;
        c.require(d < oracle::ks_critical_1pct(n),
                  "KS test rejects at the 1% level");
    }
}

// ---- criterion 6: threshold-energy regime behavior ------------------------

void criterion_threshold_regimes(Check& c)
{
    SystemParams p30 = baseline_params();
    p30.P_S = dbm_to_watts(30.0);
    SystemParams p20 = p30;
    p20.P_S = dbm_to_watts(20.0);
    SystemParams p30n6 = p30;
    p30n6.N = 6;

    const OptimalEt o30 = optimal_et(p30);
    const OptimalEt o20 = optimal_et(p20);
    const OptimalEt o30n6 = optimal_et(p30n6);

    const BatteryGrid grid = make_battery_grid(p30.C, p30.L, p30.C);
    SystemParams lo = p30, hi = p30;
    lo.E_T = grid.levels[1];
    hi.E_T = grid.levels[p30.L];
    const double out_lo = analyze(lo).p_out;
    const double out_hi = analyze(hi).p_out;

    c.detail << "E_T*(30dBm)=" << o30.E_T << " E_T*(20dBm)=" << o20.E_T
             << " E_T*(N=6)=" << o30n6.E_T << " ends=(" << out_lo << ","
             << out_hi << ") best=" << o30.report.p_out;
    c.require(o30.report.p_out < out_lo && o30.report.p_out < out_hi,
              "minimizer is not interior");
    c.require(o30.E_T >= o20.E_T, "optimum did not shift right with power");
    c.require(o30n6.E_T <= o30.E_T, "more antennas did not lower the optimum");
}

// ---- criterion 7: comparison against direct transmission ------------------

void criterion_direct_comparison(Check& c)
{
    std::vector<double> ps_grid;
    for (double v = 10.0; v <= 36.0; v += 2.0) ps_grid.push_back(v);

    double prev_top_ratio = 2.0;
    for (int n : {2, 4, 6}) {
        SystemParams base = baseline_params();
        base.N = n;
        const auto rows = compare_direct(base, ps_grid);
        for (const auto& row : rows) {
            if (!row.error.empty()) {
                c.require(false, "point failed: " + row.error);
                continue;
            }
            if (row.value >= 26.0)
                c.require(row.atf_optimal <= row.direct,
                          "ATF worse than direct at N=" + std::to_string(n) +
                              ", P_S=" + std::to_string(row.value) + " dBm");
        }
        const double top = rows.back().ratio;
        c.detail << " ratio(N=" << n << ",36dBm)=" << top;
        c.require(top < prev_top_ratio,
                  "outage ratio did not shrink with more antennas");
        prev_top_ratio = top;
    }
}

// ---- criterion 8: degenerate closures -------------------------------------

void criterion_degenerate_closures(Check& c)
{
    // threshold at capacity with a source too weak to ever fill the battery
    SystemParams weak = baseline_params();
    weak.P_S = 1e-6;
    weak.E_T = weak.C;
    weak.L = 1;
    const OutageReport r = analyze(weak);
    c.detail << "|atf-direct|=" << std::fabs(r.p_out - r.p_direct);
    c.require(std::fabs(r.p_out - r.p_direct) <= 1e-12,
              "unreachable cooperation does not reduce to direct");
    c.require(r.p_mode_I == 1.0, "relay not pinned in Mode I");

    // zero rate: every mode threshold is zero
    SystemParams zero = baseline_params();
    zero.R = 0.0;
    const OutageReport rz = analyze(zero);
    c.require(rz.p_out == 0.0 && rz.phi_I == 0.0 && rz.phi_II == 0.0 &&
                  rz.phi_III == 0.0,
              "R=0 does not yield zero outage");
    SimConfig cfg;
    cfg.blocks = 20'000;
    cfg.warmup = 100;
    cfg.seed = 8008;
    const LinkGains g = derive_link_gains(zero);
    const BatteryGrid grid = make_battery_grid(zero.C, zero.L, zero.E_T);
    c.require(run(zero, g, grid, cfg).outages == 0,
              "R=0 simulation still records outages");

    // byte-identical CSV under a fixed seed
    SweepSpec spec;
    spec.base = baseline_params();
    spec.grid = {28.0, 30.0, 32.0};
    spec.grid_in_dbm = true;
    spec.methods = {SweepMethod::analytic, SweepMethod::sim_continuous,
                    SweepMethod::sim_discrete, SweepMethod::direct};
    SimConfig sim;
    sim.blocks = 40'000;
    sim.warmup = 1'000;
    sim.seed = 123;
    std::ostringstream a, b;
    write_sweep_csv(spec, sweep(spec, sim), a);
    write_sweep_csv(spec, sweep(spec, sim), b);
    // wall-time columns jitter between runs; everything else must not
    c.require(oracle::strip_wall_time(a.str()) ==
                  oracle::strip_wall_time(b.str()),
              "sweep CSV not reproducible under a fixed seed");
}

struct Criterion {
    int id;
    const char* name;
    double time_limit_s;  // 0: no limit stated
    std::function<void(Check&)> body;
};

}  // namespace

int main()
{
    const std::vector<Criterion> criteria = {
        {1, "analytic-vs-simulation convergence", 30.0, criterion_convergence},
        {2, "discrete-chain exactness", 60.0, criterion_discrete_exactness},
        {3, "transition row-sum partition", 10.0, criterion_row_sums},
        {4, "closed-form sum-SNR CDF oracle", 60.0, criterion_sum_snr},
        {5, "special-function correctness", 0.0, criterion_special_functions},
        {6, "threshold-energy regime behavior", 120.0,
         criterion_threshold_regimes},
        {7, "direct-transmission comparison", 300.0,
         criterion_direct_comparison},
        {8, "degenerate closures", 0.0, criterion_degenerate_closures},
    };

    int failures = 0;
    for (const Criterion& cr : criteria) {
        Check check;
        const auto start = std::chrono::steady_clock::now();
        try {
            cr.body(check);
        } catch (const std::exception& e) {
            check.require(false, std::string("exception: ") + e.what());
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          start)
                .count();
        if (cr.time_limit_s > 0.0 && secs > cr.time_limit_s)
            check.require(false, "exceeded the " +
                                     std::to_string(cr.time_limit_s) +
                                     " s budget");
        std::printf("[%s] criterion %d: %s (%.1f s)%s%s\n",
                    check.ok ? "PASS" : "FAIL", cr.id, cr.name, secs,
                    check.detail.str().empty() ? "" : " -- ",
                    check.detail.str().c_str());
        if (!check.ok) ++failures;
    }
    return failures;
}
