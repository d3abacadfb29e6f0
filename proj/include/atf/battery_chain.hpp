#pragma once

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <vector>

#include "atf/fading.hpp"
#include "atf/params.hpp"

namespace atf {

// Relay battery discretized into L+1 levels eps_i = i*C/L. eps_T is the
// smallest nonzero level at or above the configured threshold E_T; it is
// both the gate for cooperation and the exact amount consumed per forward.
struct BatteryGrid {
    int L = 0;
    double C = 0.0;
    std::vector<double> levels;  // size L+1, levels[0] = 0, levels[L] = C
    int threshold_level = 0;     // index of eps_T
    double eps_T = 0.0;
};

// Row-stochastic (L+1) x (L+1) battery-level transition matrix, row-major.
struct TransitionMatrix {
    int L = 0;
    std::vector<double> p;

    double& at(int i, int j) { return p[static_cast<std::size_t>(i) * (L + 1) + j]; }
    double at(int i, int j) const { return p[static_cast<std::size_t>(i) * (L + 1) + j]; }
    int states() const { return L + 1; }
};

struct StationaryDistribution {
    std::vector<double> pi;
};

// The linear solve detected a singular system; the chain is not a single
// irreducible class (or the matrix is malformed).
class singular_system : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline BatteryGrid make_battery_grid(double C, int L, double E_T)
{
    if (!(C > 0.0) || L < 1)
        throw invalid_parameter("make_battery_grid: need C > 0, L >= 1");
    if (!(E_T > 0.0) || E_T > C)
        throw invalid_parameter("make_battery_grid: E_T must be in (0, C]");
    BatteryGrid grid;
    grid.L = L;
    grid.C = C;
    grid.levels.resize(L + 1);
    for (int i = 0; i <= L; ++i)
        grid.levels[i] = C * (static_cast<double>(i) / L);
    const auto it = std::lower_bound(grid.levels.begin(), grid.levels.end(), E_T);
    if (it == grid.levels.end())
        throw invalid_parameter("make_battery_grid: no level satisfies E_T");
    grid.threshold_level = std::max<int>(1, static_cast<int>(it - grid.levels.begin()));
    grid.eps_T = grid.levels[grid.threshold_level];
    return grid;
}

// Largest level index i with eps_i strictly below E_H (0 when no level
// qualifies, capped at L). Harvested energy below eps_1 is lost.
inline int discretize_harvest(double E_H, const BatteryGrid& grid)
{
    if (!(E_H >= 0.0))
        throw invalid_parameter("discretize_harvest: E_H must be >= 0");
    const auto it = std::lower_bound(grid.levels.begin(), grid.levels.end(), E_H);
    const int first_not_below = static_cast<int>(it - grid.levels.begin());
    return std::max(0, first_not_below - 1);
}

// Builds the battery-level transition matrix from the eight transition
// cases. Every entry is assembled from cdf_H_SR evaluations at level
// multiples of the one-level harvest gains:
//   c1 = C/(eta P_S L)   full-block harvest (Mode I),
//   c2 = 2C/(eta P_S L)  half-block harvest (Mode II),
// clipped against the decode threshold g0 = gamma0 N0 / P_S where Mode II
// requires the decoding to have failed.
inline TransitionMatrix build_transition_matrix(const SystemParams& p,
                                                const LinkGains& g,
                                                const BatteryGrid& grid)
{
    validate(p);
    if (p.E_T > p.C)
        throw invalid_parameter("build_transition_matrix: E_T > C");
    const int L = grid.L;
    const int k_T = grid.threshold_level;
    const RicianSumSpec sr{p.N, p.K, g.Omega_SR};
    const double c1 = p.C / (p.eta * p.P_S * L);
    const double c2 = 2.0 * p.C / (p.eta * p.P_S * L);
    const double g0 = snr_thresholds(p).gamma0 * p.N0 / p.P_S;

    std::vector<double> F1(L + 1), F2(L + 1);
    for (int d = 0; d <= L; ++d) {
        F1[d] = cdf_H_SR(sr, d * c1);
        F2[d] = cdf_H_SR(sr, d * c2);
    }
    const double Fg = cdf_H_SR(sr, g0);
    // CDF at min(d*c2, g0): the Mode II harvest interval clipped to the
    // decoding-failure event.
    auto clipF = [&](int d) { return d * c2 < g0 ? F2[d] : Fg; };

    TransitionMatrix m;
    m.L = L;
    m.p.assign(static_cast<std::size_t>(L + 1) * (L + 1), 0.0);

    for (int i = 0; i <= L; ++i) {
        if (i < k_T) {
            // Below threshold: Mode I only; the harvest partitions the row.
            m.at(i, i) += F1[1];  // harvest discretized to zero
            for (int j = i + 1; j < L; ++j)
                m.at(i, j) += F1[j - i + 1] - F1[j - i];
            m.at(i, L) += 1.0 - F1[L - i];
        } else {
            // At or above threshold: Mode III discharges by exactly eps_T,
            // Mode II (decode failure) charges by the half-block harvest.
            m.at(i, i - k_T) += 1.0 - Fg;
            if (i == L) {
                m.at(L, L) += Fg;  // full battery: any Mode II harvest clamps
            } else {
                for (int j = i; j < L; ++j)
                    m.at(i, j) += clipF(j - i + 1) - clipF(j - i);
                m.at(i, L) += Fg - clipF(L - i);
            }
        }
    }

    for (double& entry : m.p) {
        if (entry < 0.0) {
            if (entry < -1e-12)
                throw numeric_error("build_transition_matrix: negative entry");
            entry = 0.0;
        }
    }
    return m;
}

// Stationary distribution via the rank-completion solve
// (M^T - I + B) pi = b with B all ones and b the ones vector.
// Plain partial-pivot Gaussian elimination; dense is ample at these sizes.
inline StationaryDistribution stationary_distribution(const TransitionMatrix& m)
{
    const int n = m.states();
    std::vector<double> a(static_cast<std::size_t>(n) * n);
    std::vector<double> rhs(n, 1.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            a[static_cast<std::size_t>(i) * n + j] =
                m.at(j, i) - (i == j ? 1.0 : 0.0) + 1.0;

    for (int col = 0; col < n; ++col) {
        int pivot = col;
        double best = std::fabs(a[static_cast<std::size_t>(col) * n + col]);
        for (int r = col + 1; r < n; ++r) {
            const double v = std::fabs(a[static_cast<std::size_t>(r) * n + col]);
            if (v > best) { best = v; pivot = r; }
        }
        if (best < 1e-300)
            throw singular_system("stationary_distribution: singular system");
        if (pivot != col) {
            for (int j = 0; j < n; ++j)
                std::swap(a[static_cast<std::size_t>(pivot) * n + j],
                          a[static_cast<std::size_t>(col) * n + j]);
            std::swap(rhs[pivot], rhs[col]);
        }
        const double inv = 1.0 / a[static_cast<std::size_t>(col) * n + col];
        for (int r = col + 1; r < n; ++r) {
            const double f = a[static_cast<std::size_t>(r) * n + col] * inv;
            if (f == 0.0) continue;
            a[static_cast<std::size_t>(r) * n + col] = 0.0;
            for (int j = col + 1; j < n; ++j)
                a[static_cast<std::size_t>(r) * n + j] -=
                    f * a[static_cast<std::size_t>(col) * n + j];
            rhs[r] -= f * rhs[col];
        }
    }

    StationaryDistribution dist;
    dist.pi.assign(n, 0.0);
    for (int r = n - 1; r >= 0; --r) {
        double v = rhs[r];
        for (int j = r + 1; j < n; ++j)
            v -= a[static_cast<std::size_t>(r) * n + j] * dist.pi[j];
        dist.pi[r] = v / a[static_cast<std::size_t>(r) * n + r];
    }

    double sum = 0.0;
    for (double& v : dist.pi) {
        if (v < 0.0) {
            if (v < -1e-9)
                throw singular_system("stationary_distribution: negative mass");
            v = 0.0;
        }
        sum += v;
    }
    if (std::fabs(sum - 1.0) > 1e-9)
        throw singular_system("stationary_distribution: mass does not sum to 1");

    // Residual check of pi = M^T pi.
    double residual = 0.0;
    for (int i = 0; i < n; ++i) {
        double v = 0.0;
        for (int j = 0; j < n; ++j)
            v += m.at(j, i) * dist.pi[j];
        residual = std::max(residual, std::fabs(v - dist.pi[i]));
    }
    if (residual > 1e-8)
        throw singular_system("stationary_distribution: fixed-point residual too large");
    return dist;
}

// P_E: steady-state probability that the banked energy meets the threshold.
inline double cooperation_probability(const StationaryDistribution& dist,
                                      const BatteryGrid& grid)
{
    double p = 0.0;
    for (int i = grid.threshold_level; i <= grid.L; ++i)
        p += dist.pi[i];
    return detail::clamp_probability(p, "cooperation_probability");
}

inline void write_matrix_csv(const TransitionMatrix& m, std::ostream& os)
{
    os << std::setprecision(17);
    os << "i";
    for (int j = 0; j <= m.L; ++j) os << ',' << j;
    os << '\n';
    for (int i = 0; i <= m.L; ++i) {
        os << i;
        for (int j = 0; j <= m.L; ++j) os << ',' << m.at(i, j);
        os << '\n';
    }
}

inline void write_stationary_csv(const StationaryDistribution& dist, std::ostream& os)
{
    os << std::setprecision(17);
    os << "i,pi\n";
    for (std::size_t i = 0; i < dist.pi.size(); ++i)
        os << i << ',' << dist.pi[i] << '\n';
}

}  // namespace atf
