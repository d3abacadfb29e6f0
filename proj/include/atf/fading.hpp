#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "atf/params.hpp"

namespace atf {

// Sum of N i.i.d. Rician per-element power gains (the source-relay channel
// after maximum ratio combining over the relay antennas).
struct RicianSumSpec {
    int N;
    double K;
    double Omega;
};

// One block's realized channel power gains.
struct ChannelDraw {
    double H_SR;
    double H_RD;
    double H_SD;
};

namespace detail {

// Probabilities are assembled from truncated series and alternating sums;
// anything drifting past [0,1] by more than this slack is a genuine bug,
// not rounding.
inline constexpr double kProbSlack = 1e-9;

inline double clamp_probability(double p, const char* where)
{
    if (!(p >= -kProbSlack && p <= 1.0 + kProbSlack))
        throw numeric_error(std::string(where) + ": probability out of range");
    if (p < 0.0) return 0.0;
    if (p > 1.0) return 1.0;
    return p;
}

// e^-m * m^k / k! evaluated through logs; safe for any magnitude.
inline double log_space_pmf_term(double m, long long k)
{
    return std::exp(-m + static_cast<double>(k) * std::log(m) -
                    std::lgamma(static_cast<double>(k) + 1.0));
}

}  // namespace detail

// Generalized Marcum Q-function Q_order(a, b) for integer order >= 1.
//
// Computed as the Poisson mixture of regularized upper incomplete gamma
// tails: Q_N(a,b) = sum_n e^{-a^2/2} (a^2/2)^n / n! * Q(N+n, b^2/2), where
// Q(m, x) = e^{-x} sum_{j<m} x^j/j! for integer m. Truncated once the
// remaining Poisson mass drops below 1e-14; since each gamma tail lies in
// [0,1], that mass bounds the truncation error. All terms are nonnegative,
// so no cancellation occurs and the absolute error stays below 1e-12.
inline double marcum_q(int order, double a, double b)
{
    if (order < 1)
        throw invalid_parameter("marcum_q: order must be >= 1");
    if (!(a >= 0.0) || !(b >= 0.0) || !std::isfinite(a) || !std::isfinite(b))
        throw invalid_parameter("marcum_q: a and b must be finite and >= 0");
    if (b == 0.0) return 1.0;

    const double lambda = 0.5 * a * a;  // Poisson mean of the mixture
    const double x = 0.5 * b * b;       // gamma tail evaluation point
    const bool use_logs = (x >= 700.0 || lambda >= 700.0);  // exp(-x) would lose range

    // gamma_tail = Q(order, x); tail_inc = next increment e^-x x^m / m!.
    double gamma_tail = 0.0;
    double tail_inc = use_logs ? 0.0 : std::exp(-x);
    for (int j = 0; j < order; ++j) {
        if (use_logs) {
            gamma_tail += detail::log_space_pmf_term(x, j);
        } else {
            gamma_tail += tail_inc;
            tail_inc *= x / (j + 1);
        }
    }
    if (lambda == 0.0)
        return detail::clamp_probability(gamma_tail, "marcum_q");

    double q = 0.0;
    double poisson_mass = 0.0;
    double weight = use_logs ? 0.0 : std::exp(-lambda);
    constexpr long long kMaxTerms = 10'000'000;
    for (long long n = 0;; ++n) {
        const double p_n =
            use_logs ? detail::log_space_pmf_term(lambda, n) : weight;
        q += p_n * gamma_tail;
        poisson_mass += p_n;
        // Past the Poisson mode, stop once the remaining mass is below
        // 1e-14. The accumulated mass can plateau slightly under 1 from
        // rounding, so a vanishing current term also ends the loop: beyond
        // the mode the tail is within a small factor of the term itself.
        if (static_cast<double>(n) >= lambda &&
            (poisson_mass >= 1.0 - 1e-14 || p_n < 1e-16))
            break;
        if (n >= kMaxTerms)
            throw numeric_error("marcum_q: series failed to converge");
        if (use_logs) {
            gamma_tail += detail::log_space_pmf_term(x, order + n);
        } else {
            gamma_tail += tail_inc;
            tail_inc *= x / (order + n + 1);
            weight *= lambda / (n + 1);
        }
    }
    return detail::clamp_probability(q, "marcum_q");
}

// CDF of H_SR: 1 - Q_N(sqrt(2NK), sqrt(2(K+1)x / Omega)).
inline double cdf_H_SR(const RicianSumSpec& spec, double x)
{
    if (spec.N < 1 || !(spec.K >= 0.0) || !(spec.Omega > 0.0))
        throw invalid_parameter("cdf_H_SR: need N >= 1, K >= 0, Omega > 0");
    if (!(x >= 0.0))
        throw invalid_parameter("cdf_H_SR: x must be >= 0");
    const double a = std::sqrt(2.0 * spec.N * spec.K);
    const double b = std::sqrt(2.0 * (spec.K + 1.0) * x / spec.Omega);
    return detail::clamp_probability(1.0 - marcum_q(spec.N, a, b), "cdf_H_SR");
}

// CDF of the Rayleigh-faded direct link power gain: 1 - exp(-y/Omega).
inline double cdf_H_SD(double Omega_SD, double y)
{
    if (!(Omega_SD > 0.0))
        throw invalid_parameter("cdf_H_SD: Omega_SD must be > 0");
    if (!(y >= 0.0))
        throw invalid_parameter("cdf_H_SD: y must be >= 0");
    return -std::expm1(-y / Omega_SD);
}

// CDF of the largest of N i.i.d. exponential power gains (transmit antenna
// selection on the relay-destination link): (1 - exp(-x/Omega))^N.
inline double cdf_H_RD_max(int N, double Omega_RD, double x)
{
    if (N < 1 || !(Omega_RD > 0.0))
        throw invalid_parameter("cdf_H_RD_max: need N >= 1, Omega_RD > 0");
    if (!(x >= 0.0))
        throw invalid_parameter("cdf_H_RD_max: x must be >= 0");
    return std::pow(-std::expm1(-x / Omega_RD), N);
}

// Pr{ gamma_RD + gamma_SD < gamma } where gamma_SD is exponential with mean
// gbar_SD and gamma_RD is the max of N exponentials with mean gbar_RD:
//
//   N * sum_{k=0}^{N-1} C(N-1,k) (-1)^k
//       [ gbar_SD (1 - e^{-g/gbar_SD}) - gbar_RD/(k+1) (1 - e^{-(k+1)g/gbar_RD}) ]
//       / ( (k+1) gbar_SD - gbar_RD )
//
// When (k+1) gbar_SD ~= gbar_RD the k-th term is 0/0; within a 1e-9
// relative window it is replaced by its analytic limit in gbar_RD,
// [ (1 - e^-s) - s e^-s ] / (k+1) with s = gamma/gbar_SD.
inline double sum_snr_cdf(double gamma, double gbar_SD, double gbar_RD, int N)
{
    if (!(gamma >= 0.0))
        throw invalid_parameter("sum_snr_cdf: gamma must be >= 0");
    if (!(gbar_SD > 0.0) || !(gbar_RD > 0.0))
        throw invalid_parameter("sum_snr_cdf: mean SNRs must be > 0");
    if (N < 1)
        throw invalid_parameter("sum_snr_cdf: N must be >= 1");
    if (gamma == 0.0) return 0.0;

    const double s = gamma / gbar_SD;
    const double sd_cdf = -std::expm1(-s);
    double total = 0.0;
    double binom = 1.0;  // C(N-1, k)
    double sign = 1.0;
    for (int k = 0; k < N; ++k) {
        const double kp1 = k + 1.0;
        const double denom = kp1 * gbar_SD - gbar_RD;
        double term;
        if (std::fabs(denom) < 1e-9 * std::max(kp1 * gbar_SD, gbar_RD)) {
            term = (sd_cdf - s * std::exp(-s)) / kp1;
        } else {
            const double rd_cdf = -std::expm1(-kp1 * gamma / gbar_RD);
            term = (gbar_SD * sd_cdf - gbar_RD / kp1 * rd_cdf) / denom;
        }
        total += sign * N * binom * term;
        binom *= static_cast<double>(N - 1 - k) / (k + 1.0);
        sign = -sign;
    }
    return detail::clamp_probability(total, "sum_snr_cdf");
}

namespace detail {

inline double uniform01(std::mt19937_64& rng)
{
    // 53-bit mantissa draw in [0,1); 1-u is then in (0,1] for the log below.
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double sample_exponential(std::mt19937_64& rng, double mean)
{
    return -mean * std::log(1.0 - uniform01(rng));
}

// Box-Muller pair of standard normals.
inline void sample_normal_pair(std::mt19937_64& rng, double& z0, double& z1)
{
    const double u1 = 1.0 - uniform01(rng);
    const double u2 = uniform01(rng);
    const double r = std::sqrt(-2.0 * std::log(u1));
    z0 = r * std::cos(6.283185307179586476925286766559 * u2);
    z1 = r * std::sin(6.283185307179586476925286766559 * u2);
}

}  // namespace detail

// Draws one block's channel power gains. H_SR sums N Rician element powers
// (complex Gaussian with line-of-sight mean on the real axis), H_RD is the
// max of N exponentials, H_SD a single exponential. E[H_SR] = N * Omega_SR.
inline ChannelDraw sample_channels(const SystemParams& p, const LinkGains& g,
                                   std::mt19937_64& rng)
{
    const double mean_los = std::sqrt(p.K * g.Omega_SR / (p.K + 1.0));
    const double sigma = std::sqrt(g.Omega_SR / (2.0 * (p.K + 1.0)));

    double h_sr = 0.0;
    for (int i = 0; i < p.N; ++i) {
        double z_re, z_im;
        detail::sample_normal_pair(rng, z_re, z_im);
        const double re = mean_los + sigma * z_re;
        const double im = sigma * z_im;
        h_sr += re * re + im * im;
    }

    double h_rd = 0.0;
    for (int i = 0; i < p.N; ++i)
        h_rd = std::max(h_rd, detail::sample_exponential(rng, g.Omega_RD));

    const double h_sd = detail::sample_exponential(rng, g.Omega_SD);
    return ChannelDraw{h_sr, h_rd, h_sd};
}

}  // namespace atf
