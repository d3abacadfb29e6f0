#pragma once

#include "atf/battery_chain.hpp"
#include "atf/fading.hpp"
#include "atf/params.hpp"

namespace atf {

// Full outage decomposition: total probability, mode occupancies, and the
// per-mode conditional outage probabilities.
struct OutageReport {
    double p_out = 0.0;
    double p_mode_I = 0.0;
    double p_mode_II = 0.0;
    double p_mode_III = 0.0;
    double phi_I = 0.0;
    double phi_II = 0.0;
    double phi_III = 0.0;
    double p_direct = 0.0;
};

// Mode I conditional outage: the whole block carries one direct-link copy.
inline double phi_I(const SystemParams& p, const LinkGains& g)
{
    const double gamma1 = snr_thresholds(p).gamma1;
    return cdf_H_SD(g.Omega_SD, gamma1 * p.N0 / p.P_S);
}

// Mode II conditional outage: two combined direct-link copies against the
// half-block threshold.
inline double phi_II(const SystemParams& p, const LinkGains& g)
{
    const double gamma0 = snr_thresholds(p).gamma0;
    return cdf_H_SD(g.Omega_SD, gamma0 * p.N0 / (2.0 * p.P_S));
}

// Mode III conditional outage: direct copy plus the relay forward at
// transmit power 2 E_T on its best antenna.
inline double phi_III(const SystemParams& p, const LinkGains& g)
{
    if (!(p.E_T > 0.0))
        throw invalid_parameter("phi_III: E_T must be > 0");
    const double gamma0 = snr_thresholds(p).gamma0;
    const double gbar_SD = p.P_S * g.Omega_SD / p.N0;
    const double gbar_RD = 2.0 * p.E_T * g.Omega_RD / p.N0;
    return sum_snr_cdf(gamma0, gbar_SD, gbar_RD, p.N);
}

// Direct transmission without cooperation; the baseline the protocol is
// measured against. Same expression as the Mode I conditional outage.
inline double direct_outage(const SystemParams& p, const LinkGains& g)
{
    return phi_I(p, g);
}

// Total outage = sum over modes of occupancy times conditional outage.
// Occupancies factor as P_E and the decode failure probability of the
// current block, which is independent of the battery state; the same
// cdf_H_SR feeds both this split and the transition matrix.
inline OutageReport atf_outage(const SystemParams& p, const LinkGains& g,
                               const BatteryGrid& grid,
                               const StationaryDistribution& pi)
{
    const double gamma0 = snr_thresholds(p).gamma0;
    const double p_E = cooperation_probability(pi, grid);
    const double decode_fail =
        cdf_H_SR(RicianSumSpec{p.N, p.K, g.Omega_SR}, gamma0 * p.N0 / p.P_S);

    OutageReport r;
    r.phi_I = phi_I(p, g);
    r.phi_II = phi_II(p, g);
    r.phi_III = phi_III(p, g);
    r.p_mode_I = 1.0 - p_E;
    r.p_mode_II = p_E * decode_fail;
    r.p_mode_III = p_E * (1.0 - decode_fail);
    r.p_out = r.p_mode_I * r.phi_I + r.p_mode_II * r.phi_II +
              r.p_mode_III * r.phi_III;
    r.p_direct = direct_outage(p, g);
    return r;
}

}  // namespace atf
