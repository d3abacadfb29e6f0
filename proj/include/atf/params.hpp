#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace atf {

// Parameter validation failure (bad config value, out-of-range argument).
class invalid_parameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Floating-point assembly produced something outside its mathematically
// valid range by more than the tolerated slack.
class numeric_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// All internal computation is in SI units (watts, joules) with the block
// duration normalized to 1, so a power and the energy it delivers over a
// full block share the same numeric value. dBm exists only at the
// configuration boundary.
struct SystemParams {
    double P_S = 1.0;      // source transmit power, W
    double N0 = 1e-9;      // noise power, W
    double eta = 0.5;      // energy conversion efficiency, (0,1]
    double R = 1.0;        // transmit rate, bits/s/Hz
    int N = 2;             // relay antenna count
    double K = 10.0;       // Rician K-factor of the source-relay link
    double d_SD = 50.0;    // distances, m
    double d_SR = 5.0;
    double d_RD = 45.0;
    double alpha = 3.0;    // path-loss exponent, [2,5]
    double C = 5e-3;       // battery capacity, J
    int L = 100;           // battery discretization level count
    double E_T = 1e-4;     // energy threshold for cooperation, J
};

// Mean per-element channel power gains of the three links.
struct LinkGains {
    double Omega_SD = 0.0;
    double Omega_SR = 0.0;
    double Omega_RD = 0.0;
};

struct SnrThresholds {
    double gamma0;  // half-block decode threshold, 2^(2R) - 1
    double gamma1;  // full-block threshold without cooperation, 2^R - 1
};

inline double dbm_to_watts(double dbm)
{
    if (!std::isfinite(dbm))
        throw invalid_parameter("dbm_to_watts: non-finite input");
    return std::pow(10.0, (dbm - 30.0) / 10.0);
}

inline double watts_to_dbm(double watts)
{
    if (!(watts > 0.0))
        throw invalid_parameter("watts_to_dbm: power must be > 0");
    return 10.0 * std::log10(watts) + 30.0;
}

inline void validate(const SystemParams& p)
{
    auto require = [](bool ok, const char* what) {
        if (!ok) throw invalid_parameter(std::string("SystemParams: ") + what);
    };
    require(std::isfinite(p.P_S) && p.P_S > 0.0, "P_S must be > 0");
    require(std::isfinite(p.N0) && p.N0 > 0.0, "N0 must be > 0");
    require(p.eta > 0.0 && p.eta <= 1.0, "eta must be in (0,1]");
    require(std::isfinite(p.R) && p.R >= 0.0, "R must be >= 0");
    require(p.N >= 1, "N must be >= 1");
    require(std::isfinite(p.K) && p.K >= 0.0, "K must be >= 0");
    require(p.d_SD > 0.0 && p.d_SR > 0.0 && p.d_RD > 0.0, "distances must be > 0");
    require(p.alpha >= 2.0 && p.alpha <= 5.0, "alpha must be in [2,5]");
    require(std::isfinite(p.C) && p.C > 0.0, "C must be > 0");
    require(p.L >= 1, "L must be >= 1");
    require(p.E_T > 0.0 && p.E_T <= p.C, "E_T must be in (0, C]");
}

// Omega = (1 + d^alpha)^-1 for each link.
inline LinkGains derive_link_gains(const SystemParams& p)
{
    validate(p);
    auto gain = [&](double d) { return 1.0 / (1.0 + std::pow(d, p.alpha)); };
    return LinkGains{gain(p.d_SD), gain(p.d_SR), gain(p.d_RD)};
}

inline SnrThresholds snr_thresholds(const SystemParams& p)
{
    if (!(p.R >= 0.0))
        throw invalid_parameter("snr_thresholds: R must be >= 0");
    return SnrThresholds{std::exp2(2.0 * p.R) - 1.0, std::exp2(p.R) - 1.0};
}

}  // namespace atf
