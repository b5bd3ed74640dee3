#include "sivtherm/detector_noise.hpp"

#include <cmath>
#include <random>

#include "sivtherm/rng.hpp"

namespace sivtherm {

Spectrum sample_ccd_spectrum(const Spectrum& expected, const CcdModel& ccd, std::uint64_t seed) {
    validate(expected);
    validate(ccd);
    for (double c : expected.counts)
        if (c < 0.0) throw contract_error("sample_ccd_spectrum: expected counts must be >= 0");

    RngEngine eng = make_engine(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    Spectrum out = expected;
    for (double& c : out.counts) {
        double v = 0.0;
        if (c > 0.0) {
            std::poisson_distribution<long long> pois(c);
            v = static_cast<double>(pois(eng));
        }
        if (ccd.readout_sigma > 0.0) v += ccd.readout_sigma * gauss(eng);
        c = v;
    }
    return out;
}

long long sample_apd_counts(double rate_cps, const ApdModel& apd, double duration_s,
                            std::uint64_t seed) {
    validate(apd);
    if (rate_cps < 0.0) throw contract_error("sample_apd_counts: rate must be >= 0");
    if (!(duration_s > 0.0)) throw contract_error("sample_apd_counts: duration must be > 0");

    const double mu = (rate_cps + apd.dark_rate_cps) * duration_s;
    if (mu == 0.0) return 0;
    RngEngine eng = make_engine(seed);
    std::poisson_distribution<long long> pois(mu);
    return pois(eng);
}

double detection_bandwidth_hz(double signal_rate_cps, const CcdModel& ccd, double target_snr) {
    validate(ccd);
    if (!(signal_rate_cps > 0.0))
        throw no_solution_error("detection_bandwidth: SNR unreachable at zero rate");
    if (!(target_snr > 0.0)) throw contract_error("detection_bandwidth: target_snr must be > 0");

    // Per-bin signal s = R t / n; solve s^2 = snr^2 (s + sigma^2).
    const double snr2 = target_snr * target_snr;
    const double sigma2 = ccd.readout_sigma * ccd.readout_sigma;
    const double s = 0.5 * (snr2 + std::sqrt(snr2 * snr2 + 4.0 * snr2 * sigma2));
    const double t_min = s * ccd.n_bins / signal_rate_cps;
    return 1.0 / (2.0 * t_min);
}

double detection_bandwidth_hz(double signal_rate_cps, const ApdModel& apd, double target_snr) {
    validate(apd);
    if (!(signal_rate_cps > 0.0))
        throw no_solution_error("detection_bandwidth: SNR unreachable at zero rate");
    if (!(target_snr > 0.0)) throw contract_error("detection_bandwidth: target_snr must be > 0");

    // R t / sqrt((R + D) t) = snr  =>  t = snr^2 (R + D) / R^2.
    const double t_min = target_snr * target_snr * (signal_rate_cps + apd.dark_rate_cps) /
                         (signal_rate_cps * signal_rate_cps);
    return 1.0 / (2.0 * t_min);
}

} // namespace sivtherm
