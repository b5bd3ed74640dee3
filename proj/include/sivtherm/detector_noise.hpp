#pragma once
#include <cstdint>

#include "spectrum.hpp"

namespace sivtherm {

/// Spectrometer CCD: per-bin Gaussian readout noise on top of shot noise.
struct CcdModel {
    double readout_sigma = 10.0; // counts per bin
    int n_bins = 1500;
};

inline void validate(const CcdModel& m) {
    if (m.readout_sigma < 0.0) throw contract_error("CcdModel: readout_sigma must be >= 0");
    if (m.n_bins < 1) throw contract_error("CcdModel: n_bins must be >= 1");
}

/// Single-pixel avalanche photodiode counter with dark counts.
struct ApdModel {
    double dark_rate_cps = 50.0;
};

inline void validate(const ApdModel& m) {
    if (m.dark_rate_cps < 0.0) throw contract_error("ApdModel: dark_rate must be >= 0");
}

/// Draw an observed spectrum: per bin, Poisson(expected) plus zero-mean
/// Gaussian readout of std readout_sigma. Bit-reproducible for a fixed seed.
Spectrum sample_ccd_spectrum(const Spectrum& expected, const CcdModel& ccd, std::uint64_t seed);

/// Poisson counts with mean (rate + dark_rate) * duration.
long long sample_apd_counts(double rate_cps, const ApdModel& apd, double duration_s,
                            std::uint64_t seed);

/// Detection bandwidth 1/(2 t*) where t* is the shortest exposure reaching
/// target_snr. CCD: per-bin SNR with the signal spread uniformly over n_bins,
/// SNR(t) = (R t / n) / sqrt(R t / n + readout_sigma^2).
double detection_bandwidth_hz(double signal_rate_cps, const CcdModel& ccd, double target_snr);

/// APD: integrated SNR(t) = R t / sqrt(R t + dark * t).
double detection_bandwidth_hz(double signal_rate_cps, const ApdModel& apd, double target_snr);

} // namespace sivtherm
