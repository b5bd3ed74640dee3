#pragma once
#include <cstdint>
#include <vector>

#include "detector_noise.hpp"
#include "spectral_model.hpp"

namespace sivtherm {

/// Near-resonant excitation settings. PLE collects phonon-sideband emission
/// on an APD while a probe laser sits at lambda_p near the ZPL.
struct PleConfig {
    double probe_wavelength_nm = 738.0;
    double psb_collection_rate_cps = 3e5; // nanodiamond-scale count rate at t_ref
    bool below_saturation = true;
};

inline void validate(const PleConfig& c) {
    if (!(c.psb_collection_rate_cps > 0.0))
        throw contract_error("PleConfig: psb_collection_rate must be > 0");
    if (!c.below_saturation)
        throw contract_error("PleConfig: the linear absorption model requires below_saturation");
}

/// Square-wave heating modulation for the lock-in measurement.
struct LockInConfig {
    double mod_freq_hz = 80.0;
    double duty = 0.5; // fraction of each cycle with the heater on
    double duration_s = 5.0;
    double heater_power_W = 1e-3;
};

inline void validate(const LockInConfig& c) {
    if (!(c.mod_freq_hz > 0.0)) throw contract_error("LockInConfig: mod_freq must be > 0");
    if (!(c.duty > 0.0 && c.duty < 1.0)) throw contract_error("LockInConfig: duty must be in (0,1)");
    if (!(c.duration_s > 0.0)) throw contract_error("LockInConfig: duration must be > 0");
    if (c.heater_power_W < 0.0) throw contract_error("LockInConfig: heater power must be >= 0");
}

/// Photon counts per time bin together with the heater reference phase.
struct LockInTrace {
    std::vector<double> bin_counts;
    double bin_duration_s = 0.0;
    std::vector<std::uint8_t> heater_on; // reference square wave, one flag per bin
};

void validate(const LockInTrace& t);

/// First-order thermal response of the heated spot: the probe temperature
/// relaxes toward t0 + steady_state_dT_per_W * P with one time constant.
struct ThermalResponseModel {
    double steady_state_dT_per_W = 1000.0; // K/W
    double time_constant_s = 0.002;
};

inline void validate(const ThermalResponseModel& m) {
    if (!(m.steady_state_dT_per_W > 0.0))
        throw contract_error("ThermalResponseModel: steady_state_dT_per_W must be > 0");
    if (!(m.time_constant_s > 0.0))
        throw contract_error("ThermalResponseModel: time_constant must be > 0");
}

/// Relative PLE intensity at probe wavelength lambda_p and temperature t:
/// quantum efficiency times the unit-amplitude ZPL Lorentzian.
double ple_intensity(double lambda_p_nm, double t_K, const ThermoCalibration& cal,
                     const PleConfig& cfg);

/// Fractional fluorescence contrast (I(t0) - I(t0 + dT)) / I(t0).
double contrast(double lambda_p_nm, double t0_K, double dT_K, const ThermoCalibration& cal,
                const PleConfig& cfg);

/// Contrast susceptibility d(contrast)/dT at dT -> 0, in 1/K (multiply by 100
/// for %/K), evaluated by a symmetric difference.
double contrast_susceptibility(double lambda_p_nm, double t0_K, const ThermoCalibration& cal,
                               const PleConfig& cfg);

/// Probe wavelength maximizing the temperature response |dI/dT| of the
/// unit-amplitude line, located by a coarse bracket plus golden-section
/// refinement. With no QE droop and no broadening this is the blue inflection
/// point, center - fwhm/(2 sqrt(3)).
double max_contrast_wavelength(const ThermoCalibration& cal, const PleConfig& cfg, double t0_K);

/// Noiseless expectation of the lock-in trace. The thermal state starts from
/// the cyclo-stationary point (no settling transient) and evolves exactly
/// through the first-order response; expected counts integrate the rate over
/// each bin. Bins must align with the reference square wave.
LockInTrace expected_lockin_trace(const PleConfig& ple, const LockInConfig& lock,
                                  const ThermalResponseModel& thermal,
                                  const ThermoCalibration& cal, double t0_K,
                                  double bin_duration_s);

/// Poisson-sampled trace (APD counting per bin).
LockInTrace simulate_lockin_trace(const PleConfig& ple, const LockInConfig& lock,
                                  const ThermalResponseModel& thermal,
                                  const ThermoCalibration& cal, double t0_K,
                                  double bin_duration_s, std::uint64_t seed);

struct DemodResult {
    double contrast = 0.0; // (off - on) / off
    double sigma = 0.0;    // from cycle-to-cycle scatter
    int n_cycles = 0;
};

/// Square-wave demodulation: contrast from the phase-averaged rates, sigma
/// from the scatter of per-cycle contrasts. Requires >= 10 full cycles.
DemodResult demodulate(const LockInTrace& trace);

/// Calibration chain (dI/I0)/dT = (dI/I0)/dPh * dCenter/dT / (dLambda/dPh).
double susceptibility_chain(double dI_per_Ph, double dLambda_per_Ph_nm, double d_center_dT_nm_per_K);

/// Proposed two-laser scheme: normalized red/blue difference
/// (I_blue - I_red)/(I_blue + I_red) at t0 + dT; exactly invariant under a
/// common intensity scale.
double two_sided_contrast(double lambda_red_nm, double lambda_blue_nm, double t0_K, double dT_K,
                          const ThermoCalibration& cal, const PleConfig& cfg);

} // namespace sivtherm
