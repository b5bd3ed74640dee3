#pragma once
#include <cstdint>
#include <optional>
#include <vector>

#include "detector_noise.hpp"
#include "line_fitter.hpp"
#include "spectral_model.hpp"

namespace sivtherm {

/// Invert the linear peak-shift map: t = t_ref + (center - center_ref)/slope.
/// Throws window_error when the implied temperature leaves the linear window.
double peak_to_temperature_K(double center_nm, const ThermoCalibration& cal);

/// Same inversion for the linewidth channel (requires d_fwhm_dT > 0).
double linewidth_to_temperature_K(double fwhm_nm, const ThermoCalibration& cal);

enum class FitterChoice { least_squares, ensemble_mcmc };

struct MeasureOptions {
    FitterChoice fitter = FitterChoice::least_squares;
    NoiseModel noise{};
    SamplerConfig sampler{};
    std::uint64_t seed = 0; // sampler seed; least squares is deterministic
    const ResponseEstimate* response = nullptr;
};

struct TemperatureReading {
    double t_K = 0.0;
    double sigma_T_K = 0.0;
    FitResult fit;
};

/// Full PL pipeline on one spectrum: optional response correction, line fit,
/// then peak -> temperature. sigma_T = sigma_center / d_center_dT.
TemperatureReading measure_temperature(const Spectrum& s, const ThermoCalibration& cal,
                                       const MeasureOptions& opt = {});

/// Everything needed to simulate one PL acquisition.
struct PlSimConfig {
    ThermoCalibration cal = ThermoCalibration::bulk();
    EmitterEnsemble ensemble = EmitterEnsemble::single();
    WavelengthGrid grid{};
    InstrumentResponse response{};
    CcdModel ccd{};
    double brightness_cps = 1e7; // bulk-sample default (10 MHz on the APD)
    double temperature_K = 295.0;
};

/// Synthesize the expected spectrum and draw one noisy CCD acquisition.
Spectrum simulate_pl_spectrum(const PlSimConfig& cfg, double exposure_s, std::uint64_t seed);

struct PrecisionPoint {
    double integration_time_s = 0.0;
    double sigma_T_K = 0.0;
    double total_photons = 0.0; // expected signal counts reaching the grid
};

struct PrecisionCurve {
    std::vector<PrecisionPoint> points;
    double fitted_exponent = 0.0;        // slope of log sigma_T vs log N_ph
    double fitted_exponent_sigma = 0.0;
    double sensitivity_mK_per_rtHz = 0.0; // mean of sigma_T(t) * sqrt(t)
};

/// Repeat the simulated measurement at each integration time and report the
/// scatter of the temperature estimates. Throws data_quality_error naming the
/// time point if more than 5% of its fits fail.
PrecisionCurve precision_vs_time(const PlSimConfig& cfg, const std::vector<double>& times_s,
                                 int n_repeats, std::uint64_t seed,
                                 const MeasureOptions& opt = {});

struct VolumeSensitivity {
    double sensitivity_mK_per_rtHz = 0.0;
    double volume_um3 = 0.0;
    double per_volume = 0.0; // mK / sqrt(Hz um^3)
};

/// per_volume = sensitivity * sqrt(volume).
VolumeSensitivity sensitivity_per_volume(double sensitivity_mK_per_rtHz, double volume_um3);

} // namespace sivtherm
