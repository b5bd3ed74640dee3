#include "sivtherm/pl_thermometry.hpp"

#include <cmath>
#include <string>

#include "sivtherm/rng.hpp"
#include "sivtherm/stats.hpp"

namespace sivtherm {

double peak_to_temperature_K(double center_nm, const ThermoCalibration& cal) {
    validate(cal);
    const double t = cal.t_ref_K + (center_nm - cal.center_ref_nm) / cal.d_center_dT_nm_per_K;
    if (std::abs(t - cal.t_ref_K) > cal.linear_window_K)
        throw window_error("peak_to_temperature: implied temperature outside the linear window");
    return t;
}

double linewidth_to_temperature_K(double fwhm_nm, const ThermoCalibration& cal) {
    validate(cal);
    if (!(cal.d_fwhm_dT_nm_per_K > 0.0))
        throw contract_error("linewidth_to_temperature: d_fwhm_dT must be > 0 to invert");
    const double t = cal.t_ref_K + (fwhm_nm - cal.fwhm_ref_nm) / cal.d_fwhm_dT_nm_per_K;
    if (std::abs(t - cal.t_ref_K) > cal.linear_window_K)
        throw window_error("linewidth_to_temperature: implied temperature outside the linear window");
    return t;
}

TemperatureReading measure_temperature(const Spectrum& s, const ThermoCalibration& cal,
                                       const MeasureOptions& opt) {
    const Spectrum* input = &s;
    Spectrum corrected;
    if (opt.response != nullptr) {
        corrected = correct_spectrum(s, *opt.response);
        input = &corrected;
    }
    const LorentzianParams init = initial_guess(*input);
    TemperatureReading out;
    if (opt.fitter == FitterChoice::least_squares)
        out.fit = fit_least_squares(*input, init, opt.noise);
    else
        out.fit = fit_ensemble_mcmc(*input, init, opt.sampler, opt.seed, opt.noise);
    out.t_K = peak_to_temperature_K(out.fit.params.center_nm, cal);
    out.sigma_T_K = out.fit.sigmas.center_nm / cal.d_center_dT_nm_per_K;
    return out;
}

Spectrum simulate_pl_spectrum(const PlSimConfig& cfg, double exposure_s, std::uint64_t seed) {
    const Spectrum expected =
        synthesize_expected_spectrum(cfg.ensemble, cfg.cal, cfg.temperature_K, cfg.grid,
                                     cfg.brightness_cps, exposure_s, cfg.response);
    return sample_ccd_spectrum(expected, cfg.ccd, seed);
}

PrecisionCurve precision_vs_time(const PlSimConfig& cfg, const std::vector<double>& times_s,
                                 int n_repeats, std::uint64_t seed, const MeasureOptions& opt) {
    if (times_s.size() < 2)
        throw contract_error("precision_vs_time: need at least 2 integration times");
    for (std::size_t i = 1; i < times_s.size(); ++i)
        if (!(times_s[i] > times_s[i - 1]))
            throw contract_error("precision_vs_time: times must be strictly increasing");
    if (!(times_s.front() > 0.0)) throw contract_error("precision_vs_time: times must be > 0");
    if (n_repeats < 30) throw contract_error("precision_vs_time: need n_repeats >= 30");

    PrecisionCurve curve;
    std::vector<double> log_nph, log_sigma, sens;
    for (std::size_t ti = 0; ti < times_s.size(); ++ti) {
        const double t = times_s[ti];
        const Spectrum expected =
            synthesize_expected_spectrum(cfg.ensemble, cfg.cal, cfg.temperature_K, cfg.grid,
                                         cfg.brightness_cps, t, cfg.response);

        std::vector<double> estimates;
        estimates.reserve(n_repeats);
        int failures = 0;
        for (int rep = 0; rep < n_repeats; ++rep) {
            const std::uint64_t rep_seed = derive_seed(seed, ti * 1000003ULL + rep);
            const Spectrum noisy = sample_ccd_spectrum(expected, cfg.ccd, rep_seed);
            try {
                MeasureOptions rep_opt = opt;
                rep_opt.seed = derive_seed(rep_seed, 1);
                estimates.push_back(measure_temperature(noisy, cfg.cal, rep_opt).t_K);
            } catch (const error&) {
                ++failures;
            }
        }
        if (failures > 0.05 * n_repeats)
            throw data_quality_error("precision_vs_time: fit failure rate above 5% at t = " +
                                     std::to_string(t) + " s");

        PrecisionPoint pt;
        pt.integration_time_s = t;
        pt.sigma_T_K = sample_std(estimates);
        pt.total_photons = expected.total_counts();
        curve.points.push_back(pt);
        log_nph.push_back(std::log(pt.total_photons));
        log_sigma.push_back(std::log(pt.sigma_T_K));
        sens.push_back(pt.sigma_T_K * std::sqrt(t) * 1e3);
    }

    const LineFit fit = linear_regression(log_nph, log_sigma);
    curve.fitted_exponent = fit.slope;
    curve.fitted_exponent_sigma = fit.slope_sigma;
    curve.sensitivity_mK_per_rtHz = mean(sens);
    return curve;
}

VolumeSensitivity sensitivity_per_volume(double sensitivity_mK_per_rtHz, double volume_um3) {
    if (!(sensitivity_mK_per_rtHz > 0.0) || !(volume_um3 > 0.0))
        throw contract_error("sensitivity_per_volume: inputs must be > 0");
    VolumeSensitivity v;
    v.sensitivity_mK_per_rtHz = sensitivity_mK_per_rtHz;
    v.volume_um3 = volume_um3;
    v.per_volume = sensitivity_mK_per_rtHz * std::sqrt(volume_um3);
    return v;
}

} // namespace sivtherm
