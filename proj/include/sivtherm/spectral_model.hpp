#pragma once
#include <vector>

#include "spectrum.hpp"

namespace sivtherm {

/// Lorentzian line shape: baseline + amplitude * (G/2)^2 / ((l-l0)^2 + (G/2)^2).
struct LorentzianParams {
    double center_nm = 738.0;
    double fwhm_nm = 1.0;
    double amplitude = 1.0; // peak counts above baseline
    double baseline = 0.0;  // counts
};

inline void validate(const LorentzianParams& p) {
    if (!(p.fwhm_nm > 0.0)) throw contract_error("LorentzianParams: fwhm_nm must be > 0");
    if (p.amplitude < 0.0) throw contract_error("LorentzianParams: amplitude must be >= 0");
    if (p.baseline < 0.0) throw contract_error("LorentzianParams: baseline must be >= 0");
}

double eval_lorentzian(const LorentzianParams& p, double lambda_nm);

/// Linear temperature <-> line-shape dictionary around a room-temperature
/// reference point. Valid only inside |t - t_ref| <= linear_window_K.
///
/// The reference linewidth and the quantum-efficiency slope are not published
/// quantities; the committed defaults are produced by tools/derive_calibration
/// (see its --help for the two derivations).
struct ThermoCalibration {
    double t_ref_K = 295.0;
    double center_ref_nm = 738.0;
    double fwhm_ref_nm = 1.0;
    double d_center_dT_nm_per_K = 0.0124; // ZPL red shift
    double d_fwhm_dT_nm_per_K = 0.030;    // ZPL broadening
    double qe_slope_per_K = 0.0;          // fractional QE change, negative
    double linear_window_K = 5.0;

    /// Bulk-diamond PL preset: linewidth chosen so the Cramer-Rao sensitivity
    /// of the peak channel at the 10 MHz bulk count rate lands between the
    /// reported 337 and 360 mK/sqrt(Hz).
    static ThermoCalibration bulk();

    /// Nanodiamond PLE preset: linewidth and QE slope jointly tuned so the
    /// maximum-contrast susceptibility is 1.3 %/K with the line shift
    /// contributing the majority of the contrast.
    static ThermoCalibration nanodiamond();
};

inline void validate(const ThermoCalibration& c) {
    if (!(c.d_center_dT_nm_per_K > 0.0))
        throw contract_error("ThermoCalibration: d_center_dT must be > 0 (red shift)");
    if (c.d_fwhm_dT_nm_per_K < 0.0)
        throw contract_error("ThermoCalibration: d_fwhm_dT must be >= 0");
    if (!(c.fwhm_ref_nm > 0.0)) throw contract_error("ThermoCalibration: fwhm_ref_nm must be > 0");
    if (!(c.linear_window_K > 0.0))
        throw contract_error("ThermoCalibration: linear_window_K must be > 0");
}

/// Line parameters at temperature t: linear shift, linear broadening, and the
/// relative quantum efficiency folded into a unit-scale amplitude.
/// Throws window_error outside the linear window.
LorentzianParams line_params_at(const ThermoCalibration& cal, double t_K);

/// Strain splits the ensemble into sub-ensembles with offset ZPL positions
/// and slightly different susceptibilities.
struct SubEnsemble {
    double center_offset_nm = 0.0;
    double fwhm_scale = 1.0;
    double weight = 1.0;
};

struct EmitterEnsemble {
    std::vector<SubEnsemble> sub_ensembles{SubEnsemble{}};
    /// Fractional spread of d_center_dT across sub-ensembles; sub-ensemble k
    /// of K gets the deterministic factor 1 + scatter*(2k/(K-1) - 1).
    double susceptibility_scatter = 0.03;

    static EmitterEnsemble single();
    /// Two equal-weight sub-ensembles at +-offset; the default offset is the
    /// +-2 K strain equivalent, 2 K * 0.0124 nm/K.
    static EmitterEnsemble strained_pair(double offset_nm = 2.0 * 0.0124);
};

void validate(const EmitterEnsemble& e);

/// Susceptibility factor (1 + scatter * spread) applied to sub-ensemble k.
double sub_ensemble_susceptibility_factor(const EmitterEnsemble& e, std::size_t k);

/// Etalon-like fringe on the collection arm, modeled as one multiplicative
/// sinusoid: 1 + depth * sin(2 pi lambda / period + phase).
struct InstrumentResponse {
    double fringe_depth = 0.0;
    double fringe_period_nm = 5.0;
    double fringe_phase_rad = 0.0;
};

inline void validate(const InstrumentResponse& r) {
    if (!(r.fringe_depth >= 0.0 && r.fringe_depth < 1.0))
        throw contract_error("InstrumentResponse: fringe_depth must be in [0,1)");
    if (!(r.fringe_period_nm > 0.0))
        throw contract_error("InstrumentResponse: fringe_period_nm must be > 0");
}

double fringe_factor(const InstrumentResponse& r, double lambda_nm);

/// Noiseless expected-count spectrum of the ensemble at temperature t.
///
/// Each sub-ensemble contributes an exactly bin-integrated Lorentzian; the
/// composite is normalized so the total expected signal over an infinite
/// detector equals brightness*exposure (the grid truncates the tails), then
/// multiplied bin-wise by the fringe response. Counts therefore map directly
/// to detector rate, and the fringed/fringe-free ratio is exactly the fringe
/// function at bin centers.
Spectrum synthesize_expected_spectrum(const EmitterEnsemble& ensemble,
                                      const ThermoCalibration& cal,
                                      double t_K,
                                      const WavelengthGrid& grid,
                                      double brightness_cps,
                                      double exposure_s,
                                      const InstrumentResponse& resp = {});

} // namespace sivtherm
