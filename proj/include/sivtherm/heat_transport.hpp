#pragma once
#include <array>
#include <cstdint>
#include <vector>

#include "errors.hpp"

namespace sivtherm {

using Point2 = std::array<double, 2>; // (x, y) in um

/// Gold-pad array on a glass substrate with the probe nanodiamond location.
struct HeatScene {
    std::vector<Point2> pad_centers_um;
    double pad_size_um = 2.0;
    double pad_thickness_nm = 50.0; // metadata only; not used by the model
    double substrate_conductivity_W_per_mK = 1.0;
    double absorbance = 0.5;
    Point2 probe_position_um{0.0, 0.0};

    /// nx-by-ny pad array on a square pitch, centered on the origin.
    static HeatScene pad_array(int nx, int ny, double pitch_um);
};

void validate(const HeatScene& scene);

/// Heating power absorbed by the pads: absorbance * P_h * (mass of the
/// Gaussian heating spot overlapping any pad). Axis-aligned square pads make
/// each overlap an exact product of 1-D Gaussian integrals (erf).
double absorbed_power_W(const HeatScene& scene, const Point2& heater_um, double heater_power_W,
                        double spot_fwhm_um);

/// Steady-state temperature rise at the probe. Far field
/// (|r_p - r_h| >= pad_size): point source, dT = P_abs / (2 pi kappa r).
/// Near field: each pad is subdivided into an n-by-n grid of point sources
/// carrying their share of the absorbed power. `subdivision` is exposed for
/// convergence checks; 0 forces the far-field formula.
double steady_state_delta_T_K(const HeatScene& scene, const Point2& heater_um,
                              double heater_power_W, double spot_fwhm_um, int subdivision = 4);

/// Rectangular scan of the heating laser with dT at the probe per node.
/// Nodes inside exclusion_radius_um of the probe are masked (near the
/// nanodiamond the heating laser's own fluorescence swamps the signal).
struct ScanMap {
    double x0_um = 0.0, y0_um = 0.0;
    double dx_um = 1.0, dy_um = 1.0;
    int nx = 0, ny = 0;
    std::vector<double> delta_T_K; // row-major, index = iy*nx + ix
    std::vector<std::uint8_t> masked;
    double heater_power_W = 0.0;
    double spot_fwhm_um = 0.0;
    double exclusion_radius_um = 0.0;

    Point2 node(int ix, int iy) const { return {x0_um + ix * dx_um, y0_um + iy * dy_um}; }
};

ScanMap scan_heat_map(const HeatScene& scene, double x0_um, double y0_um, double dx_um,
                      double dy_um, int nx, int ny, double heater_power_W, double spot_fwhm_um,
                      double exclusion_radius_um = 1.0);

/// One (heater position, observed dT) sample for the absorbance fit.
struct ProfilePoint {
    Point2 heater_um{0.0, 0.0};
    double delta_T_K = 0.0;
};

struct AbsorbanceFit {
    double absorbance = 0.0;
    double sigma = 0.0;
};

/// One-parameter least squares: dT is linear in absorbance, so the estimate
/// is closed-form against the forward model with all other scene parameters
/// fixed. When sigma_frac > 0 the fit weights points by the known fractional
/// noise; otherwise the error comes from the residual scatter.
AbsorbanceFit fit_absorbance(const std::vector<ProfilePoint>& observed, const HeatScene& scene,
                             double heater_power_W, double spot_fwhm_um, double sigma_frac = 0.0);

/// Convenience overload over the unmasked nodes of a measured map.
AbsorbanceFit fit_absorbance(const ScanMap& observed, const HeatScene& scene,
                             double sigma_frac = 0.0);

} // namespace sivtherm
