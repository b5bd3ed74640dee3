#include "sivtherm/heat_transport.hpp"

#include <cmath>
#include <numbers>

namespace sivtherm {

namespace {

double gauss_sigma_from_fwhm(double fwhm) {
    return fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0)));
}

/// Mass of a unit 2-D Gaussian centered at (cx, cy) inside an axis-aligned
/// rectangle: product of two 1-D erf integrals.
double gaussian_mass_in_rect(double cx, double cy, double sigma, double x0, double x1, double y0,
                             double y1) {
    const double inv = 1.0 / (sigma * std::numbers::sqrt2);
    const double fx = 0.5 * (std::erf((x1 - cx) * inv) - std::erf((x0 - cx) * inv));
    const double fy = 0.5 * (std::erf((y1 - cy) * inv) - std::erf((y0 - cy) * inv));
    return fx * fy;
}

} // namespace

HeatScene HeatScene::pad_array(int nx, int ny, double pitch_um) {
    HeatScene s;
    s.pad_centers_um.reserve(static_cast<std::size_t>(nx) * ny);
    const double ox = -0.5 * (nx - 1) * pitch_um;
    const double oy = -0.5 * (ny - 1) * pitch_um;
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix)
            s.pad_centers_um.push_back({ox + ix * pitch_um, oy + iy * pitch_um});
    return s;
}

void validate(const HeatScene& scene) {
    if (!(scene.substrate_conductivity_W_per_mK > 0.0))
        throw contract_error("HeatScene: conductivity must be > 0");
    if (!(scene.absorbance >= 0.0 && scene.absorbance <= 1.0))
        throw contract_error("HeatScene: absorbance must be in [0,1]");
    if (!(scene.pad_size_um > 0.0)) throw contract_error("HeatScene: pad_size must be > 0");
    for (std::size_t i = 0; i < scene.pad_centers_um.size(); ++i)
        for (std::size_t j = i + 1; j < scene.pad_centers_um.size(); ++j) {
            const double dx = std::abs(scene.pad_centers_um[i][0] - scene.pad_centers_um[j][0]);
            const double dy = std::abs(scene.pad_centers_um[i][1] - scene.pad_centers_um[j][1]);
            if (dx < scene.pad_size_um - 1e-12 && dy < scene.pad_size_um - 1e-12)
                throw contract_error("HeatScene: pads overlap");
        }
}

double absorbed_power_W(const HeatScene& scene, const Point2& heater_um, double heater_power_W,
                        double spot_fwhm_um) {
    validate(scene);
    if (heater_power_W < 0.0) throw contract_error("absorbed_power: power must be >= 0");
    if (!(spot_fwhm_um > 0.0)) throw contract_error("absorbed_power: spot_fwhm must be > 0");

    const double sigma = gauss_sigma_from_fwhm(spot_fwhm_um);
    const double h = 0.5 * scene.pad_size_um;
    double fraction = 0.0;
    for (const Point2& pad : scene.pad_centers_um)
        fraction += gaussian_mass_in_rect(heater_um[0], heater_um[1], sigma, pad[0] - h, pad[0] + h,
                                          pad[1] - h, pad[1] + h);
    return scene.absorbance * heater_power_W * fraction;
}

double steady_state_delta_T_K(const HeatScene& scene, const Point2& heater_um,
                              double heater_power_W, double spot_fwhm_um, int subdivision) {
    validate(scene);
    if (subdivision < 0) throw contract_error("steady_state_delta_T: subdivision must be >= 0");
    const double dx = scene.probe_position_um[0] - heater_um[0];
    const double dy = scene.probe_position_um[1] - heater_um[1];
    const double dist_um = std::hypot(dx, dy);
    if (!(dist_um > 0.0))
        throw contract_error("steady_state_delta_T: probe coincides with the heater (singular)");

    const double kappa = scene.substrate_conductivity_W_per_mK;
    const double two_pi_kappa = 2.0 * std::numbers::pi * kappa;

    if (subdivision == 0 || dist_um >= scene.pad_size_um) {
        const double p_abs = absorbed_power_W(scene, heater_um, heater_power_W, spot_fwhm_um);
        return p_abs / (two_pi_kappa * dist_um * 1e-6);
    }

    // Near field: distribute each pad's absorbed power over an n x n grid of
    // point sources, each carrying the Gaussian mass of its own cell.
    const double sigma = gauss_sigma_from_fwhm(spot_fwhm_um);
    const double h = 0.5 * scene.pad_size_um;
    const double cell = scene.pad_size_um / subdivision;
    double dT = 0.0;
    for (const Point2& pad : scene.pad_centers_um) {
        for (int iy = 0; iy < subdivision; ++iy) {
            for (int ix = 0; ix < subdivision; ++ix) {
                const double x0 = pad[0] - h + ix * cell;
                const double y0 = pad[1] - h + iy * cell;
                const double mass = gaussian_mass_in_rect(heater_um[0], heater_um[1], sigma, x0,
                                                          x0 + cell, y0, y0 + cell);
                if (mass <= 0.0) continue;
                const double cx = x0 + 0.5 * cell;
                const double cy = y0 + 0.5 * cell;
                const double r_um = std::hypot(scene.probe_position_um[0] - cx,
                                               scene.probe_position_um[1] - cy);
                if (!(r_um > 0.0))
                    throw contract_error("steady_state_delta_T: probe coincides with a source cell");
                dT += scene.absorbance * heater_power_W * mass / (two_pi_kappa * r_um * 1e-6);
            }
        }
    }
    return dT;
}

ScanMap scan_heat_map(const HeatScene& scene, double x0_um, double y0_um, double dx_um,
                      double dy_um, int nx, int ny, double heater_power_W, double spot_fwhm_um,
                      double exclusion_radius_um) {
    validate(scene);
    if (nx < 1 || ny < 1 || !(dx_um > 0.0) || !(dy_um > 0.0))
        throw contract_error("scan_heat_map: invalid scan grid");

    ScanMap map;
    map.x0_um = x0_um;
    map.y0_um = y0_um;
    map.dx_um = dx_um;
    map.dy_um = dy_um;
    map.nx = nx;
    map.ny = ny;
    map.heater_power_W = heater_power_W;
    map.spot_fwhm_um = spot_fwhm_um;
    map.exclusion_radius_um = exclusion_radius_um;
    map.delta_T_K.assign(static_cast<std::size_t>(nx) * ny, 0.0);
    map.masked.assign(static_cast<std::size_t>(nx) * ny, 0);

    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            const Point2 rh = map.node(ix, iy);
            const std::size_t idx = static_cast<std::size_t>(iy) * nx + ix;
            const double d = std::hypot(rh[0] - scene.probe_position_um[0],
                                        rh[1] - scene.probe_position_um[1]);
            if (d <= exclusion_radius_um) {
                map.masked[idx] = 1;
                continue;
            }
            map.delta_T_K[idx] =
                steady_state_delta_T_K(scene, rh, heater_power_W, spot_fwhm_um);
        }
    }
    return map;
}

AbsorbanceFit fit_absorbance(const std::vector<ProfilePoint>& observed, const HeatScene& scene,
                             double heater_power_W, double spot_fwhm_um, double sigma_frac) {
    if (observed.size() < 5)
        throw contract_error("fit_absorbance: need at least 5 data points");

    HeatScene unit = scene;
    unit.absorbance = 1.0;

    // dT = absorbance * model1(r_h); closed-form 1-D least squares.
    const std::size_t n = observed.size();
    std::vector<double> model1(n);
    double any_signal = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        model1[i] = steady_state_delta_T_K(unit, observed[i].heater_um, heater_power_W,
                                           spot_fwhm_um);
        any_signal += std::abs(model1[i]) + std::abs(observed[i].delta_T_K);
    }
    if (!(any_signal > 0.0))
        throw ill_conditioned_error("fit_absorbance: all-zero data (ill-posed)");

    double sxx = 0.0, sxy = 0.0;
    if (sigma_frac > 0.0) {
        // Multiplicative noise: weight by 1/model^2, i.e. average of dT/model.
        for (std::size_t i = 0; i < n; ++i) {
            if (!(model1[i] > 0.0)) continue;
            sxx += 1.0;
            sxy += observed[i].delta_T_K / model1[i];
        }
        if (!(sxx >= 5.0))
            throw ill_conditioned_error("fit_absorbance: too few points with model signal");
        AbsorbanceFit f;
        f.absorbance = sxy / sxx;
        f.sigma = sigma_frac * std::abs(f.absorbance) / std::sqrt(sxx);
        return f;
    }

    for (std::size_t i = 0; i < n; ++i) {
        sxx += model1[i] * model1[i];
        sxy += model1[i] * observed[i].delta_T_K;
    }
    if (!(sxx > 0.0)) throw ill_conditioned_error("fit_absorbance: zero forward model (ill-posed)");
    AbsorbanceFit f;
    f.absorbance = sxy / sxx;
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = observed[i].delta_T_K - f.absorbance * model1[i];
        rss += r * r;
    }
    f.sigma = std::sqrt(rss / (static_cast<double>(n - 1) * sxx));
    return f;
}

AbsorbanceFit fit_absorbance(const ScanMap& observed, const HeatScene& scene, double sigma_frac) {
    std::vector<ProfilePoint> pts;
    for (int iy = 0; iy < observed.ny; ++iy)
        for (int ix = 0; ix < observed.nx; ++ix) {
            const std::size_t idx = static_cast<std::size_t>(iy) * observed.nx + ix;
            if (observed.masked[idx]) continue;
            pts.push_back({observed.node(ix, iy), observed.delta_T_K[idx]});
        }
    return fit_absorbance(pts, scene, observed.heater_power_W, observed.spot_fwhm_um, sigma_frac);
}

} // namespace sivtherm
