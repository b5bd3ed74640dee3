#pragma once
#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "spectral_model.hpp"
#include "spectrum.hpp"

namespace sivtherm {

/// Per-bin count variance model used by both fitters:
///     var = gain * max(model, gain) + readout_sigma^2
/// (shot noise in scaled count units plus Gaussian readout). gain = 1 is the
/// plain photon-counting CCD.
struct NoiseModel {
    double readout_sigma = 10.0;
    double gain = 1.0;
};

inline void validate(const NoiseModel& n) {
    if (n.readout_sigma < 0.0) throw contract_error("NoiseModel: readout_sigma must be >= 0");
    if (!(n.gain > 0.0)) throw contract_error("NoiseModel: gain must be > 0");
}

/// Point estimates with standard errors; `sigmas` reuses the params struct
/// field-for-field. `posterior` is nonempty only for sampler fits, one
/// (center, fwhm, amplitude, baseline) row per retained sample.
struct FitResult {
    LorentzianParams params;
    LorentzianParams sigmas;
    std::vector<std::array<double, 4>> posterior;
    double goodness = 0.0; // reduced chi-square at the point estimate
};

/// A fit stopped without a trustworthy optimum; carries the best point seen.
struct convergence_error : error {
    convergence_error(const std::string& msg, FitResult best)
        : error(msg), best_so_far(std::move(best)) {}
    FitResult best_so_far;
};

/// Affine-invariant ensemble sampler settings (Goodman-Weare stretch move).
struct SamplerConfig {
    int n_walkers = 32;
    int n_steps = 2000;
    int burn_in = 500;
    double stretch_a = 2.0;
};

inline void validate(const SamplerConfig& c, int n_params) {
    if (c.n_walkers < 2 * n_params)
        throw contract_error("SamplerConfig: n_walkers must be >= 2 * n_params");
    if (!(c.stretch_a > 1.0)) throw contract_error("SamplerConfig: stretch_a must be > 1");
    if (!(c.burn_in >= 0 && c.burn_in < c.n_steps))
        throw contract_error("SamplerConfig: burn_in must be in [0, n_steps)");
}

/// Per-bin multiplicative instrument-response correction factors.
struct ResponseEstimate {
    enum class Method { blackbody, residual };
    std::vector<double> factors;
    Method method = Method::blackbody;
    std::vector<int> clamped_bins; // residual method: bins where the model was near zero
};

void validate(const ResponseEstimate& r);

/// Moment-based starting point for the fitters.
LorentzianParams initial_guess(const Spectrum& s);

/// Minimize the shot+readout chi-square by Levenberg-Marquardt with the
/// variance model re-evaluated from the current parameters each iteration.
/// sigmas come from the curvature (J^T W J)^-1 at the optimum. Throws
/// convergence_error (carrying best-so-far) when the iteration cap is hit or
/// the converged peak is not significant; ill_conditioned_error on degenerate
/// (flat) spectra.
FitResult fit_least_squares(const Spectrum& s, const LorentzianParams& init,
                            const NoiseModel& noise = {});

using LogDensity = std::function<double(const std::vector<double>&)>;

/// One Goodman-Weare stretch-move sweep over the ensemble (both complementary
/// halves), in place. For each walker X_k with partner X_j from the opposite
/// half, propose Y = X_j + z (X_k - X_j) with z ~ g(z) proportional to
/// 1/sqrt(z) on [1/a, a]; accept with min(1, z^(d-1) exp(logp(Y) - logp(X_k))).
/// All randomness is pre-drawn per walker, so the update order cannot change
/// the result. Returns the number of accepted moves.
int stretch_move(std::vector<std::vector<double>>& walkers, const LogDensity& log_density,
                 double stretch_a, std::uint64_t seed);

/// Sample the Gaussian shot+readout likelihood of a Lorentzian line and
/// report posterior means/standard deviations. Throws mixing_error when the
/// post-burn-in acceptance rate drops below 5%.
FitResult fit_ensemble_mcmc(const Spectrum& s, const LorentzianParams& init,
                            const SamplerConfig& cfg, std::uint64_t seed,
                            const NoiseModel& noise = {});

/// Instrument response from a broadband (blackbody) reference: divide the
/// reference by a fitted low-order polynomial trend, leaving the fringe.
ResponseEstimate estimate_response_blackbody(const Spectrum& reference, int poly_degree = 3);

/// Instrument response from the fit residuals of an ordinary spectrum:
/// observed / fitted model, smoothed with a moving average short enough to
/// preserve the fringe. Bins where the model is near zero are clamped and
/// flagged.
ResponseEstimate estimate_response_residual(const Spectrum& s, const FitResult& fit,
                                            int smooth_bins = 25);

/// Divide out the response factors; exposure metadata is preserved.
Spectrum correct_spectrum(const Spectrum& s, const ResponseEstimate& r);

/// Predicted standard error of (center, fwhm, amplitude, baseline) from the
/// Fisher information of the Gaussian shot+readout likelihood for a line with
/// the given true parameters on this grid. Used for experiment design; the
/// test suite carries its own independent finite-difference oracle.
std::array<double, 4> fisher_sigmas(const WavelengthGrid& grid, const LorentzianParams& truth,
                                    const NoiseModel& noise = {});

} // namespace sivtherm
