#include "sivtherm/line_fitter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "sivtherm/rng.hpp"

namespace sivtherm {

namespace {

constexpr int kNParams = 4; // center, fwhm, amplitude, baseline

// The fitters work in grid-relative wavelength coordinates (offset from
// start_nm), so translating the grid translates the fitted center exactly.
struct FitProblem {
    std::vector<double> x; // bin centers relative to grid start
    std::vector<double> y;
    double span;
    double step;
    NoiseModel noise;

    double model(const std::array<double, 4>& th, double xi) const {
        const double hw = 0.5 * th[1];
        const double d = xi - th[0];
        return th[3] + th[2] * hw * hw / (d * d + hw * hw);
    }

    double variance(double m) const {
        const double g = noise.gain;
        return g * std::max(m, g) + noise.readout_sigma * noise.readout_sigma;
    }

    void jacobian_row(const std::array<double, 4>& th, double xi, double out[4]) const {
        const double hw = 0.5 * th[1];
        const double d = xi - th[0];
        const double denom = d * d + hw * hw;
        const double shape = hw * hw / denom;
        out[0] = th[2] * 2.0 * d * hw * hw / (denom * denom);
        out[1] = th[2] * 0.5 * hw * d * d * 2.0 / (denom * denom); // d/dG, G = 2 hw
        out[2] = shape;
        out[3] = 1.0;
    }

    double chi_square(const std::array<double, 4>& th) const {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double m = model(th, x[i]);
            const double r = y[i] - m;
            s += r * r / variance(m);
        }
        return s;
    }

    /// Full Gaussian negative-log-likelihood target for the sampler
    /// (chi-square plus the log-variance normalization).
    double log_likelihood(const std::array<double, 4>& th) const {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double m = model(th, x[i]);
            const double v = variance(m);
            const double r = y[i] - m;
            s += r * r / v + std::log(v);
        }
        return -0.5 * s;
    }
};

FitProblem make_problem(const Spectrum& s, const NoiseModel& noise) {
    validate(s);
    validate(noise);
    FitProblem p;
    p.step = s.grid.step_nm;
    p.span = s.grid.span_nm();
    p.noise = noise;
    p.x.resize(s.counts.size());
    for (std::size_t i = 0; i < p.x.size(); ++i) p.x[i] = static_cast<double>(i) * p.step;
    p.y = s.counts;
    return p;
}

// Solve A x = b for a small symmetric system, Gaussian elimination with
// partial pivoting. Returns false if singular.
bool solve_dense(std::vector<double> a, std::vector<double> b, int n, std::vector<double>& out) {
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
        if (std::abs(a[piv * n + col]) < 1e-300) return false;
        if (piv != col) {
            for (int c = 0; c < n; ++c) std::swap(a[col * n + c], a[piv * n + c]);
            std::swap(b[col], b[piv]);
        }
        const double inv = 1.0 / a[col * n + col];
        for (int r = col + 1; r < n; ++r) {
            const double f = a[r * n + col] * inv;
            if (f == 0.0) continue;
            for (int c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
            b[r] -= f * b[col];
        }
    }
    out.assign(n, 0.0);
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < n; ++c) s -= a[r * n + c] * out[c];
        out[r] = s / a[r * n + r];
    }
    return true;
}

bool invert_dense(const std::vector<double>& a, int n, std::vector<double>& inv) {
    inv.assign(n * n, 0.0);
    for (int col = 0; col < n; ++col) {
        std::vector<double> e(n, 0.0), x;
        e[col] = 1.0;
        if (!solve_dense(a, e, n, x)) return false;
        for (int r = 0; r < n; ++r) inv[r * n + col] = x[r];
    }
    return true;
}

std::array<double, 4> to_internal(const LorentzianParams& p, double start_nm) {
    return {p.center_nm - start_nm, p.fwhm_nm, p.amplitude, p.baseline};
}

LorentzianParams to_external(const std::array<double, 4>& th, double start_nm) {
    return LorentzianParams{start_nm + th[0], th[1], th[2], th[3]};
}

} // namespace

void validate(const ResponseEstimate& r) {
    if (r.factors.empty()) throw contract_error("ResponseEstimate: empty factors");
    for (double f : r.factors)
        if (!(f > 0.0)) throw contract_error("ResponseEstimate: factors must be > 0");
}

LorentzianParams initial_guess(const Spectrum& s) {
    validate(s);
    const int n = s.grid.n_bins;
    // Baseline from the tail bins; peak from a lightly smoothed maximum.
    const int edge = std::max(1, n / 20);
    double base = 0.0;
    for (int i = 0; i < edge; ++i) base += s.counts[i] + s.counts[n - 1 - i];
    base /= 2.0 * edge;
    base = std::max(base, 0.0);

    int peak_bin = 0;
    double peak_val = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        double v = 0.0;
        int m = 0;
        for (int j = std::max(0, i - 2); j <= std::min(n - 1, i + 2); ++j, ++m) v += s.counts[j];
        v /= m;
        if (v > peak_val) {
            peak_val = v;
            peak_bin = i;
        }
    }
    const double amp = peak_val - base;
    if (!(amp > 0.0)) throw ill_conditioned_error("initial_guess: spectrum has no peak above baseline");

    const double half = base + 0.5 * amp;
    int lo = peak_bin, hi = peak_bin;
    while (lo > 0 && s.counts[lo] > half) --lo;
    while (hi < n - 1 && s.counts[hi] > half) ++hi;
    const double fwhm = std::max(2.0 * s.grid.step_nm, (hi - lo) * s.grid.step_nm);

    return LorentzianParams{s.grid.wavelength_nm(peak_bin), fwhm, amp, base};
}

FitResult fit_least_squares(const Spectrum& s, const LorentzianParams& init,
                            const NoiseModel& noise) {
    FitProblem p = make_problem(s, noise);
    if (!s.grid.contains(init.center_nm))
        throw contract_error("fit_least_squares: init center outside the grid");
    if (!(init.fwhm_nm > 0.0) || !(init.amplitude > 0.0))
        throw contract_error("fit_least_squares: init needs positive fwhm and amplitude");

    std::array<double, 4> th = to_internal(init, s.grid.start_nm);
    const double fwhm_floor = 0.25 * p.step;

    const int n = static_cast<int>(p.x.size());
    std::vector<double> normal(16), grad(4), delta;
    double chi2 = p.chi_square(th);
    double lambda = 1e-3;
    bool converged = false;
    const int max_iter = 200;

    auto build_normal = [&](const std::array<double, 4>& t) {
        std::fill(normal.begin(), normal.end(), 0.0);
        std::fill(grad.begin(), grad.end(), 0.0);
        double row[4];
        for (int i = 0; i < n; ++i) {
            const double m = p.model(t, p.x[i]);
            const double w = 1.0 / p.variance(m);
            p.jacobian_row(t, p.x[i], row);
            const double r = p.y[i] - m;
            for (int a = 0; a < 4; ++a) {
                grad[a] += w * row[a] * r;
                for (int b = a; b < 4; ++b) normal[a * 4 + b] += w * row[a] * row[b];
            }
        }
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < a; ++b) normal[a * 4 + b] = normal[b * 4 + a];
    };

    int iter = 0;
    for (; iter < max_iter && !converged; ++iter) {
        build_normal(th);
        bool stepped = false;
        for (int attempt = 0; attempt < 16; ++attempt) {
            std::vector<double> damped = normal;
            for (int a = 0; a < 4; ++a) damped[a * 4 + a] *= (1.0 + lambda);
            if (!solve_dense(damped, grad, 4, delta)) {
                lambda *= 10.0;
                continue;
            }
            std::array<double, 4> trial = th;
            for (int a = 0; a < 4; ++a) trial[a] += delta[a];
            trial[1] = std::max(trial[1], fwhm_floor);
            const double trial_chi2 = p.chi_square(trial);
            if (std::isfinite(trial_chi2) && trial_chi2 <= chi2) {
                const double drop = chi2 - trial_chi2;
                th = trial;
                chi2 = trial_chi2;
                lambda = std::max(lambda / 3.0, 1e-12);
                stepped = true;
                if (drop < 1e-10 * (1.0 + chi2)) converged = true;
                break;
            }
            lambda *= 5.0;
        }
        if (!stepped) {
            converged = true; // no downhill direction left at any damping
        }
    }

    // Curvature-based standard errors at the optimum.
    build_normal(th);
    std::vector<double> cov;
    if (!invert_dense(normal, 4, cov))
        throw ill_conditioned_error("fit_least_squares: singular curvature (flat spectrum?)");

    FitResult result;
    result.params = to_external(th, s.grid.start_nm);
    result.sigmas = LorentzianParams{std::sqrt(std::max(cov[0], 0.0)),
                                     std::sqrt(std::max(cov[5], 0.0)),
                                     std::sqrt(std::max(cov[10], 0.0)),
                                     std::sqrt(std::max(cov[15], 0.0))};
    result.goodness = chi2 / std::max(1, n - kNParams);

    if (iter >= max_iter)
        throw convergence_error("fit_least_squares: iteration cap reached", result);
    if (!(result.params.amplitude > 2.0 * result.sigmas.amplitude))
        throw convergence_error("fit_least_squares: no significant peak at the optimum", result);
    return result;
}

namespace {

/// Stretch-move sweep with the current log-densities cached by the caller.
int stretch_move_cached(std::vector<std::vector<double>>& walkers, std::vector<double>& logp,
                        const LogDensity& log_density, double stretch_a, std::uint64_t seed) {
    const int nw = static_cast<int>(walkers.size());
    if (nw < 2) throw contract_error("stretch_move: need at least 2 walkers");
    const int d = static_cast<int>(walkers[0].size());
    if (d < 1) throw contract_error("stretch_move: empty parameter vectors");
    if (!(stretch_a > 1.0)) throw contract_error("stretch_move: stretch_a must be > 1");
    for (int k = 0; k < nw; ++k) {
        if (static_cast<int>(walkers[k].size()) != d)
            throw contract_error("stretch_move: inconsistent walker dimensions");
        if (!std::isfinite(logp[k]))
            throw contract_error("stretch_move: non-finite log-density at a current walker");
    }

    // Pre-draw every random number in walker order; the half-sweep updates
    // below are then order-independent within each half.
    RngEngine eng = make_engine(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<double> partner_u(nw), z_u(nw), accept_u(nw);
    for (int k = 0; k < nw; ++k) {
        partner_u[k] = uni(eng);
        z_u[k] = uni(eng);
        accept_u[k] = uni(eng);
    }

    const int half = nw / 2;
    int accepted = 0;
    std::vector<double> proposal(d);
    for (int phase = 0; phase < 2; ++phase) {
        const int begin = phase == 0 ? 0 : half;
        const int end = phase == 0 ? half : nw;
        const int other_begin = phase == 0 ? half : 0;
        const int other_count = phase == 0 ? nw - half : half;
        for (int k = begin; k < end; ++k) {
            const int j =
                other_begin + std::min(other_count - 1,
                                       static_cast<int>(partner_u[k] * other_count));
            const double t = 1.0 + (stretch_a - 1.0) * z_u[k];
            const double z = t * t / stretch_a;
            for (int c = 0; c < d; ++c)
                proposal[c] = walkers[j][c] + z * (walkers[k][c] - walkers[j][c]);
            const double lp = log_density(proposal);
            const double log_q = (d - 1) * std::log(z) + lp - logp[k];
            if (std::log(accept_u[k]) < log_q) {
                walkers[k] = proposal;
                logp[k] = lp;
                ++accepted;
            }
        }
    }
    return accepted;
}

} // namespace

int stretch_move(std::vector<std::vector<double>>& walkers, const LogDensity& log_density,
                 double stretch_a, std::uint64_t seed) {
    std::vector<double> logp(walkers.size());
    for (std::size_t k = 0; k < walkers.size(); ++k) logp[k] = log_density(walkers[k]);
    return stretch_move_cached(walkers, logp, log_density, stretch_a, seed);
}

FitResult fit_ensemble_mcmc(const Spectrum& s, const LorentzianParams& init,
                            const SamplerConfig& cfg, std::uint64_t seed,
                            const NoiseModel& noise) {
    validate(cfg, kNParams);
    FitProblem p = make_problem(s, noise);
    if (!s.grid.contains(init.center_nm))
        throw contract_error("fit_ensemble_mcmc: init center outside the grid");
    if (!(init.fwhm_nm > 0.0) || !(init.amplitude > 0.0))
        throw contract_error("fit_ensemble_mcmc: init needs positive fwhm and amplitude");

    const double span = p.span;
    const double fwhm_lo = 0.25 * p.step;
    const double fwhm_hi = 20.0 * span;

    LogDensity logpost = [&p, span, fwhm_lo, fwhm_hi](const std::vector<double>& th) {
        if (th[0] < -0.25 * span || th[0] > 1.25 * span) return -std::numeric_limits<double>::infinity();
        if (th[1] < fwhm_lo || th[1] > fwhm_hi) return -std::numeric_limits<double>::infinity();
        if (th[2] < 0.0 || th[3] < 0.0) return -std::numeric_limits<double>::infinity();
        return p.log_likelihood({th[0], th[1], th[2], th[3]});
    };

    // Small deterministic ball around the init point.
    const std::array<double, 4> center = to_internal(init, s.grid.start_nm);
    RngEngine eng = make_engine(derive_seed(seed, 0));
    std::uniform_real_distribution<double> uni(-0.5, 0.5);
    std::vector<std::vector<double>> walkers(cfg.n_walkers, std::vector<double>(kNParams));
    std::vector<double> logp(cfg.n_walkers);
    for (int k = 0; k < cfg.n_walkers; ++k) {
        for (int attempt = 0;; ++attempt) {
            walkers[k][0] = center[0] + 0.2 * p.step * uni(eng);
            walkers[k][1] = center[1] * (1.0 + 0.02 * uni(eng));
            walkers[k][2] = center[2] * (1.0 + 0.02 * uni(eng));
            walkers[k][3] = std::max(center[3], 0.0) * (1.0 + 0.02 * uni(eng)) +
                            1e-4 * center[2] * (uni(eng) + 0.5);
            logp[k] = logpost(walkers[k]);
            if (std::isfinite(logp[k])) break;
            if (attempt > 100)
                throw contract_error("fit_ensemble_mcmc: cannot start walkers at finite density");
        }
    }

    FitResult result;
    result.posterior.reserve(static_cast<std::size_t>(cfg.n_walkers) *
                             (cfg.n_steps - cfg.burn_in));
    long long accepted_post = 0;
    for (int step = 0; step < cfg.n_steps; ++step) {
        const int acc =
            stretch_move_cached(walkers, logp, logpost, cfg.stretch_a, derive_seed(seed, step + 1));
        if (step >= cfg.burn_in) {
            accepted_post += acc;
            for (int k = 0; k < cfg.n_walkers; ++k)
                result.posterior.push_back({s.grid.start_nm + walkers[k][0], walkers[k][1],
                                            walkers[k][2], walkers[k][3]});
        }
    }

    const double accept_rate = static_cast<double>(accepted_post) /
                               (static_cast<double>(cfg.n_walkers) * (cfg.n_steps - cfg.burn_in));
    if (accept_rate < 0.05)
        throw mixing_error("fit_ensemble_mcmc: acceptance rate below 5% after burn-in");

    std::array<double, 4> m{}, m2{};
    for (const auto& row : result.posterior)
        for (int a = 0; a < 4; ++a) m[a] += row[a];
    const double nsamp = static_cast<double>(result.posterior.size());
    for (int a = 0; a < 4; ++a) m[a] /= nsamp;
    for (const auto& row : result.posterior)
        for (int a = 0; a < 4; ++a) m2[a] += (row[a] - m[a]) * (row[a] - m[a]);
    for (int a = 0; a < 4; ++a) m2[a] = std::sqrt(m2[a] / (nsamp - 1.0));

    result.params = LorentzianParams{m[0], m[1], m[2], m[3]};
    result.sigmas = LorentzianParams{m2[0], m2[1], m2[2], m2[3]};
    result.goodness =
        p.chi_square(to_internal(result.params, s.grid.start_nm)) / std::max<int>(1, p.x.size() - kNParams);
    return result;
}

ResponseEstimate estimate_response_blackbody(const Spectrum& reference, int poly_degree) {
    validate(reference);
    if (poly_degree < 0 || poly_degree > 12)
        throw contract_error("estimate_response_blackbody: polynomial degree out of range");
    for (double c : reference.counts)
        if (!(c > 0.0))
            throw contract_error("estimate_response_blackbody: reference must be strictly positive");

    const int n = reference.grid.n_bins;
    const int np = poly_degree + 1;
    // Polynomial trend in the scaled coordinate u in [-1, 1].
    std::vector<double> normal(np * np, 0.0), rhs(np, 0.0), coeff;
    std::vector<double> powers(np);
    for (int i = 0; i < n; ++i) {
        const double u = n > 1 ? 2.0 * i / (n - 1.0) - 1.0 : 0.0;
        powers[0] = 1.0;
        for (int a = 1; a < np; ++a) powers[a] = powers[a - 1] * u;
        for (int a = 0; a < np; ++a) {
            rhs[a] += powers[a] * reference.counts[i];
            for (int b = 0; b < np; ++b) normal[a * np + b] += powers[a] * powers[b];
        }
    }
    if (!solve_dense(normal, rhs, np, coeff))
        throw ill_conditioned_error("estimate_response_blackbody: degenerate trend fit");

    ResponseEstimate r;
    r.method = ResponseEstimate::Method::blackbody;
    r.factors.resize(n);
    for (int i = 0; i < n; ++i) {
        const double u = n > 1 ? 2.0 * i / (n - 1.0) - 1.0 : 0.0;
        double trend = 0.0, up = 1.0;
        for (int a = 0; a < np; ++a) {
            trend += coeff[a] * up;
            up *= u;
        }
        if (!(trend > 0.0))
            throw ill_conditioned_error("estimate_response_blackbody: non-positive fitted trend");
        r.factors[i] = reference.counts[i] / trend;
    }
    return r;
}

ResponseEstimate estimate_response_residual(const Spectrum& s, const FitResult& fit,
                                            int smooth_bins) {
    validate(s);
    if (smooth_bins < 1) throw contract_error("estimate_response_residual: smooth_bins must be >= 1");
    const int n = s.grid.n_bins;

    ResponseEstimate r;
    r.method = ResponseEstimate::Method::residual;
    std::vector<double> raw(n);
    const double floor = 1e-6 * (fit.params.amplitude + fit.params.baseline);
    for (int i = 0; i < n; ++i) {
        const double m = eval_lorentzian(fit.params, s.grid.wavelength_nm(i));
        if (m <= floor) {
            raw[i] = 1.0;
            r.clamped_bins.push_back(i);
        } else {
            raw[i] = s.counts[i] / m;
        }
    }

    // Moving average; window short relative to the fringe period so the
    // fringe survives while bin noise is suppressed.
    const int hwin = smooth_bins / 2;
    r.factors.resize(n);
    for (int i = 0; i < n; ++i) {
        const int lo = std::max(0, i - hwin);
        const int hi = std::min(n - 1, i + hwin);
        double acc = 0.0;
        for (int j = lo; j <= hi; ++j) acc += raw[j];
        double f = acc / (hi - lo + 1);
        if (f < 0.2 || f > 5.0) {
            f = std::clamp(f, 0.2, 5.0);
            r.clamped_bins.push_back(i);
        }
        r.factors[i] = f;
    }
    return r;
}

Spectrum correct_spectrum(const Spectrum& s, const ResponseEstimate& r) {
    validate(s);
    validate(r);
    if (r.factors.size() != s.counts.size())
        throw contract_error("correct_spectrum: response length does not match spectrum");
    Spectrum out = s;
    for (std::size_t i = 0; i < out.counts.size(); ++i) out.counts[i] /= r.factors[i];
    return out;
}

std::array<double, 4> fisher_sigmas(const WavelengthGrid& grid, const LorentzianParams& truth,
                                    const NoiseModel& noise) {
    validate(grid);
    validate(truth);
    validate(noise);
    FitProblem p;
    p.step = grid.step_nm;
    p.span = grid.span_nm();
    p.noise = noise;
    const std::array<double, 4> th = {truth.center_nm - grid.start_nm, truth.fwhm_nm,
                                      truth.amplitude, truth.baseline};

    std::vector<double> info(16, 0.0);
    double row[4];
    for (int i = 0; i < grid.n_bins; ++i) {
        const double xi = i * grid.step_nm;
        const double m = p.model(th, xi);
        const double v = p.variance(m);
        p.jacobian_row(th, xi, row);
        // Gaussian likelihood with model-dependent variance: mean term plus
        // the variance-derivative term (dv/dtheta = gain * dm/dtheta above
        // the clamp).
        const double dv_scale = m > noise.gain ? noise.gain : 0.0;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                info[a * 4 + b] +=
                    row[a] * row[b] / v + 0.5 * dv_scale * dv_scale * row[a] * row[b] / (v * v);
    }
    std::vector<double> cov;
    if (!invert_dense(info, 4, cov))
        throw ill_conditioned_error("fisher_sigmas: singular information matrix");
    return {std::sqrt(cov[0]), std::sqrt(cov[5]), std::sqrt(cov[10]), std::sqrt(cov[15])};
}

} // namespace sivtherm
