#include "sivtherm/ple_lockin.hpp"

#include <cmath>
#include <random>

#include "sivtherm/rng.hpp"
#include "sivtherm/stats.hpp"

namespace sivtherm {

void validate(const LockInTrace& t) {
    if (t.bin_counts.size() != t.heater_on.size())
        throw contract_error("LockInTrace: counts and reference lengths differ");
    if (!(t.bin_duration_s > 0.0)) throw contract_error("LockInTrace: bin_duration must be > 0");
    if (t.bin_counts.empty()) throw contract_error("LockInTrace: empty trace");
}

double ple_intensity(double lambda_p_nm, double t_K, const ThermoCalibration& cal,
                     const PleConfig& cfg) {
    validate(cfg);
    const LorentzianParams line = line_params_at(cal, t_K); // amplitude is QE(t)
    return eval_lorentzian(line, lambda_p_nm);
}

double contrast(double lambda_p_nm, double t0_K, double dT_K, const ThermoCalibration& cal,
                const PleConfig& cfg) {
    const double i0 = ple_intensity(lambda_p_nm, t0_K, cal, cfg);
    if (!(i0 > 1e-12))
        throw contract_error("contrast: probe intensity vanishes at t0 (degenerate probe)");
    const double i1 = ple_intensity(lambda_p_nm, t0_K + dT_K, cal, cfg);
    return (i0 - i1) / i0;
}

double contrast_susceptibility(double lambda_p_nm, double t0_K, const ThermoCalibration& cal,
                               const PleConfig& cfg) {
    const double h = 1e-3;
    const double lo = ple_intensity(lambda_p_nm, t0_K - h, cal, cfg);
    const double hi = ple_intensity(lambda_p_nm, t0_K + h, cal, cfg);
    const double i0 = ple_intensity(lambda_p_nm, t0_K, cal, cfg);
    if (!(i0 > 1e-12))
        throw contract_error("contrast_susceptibility: degenerate probe intensity");
    return (lo - hi) / (2.0 * h * i0);
}

namespace {

/// |dI/dT| of the unit-amplitude line at fixed probe wavelength.
double abs_didt(double lambda_nm, double t0_K, const ThermoCalibration& cal,
                const PleConfig& cfg) {
    const double h = 1e-3;
    return std::abs(ple_intensity(lambda_nm, t0_K + h, cal, cfg) -
                    ple_intensity(lambda_nm, t0_K - h, cal, cfg)) /
           (2.0 * h);
}

} // namespace

double max_contrast_wavelength(const ThermoCalibration& cal, const PleConfig& cfg, double t0_K) {
    const LorentzianParams line = line_params_at(cal, t0_K);
    const double lo = line.center_nm - 3.0 * line.fwhm_nm;
    const double hi = line.center_nm + 3.0 * line.fwhm_nm;
    const int n_scan = 601;
    const double step = (hi - lo) / (n_scan - 1);

    // Coarse bracket; strict comparison keeps the blue-side optimum when the
    // two flanks tie (pure-shift case).
    int best = 0;
    double best_val = -1.0;
    for (int i = 0; i < n_scan; ++i) {
        const double v = abs_didt(lo + i * step, t0_K, cal, cfg);
        if (v > best_val) {
            best_val = v;
            best = i;
        }
    }

    double a = lo + std::max(0, best - 1) * step;
    double b = lo + std::min(n_scan - 1, best + 1) * step;
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = abs_didt(x1, t0_K, cal, cfg);
    double f2 = abs_didt(x2, t0_K, cal, cfg);
    while (b - a > 1e-10) {
        if (f1 > f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = abs_didt(x1, t0_K, cal, cfg);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = abs_didt(x2, t0_K, cal, cfg);
        }
    }
    return 0.5 * (a + b);
}

namespace {

struct CycleLayout {
    int bins_on = 0;
    int bins_off = 0;
    int n_cycles = 0;
};

CycleLayout cycle_layout(const LockInConfig& lock, double bin_duration_s) {
    validate(lock);
    if (!(bin_duration_s > 0.0)) throw contract_error("lock-in trace: bin_duration must be > 0");
    const double period = 1.0 / lock.mod_freq_hz;
    if (bin_duration_s > period / 10.0 + 1e-15)
        throw contract_error("lock-in trace: bin_duration must be <= period/10");

    const double on_s = lock.duty * period;
    const double off_s = (1.0 - lock.duty) * period;
    CycleLayout lay;
    lay.bins_on = static_cast<int>(std::lround(on_s / bin_duration_s));
    lay.bins_off = static_cast<int>(std::lround(off_s / bin_duration_s));
    if (lay.bins_on < 1 || lay.bins_off < 1 ||
        std::abs(lay.bins_on * bin_duration_s - on_s) > 1e-9 * period ||
        std::abs(lay.bins_off * bin_duration_s - off_s) > 1e-9 * period)
        throw contract_error("lock-in trace: bins do not align with the reference square wave");

    lay.n_cycles = static_cast<int>(std::floor(lock.duration_s * lock.mod_freq_hz + 1e-9));
    if (lay.n_cycles < 2)
        throw contract_error("lock-in trace: duration must cover at least 2 modulation cycles");
    return lay;
}

} // namespace

LockInTrace expected_lockin_trace(const PleConfig& ple, const LockInConfig& lock,
                                  const ThermalResponseModel& thermal,
                                  const ThermoCalibration& cal, double t0_K,
                                  double bin_duration_s) {
    validate(ple);
    validate(thermal);
    const CycleLayout lay = cycle_layout(lock, bin_duration_s);

    const double tau = thermal.time_constant_s;
    const double t_on = t0_K + thermal.steady_state_dT_per_W * lock.heater_power_W;
    const double t_off = t0_K;

    // Cyclo-stationary temperature at the start of the ON phase, so the trace
    // carries no settling transient.
    const double a_on = std::exp(-lay.bins_on * bin_duration_s / tau);
    const double a_off = std::exp(-lay.bins_off * bin_duration_s / tau);
    double temp = (t_off * (1.0 - a_off) + t_on * a_off * (1.0 - a_on)) / (1.0 - a_on * a_off);

    // 4-point Gauss-Legendre nodes on [0,1] for the in-bin rate integral.
    static const double gl_x[4] = {0.5 - 0.8611363115940526 / 2.0, 0.5 - 0.3399810435848563 / 2.0,
                                   0.5 + 0.3399810435848563 / 2.0, 0.5 + 0.8611363115940526 / 2.0};
    static const double gl_w[4] = {0.3478548451374538 / 2.0, 0.6521451548625461 / 2.0,
                                   0.6521451548625461 / 2.0, 0.3478548451374538 / 2.0};

    LockInTrace trace;
    trace.bin_duration_s = bin_duration_s;
    const int total_bins = lay.n_cycles * (lay.bins_on + lay.bins_off);
    trace.bin_counts.reserve(total_bins);
    trace.heater_on.reserve(total_bins);

    for (int cyc = 0; cyc < lay.n_cycles; ++cyc) {
        for (int phase = 0; phase < 2; ++phase) {
            const bool on = phase == 0;
            const double target = on ? t_on : t_off;
            const int nb = on ? lay.bins_on : lay.bins_off;
            for (int b = 0; b < nb; ++b) {
                double expected_rate = 0.0;
                for (int q = 0; q < 4; ++q) {
                    const double s = gl_x[q] * bin_duration_s;
                    const double t_q = target + (temp - target) * std::exp(-s / tau);
                    expected_rate +=
                        gl_w[q] * ple.psb_collection_rate_cps *
                        ple_intensity(ple.probe_wavelength_nm, t_q, cal, PleConfig{ple});
                }
                trace.bin_counts.push_back(expected_rate * bin_duration_s);
                trace.heater_on.push_back(on ? 1 : 0);
                temp = target + (temp - target) * std::exp(-bin_duration_s / tau);
            }
        }
    }
    return trace;
}

LockInTrace simulate_lockin_trace(const PleConfig& ple, const LockInConfig& lock,
                                  const ThermalResponseModel& thermal,
                                  const ThermoCalibration& cal, double t0_K,
                                  double bin_duration_s, std::uint64_t seed) {
    LockInTrace trace = expected_lockin_trace(ple, lock, thermal, cal, t0_K, bin_duration_s);
    RngEngine eng = make_engine(seed);
    for (double& c : trace.bin_counts) {
        if (c > 0.0) {
            std::poisson_distribution<long long> pois(c);
            c = static_cast<double>(pois(eng));
        }
    }
    return trace;
}

DemodResult demodulate(const LockInTrace& trace) {
    validate(trace);
    const int n = static_cast<int>(trace.bin_counts.size());

    // Recover the cycle structure from the reference flags.
    int bins_on = 0;
    while (bins_on < n && trace.heater_on[bins_on]) ++bins_on;
    int bins_off = bins_on;
    while (bins_off < n && !trace.heater_on[bins_off]) ++bins_off;
    bins_off -= bins_on;
    if (bins_on < 1 || bins_off < 1)
        throw contract_error("demodulate: trace must start with an on-phase then an off-phase");
    const int cycle = bins_on + bins_off;
    if (n % cycle != 0) throw contract_error("demodulate: trace length is not a whole cycle count");
    const int n_cycles = n / cycle;
    if (n_cycles < 10) throw contract_error("demodulate: need at least 10 full modulation cycles");
    for (int i = 0; i < n; ++i) {
        const bool expect_on = (i % cycle) < bins_on;
        if (static_cast<bool>(trace.heater_on[i]) != expect_on)
            throw contract_error("demodulate: reference flags are not a periodic square wave");
    }

    double sum_on = 0.0, sum_off = 0.0;
    std::vector<double> per_cycle(n_cycles);
    for (int c = 0; c < n_cycles; ++c) {
        double on = 0.0, off = 0.0;
        for (int b = 0; b < bins_on; ++b) on += trace.bin_counts[c * cycle + b];
        for (int b = bins_on; b < cycle; ++b) off += trace.bin_counts[c * cycle + b];
        sum_on += on;
        sum_off += off;
        const double on_rate = on / bins_on;
        const double off_rate = off / bins_off;
        per_cycle[c] = off_rate > 0.0 ? (off_rate - on_rate) / off_rate : 0.0;
    }
    const double mean_on = sum_on / (static_cast<double>(n_cycles) * bins_on);
    const double mean_off = sum_off / (static_cast<double>(n_cycles) * bins_off);
    if (!(mean_off > 0.0)) throw contract_error("demodulate: off-phase rate is not positive");

    DemodResult r;
    r.contrast = (mean_off - mean_on) / mean_off;
    r.sigma = sample_std(per_cycle) / std::sqrt(static_cast<double>(n_cycles));
    r.n_cycles = n_cycles;
    return r;
}

double susceptibility_chain(double dI_per_Ph, double dLambda_per_Ph_nm,
                            double d_center_dT_nm_per_K) {
    if (dLambda_per_Ph_nm == 0.0)
        throw contract_error("susceptibility_chain: dLambda/dPh must be nonzero");
    return dI_per_Ph * d_center_dT_nm_per_K / dLambda_per_Ph_nm;
}

double two_sided_contrast(double lambda_red_nm, double lambda_blue_nm, double t0_K, double dT_K,
                          const ThermoCalibration& cal, const PleConfig& cfg) {
    const double center = line_params_at(cal, t0_K).center_nm;
    if (!(lambda_red_nm > center && lambda_blue_nm < center))
        throw contract_error("two_sided_contrast: need lambda_red > center(t0) > lambda_blue");
    const double i_blue = ple_intensity(lambda_blue_nm, t0_K + dT_K, cal, cfg);
    const double i_red = ple_intensity(lambda_red_nm, t0_K + dT_K, cal, cfg);
    return (i_blue - i_red) / (i_blue + i_red);
}

} // namespace sivtherm
