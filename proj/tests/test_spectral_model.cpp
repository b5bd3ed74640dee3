#include <doctest.h>

#include <cmath>

#include "sivtherm/spectral_model.hpp"

using namespace sivtherm;

namespace {

// Symmetric grid around 738 nm (equal bin count on both sides of the center
// bin) for symmetry-sensitive checks.
WavelengthGrid symmetric_grid() {
    return WavelengthGrid{719.25, 0.025, 1501};
}

ThermoCalibration test_cal(double fwhm = 1.0) {
    ThermoCalibration c = ThermoCalibration::bulk();
    c.fwhm_ref_nm = fwhm;
    return c;
}

} // namespace

TEST_CASE("eval_lorentzian: peak, half width, far wing") {
    LorentzianParams p{738.0, 1.0, 1000.0, 0.0};
    CHECK(eval_lorentzian(p, 738.0) == doctest::Approx(1000.0));
    CHECK(eval_lorentzian(p, 738.5) == doctest::Approx(500.0));
    CHECK(eval_lorentzian(p, 737.5) == doctest::Approx(500.0));

    // Independent evaluation through the algebraically different form
    // B + A / (1 + (2 d / G)^2).
    p.baseline = 100.0;
    const double d = 10.0;
    const double oracle = 100.0 + 1000.0 / (1.0 + (2.0 * d / 1.0) * (2.0 * d / 1.0));
    CHECK(eval_lorentzian(p, 748.0) == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(eval_lorentzian(p, 728.0) == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(oracle == doctest::Approx(102.5).epsilon(1e-4));
}

TEST_CASE("eval_lorentzian: exact symmetry about the center") {
    const LorentzianParams p{737.8131, 2.3, 517.0, 41.0};
    for (int i = 1; i <= 40; ++i) {
        const double delta = 0.037 * i * i;
        CHECK(eval_lorentzian(p, p.center_nm + delta) ==
              doctest::Approx(eval_lorentzian(p, p.center_nm - delta)).epsilon(1e-14));
    }
}

TEST_CASE("line_params_at: reference point, paper slope, window error") {
    const ThermoCalibration cal = test_cal(1.4);
    const LorentzianParams at_ref = line_params_at(cal, 295.0);
    CHECK(at_ref.center_nm == doctest::Approx(738.0));
    CHECK(at_ref.fwhm_nm == doctest::Approx(1.4));
    CHECK(at_ref.amplitude == doctest::Approx(1.0));

    CHECK(line_params_at(cal, 296.0).center_nm == doctest::Approx(738.0124).epsilon(1e-12));
    CHECK(line_params_at(cal, 296.0).fwhm_nm == doctest::Approx(1.43).epsilon(1e-12));

    CHECK_THROWS_AS(line_params_at(cal, 285.0), window_error);
    CHECK_THROWS_AS(line_params_at(cal, 305.0), window_error);
}

TEST_CASE("line_params_at: exact linearity inside the window") {
    const ThermoCalibration cal = test_cal();
    const double t1 = 291.0, t2 = 299.0;
    const double lhs = line_params_at(cal, t1).center_nm + line_params_at(cal, t2).center_nm;
    const double rhs = 2.0 * line_params_at(cal, 0.5 * (t1 + t2)).center_nm;
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-14));
}

TEST_CASE("synthesize: fringe-free single line integrates to brightness*exposure") {
    const ThermoCalibration cal = test_cal(1.0);
    const WavelengthGrid grid = symmetric_grid();
    const double brightness = 2.5e5, exposure = 2.0;
    const Spectrum s = synthesize_expected_spectrum(EmitterEnsemble::single(), cal, 295.0, grid,
                                                    brightness, exposure);

    // The grid truncates the Lorentzian tails; the in-window mass is
    // (2/pi) atan(span / fwhm) of the total.
    const double half_span = 738.0 - (grid.start_nm - 0.5 * grid.step_nm);
    const double in_window = 2.0 / std::numbers::pi * std::atan(2.0 * half_span / 1.0);
    CHECK(s.total_counts() == doctest::Approx(brightness * exposure * in_window).epsilon(1e-9));
    CHECK(s.total_counts() > 0.97 * brightness * exposure);

    // Doubling exposure doubles every bin.
    const Spectrum s2 = synthesize_expected_spectrum(EmitterEnsemble::single(), cal, 295.0, grid,
                                                     brightness, 2.0 * exposure);
    for (int i = 0; i < grid.n_bins; i += 97)
        CHECK(s2.counts[i] == doctest::Approx(2.0 * s.counts[i]).epsilon(1e-13));
}

TEST_CASE("synthesize: strained pair is symmetric with centroid at the reference") {
    const ThermoCalibration cal = test_cal(1.0);
    const WavelengthGrid grid = symmetric_grid();
    const Spectrum s = synthesize_expected_spectrum(EmitterEnsemble::strained_pair(), cal, 295.0,
                                                    grid, 1e6, 1.0);
    const int mid = grid.bin_of(738.0);
    for (int off = 1; off < 700; off += 13)
        CHECK(s.counts[mid + off] == doctest::Approx(s.counts[mid - off]).epsilon(1e-11));

    double wsum = 0.0, csum = 0.0;
    for (int i = 0; i < grid.n_bins; ++i) {
        wsum += s.counts[i] * grid.wavelength_nm(i);
        csum += s.counts[i];
    }
    CHECK(wsum / csum == doctest::Approx(738.0).epsilon(1e-9));
}

TEST_CASE("synthesize: fringed/fringe-free ratio is exactly the fringe function") {
    const ThermoCalibration cal = test_cal(1.0);
    const WavelengthGrid grid = symmetric_grid();
    InstrumentResponse resp;
    resp.fringe_depth = 0.1;
    resp.fringe_period_nm = 5.0;
    resp.fringe_phase_rad = 0.7;

    const Spectrum flat = synthesize_expected_spectrum(EmitterEnsemble::single(), cal, 295.0,
                                                       grid, 1e6, 1.0);
    const Spectrum fringed = synthesize_expected_spectrum(EmitterEnsemble::single(), cal, 295.0,
                                                          grid, 1e6, 1.0, resp);
    for (int i = 0; i < grid.n_bins; i += 31) {
        const double ratio = fringed.counts[i] / flat.counts[i];
        CHECK(std::abs(ratio - fringe_factor(resp, grid.wavelength_nm(i))) < 1e-12);
    }
}

TEST_CASE("synthesize: grid argmax tracks the line center across the window") {
    const ThermoCalibration cal = test_cal(1.3);
    const WavelengthGrid grid = symmetric_grid();
    for (double t : {290.5, 293.0, 295.0, 297.25, 299.9}) {
        const Spectrum s = synthesize_expected_spectrum(EmitterEnsemble::single(), cal, t, grid,
                                                        1e6, 1.0);
        int argmax = 0;
        for (int i = 1; i < grid.n_bins; ++i)
            if (s.counts[i] > s.counts[argmax]) argmax = i;
        CHECK(argmax == grid.bin_of(line_params_at(cal, t).center_nm));
    }
}

TEST_CASE("sub-ensemble susceptibility factors span exactly twice the scatter") {
    EmitterEnsemble e;
    e.sub_ensembles = {SubEnsemble{-0.02, 1.0, 0.25}, SubEnsemble{0.0, 1.0, 0.5},
                       SubEnsemble{0.02, 1.0, 0.25}};
    e.susceptibility_scatter = 0.03;
    double lo = 1e9, hi = -1e9;
    for (std::size_t k = 0; k < e.sub_ensembles.size(); ++k) {
        const double f = sub_ensemble_susceptibility_factor(e, k);
        lo = std::min(lo, f);
        hi = std::max(hi, f);
    }
    CHECK(hi - lo == doctest::Approx(2.0 * e.susceptibility_scatter).epsilon(1e-14));
    CHECK(sub_ensemble_susceptibility_factor(EmitterEnsemble::single(), 0) == 1.0);
}

TEST_CASE("type invariants are enforced") {
    CHECK_THROWS_AS(validate(LorentzianParams{738.0, -1.0, 1.0, 0.0}), contract_error);
    CHECK_THROWS_AS(validate(WavelengthGrid{738.0, 0.0, 100}), contract_error);
    CHECK_THROWS_AS(validate(WavelengthGrid{738.0, 0.025, 1}), contract_error);
    EmitterEnsemble bad;
    bad.sub_ensembles = {SubEnsemble{0.0, 1.0, 0.7}};
    CHECK_THROWS_AS(validate(bad), contract_error);
    InstrumentResponse r;
    r.fringe_depth = 1.0;
    CHECK_THROWS_AS(validate(r), contract_error);

    // Defaults carry the spectrometer geometry.
    const WavelengthGrid g;
    CHECK(g.step_nm == doctest::Approx(0.025));
    CHECK(g.n_bins == 1500);
}
