#pragma once
#include <cmath>
#include <vector>

#include "errors.hpp"

namespace sivtherm {

/// Uniform wavelength binning of the spectrometer CCD. `start_nm` is the
/// center of bin 0; bin i covers [start + (i-1/2)*step, start + (i+1/2)*step).
/// Defaults match the 1800 gr/mm grating: 0.025 nm bins, 1500 CCD columns,
/// window centered on the 738 nm ZPL.
struct WavelengthGrid {
    double start_nm = 719.25;
    double step_nm = 0.025;
    int n_bins = 1500;

    double wavelength_nm(int i) const { return start_nm + i * step_nm; }
    double end_nm() const { return wavelength_nm(n_bins - 1); }
    double span_nm() const { return step_nm * n_bins; }

    /// Index of the bin whose interval contains lambda (clamped to the grid).
    int bin_of(double lambda_nm) const {
        const int i = static_cast<int>(std::lround((lambda_nm - start_nm) / step_nm));
        return i < 0 ? 0 : (i >= n_bins ? n_bins - 1 : i);
    }

    bool contains(double lambda_nm) const {
        return lambda_nm >= start_nm - 0.5 * step_nm && lambda_nm <= end_nm() + 0.5 * step_nm;
    }
};

inline void validate(const WavelengthGrid& g) {
    if (!(g.step_nm > 0.0)) throw contract_error("WavelengthGrid: step_nm must be > 0");
    if (g.n_bins < 2) throw contract_error("WavelengthGrid: n_bins must be >= 2");
}

/// Wavelength-binned photon counts with exposure metadata. Counts are
/// real-valued: CCD readout noise makes observed values non-integer, and
/// expected (noiseless) spectra are real by nature.
struct Spectrum {
    WavelengthGrid grid;
    std::vector<double> counts;
    double exposure_s = 1.0;

    double total_counts() const {
        double s = 0.0;
        for (double c : counts) s += c;
        return s;
    }
};

inline void validate(const Spectrum& s) {
    validate(s.grid);
    if (static_cast<int>(s.counts.size()) != s.grid.n_bins)
        throw contract_error("Spectrum: counts length must equal grid.n_bins");
    if (!(s.exposure_s > 0.0)) throw contract_error("Spectrum: exposure_s must be > 0");
}

} // namespace sivtherm
