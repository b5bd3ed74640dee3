#pragma once
#include <stdexcept>
#include <string>

namespace sivtherm {

/// Base class for all library errors.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A caller-side precondition or type invariant was violated.
struct contract_error : error {
    using error::error;
};

/// A temperature (or a wavelength implying one) fell outside the linear
/// calibration window; the linear model is not valid there.
struct window_error : error {
    using error::error;
};

/// The requested quantity has no solution (e.g. SNR unreachable at zero rate).
struct no_solution_error : error {
    using error::error;
};

/// A fit problem is degenerate (flat data, singular normal equations).
struct ill_conditioned_error : error {
    using error::error;
};

/// The MCMC ensemble failed to mix (acceptance rate collapsed).
struct mixing_error : error {
    using error::error;
};

/// Too many fits failed while building an aggregate result.
struct data_quality_error : error {
    using error::error;
};

/// A file could not be parsed; message carries the offending line number.
struct parse_error : error {
    using error::error;
};

/// A config file failed validation (unknown key, missing unit suffix, ...).
struct config_error : error {
    using error::error;
};

} // namespace sivtherm
