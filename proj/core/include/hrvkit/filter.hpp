#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hrvkit::filter {

/// Second-order IIR section, coefficients normalized so a0 = 1.
struct Biquad {
    double b0 = 1.0, b1 = 0.0, b2 = 0.0;
    double a1 = 0.0, a2 = 0.0;
};

/// Cascade of biquad sections. All designs are computed at run time from the
/// requested corners and sampling rate via the bilinear transform.
struct BiquadCascade {
    std::vector<Biquad> sections;

    /// Largest pole magnitude across sections; < 1 for a stable design.
    double max_pole_radius() const;

    /// Complex gain magnitude at frequency f_hz for sampling rate fs_hz.
    double gain_at(double f_hz, double fs_hz) const;
};

// Butterworth designs. Throw InvalidBand when the corners are out of range
// for the sampling rate or the design comes out unstable.
BiquadCascade design_butter_lowpass(int order, double cutoff_hz, double fs_hz);
BiquadCascade design_butter_bandpass(int order, double low_hz, double high_hz,
                                     double fs_hz);
// RBJ-cookbook second-order notch.
BiquadCascade design_notch(double freq_hz, double q, double fs_hz);

/// Single causal forward pass, zero initial state.
std::vector<double> apply_forward(const BiquadCascade& cascade,
                                  std::span<const double> x);

/// Forward-backward application (zero phase). The signal is extended on both
/// ends by odd reflection sized from the cascade's settling length, and each
/// pass starts from the steady state of its first sample, so edge transients
/// stay small. Output length equals input length.
std::vector<double> apply_zero_phase(const BiquadCascade& cascade,
                                     std::span<const double> x);

/// Keep every `factor`-th sample starting at index 0.
std::vector<double> decimate(std::span<const double> x, std::size_t factor);

}  // namespace hrvkit::filter
