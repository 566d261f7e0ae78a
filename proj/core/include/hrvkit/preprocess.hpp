#pragma once

#include "hrvkit/recording.hpp"

namespace hrvkit::preprocess {

/// Band-pass plus powerline-notch settings. Defaults follow the recording
/// model this library targets: 0.5 to 100 Hz diagnostic band, 50 Hz mains.
struct FilterSpec {
    double band_low_hz = 0.5;
    double band_high_hz = 100.0;
    double notch_hz = 50.0;
    double notch_q = 30.0;
    int bandpass_order = 4;
    bool zero_phase = true;
    bool notch_enabled = true;
};

enum class DetrendMethod { linear, mean };

/// Subtract a least-squares line (or the mean) from the samples.
/// Linear needs at least two samples.
EcgRecording detrend(const EcgRecording& rec,
                     DetrendMethod method = DetrendMethod::linear);

/// Butterworth band-pass, zero-phase by default. Length-preserving.
EcgRecording bandpass(const EcgRecording& rec, const FilterSpec& spec);

/// Narrow IIR notch at spec.notch_hz, zero-phase by default.
EcgRecording notch(const EcgRecording& rec, const FilterSpec& spec);

/// detrend(linear) -> bandpass -> notch, in that order.
EcgRecording preprocess_chain(const EcgRecording& rec, const FilterSpec& spec);

}  // namespace hrvkit::preprocess

namespace hrvkit {
using preprocess::DetrendMethod;
using preprocess::FilterSpec;
}  // namespace hrvkit
