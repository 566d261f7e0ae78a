#pragma once

#include <cstddef>
#include <vector>

#include "hrvkit/recording.hpp"

namespace hrvkit::rpeak {

/// Detected R-peak positions. Indices strictly increasing, spacing at least
/// the refractory period used for detection.
struct PeakList {
    std::vector<std::size_t> indices;
    std::vector<double> times_s;

    std::size_t size() const { return indices.size(); }
};

/// Beat-to-beat interval series in milliseconds plus the peaks it came from.
/// Intervals outside the physiological gate are dropped, so intervals_ms may
/// be shorter than size(source_peaks) - 1.
struct NnSeries {
    std::vector<double> intervals_ms;
    PeakList source_peaks;
};

struct DetectorParams {
    bool decimate = true;            // decimate to ~1 kHz before detection
    double target_fs_hz = 1000.0;    // detection rate when decimating
    double refractory_ms = 200.0;
    double qrs_band_low_hz = 5.0;    // QRS-emphasis band inside the detector
    double qrs_band_high_hz = 15.0;
    double integration_window_ms = 150.0;
    double threshold_fraction = 0.3;   // of the rolling signal-peak estimate
    double noise_multiplier = 1.75;    // of the rolling noise-peak estimate
    double learning_window_s = 2.0;    // initializes the rolling estimates
    double peak_update = 0.125;        // exponential update weight
    double refine_window_ms = 50.0;    // local-max refinement at work rate
    double refine_fine_ms = 10.0;      // refinement on the original signal
};

struct GateBounds {
    double low_ms = 200.0;
    double high_ms = 3000.0;
};

/// Pan-Tompkins-style detector: QRS band-pass, derivative, squaring,
/// moving-window integration, adaptive thresholding with search-back, then
/// local-maximum refinement on the input signal. Expects a preprocessed
/// recording (not enforced). Throws NoPeaksFound when fewer than two peaks
/// are detected.
PeakList detect_rpeaks(const EcgRecording& rec,
                       const DetectorParams& params = {});

/// Successive peak spacings in ms, gated to [low, high]. Throws
/// TooFewIntervals when fewer than two intervals survive.
NnSeries nn_from_peaks(const PeakList& peaks, double fs_hz,
                       const GateBounds& gate = {});

}  // namespace hrvkit::rpeak

namespace hrvkit {
using rpeak::DetectorParams;
using rpeak::GateBounds;
using rpeak::NnSeries;
using rpeak::PeakList;
}  // namespace hrvkit
