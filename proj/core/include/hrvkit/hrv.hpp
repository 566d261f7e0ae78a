#pragma once

#include <span>
#include <string_view>

#include "hrvkit/rpeak.hpp"

namespace hrvkit::hrv {

/// The four time-domain features plus derived heart rate.
struct HrvFeatures {
    double mean_nn_ms = 0.0;
    double rms_nn_ms = 0.0;
    double sdnn_ms = 0.0;
    double rmssd_ms = 0.0;
    double hr_bpm = 0.0;
    int n_intervals = 0;
};

enum class Feature { mean_nn, rms_nn, sdnn, rmssd };

inline constexpr Feature all_features[] = {Feature::mean_nn, Feature::rms_nn,
                                           Feature::sdnn, Feature::rmssd};

constexpr std::string_view feature_name(Feature f) {
    switch (f) {
        case Feature::mean_nn: return "mean_nn";
        case Feature::rms_nn: return "rms_nn";
        case Feature::sdnn: return "sdnn";
        case Feature::rmssd: return "rmssd";
    }
    return "?";
}

double feature_value(const HrvFeatures& features, Feature f);

// Accumulations use compensated summation so that the 1e-9 identity
// tolerances hold for long series.
double mean_nn(std::span<const double> intervals_ms);   // n >= 1
double rms_nn(std::span<const double> intervals_ms);    // n >= 1
double sdnn(std::span<const double> intervals_ms);      // n >= 2, divisor N-1
double rmssd(std::span<const double> intervals_ms);     // n >= 2, divisor N-1
HrvFeatures compute_features(std::span<const double> intervals_ms);  // n >= 2

inline double mean_nn(const NnSeries& nn) { return mean_nn(std::span<const double>(nn.intervals_ms)); }
inline double rms_nn(const NnSeries& nn) { return rms_nn(std::span<const double>(nn.intervals_ms)); }
inline double sdnn(const NnSeries& nn) { return sdnn(std::span<const double>(nn.intervals_ms)); }
inline double rmssd(const NnSeries& nn) { return rmssd(std::span<const double>(nn.intervals_ms)); }
inline HrvFeatures compute_features(const NnSeries& nn) {
    return compute_features(std::span<const double>(nn.intervals_ms));
}

}  // namespace hrvkit::hrv

namespace hrvkit {
using hrv::Feature;
using hrv::HrvFeatures;
}  // namespace hrvkit
