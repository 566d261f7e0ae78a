#include "hrvkit/hrv.hpp"

#include <cmath>
#include <cstddef>
#include <string>

#include "hrvkit/error.hpp"

namespace hrvkit::hrv {

namespace {

// Kahan compensated accumulator.
class Sum {
  public:
    void add(double v) {
        const double y = v - c_;
        const double t = s_ + y;
        c_ = (t - s_) - y;
        s_ = t;
    }
    double value() const { return s_; }

  private:
    double s_ = 0.0;
    double c_ = 0.0;
};

void check_series(std::span<const double> intervals_ms, std::size_t min_size,
                  const char* what) {
    if (intervals_ms.empty()) {
        throw Error(ErrorCode::empty_series,
                    std::string(what) + " needs a non-empty interval series");
    }
    if (intervals_ms.size() < min_size) {
        throw Error(ErrorCode::too_few_intervals,
                    std::string(what) + " needs at least " +
                        std::to_string(min_size) + " intervals, got " +
                        std::to_string(intervals_ms.size()));
    }
    for (std::size_t i = 0; i < intervals_ms.size(); ++i) {
        if (!std::isfinite(intervals_ms[i])) {
            throw Error(ErrorCode::non_finite_input,
                        std::string(what) + ": interval " + std::to_string(i) +
                            " is not finite");
        }
    }
}

}  // namespace

double feature_value(const HrvFeatures& features, Feature f) {
    switch (f) {
        case Feature::mean_nn: return features.mean_nn_ms;
        case Feature::rms_nn: return features.rms_nn_ms;
        case Feature::sdnn: return features.sdnn_ms;
        case Feature::rmssd: return features.rmssd_ms;
    }
    return 0.0;
}

double mean_nn(std::span<const double> intervals_ms) {
    check_series(intervals_ms, 1, "mean_nn");
    Sum sum;
    for (double v : intervals_ms) sum.add(v);
    return sum.value() / static_cast<double>(intervals_ms.size());
}

double rms_nn(std::span<const double> intervals_ms) {
    check_series(intervals_ms, 1, "rms_nn");
    Sum sum;
    for (double v : intervals_ms) sum.add(v * v);
    return std::sqrt(sum.value() / static_cast<double>(intervals_ms.size()));
}

double sdnn(std::span<const double> intervals_ms) {
    check_series(intervals_ms, 2, "sdnn");
    const std::size_t n = intervals_ms.size();
    Sum sum;
    for (double v : intervals_ms) sum.add(v);
    const double mean = sum.value() / static_cast<double>(n);
    Sum sq;
    for (double v : intervals_ms) {
        const double d = v - mean;
        sq.add(d * d);
    }
    return std::sqrt(sq.value() / static_cast<double>(n - 1));
}

double rmssd(std::span<const double> intervals_ms) {
    check_series(intervals_ms, 2, "rmssd");
    const std::size_t n = intervals_ms.size();
    Sum sq;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double d = intervals_ms[i + 1] - intervals_ms[i];
        sq.add(d * d);
    }
    return std::sqrt(sq.value() / static_cast<double>(n - 1));
}

HrvFeatures compute_features(std::span<const double> intervals_ms) {
    check_series(intervals_ms, 2, "compute_features");
    HrvFeatures out;
    out.mean_nn_ms = mean_nn(intervals_ms);
    out.rms_nn_ms = rms_nn(intervals_ms);
    out.sdnn_ms = sdnn(intervals_ms);
    out.rmssd_ms = rmssd(intervals_ms);
    out.hr_bpm = 60000.0 / out.mean_nn_ms;
    out.n_intervals = static_cast<int>(intervals_ms.size());
    return out;
}

}  // namespace hrvkit::hrv
