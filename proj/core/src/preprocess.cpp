#include "hrvkit/preprocess.hpp"

#include <cstddef>
#include <vector>

#include "hrvkit/error.hpp"
#include "hrvkit/filter.hpp"

namespace hrvkit::preprocess {

namespace {

EcgRecording with_samples(const EcgRecording& rec, std::vector<double> samples) {
    EcgRecording out = rec;
    out.samples = std::move(samples);
    return out;
}

std::vector<double> run(const filter::BiquadCascade& cascade,
                        const std::vector<double>& x, bool zero_phase) {
    return zero_phase ? filter::apply_zero_phase(cascade, x)
                      : filter::apply_forward(cascade, x);
}

}  // namespace

EcgRecording detrend(const EcgRecording& rec, DetrendMethod method) {
    validate(rec);
    const std::size_t n = rec.samples.size();

    double mean = 0.0;
    for (double v : rec.samples) mean += v;
    mean /= static_cast<double>(n);

    std::vector<double> out(n);
    if (method == DetrendMethod::mean) {
        for (std::size_t i = 0; i < n; ++i) out[i] = rec.samples[i] - mean;
        return with_samples(rec, std::move(out));
    }

    if (n < 2) {
        throw Error(ErrorCode::too_short,
                    "linear detrend needs at least two samples");
    }
    // Least-squares line through (i, x_i), evaluated with the index centered
    // so the normal equations decouple.
    const double center = (static_cast<double>(n) - 1.0) / 2.0;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) - center;
        sxy += t * (rec.samples[i] - mean);
        sxx += t * t;
    }
    const double slope = sxy / sxx;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) - center;
        out[i] = rec.samples[i] - (mean + slope * t);
    }
    return with_samples(rec, std::move(out));
}

EcgRecording bandpass(const EcgRecording& rec, const FilterSpec& spec) {
    validate(rec);
    const auto cascade = filter::design_butter_bandpass(
        spec.bandpass_order, spec.band_low_hz, spec.band_high_hz,
        rec.sampling_rate_hz);
    return with_samples(rec, run(cascade, rec.samples, spec.zero_phase));
}

EcgRecording notch(const EcgRecording& rec, const FilterSpec& spec) {
    validate(rec);
    const auto cascade =
        filter::design_notch(spec.notch_hz, spec.notch_q, rec.sampling_rate_hz);
    return with_samples(rec, run(cascade, rec.samples, spec.zero_phase));
}

EcgRecording preprocess_chain(const EcgRecording& rec, const FilterSpec& spec) {
    EcgRecording out = detrend(rec, DetrendMethod::linear);
    out = bandpass(out, spec);
    if (spec.notch_enabled) out = notch(out, spec);
    return out;
}

}  // namespace hrvkit::preprocess
