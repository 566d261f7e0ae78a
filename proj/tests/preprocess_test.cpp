#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"

#include "hrvkit/error.hpp"
#include "hrvkit/preprocess.hpp"
#include "hrvkit/synth.hpp"
#include "support.hpp"

using hrvkit::EcgRecording;
using hrvkit::ErrorCode;
using hrvkit::FilterSpec;
using testsupport::error_code_of;
namespace preprocess = hrvkit::preprocess;

namespace {

EcgRecording make_rec(std::vector<double> samples, double fs) {
    EcgRecording rec;
    rec.samples = std::move(samples);
    rec.sampling_rate_hz = fs;
    rec.lead_name = "II";
    rec.subject_id = "T";
    return rec;
}

EcgRecording sine_rec(double freq_hz, double fs, double duration_s,
                      double amplitude = 1.0) {
    const auto n = static_cast<std::size_t>(duration_s * fs);
    std::vector<double> v(n);
    const double w = 2.0 * std::numbers::pi * freq_hz / fs;
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = amplitude * std::sin(w * static_cast<double>(i));
    }
    return make_rec(std::move(v), fs);
}

double sine_amplitude(const std::vector<double>& x, std::size_t begin,
                      std::size_t end, double freq_hz, double fs) {
    const double w = 2.0 * std::numbers::pi * freq_hz / fs;
    double ss = 0.0, sc = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
        ss += x[i] * std::sin(w * static_cast<double>(i));
        sc += x[i] * std::cos(w * static_cast<double>(i));
    }
    const double n = static_cast<double>(end - begin);
    return 2.0 * std::hypot(ss, sc) / n;
}

double correlation(const std::vector<double>& a, const std::vector<double>& b,
                   std::size_t begin, std::size_t end) {
    double ma = 0.0, mb = 0.0;
    const double n = static_cast<double>(end - begin);
    for (std::size_t i = begin; i < end; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

std::size_t argmax(const std::vector<double>& v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] > v[best]) best = i;
    }
    return best;
}

}  // namespace

TEST_CASE("detrend removes exact lines") {
    const auto flat = preprocess::detrend(make_rec({1, 1, 1, 1}, 4.0));
    for (double v : flat.samples) CHECK(v == doctest::Approx(0.0).scale(1.0));

    const auto ramp = preprocess::detrend(make_rec({0, 1, 2, 3}, 4.0));
    for (double v : ramp.samples) {
        CHECK(std::abs(v) < 1e-12);
    }
}

TEST_CASE("detrend recovers a sine riding on a ramp") {
    const double fs = 500.0;
    const auto n = static_cast<std::size_t>(10.0 * fs);
    std::vector<double> composite(n), pure(n);
    const double w = 2.0 * std::numbers::pi * 7.0 / fs;
    // Window-centered cosine with an integer cycle count is orthogonal to
    // both the constant and the linear basis, so the fit cannot absorb it.
    const double center = (static_cast<double>(n) - 1.0) / 2.0;
    for (std::size_t i = 0; i < n; ++i) {
        pure[i] = 0.8 * std::cos(w * (static_cast<double>(i) - center));
        composite[i] = pure[i] + 3.0 + 0.4 * static_cast<double>(i) / fs;
    }
    const auto out = preprocess::detrend(make_rec(composite, fs));
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        worst = std::max(worst, std::abs(out.samples[i] - pure[i]));
    }
    CHECK(worst <= 1e-9 * 0.8);
}

TEST_CASE("detrend preconditions") {
    CHECK(error_code_of([] {
              preprocess::detrend(make_rec({1.0}, 10.0));
          }) == ErrorCode::too_short);
    const auto one = preprocess::detrend(make_rec({5.0}, 10.0),
                                         hrvkit::DetrendMethod::mean);
    CHECK(one.samples[0] == 0.0);
}

TEST_CASE("bandpass passes mid-band and blocks sub-band") {
    FilterSpec spec;
    const double fs = 1000.0;

    const auto zero = preprocess::bandpass(make_rec(std::vector<double>(1000, 0.0), fs), spec);
    for (double v : zero.samples) CHECK(v == 0.0);

    const auto mid = preprocess::bandpass(sine_rec(10.0, fs, 10.0), spec);
    REQUIRE(mid.samples.size() == 10000);
    const double mid_amp = sine_amplitude(mid.samples, 500, 9500, 10.0, fs);
    CHECK(mid_amp > 0.99);
    CHECK(mid_amp < 1.01);

    // 0.1 Hz sits well below the 0.5 Hz corner; 21 s gives two full cycles
    // in the trimmed window.
    const auto low = preprocess::bandpass(sine_rec(0.1, fs, 21.0), spec);
    const double low_amp = sine_amplitude(low.samples, 500, 20500, 0.1, fs);
    CHECK(low_amp <= 0.2);
}

TEST_CASE("notch removes mains and spares the band") {
    FilterSpec spec;
    const double fs = 1000.0;

    const auto mains = preprocess::notch(sine_rec(50.0, fs, 10.0), spec);
    CHECK(sine_amplitude(mains.samples, 500, 9500, 50.0, fs) <= 0.01);

    const auto ecg_band = preprocess::notch(sine_rec(10.0, fs, 10.0), spec);
    const double amp = sine_amplitude(ecg_band.samples, 500, 9500, 10.0, fs);
    CHECK(amp > 0.98);
    CHECK(amp < 1.02);

    const auto zero = preprocess::notch(make_rec(std::vector<double>(1000, 0.0), fs), spec);
    for (double v : zero.samples) CHECK(v == 0.0);
}

TEST_CASE("chain flattens constants and keeps length") {
    FilterSpec spec;
    const auto constant =
        preprocess::preprocess_chain(make_rec(std::vector<double>(2000, 2.5), 1000.0), spec);
    REQUIRE(constant.samples.size() == 2000);
    for (double v : constant.samples) CHECK(std::abs(v) < 1e-9);
}

TEST_CASE("chain recovers a clean ecg from wander plus mains") {
    hrvkit::SynthSpec sspec;
    sspec.fs_hz = 1000.0;
    sspec.duration_s = 10.0;
    sspec.mean_hr_bpm = 72.0;
    sspec.sdnn_target_ms = 20.0;
    sspec.seed = 31;
    const auto clean = hrvkit::synth::generate(sspec);

    EcgRecording noisy = clean.recording;
    const double fs = noisy.sampling_rate_hz;
    for (std::size_t i = 0; i < noisy.samples.size(); ++i) {
        const double t = static_cast<double>(i) / fs;
        noisy.samples[i] += 0.5 * std::sin(2.0 * std::numbers::pi * 0.3 * t);
        noisy.samples[i] += 0.3 * std::sin(2.0 * std::numbers::pi * 50.0 * t);
    }

    FilterSpec spec;
    const auto restored = preprocess::preprocess_chain(noisy, spec);
    const double corr = correlation(restored.samples, clean.recording.samples,
                                    1000, restored.samples.size() - 1000);
    CHECK(corr >= 0.95);
}

TEST_CASE("filtering is linear") {
    FilterSpec spec;
    std::mt19937_64 gen(77);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<double> a(4000), b(4000);
    for (double& v : a) v = noise(gen);
    for (double& v : b) v = noise(gen);

    const double alpha = 2.5, beta = -1.3;
    std::vector<double> mix(4000);
    for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = alpha * a[i] + beta * b[i];

    const auto fa = preprocess::bandpass(make_rec(a, 1000.0), spec).samples;
    const auto fb = preprocess::bandpass(make_rec(b, 1000.0), spec).samples;
    const auto fmix = preprocess::bandpass(make_rec(mix, 1000.0), spec).samples;

    double scale = 0.0;
    for (double v : fmix) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < fmix.size(); ++i) {
        CHECK(std::abs(fmix[i] - (alpha * fa[i] + beta * fb[i])) <= 1e-6 * scale);
    }
}

TEST_CASE("zero-phase keeps a pulse in place") {
    const double fs = 1000.0;
    const std::size_t n = 10000, center = 5000;
    std::vector<double> pulse(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = (static_cast<double>(i) - static_cast<double>(center)) / fs;
        pulse[i] = std::exp(-d * d / (2.0 * 0.005 * 0.005));
    }
    FilterSpec spec;
    const auto bp = preprocess::bandpass(make_rec(pulse, fs), spec);
    const auto chain = preprocess::preprocess_chain(make_rec(pulse, fs), spec);

    const auto shift = [&](const std::vector<double>& v) {
        return std::abs(static_cast<long>(argmax(v)) - static_cast<long>(center));
    };
    CHECK(shift(bp.samples) <= 1);
    CHECK(shift(chain.samples) <= 1);
}

TEST_CASE("deterministic output") {
    FilterSpec spec;
    std::mt19937_64 gen(5);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<double> x(3000);
    for (double& v : x) v = noise(gen);
    const auto r1 = preprocess::preprocess_chain(make_rec(x, 1000.0), spec);
    const auto r2 = preprocess::preprocess_chain(make_rec(x, 1000.0), spec);
    CHECK(r1.samples == r2.samples);
}

TEST_CASE("band must fit the sampling rate") {
    FilterSpec spec;
    spec.band_high_hz = 600.0;
    CHECK(error_code_of([&] {
              preprocess::bandpass(sine_rec(10.0, 1000.0, 2.0), spec);
          }) == ErrorCode::invalid_band);
}
