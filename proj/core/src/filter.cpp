#include "hrvkit/filter.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "hrvkit/error.hpp"

namespace hrvkit::filter {

namespace {

constexpr double kPi = std::numbers::pi;

using cd = std::complex<double>;

cd bilinear(cd s, double fs_hz) {
    const double two_fs = 2.0 * fs_hz;
    return (two_fs + s) / (two_fs - s);
}

// Denominator of one section from a pole pair. The pair is either a complex
// conjugate pair or two real poles, so the coefficients come out real.
void set_poles(Biquad& section, cd z1, cd z2) {
    section.a1 = -(z1 + z2).real();
    section.a2 = (z1 * z2).real();
}

double section_gain_at(const Biquad& s, double theta) {
    const cd zinv = std::exp(cd(0.0, -theta));
    const cd num = s.b0 + s.b1 * zinv + s.b2 * zinv * zinv;
    const cd den = 1.0 + s.a1 * zinv + s.a2 * zinv * zinv;
    return std::abs(num / den);
}

void require(bool ok, const std::string& msg) {
    if (!ok) throw Error(ErrorCode::invalid_band, msg);
}

void check_stable(const BiquadCascade& cascade, const char* what) {
    if (cascade.max_pole_radius() >= 1.0) {
        throw Error(ErrorCode::invalid_band,
                    std::string(what) + " design is unstable at the "
                                        "requested corners");
    }
}

// Transposed direct form II, in place. When steady_init is set the state is
// seeded with the section's steady-state response to a constant input equal
// to the first sample, which keeps startup transients out of the output.
void run_df2t(const Biquad& s, std::vector<double>& x, bool steady_init) {
    double s1 = 0.0;
    double s2 = 0.0;
    if (steady_init && !x.empty()) {
        const double h1 = (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
        s1 = (h1 - s.b0) * x.front();
        s2 = (s.b2 - s.a2 * h1) * x.front();
    }
    for (double& v : x) {
        const double in = v;
        const double out = s.b0 * in + s1;
        s1 = s.b1 * in - s.a1 * out + s2;
        s2 = s.b2 * in - s.a2 * out;
        v = out;
    }
}

}  // namespace

double BiquadCascade::max_pole_radius() const {
    double radius = 0.0;
    for (const Biquad& s : sections) {
        const double disc = s.a1 * s.a1 - 4.0 * s.a2;
        if (disc < 0.0) {
            radius = std::max(radius, std::sqrt(s.a2));
        } else {
            const double root = std::sqrt(disc);
            radius = std::max(radius, std::abs((-s.a1 + root) / 2.0));
            radius = std::max(radius, std::abs((-s.a1 - root) / 2.0));
        }
    }
    return radius;
}

double BiquadCascade::gain_at(double f_hz, double fs_hz) const {
    const double theta = 2.0 * kPi * f_hz / fs_hz;
    const cd zinv = std::exp(cd(0.0, -theta));
    cd h = 1.0;
    for (const Biquad& s : sections) {
        h *= (s.b0 + s.b1 * zinv + s.b2 * zinv * zinv) /
             (1.0 + s.a1 * zinv + s.a2 * zinv * zinv);
    }
    return std::abs(h);
}

BiquadCascade design_butter_lowpass(int order, double cutoff_hz,
                                    double fs_hz) {
    require(order >= 1, "lowpass order must be at least 1");
    require(fs_hz > 0.0, "sampling rate must be positive");
    require(cutoff_hz > 0.0 && cutoff_hz < fs_hz / 2.0,
            "lowpass cutoff must lie in (0, fs/2), got " +
                std::to_string(cutoff_hz) + " Hz at fs " +
                std::to_string(fs_hz));

    const double warped = 2.0 * fs_hz * std::tan(kPi * cutoff_hz / fs_hz);

    BiquadCascade cascade;
    for (int k = 0; k < order / 2; ++k) {
        const double angle = kPi * (2.0 * k + order + 1.0) / (2.0 * order);
        const cd pole = warped * std::exp(cd(0.0, angle));
        const cd z = bilinear(pole, fs_hz);
        Biquad s;
        set_poles(s, z, std::conj(z));
        const double g = (1.0 + s.a1 + s.a2) / 4.0;
        s.b0 = g;
        s.b1 = 2.0 * g;
        s.b2 = g;
        cascade.sections.push_back(s);
    }
    if (order % 2 == 1) {
        const cd z = bilinear(cd(-warped, 0.0), fs_hz);
        Biquad s;
        s.a1 = -z.real();
        s.a2 = 0.0;
        const double g = (1.0 + s.a1) / 2.0;
        s.b0 = g;
        s.b1 = g;
        s.b2 = 0.0;
        cascade.sections.push_back(s);
    }
    check_stable(cascade, "lowpass");
    return cascade;
}

BiquadCascade design_butter_bandpass(int order, double low_hz, double high_hz,
                                     double fs_hz) {
    require(order >= 1, "bandpass order must be at least 1");
    require(fs_hz > 0.0, "sampling rate must be positive");
    require(low_hz > 0.0 && low_hz < high_hz && high_hz < fs_hz / 2.0,
            "bandpass corners must satisfy 0 < low < high < fs/2, got [" +
                std::to_string(low_hz) + ", " + std::to_string(high_hz) +
                "] Hz at fs " + std::to_string(fs_hz));

    const double w1 = 2.0 * fs_hz * std::tan(kPi * low_hz / fs_hz);
    const double w2 = 2.0 * fs_hz * std::tan(kPi * high_hz / fs_hz);
    const double bw = w2 - w1;
    const double w0_sq = w1 * w2;
    const double w0 = std::sqrt(w0_sq);

    // Each analog prototype pole p maps to two bandpass poles, the roots of
    // s^2 - p*bw*s + w0^2 = 0. A conjugate prototype pair therefore yields
    // two conjugate bandpass pairs, one section each.
    const auto bandpass_roots = [&](cd p) {
        const cd pb = p * bw;
        const cd disc = std::sqrt(pb * pb - 4.0 * w0_sq);
        return std::pair<cd, cd>{(pb + disc) / 2.0, (pb - disc) / 2.0};
    };

    BiquadCascade cascade;
    const auto push_section = [&](cd z1, cd z2) {
        Biquad s;
        set_poles(s, z1, z2);
        s.b0 = 1.0;
        s.b1 = 0.0;
        s.b2 = -1.0;
        cascade.sections.push_back(s);
    };

    for (int k = 0; k < order / 2; ++k) {
        const double angle = kPi * (2.0 * k + order + 1.0) / (2.0 * order);
        const auto [s1, s2] = bandpass_roots(std::exp(cd(0.0, angle)));
        push_section(bilinear(s1, fs_hz), std::conj(bilinear(s1, fs_hz)));
        push_section(bilinear(s2, fs_hz), std::conj(bilinear(s2, fs_hz)));
    }
    if (order % 2 == 1) {
        const auto [s1, s2] = bandpass_roots(cd(-1.0, 0.0));
        push_section(bilinear(s1, fs_hz), bilinear(s2, fs_hz));
    }

    // Unity gain at the warped center frequency, section by section.
    const double theta0 = 2.0 * std::atan(w0 / (2.0 * fs_hz));
    for (Biquad& s : cascade.sections) {
        const double g = 1.0 / section_gain_at(s, theta0);
        s.b0 = g;
        s.b2 = -g;
    }
    check_stable(cascade, "bandpass");
    return cascade;
}

BiquadCascade design_notch(double freq_hz, double q, double fs_hz) {
    require(fs_hz > 0.0, "sampling rate must be positive");
    require(freq_hz > 0.0 && freq_hz < fs_hz / 2.0,
            "notch frequency must lie in (0, fs/2), got " +
                std::to_string(freq_hz) + " Hz at fs " + std::to_string(fs_hz));
    require(q > 0.0, "notch Q must be positive");

    const double w0 = 2.0 * kPi * freq_hz / fs_hz;
    const double alpha = std::sin(w0) / (2.0 * q);
    const double cos_w0 = std::cos(w0);
    const double a0 = 1.0 + alpha;

    Biquad s;
    s.b0 = 1.0 / a0;
    s.b1 = -2.0 * cos_w0 / a0;
    s.b2 = 1.0 / a0;
    s.a1 = -2.0 * cos_w0 / a0;
    s.a2 = (1.0 - alpha) / a0;

    BiquadCascade cascade;
    cascade.sections.push_back(s);
    check_stable(cascade, "notch");
    return cascade;
}

std::vector<double> apply_forward(const BiquadCascade& cascade,
                                  std::span<const double> x) {
    std::vector<double> y(x.begin(), x.end());
    for (const Biquad& s : cascade.sections) run_df2t(s, y, false);
    return y;
}

std::vector<double> apply_zero_phase(const BiquadCascade& cascade,
                                     std::span<const double> x) {
    const std::size_t n = x.size();
    if (n == 0) return {};

    // Settling length from the slowest pole, capped by what odd reflection
    // can actually provide.
    const double radius = cascade.max_pole_radius();
    std::size_t pad = n - 1;
    if (radius < 1.0) {
        const double n_tau = std::ceil(1.0 / (1.0 - radius));
        const double want = 3.0 * n_tau;
        if (want < static_cast<double>(pad)) {
            pad = static_cast<std::size_t>(want);
        }
    }

    std::vector<double> ext;
    ext.reserve(n + 2 * pad);
    for (std::size_t i = pad; i >= 1; --i) {
        ext.push_back(2.0 * x[0] - x[i]);
    }
    ext.insert(ext.end(), x.begin(), x.end());
    for (std::size_t i = 1; i <= pad; ++i) {
        ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);
    }

    for (const Biquad& s : cascade.sections) run_df2t(s, ext, true);
    std::reverse(ext.begin(), ext.end());
    for (const Biquad& s : cascade.sections) run_df2t(s, ext, true);
    std::reverse(ext.begin(), ext.end());

    return std::vector<double>(ext.begin() + static_cast<std::ptrdiff_t>(pad),
                               ext.begin() + static_cast<std::ptrdiff_t>(pad + n));
}

std::vector<double> decimate(std::span<const double> x, std::size_t factor) {
    if (factor <= 1) return std::vector<double>(x.begin(), x.end());
    std::vector<double> y;
    y.reserve(x.size() / factor + 1);
    for (std::size_t i = 0; i < x.size(); i += factor) y.push_back(x[i]);
    return y;
}

}  // namespace hrvkit::filter
