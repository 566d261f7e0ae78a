#include "hrvkit/rpeak.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "hrvkit/error.hpp"
#include "hrvkit/filter.hpp"

namespace hrvkit::rpeak {

namespace {

struct Candidate {
    std::size_t idx;
    double value;
};

// Five-point derivative, symmetric so the energy peak stays aligned with the
// QRS complex. Edges replicate the boundary sample.
std::vector<double> symmetric_derivative(const std::vector<double>& x) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
    const auto at = [&](std::ptrdiff_t i) {
        return x[static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i, 0, n - 1))];
    };
    std::vector<double> y(x.size());
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        y[static_cast<std::size_t>(i)] =
            (2.0 * at(i + 2) + at(i + 1) - at(i - 1) - 2.0 * at(i - 2)) / 8.0;
    }
    return y;
}

// Centered moving average over w samples, shrinking at the edges.
std::vector<double> moving_average(const std::vector<double>& x, std::size_t w) {
    const std::size_t n = x.size();
    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + x[i];
    const std::size_t half_left = (w - 1) / 2;
    const std::size_t half_right = w - 1 - half_left;
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i > half_left ? i - half_left : 0;
        const std::size_t hi = std::min(n - 1, i + half_right);
        y[i] = (prefix[hi + 1] - prefix[lo]) / static_cast<double>(hi - lo + 1);
    }
    return y;
}

std::size_t argmax_in(std::span<const double> x, std::size_t center,
                      std::size_t radius) {
    const std::size_t lo = center > radius ? center - radius : 0;
    const std::size_t hi = std::min(x.size() - 1, center + radius);
    std::size_t best = lo;
    for (std::size_t i = lo + 1; i <= hi; ++i) {
        if (x[i] > x[best]) best = i;
    }
    return best;
}

// Move to the strictly larger maximum within the window until none remains,
// so the final index is the maximum of its own +/- radius neighborhood.
std::size_t climb(std::span<const double> x, std::size_t idx,
                  std::size_t radius) {
    while (true) {
        const std::size_t m = argmax_in(x, idx, radius);
        if (x[m] > x[idx]) {
            idx = m;
        } else {
            return idx;
        }
    }
}

std::size_t samples_for_ms(double ms, double fs_hz) {
    return static_cast<std::size_t>(
        std::max<long long>(1, std::llround(ms / 1000.0 * fs_hz)));
}

}  // namespace

PeakList detect_rpeaks(const EcgRecording& rec, const DetectorParams& params) {
    validate(rec);
    const double fs = rec.sampling_rate_hz;

    std::size_t factor = 1;
    if (params.decimate && params.target_fs_hz > 0.0 &&
        fs / params.target_fs_hz >= 2.0) {
        factor = static_cast<std::size_t>(fs / params.target_fs_hz);
    }
    std::vector<double> work;
    if (factor > 1) {
        const double work_fs_planned = fs / static_cast<double>(factor);
        const auto aa =
            filter::design_butter_lowpass(4, 0.45 * work_fs_planned, fs);
        work = filter::decimate(filter::apply_forward(aa, rec.samples), factor);
    } else {
        work.assign(rec.samples.begin(), rec.samples.end());
    }
    const double work_fs = fs / static_cast<double>(factor);

    const auto qrs = filter::design_butter_bandpass(
        2, params.qrs_band_low_hz, params.qrs_band_high_hz, work_fs);
    std::vector<double> energy =
        symmetric_derivative(filter::apply_zero_phase(qrs, work));
    for (double& v : energy) v *= v;
    const std::size_t window =
        samples_for_ms(params.integration_window_ms, work_fs);
    const std::vector<double> mwi = moving_average(energy, window);

    std::vector<Candidate> candidates;
    for (std::size_t i = 1; i + 1 < mwi.size(); ++i) {
        if (mwi[i] >= mwi[i - 1] && mwi[i] > mwi[i + 1]) {
            candidates.push_back({i, mwi[i]});
        }
    }

    // A ripple on the flank of one integration mound can cross the threshold
    // a little before the mound peak and claim its refractory slot, so thin
    // the list to the largest candidate within any refractory-length span.
    const std::size_t refractory_work =
        samples_for_ms(params.refractory_ms, work_fs);
    {
        std::vector<std::size_t> order(candidates.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (candidates[a].value != candidates[b].value) {
                return candidates[a].value > candidates[b].value;
            }
            return candidates[a].idx < candidates[b].idx;
        });
        std::vector<char> keep(candidates.size(), 1);
        for (std::size_t j : order) {
            if (!keep[j]) continue;
            for (std::size_t k = j; k-- > 0;) {
                if (candidates[j].idx - candidates[k].idx >= refractory_work) {
                    break;
                }
                keep[k] = 0;
            }
            for (std::size_t k = j + 1; k < candidates.size(); ++k) {
                if (candidates[k].idx - candidates[j].idx >= refractory_work) {
                    break;
                }
                keep[k] = 0;
            }
        }
        std::size_t w = 0;
        for (std::size_t j = 0; j < candidates.size(); ++j) {
            if (keep[j]) candidates[w++] = candidates[j];
        }
        candidates.resize(w);
    }

    // Rolling estimates seeded from the opening stretch of the record.
    const std::size_t n_learn = std::min(
        mwi.size(), static_cast<std::size_t>(
                        std::llround(params.learning_window_s * work_fs)));
    double spk = 0.0;
    double npk = 0.0;
    for (std::size_t i = 0; i < n_learn; ++i) {
        spk = std::max(spk, mwi[i]);
        npk += mwi[i];
    }
    if (n_learn > 0) npk /= static_cast<double>(n_learn);

    std::vector<std::size_t> accepted;
    std::vector<double> rr_work;

    const auto rr_average = [&]() {
        if (rr_work.empty()) return 0.0;
        const std::size_t m = std::min<std::size_t>(rr_work.size(), 8);
        double sum = 0.0;
        for (std::size_t i = rr_work.size() - m; i < rr_work.size(); ++i) {
            sum += rr_work[i];
        }
        return sum / static_cast<double>(m);
    };
    const auto accept = [&](const Candidate& c, double weight) {
        if (!accepted.empty()) {
            rr_work.push_back(static_cast<double>(c.idx - accepted.back()));
        }
        accepted.push_back(c.idx);
        spk = weight * c.value + (1.0 - weight) * spk;
    };
    const auto threshold = [&]() {
        return std::max(params.threshold_fraction * spk,
                        params.noise_multiplier * npk);
    };
    // Largest candidate in (last accepted + refractory, before], if any
    // clears half the threshold.
    const auto search_back = [&](std::size_t before) {
        const double avg = rr_average();
        if (avg <= 0.0 || accepted.empty()) return;
        if (static_cast<double>(before - accepted.back()) <= 1.66 * avg) return;
        const std::size_t lower = accepted.back() + refractory_work;
        std::size_t best = candidates.size();
        double best_value = 0.5 * threshold();
        for (std::size_t j = candidates.size(); j-- > 0;) {
            if (candidates[j].idx >= before) continue;
            if (candidates[j].idx < lower) break;
            if (candidates[j].value > best_value) {
                best_value = candidates[j].value;
                best = j;
            }
        }
        if (best < candidates.size()) {
            accept(candidates[best], 2.0 * params.peak_update);
        }
    };

    for (const Candidate& c : candidates) {
        if (!accepted.empty() && c.idx - accepted.back() < refractory_work) {
            continue;
        }
        search_back(c.idx);
        if (!accepted.empty() && c.idx - accepted.back() < refractory_work) {
            continue;
        }
        if (c.value > threshold()) {
            accept(c, params.peak_update);
        } else {
            npk = params.peak_update * c.value + (1.0 - params.peak_update) * npk;
        }
    }
    search_back(mwi.size());  // a beat missed at the tail of the record

    if (accepted.size() < 2) {
        throw Error(ErrorCode::no_peaks_found,
                    "detected " + std::to_string(accepted.size()) +
                        " peaks, need at least 2");
    }

    // Refine on the caller's signal: coarse at the working rate, then at the
    // original rate, then settle on the local maximum.
    const std::size_t refine_work =
        samples_for_ms(params.refine_window_ms, work_fs);
    const std::size_t refine_fine = samples_for_ms(params.refine_fine_ms, fs);
    const std::size_t refine_orig =
        samples_for_ms(params.refine_window_ms, fs);
    const std::size_t last_index = rec.samples.size() - 1;
    std::vector<std::size_t> refined;
    refined.reserve(accepted.size());
    for (std::size_t p : accepted) {
        const std::size_t at_work = argmax_in(work, p, refine_work);
        std::size_t at_orig = std::min(at_work * factor, last_index);
        if (factor > 1) {
            at_orig = argmax_in(rec.samples, at_orig, refine_fine);
        }
        refined.push_back(climb(rec.samples, at_orig, refine_orig));
    }
    std::sort(refined.begin(), refined.end());

    const std::size_t refractory_orig = samples_for_ms(params.refractory_ms, fs);
    std::vector<std::size_t> kept;
    for (std::size_t idx : refined) {
        if (!kept.empty() && idx - kept.back() < refractory_orig) {
            if (rec.samples[idx] > rec.samples[kept.back()]) kept.back() = idx;
            continue;
        }
        kept.push_back(idx);
    }
    if (kept.size() < 2) {
        throw Error(ErrorCode::no_peaks_found,
                    "refinement left fewer than 2 distinct peaks");
    }

    PeakList peaks;
    peaks.indices = std::move(kept);
    peaks.times_s.reserve(peaks.indices.size());
    for (std::size_t idx : peaks.indices) {
        peaks.times_s.push_back(static_cast<double>(idx) / fs);
    }
    return peaks;
}

NnSeries nn_from_peaks(const PeakList& peaks, double fs_hz,
                       const GateBounds& gate) {
    if (!(fs_hz > 0.0) || !std::isfinite(fs_hz)) {
        throw Error(ErrorCode::bad_sampling_rate,
                    "sampling rate must be positive");
    }
    if (peaks.size() < 2) {
        throw Error(ErrorCode::too_few_intervals,
                    "need at least two peaks to form intervals");
    }
    NnSeries out;
    out.source_peaks = peaks;
    for (std::size_t i = 0; i + 1 < peaks.indices.size(); ++i) {
        const double ms =
            static_cast<double>(peaks.indices[i + 1] - peaks.indices[i]) /
            fs_hz * 1000.0;
        if (ms >= gate.low_ms && ms <= gate.high_ms) {
            out.intervals_ms.push_back(ms);
        }
    }
    if (out.intervals_ms.size() < 2) {
        throw Error(ErrorCode::too_few_intervals,
                    "fewer than two intervals survive the [" +
                        std::to_string(gate.low_ms) + ", " +
                        std::to_string(gate.high_ms) + "] ms gate");
    }
    return out;
}

}  // namespace hrvkit::rpeak
