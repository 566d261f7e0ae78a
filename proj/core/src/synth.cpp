#include "hrvkit/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include "hrvkit/error.hpp"
#include "hrvkit/format.hpp"
#include "hrvkit/rng.hpp"

namespace hrvkit::synth {

namespace {

constexpr double kGateLowMs = 200.0;
constexpr double kGateHighMs = 3000.0;
constexpr double kArPhi = 0.85;

// P, Q, R, S, T as Gaussian bumps: amplitude (mV), center offset from the
// R peak (s), width (s).
struct Wave {
    double amplitude;
    double offset;
    double width;
};
constexpr Wave kTemplate[] = {
    {0.12, -0.190, 0.030},
    {-0.15, -0.023, 0.010},
    {1.00, 0.000, 0.009},
    {-0.20, 0.025, 0.010},
    {0.30, 0.250, 0.050},
};

void check_spec(const SynthSpec& spec) {
    const auto fail = [](const std::string& msg) {
        throw Error(ErrorCode::infeasible_spec, msg);
    };
    if (!(spec.fs_hz > 0.0)) fail("sampling rate must be positive");
    if (!(spec.duration_s > 0.0)) fail("duration must be positive");
    if (!(spec.mean_hr_bpm >= 30.0 && spec.mean_hr_bpm <= 220.0)) {
        fail("mean heart rate must lie in [30, 220] bpm, got " +
             std::to_string(spec.mean_hr_bpm));
    }
    if (!(spec.sdnn_target_ms >= 0.0)) fail("sdnn target must be non-negative");
    if (!(spec.rmssd_weight >= 0.0 && spec.rmssd_weight <= 1.0)) {
        fail("rmssd weight must lie in [0, 1]");
    }
    const double base_ms = 60000.0 / spec.mean_hr_bpm;
    if (base_ms - 5.0 * spec.sdnn_target_ms < kGateLowMs ||
        base_ms + 5.0 * spec.sdnn_target_ms > kGateHighMs) {
        fail("base interval " + std::to_string(base_ms) + " ms with sdnn " +
             std::to_string(spec.sdnn_target_ms) +
             " ms cannot stay within [200, 3000] ms");
    }
}

// Beat times in ms, plus the rng left positioned after the interval draws so
// waveform noise continues the same stream.
std::vector<double> draw_beat_times_ms(const SynthSpec& spec, Rng& rng) {
    const double base_ms = 60000.0 / spec.mean_hr_bpm;
    const double duration_ms = spec.duration_s * 1000.0;
    const double alpha = spec.rmssd_weight;
    const double mix_sd = std::sqrt(alpha * alpha + (1.0 - alpha) * (1.0 - alpha));
    const double scale = spec.sdnn_target_ms / mix_sd;

    std::vector<double> times;
    double t = base_ms / 2.0;
    double ar = rng.normal();  // stationary start
    bool first = true;
    while (t < duration_ms) {
        times.push_back(t);
        if (!first) {
            ar = kArPhi * ar + std::sqrt(1.0 - kArPhi * kArPhi) * rng.normal();
        }
        first = false;
        const double white = rng.normal();
        double interval =
            base_ms + scale * (alpha * white + (1.0 - alpha) * ar);
        interval = std::clamp(interval, kGateLowMs, kGateHighMs);
        t += interval;
    }
    return times;
}

IntervalDraw grid_align(const std::vector<double>& times_ms, double fs_hz,
                        std::size_t n_samples) {
    IntervalDraw out;
    for (double t_ms : times_ms) {
        const auto idx =
            static_cast<std::size_t>(std::llround(t_ms / 1000.0 * fs_hz));
        if (idx >= n_samples) continue;
        out.peak_indices.push_back(idx);
    }
    out.peak_times_s.reserve(out.peak_indices.size());
    for (std::size_t idx : out.peak_indices) {
        out.peak_times_s.push_back(static_cast<double>(idx) / fs_hz);
    }
    for (std::size_t i = 0; i + 1 < out.peak_indices.size(); ++i) {
        out.intervals_ms.push_back(
            static_cast<double>(out.peak_indices[i + 1] - out.peak_indices[i]) /
            fs_hz * 1000.0);
    }
    return out;
}

std::size_t sample_count(const SynthSpec& spec) {
    return static_cast<std::size_t>(
        std::llround(spec.duration_s * spec.fs_hz));
}

struct SubjectSeeds {
    std::uint64_t params;
    std::uint64_t signal;
    std::uint64_t meta;
};

SubjectSeeds subject_seeds(std::uint64_t cohort_seed, std::uint64_t index) {
    std::uint64_t s = cohort_seed ^ hash_index(index);
    SubjectSeeds out{};
    out.params = splitmix64(s);
    out.signal = splitmix64(s);
    out.meta = splitmix64(s);
    return out;
}

}  // namespace

IntervalDraw generate_intervals(const SynthSpec& spec) {
    check_spec(spec);
    Rng rng(spec.seed);
    const auto times = draw_beat_times_ms(spec, rng);
    return grid_align(times, spec.fs_hz, sample_count(spec));
}

SynthOutput generate(const SynthSpec& spec) {
    check_spec(spec);
    Rng rng(spec.seed);
    const auto times_ms = draw_beat_times_ms(spec, rng);
    const std::size_t n = sample_count(spec);
    const IntervalDraw draw = grid_align(times_ms, spec.fs_hz, n);

    SynthOutput out;
    out.recording.sampling_rate_hz = spec.fs_hz;
    out.recording.lead_name = "II";
    out.recording.samples.assign(n, 0.0);
    auto& samples = out.recording.samples;

    for (std::size_t peak : draw.peak_indices) {
        const double t_peak = static_cast<double>(peak) / spec.fs_hz;
        for (const Wave& wave : kTemplate) {
            const double center = t_peak + wave.offset;
            const double reach = 5.0 * wave.width;
            const auto lo = static_cast<long long>(
                std::ceil((center - reach) * spec.fs_hz));
            const auto hi = static_cast<long long>(
                std::floor((center + reach) * spec.fs_hz));
            for (long long j = std::max(0LL, lo);
                 j <= std::min(hi, static_cast<long long>(n) - 1); ++j) {
                const double dt = static_cast<double>(j) / spec.fs_hz - center;
                samples[static_cast<std::size_t>(j)] +=
                    wave.amplitude *
                    std::exp(-dt * dt / (2.0 * wave.width * wave.width));
            }
        }
    }

    if (spec.noise_snr_db) {
        double power = 0.0;
        for (double v : samples) power += v * v;
        power /= static_cast<double>(n);
        const double noise_sd =
            std::sqrt(power / std::pow(10.0, *spec.noise_snr_db / 10.0));
        for (double& v : samples) v += noise_sd * rng.normal();
    }
    if (spec.baseline_wander) {
        const double w = 2.0 * std::numbers::pi * spec.baseline_wander->freq_hz;
        for (std::size_t j = 0; j < n; ++j) {
            samples[j] += spec.baseline_wander->amplitude_mv *
                          std::sin(w * static_cast<double>(j) / spec.fs_hz);
        }
    }
    if (spec.powerline) {
        const double w = 2.0 * std::numbers::pi * spec.powerline->freq_hz;
        for (std::size_t j = 0; j < n; ++j) {
            samples[j] += spec.powerline->amplitude_mv *
                          std::sin(w * static_cast<double>(j) / spec.fs_hz);
        }
    }

    out.true_peaks.indices = draw.peak_indices;
    out.true_peaks.times_s = draw.peak_times_s;
    out.true_intervals_ms = draw.intervals_ms;
    return out;
}

CohortSpec CohortSpec::reference_balance() {
    CohortSpec spec;
    spec.n_mci = 57;
    spec.n_healthy = 240;
    spec.healthy.mean_hr_bpm = 70.0;
    spec.healthy.hr_sd_bpm = 4.0;
    spec.healthy.sdnn_ms = 50.0;
    spec.healthy.sdnn_sd_ms = 8.0;
    spec.mci.mean_hr_bpm = 80.0;
    spec.mci.hr_sd_bpm = 4.0;
    spec.mci.sdnn_ms = 30.0;
    spec.mci.sdnn_sd_ms = 5.0;
    return spec;
}

SynthSpec draw_subject_spec(const CohortSpec& cohort, bool is_mci,
                            std::uint64_t subject_index) {
    const SubjectSeeds seeds = subject_seeds(cohort.seed, subject_index);
    const GroupParams& group = is_mci ? cohort.mci : cohort.healthy;

    Rng rng(seeds.params);
    SynthSpec spec;
    spec.fs_hz = cohort.fs_hz;
    spec.duration_s = cohort.duration_s;
    spec.mean_hr_bpm =
        std::clamp(rng.normal(group.mean_hr_bpm, group.hr_sd_bpm), 30.0, 220.0);
    spec.sdnn_target_ms =
        std::max(0.0, rng.normal(group.sdnn_ms, group.sdnn_sd_ms));
    spec.rmssd_weight = group.rmssd_weight;
    spec.noise_snr_db = group.noise_snr_db;
    spec.baseline_wander = group.baseline_wander;
    spec.powerline = group.powerline;
    spec.seed = seeds.signal;
    return spec;
}

GeneratedCohort generate_cohort(const CohortSpec& spec,
                                const std::string& out_dir) {
    if (spec.n_mci < 1 || spec.n_healthy < 1) {
        throw Error(ErrorCode::infeasible_spec,
                    "cohort needs at least one subject per group");
    }
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        throw Error(ErrorCode::io_failure,
                    "cannot create " + out_dir + ": " + ec.message());
    }

    GeneratedCohort out;
    out.manifest_path = out_dir + "/manifest.csv";
    out.truth_path = out_dir + "/truth.csv";

    std::ofstream truth(out.truth_path, std::ios::binary);
    if (!truth) {
        throw Error(ErrorCode::io_failure, "cannot write " + out.truth_path);
    }
    truth << "subject_id,peak_times_s\n";

    const int total = spec.n_mci + spec.n_healthy;
    for (int i = 0; i < total; ++i) {
        const bool is_mci = i < spec.n_mci;
        char id[16];
        std::snprintf(id, sizeof id, "S%04d", i + 1);

        const SynthSpec subject =
            draw_subject_spec(spec, is_mci, static_cast<std::uint64_t>(i));
        SynthOutput generated = generate(subject);
        generated.recording.subject_id = id;

        const std::string file_name = std::string(id) + ".f32";
        io::write_recording(generated.recording, out_dir + "/" + file_name,
                            io::SignalFormat::raw_f32le);

        const SubjectSeeds seeds =
            subject_seeds(spec.seed, static_cast<std::uint64_t>(i));
        Rng meta_rng(seeds.meta);
        io::CohortManifestRow row;
        row.subject_id = id;
        row.recording_path = file_name;
        row.ace_iii_score = is_mci
                                ? 60 + static_cast<int>(meta_rng.bounded(28))
                                : 88 + static_cast<int>(meta_rng.bounded(13));
        row.age_years = std::clamp(
            static_cast<double>(std::llround(meta_rng.normal(61.4, 9.75))),
            45.0, 92.0);
        row.sex = meta_rng.bounded(2) == 0 ? "F" : "M";
        out.manifest.push_back(row);

        truth << id;
        for (std::size_t k = 0; k < generated.true_peaks.times_s.size(); ++k) {
            truth << (k == 0 ? ',' : ';')
                  << format_g6(generated.true_peaks.times_s[k]);
        }
        truth << '\n';
    }
    if (!truth) {
        throw Error(ErrorCode::io_failure, "write failed for " + out.truth_path);
    }
    truth.close();
    io::write_manifest(out.manifest, out.manifest_path);
    return out;
}

}  // namespace hrvkit::synth
