#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hrvkit/recording.hpp"
#include "hrvkit/rpeak.hpp"
#include "hrvkit/signal_io.hpp"

namespace hrvkit::synth {

struct SineComponent {
    double amplitude_mv = 0.0;
    double freq_hz = 0.0;
};

/// Specification of one synthetic recording. Beat intervals are the base
/// interval 60000/mean_hr_bpm plus scaled noise; each beat renders a fixed
/// Gaussian-mixture QRS-T template with R amplitude 1 mV.
struct SynthSpec {
    double fs_hz = 1000.0;
    double duration_s = 10.0;
    double mean_hr_bpm = 60.0;
    double sdnn_target_ms = 0.0;
    double rmssd_weight = 0.5;  // 1 = pure white interval noise, 0 = pure AR(1)
    std::optional<double> noise_snr_db;
    std::optional<SineComponent> baseline_wander;
    std::optional<SineComponent> powerline;
    std::uint64_t seed = 0;
};

struct SynthOutput {
    EcgRecording recording;
    PeakList true_peaks;
    std::vector<double> true_intervals_ms;
};

/// Beat times and intervals only (no waveform). Deterministic per seed.
/// Intervals are reported from the sample-grid-aligned beat times, so they
/// are exactly consistent with the peak indices. Throws InfeasibleSpec.
struct IntervalDraw {
    std::vector<std::size_t> peak_indices;
    std::vector<double> peak_times_s;
    std::vector<double> intervals_ms;
};
IntervalDraw generate_intervals(const SynthSpec& spec);

/// Full synthetic recording with ground truth. Deterministic per seed.
SynthOutput generate(const SynthSpec& spec);

/// Per-group distribution a subject's spec is drawn from.
struct GroupParams {
    double mean_hr_bpm = 70.0;
    double hr_sd_bpm = 4.0;
    double sdnn_ms = 50.0;
    double sdnn_sd_ms = 8.0;
    double rmssd_weight = 0.5;
    std::optional<double> noise_snr_db;
    std::optional<SineComponent> baseline_wander;
    std::optional<SineComponent> powerline;
};

struct CohortSpec {
    int n_mci = 57;
    int n_healthy = 240;
    GroupParams mci;
    GroupParams healthy;
    double fs_hz = 1000.0;
    double duration_s = 10.0;
    std::uint64_t seed = 0;

    static CohortSpec reference_balance();  // 57 MCI / 240 healthy, MCI faster and less variable
};

struct GeneratedCohort {
    std::vector<io::CohortManifestRow> manifest;
    std::string manifest_path;
    std::string truth_path;
};

/// Draw one subject's SynthSpec from its group distribution. The subject
/// seed is spec.seed XOR a hash of the subject index, so parallel and serial
/// generation agree.
SynthSpec draw_subject_spec(const CohortSpec& cohort, bool is_mci,
                            std::uint64_t subject_index);

/// Writes recordings (raw f32), manifest.csv and truth.csv into out_dir.
/// ACE-III scores are drawn consistent with the group label.
GeneratedCohort generate_cohort(const CohortSpec& spec,
                                const std::string& out_dir);

}  // namespace hrvkit::synth

namespace hrvkit {
using synth::SynthOutput;
using synth::SynthSpec;
}  // namespace hrvkit
