#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include "doctest.h"

#include "hrvkit/error.hpp"
#include "hrvkit/pipeline.hpp"
#include "hrvkit/signal_io.hpp"
#include "hrvkit/synth.hpp"
#include "support.hpp"

using hrvkit::EcgRecording;
using hrvkit::Error;
using hrvkit::ErrorCode;
using hrvkit::RunConfig;
using hrvkit::SynthSpec;
using testsupport::TempDir;
using testsupport::write_text;
namespace pipeline = hrvkit::pipeline;
namespace synth = hrvkit::synth;

TEST_CASE("single recording pipeline recovers the heart rate") {
    SynthSpec spec;
    spec.mean_hr_bpm = 60.0;
    spec.sdnn_target_ms = 0.0;
    spec.seed = 2;
    const auto out = synth::generate(spec);
    const auto features = pipeline::process_recording(out.recording, RunConfig{});
    CHECK(features.hr_bpm >= 58.0);
    CHECK(features.hr_bpm <= 62.0);
    CHECK(features.sdnn_ms <= 5.0);
    CHECK(features.n_intervals >= 8);
}

TEST_CASE("powerline interference at matched power is removed") {
    SynthSpec spec;
    spec.mean_hr_bpm = 72.0;
    spec.sdnn_target_ms = 30.0;
    spec.seed = 6;
    const auto clean = synth::generate(spec);

    // 0 dB: sine power equals the mean signal power
    double power = 0.0;
    for (double v : clean.recording.samples) power += v * v;
    power /= static_cast<double>(clean.recording.samples.size());
    const double amp = std::sqrt(2.0 * power);

    EcgRecording noisy = clean.recording;
    const double w = 2.0 * std::numbers::pi * 50.0;
    for (std::size_t i = 0; i < noisy.samples.size(); ++i) {
        noisy.samples[i] +=
            amp * std::sin(w * static_cast<double>(i) / noisy.sampling_rate_hz);
    }

    const RunConfig config;
    const auto base = pipeline::process_recording(clean.recording, config);
    const auto recovered = pipeline::process_recording(noisy, config);
    CHECK(std::abs(recovered.mean_nn_ms - base.mean_nn_ms) <=
          0.05 * base.mean_nn_ms);
    CHECK(std::abs(recovered.sdnn_ms - base.sdnn_ms) <= 0.05 * base.sdnn_ms);
    CHECK(std::abs(recovered.rmssd_ms - base.rmssd_ms) <= 0.05 * base.rmssd_ms);
}

TEST_CASE("stage tag points at the failing step") {
    EcgRecording flat;
    flat.sampling_rate_hz = 1000.0;
    flat.samples.assign(10000, 0.0);
    try {
        pipeline::process_recording(flat, RunConfig{});
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::no_peaks_found);
        CHECK(e.stage() == "rpeak");
        CHECK(std::string(e.what()).find("[stage=rpeak]") == 0);
    }
}

TEST_CASE("cohort processing") {
    TempDir dir;
    synth::CohortSpec cohort;
    cohort.n_mci = 4;
    cohort.n_healthy = 6;
    cohort.seed = 11;
    const auto generated = synth::generate_cohort(cohort, dir.path.string());
    const auto manifest = hrvkit::io::load_manifest(generated.manifest_path);
    RunConfig config;
    config.threads = 1;

    SUBCASE("all subjects survive") {
        const auto result = pipeline::process_cohort(manifest, config, dir.path.string());
        CHECK(result.table.size() == 10);
        CHECK(result.exclusions.empty());
        CHECK(result.table.count(hrvkit::Label::mci) == 4);
        for (std::size_t i = 1; i < result.table.rows.size(); ++i) {
            CHECK(result.table.rows[i - 1].subject_id <
                  result.table.rows[i].subject_id);
        }
    }

    SUBCASE("a broken file becomes an exclusion") {
        write_text(dir.file(manifest[3].recording_path), "xyz");  // 3 bytes
        const auto result = pipeline::process_cohort(manifest, config, dir.path.string());
        CHECK(result.table.size() == 9);
        REQUIRE(result.exclusions.size() == 1);
        CHECK(result.exclusions[0].subject_id == manifest[3].subject_id);
        CHECK(result.exclusions[0].stage == "io");
        CHECK(!result.exclusions[0].reason.empty());
    }

    SUBCASE("a missing file becomes an exclusion") {
        std::filesystem::remove(dir.file(manifest[5].recording_path));
        std::filesystem::remove(
            dir.file(manifest[5].recording_path.substr(
                         0, manifest[5].recording_path.size() - 4) +
                     ".meta"));
        const auto result = pipeline::process_cohort(manifest, config, dir.path.string());
        CHECK(result.table.size() == 9);
        REQUIRE(result.exclusions.size() == 1);
        CHECK(result.exclusions[0].stage == "io");
    }

    SUBCASE("thread count does not change the result") {
        const auto serial = pipeline::process_cohort(manifest, config, dir.path.string());
        RunConfig parallel = config;
        parallel.threads = 4;
        const auto threaded =
            pipeline::process_cohort(manifest, parallel, dir.path.string());
        REQUIRE(serial.table.size() == threaded.table.size());
        for (std::size_t i = 0; i < serial.table.size(); ++i) {
            const auto& a = serial.table.rows[i];
            const auto& b = threaded.table.rows[i];
            CHECK(a.subject_id == b.subject_id);
            CHECK(a.label == b.label);
            CHECK(a.features.mean_nn_ms == b.features.mean_nn_ms);
            CHECK(a.features.rms_nn_ms == b.features.rms_nn_ms);
            CHECK(a.features.sdnn_ms == b.features.sdnn_ms);
            CHECK(a.features.rmssd_ms == b.features.rmssd_ms);
            CHECK(a.features.hr_bpm == b.features.hr_bpm);
        }
    }
}

TEST_CASE("empty manifest is rejected") {
    CHECK(testsupport::error_code_of([] {
              pipeline::process_cohort({}, RunConfig{});
          }) == ErrorCode::empty_cohort);
}

TEST_CASE("config files") {
    TempDir dir;

    SUBCASE("json form") {
        const auto path = dir.file("run.json");
        write_text(path,
                   "{\n"
                   "  \"band_low_hz\": 0.7,\n"
                   "  \"band_high_hz\": 90,\n"
                   "  \"zero_phase\": false,\n"
                   "  \"k\": 5,\n"
                   "  \"train_fraction\": 0.8,\n"
                   "  \"protocol\": \"kfold\",\n"
                   "  \"seed\": 123,\n"
                   "  \"gate_low_ms\": 250,\n"
                   "  \"threads\": 2\n"
                   "}\n");
        const auto config = pipeline::load_config(path);
        CHECK(config.filter.band_low_hz == 0.7);
        CHECK(config.filter.band_high_hz == 90.0);
        CHECK(config.filter.zero_phase == false);
        CHECK(config.k == 5);
        CHECK(config.train_fraction == 0.8);
        CHECK(config.protocol == pipeline::Protocol::kfold);
        CHECK(config.seed == 123);
        CHECK(config.gate.low_ms == 250.0);
        CHECK(config.threads == 2);
        CHECK(config.filter.notch_hz == 50.0);  // untouched defaults stay
    }

    SUBCASE("key=value form") {
        const auto path = dir.file("run.cfg");
        write_text(path,
                   "# detector tweaks\n"
                   "refractory_ms = 250\n"
                   "threshold_fraction=0.4\n"
                   "\n"
                   "protocol = holdout\n"
                   "seed=9\n");
        const auto config = pipeline::load_config(path);
        CHECK(config.detector.refractory_ms == 250.0);
        CHECK(config.detector.threshold_fraction == 0.4);
        CHECK(config.protocol == pipeline::Protocol::holdout);
        CHECK(config.seed == 9);
    }

    SUBCASE("unknown keys and bad values are rejected") {
        const auto path = dir.file("bad.cfg");
        write_text(path, "bogus_key=1\n");
        CHECK(testsupport::error_code_of([&] { pipeline::load_config(path); }) ==
              ErrorCode::malformed_file);

        write_text(path, "{\"bogus_key\": 1}\n");
        CHECK(testsupport::error_code_of([&] { pipeline::load_config(path); }) ==
              ErrorCode::malformed_file);

        write_text(path, "protocol=sideways\n");
        CHECK(testsupport::error_code_of([&] { pipeline::load_config(path); }) ==
              ErrorCode::malformed_file);

        write_text(path, "no equals sign here\n");
        CHECK(testsupport::error_code_of([&] { pipeline::load_config(path); }) ==
              ErrorCode::malformed_file);

        CHECK(testsupport::error_code_of([&] {
                  pipeline::load_config(dir.file("absent.cfg"));
              }) == ErrorCode::io_failure);
    }
}
