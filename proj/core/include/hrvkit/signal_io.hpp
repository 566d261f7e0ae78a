#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hrvkit/hrv.hpp"
#include "hrvkit/cohort.hpp"
#include "hrvkit/recording.hpp"

namespace hrvkit::io {

enum class SignalFormat { csv, raw_f32le };

/// One row of a cohort manifest CSV.
struct CohortManifestRow {
    std::string subject_id;
    std::string recording_path;
    int ace_iii_score = 0;
    std::optional<double> age_years;
    std::optional<std::string> sex;  // "M", "F" or "other"
};

// Signal CSV: line 1 "fs_hz=<rate>", optional line 2 "lead=<name>",
// then one decimal sample per line, LF endings.
// Raw format: "<name>.f32" of little-endian binary32 plus "<name>.meta"
// with fs_hz= and lead= lines. Either the .f32 path or the bare stem is
// accepted.
EcgRecording load_recording(const std::string& path, SignalFormat format);
void write_recording(const EcgRecording& rec, const std::string& path,
                     SignalFormat format);

/// Guess the format from the file extension (.f32 -> raw, else CSV).
SignalFormat format_from_path(const std::string& path);

// Manifest CSV: header "subject_id,recording_path,ace_iii,age,sex";
// age and sex may be empty. Duplicate subject ids are rejected.
std::vector<CohortManifestRow> load_manifest(const std::string& path);
void write_manifest(const std::vector<CohortManifestRow>& rows,
                    const std::string& path);

/// One labeled feature row as stored in a features CSV.
struct FeatureRow {
    std::string subject_id;
    Label label = Label::non_mci;
    HrvFeatures features;
};

// Features CSV: header
// "subject_id,label,mean_nn_ms,rms_nn_ms,sdnn_ms,rmssd_ms,hr_bpm",
// values printed with 6 significant digits.
void write_features_table(const std::vector<FeatureRow>& rows,
                          const std::string& path);
std::vector<FeatureRow> load_features_table(const std::string& path);

std::string features_csv_header();
std::string features_csv_row(const FeatureRow& row);

}  // namespace hrvkit::io
