#include "hrvkit/signal_io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "hrvkit/error.hpp"
#include "hrvkit/format.hpp"

namespace hrvkit {

void validate(const EcgRecording& rec) {
    if (!(rec.sampling_rate_hz > 0.0) || !std::isfinite(rec.sampling_rate_hz)) {
        throw Error(ErrorCode::bad_sampling_rate,
                    "sampling rate must be positive, got " +
                        std::to_string(rec.sampling_rate_hz));
    }
    if (rec.samples.empty()) {
        throw Error(ErrorCode::empty_signal, "recording has no samples");
    }
    for (std::size_t i = 0; i < rec.samples.size(); ++i) {
        if (!std::isfinite(rec.samples[i])) {
            throw Error(ErrorCode::non_finite_sample,
                        "sample " + std::to_string(i) + " is not finite");
        }
    }
}

}  // namespace hrvkit

namespace hrvkit::io {

namespace {

// Strip one trailing '\r' so CRLF inputs load; writers always emit LF.
void chomp(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

double parse_double_full(const std::string& text, const std::string& what) {
    double value = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) {
        // from_chars accepts "nan"/"inf" spellings; map those to the
        // dedicated error downstream of this check.
        throw Error(ErrorCode::malformed_file,
                    "cannot parse " + what + " from '" + text + "'");
    }
    return value;
}

int parse_int_full(const std::string& text, const std::string& what) {
    int value = 0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) {
        throw Error(ErrorCode::malformed_file,
                    "cannot parse " + what + " from '" + text + "'");
    }
    return value;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

std::string stem_of(const std::string& path) {
    if (path.size() > 4 && path.ends_with(".f32")) {
        return path.substr(0, path.size() - 4);
    }
    return path;
}

struct RawMeta {
    double fs_hz = 0.0;
    std::string lead;
};

RawMeta load_meta(const std::string& meta_path) {
    std::ifstream in(meta_path);
    if (!in) {
        throw Error(ErrorCode::io_failure, "cannot open " + meta_path);
    }
    RawMeta meta;
    bool have_fs = false;
    std::string line;
    while (std::getline(in, line)) {
        chomp(line);
        if (line.empty()) continue;
        if (line.starts_with("fs_hz=")) {
            meta.fs_hz = parse_double_full(line.substr(6), "fs_hz");
            have_fs = true;
        } else if (line.starts_with("lead=")) {
            meta.lead = line.substr(5);
        } else {
            throw Error(ErrorCode::malformed_file,
                        "unexpected meta line '" + line + "' in " + meta_path);
        }
    }
    if (!have_fs) {
        throw Error(ErrorCode::malformed_file, "missing fs_hz in " + meta_path);
    }
    return meta;
}

EcgRecording load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::io_failure, "cannot open " + path);
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw Error(ErrorCode::malformed_file, path + " is empty");
    }
    chomp(line);
    if (!line.starts_with("fs_hz=")) {
        throw Error(ErrorCode::malformed_file,
                    "first line of " + path + " must be fs_hz=<rate>");
    }
    EcgRecording rec;
    rec.sampling_rate_hz = parse_double_full(line.substr(6), "fs_hz");
    if (!(rec.sampling_rate_hz > 0.0)) {
        throw Error(ErrorCode::bad_sampling_rate,
                    "fs_hz must be positive in " + path);
    }

    bool first_data_line = true;
    while (std::getline(in, line)) {
        chomp(line);
        if (line.empty()) {
            if (in.eof()) break;  // trailing newline
            throw Error(ErrorCode::malformed_file, "blank line in " + path);
        }
        if (first_data_line && line.starts_with("lead=")) {
            rec.lead_name = line.substr(5);
            first_data_line = false;
            continue;
        }
        first_data_line = false;
        double v = 0.0;
        const char* begin = line.data();
        const char* end = begin + line.size();
        auto [ptr, ec] = std::from_chars(begin, end, v);
        if (ec != std::errc() || ptr != end) {
            throw Error(ErrorCode::malformed_file,
                        "bad sample line '" + line + "' in " + path);
        }
        if (!std::isfinite(v)) {
            throw Error(ErrorCode::non_finite_sample,
                        "non-finite sample '" + line + "' in " + path);
        }
        rec.samples.push_back(v);
    }
    if (rec.samples.empty()) {
        throw Error(ErrorCode::empty_signal, path + " has no samples");
    }
    return rec;
}

EcgRecording load_raw(const std::string& path) {
    const std::string stem = stem_of(path);
    const RawMeta meta = load_meta(stem + ".meta");

    std::ifstream in(stem + ".f32", std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::io_failure, "cannot open " + stem + ".f32");
    }
    in.seekg(0, std::ios::end);
    const std::streamoff bytes = in.tellg();
    in.seekg(0, std::ios::beg);
    if (bytes % 4 != 0) {
        throw Error(ErrorCode::malformed_file,
                    stem + ".f32 size is not a multiple of 4");
    }
    const std::size_t n = static_cast<std::size_t>(bytes / 4);
    std::vector<std::uint32_t> words(n);
    if (n > 0 &&
        !in.read(reinterpret_cast<char*>(words.data()), bytes)) {
        throw Error(ErrorCode::io_failure, "short read from " + stem + ".f32");
    }

    EcgRecording rec;
    rec.sampling_rate_hz = meta.fs_hz;
    rec.lead_name = meta.lead;
    rec.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::uint32_t w = words[i];
        if constexpr (std::endian::native == std::endian::big) {
            w = ((w & 0xff) << 24) | ((w & 0xff00) << 8) | ((w >> 8) & 0xff00) |
                (w >> 24);
        }
        float f;
        std::memcpy(&f, &w, sizeof f);
        if (!std::isfinite(f)) {
            throw Error(ErrorCode::non_finite_sample,
                        "non-finite sample " + std::to_string(i) + " in " +
                            stem + ".f32");
        }
        rec.samples[i] = static_cast<double>(f);
    }
    validate(rec);
    return rec;
}

void write_csv(const EcgRecording& rec, const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // binary keeps LF endings
    if (!out) {
        throw Error(ErrorCode::io_failure, "cannot write " + path);
    }
    out << "fs_hz=" << format_g6(rec.sampling_rate_hz) << '\n';
    if (!rec.lead_name.empty()) out << "lead=" << rec.lead_name << '\n';
    for (double v : rec.samples) out << format_g6(v) << '\n';
    if (!out) {
        throw Error(ErrorCode::io_failure, "write failed for " + path);
    }
}

void write_raw(const EcgRecording& rec, const std::string& path) {
    const std::string stem = stem_of(path);
    {
        std::ofstream meta(stem + ".meta", std::ios::binary);
        if (!meta) {
            throw Error(ErrorCode::io_failure, "cannot write " + stem + ".meta");
        }
        meta << "fs_hz=" << format_g6(rec.sampling_rate_hz) << '\n';
        meta << "lead=" << rec.lead_name << '\n';
    }
    std::ofstream out(stem + ".f32", std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::io_failure, "cannot write " + stem + ".f32");
    }
    std::vector<std::uint32_t> words(rec.samples.size());
    for (std::size_t i = 0; i < rec.samples.size(); ++i) {
        const float f = static_cast<float>(rec.samples[i]);
        std::uint32_t w;
        std::memcpy(&w, &f, sizeof w);
        if constexpr (std::endian::native == std::endian::big) {
            w = ((w & 0xff) << 24) | ((w & 0xff00) << 8) | ((w >> 8) & 0xff00) |
                (w >> 24);
        }
        words[i] = w;
    }
    out.write(reinterpret_cast<const char*>(words.data()),
              static_cast<std::streamsize>(words.size() * 4));
    if (!out) {
        throw Error(ErrorCode::io_failure, "write failed for " + stem + ".f32");
    }
}

}  // namespace

SignalFormat format_from_path(const std::string& path) {
    return path.ends_with(".f32") ? SignalFormat::raw_f32le : SignalFormat::csv;
}

EcgRecording load_recording(const std::string& path, SignalFormat format) {
    EcgRecording rec = format == SignalFormat::csv ? load_csv(path)
                                                   : load_raw(path);
    validate(rec);
    return rec;
}

void write_recording(const EcgRecording& rec, const std::string& path,
                     SignalFormat format) {
    if (format == SignalFormat::csv) {
        write_csv(rec, path);
    } else {
        write_raw(rec, path);
    }
}

std::vector<CohortManifestRow> load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::io_failure, "cannot open " + path);
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw Error(ErrorCode::malformed_file, path + " is empty");
    }
    chomp(line);
    if (line != "subject_id,recording_path,ace_iii,age,sex") {
        throw Error(ErrorCode::malformed_file,
                    "bad manifest header in " + path + ": '" + line + "'");
    }

    std::vector<CohortManifestRow> rows;
    std::unordered_set<std::string> seen;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        chomp(line);
        if (line.empty()) {
            if (in.eof()) break;
            throw Error(ErrorCode::malformed_file,
                        "blank line " + std::to_string(line_no) + " in " + path);
        }
        const auto fields = split_csv_line(line);
        if (fields.size() != 5) {
            throw Error(ErrorCode::malformed_file,
                        "expected 5 fields on line " + std::to_string(line_no) +
                            " of " + path);
        }
        CohortManifestRow row;
        row.subject_id = fields[0];
        row.recording_path = fields[1];
        if (row.subject_id.empty() || row.recording_path.empty()) {
            throw Error(ErrorCode::malformed_file,
                        "empty subject_id or recording_path on line " +
                            std::to_string(line_no) + " of " + path);
        }
        const int score = parse_int_full(fields[2], "ace_iii");
        if (score < 0 || score > 100) {
            throw Error(ErrorCode::score_out_of_range,
                        "subject " + row.subject_id + " (line " +
                            std::to_string(line_no) + "): ACE-III score " +
                            fields[2] + " outside [0, 100]");
        }
        row.ace_iii_score = score;
        if (!fields[3].empty()) {
            const double age = parse_double_full(fields[3], "age");
            if (age < 0.0 || !std::isfinite(age)) {
                throw Error(ErrorCode::malformed_file,
                            "negative age on line " + std::to_string(line_no));
            }
            row.age_years = age;
        }
        if (!fields[4].empty()) {
            if (fields[4] != "M" && fields[4] != "F" && fields[4] != "other") {
                throw Error(ErrorCode::malformed_file,
                            "sex must be M, F or other on line " +
                                std::to_string(line_no));
            }
            row.sex = fields[4];
        }
        if (!seen.insert(row.subject_id).second) {
            throw Error(ErrorCode::duplicate_subject,
                        "duplicate subject_id '" + row.subject_id + "' (line " +
                            std::to_string(line_no) + ")");
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_manifest(const std::vector<CohortManifestRow>& rows,
                    const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::io_failure, "cannot write " + path);
    }
    out << "subject_id,recording_path,ace_iii,age,sex\n";
    for (const auto& row : rows) {
        out << row.subject_id << ',' << row.recording_path << ','
            << row.ace_iii_score << ',';
        if (row.age_years) out << format_g6(*row.age_years);
        out << ',';
        if (row.sex) out << *row.sex;
        out << '\n';
    }
    if (!out) {
        throw Error(ErrorCode::io_failure, "write failed for " + path);
    }
}

std::string features_csv_header() {
    return "subject_id,label,mean_nn_ms,rms_nn_ms,sdnn_ms,rmssd_ms,hr_bpm";
}

std::string features_csv_row(const FeatureRow& row) {
    std::string out = row.subject_id;
    out += ',';
    out += label_name(row.label);
    const double values[] = {row.features.mean_nn_ms, row.features.rms_nn_ms,
                             row.features.sdnn_ms, row.features.rmssd_ms,
                             row.features.hr_bpm};
    for (double v : values) {
        out += ',';
        out += format_g6(v);
    }
    return out;
}

void write_features_table(const std::vector<FeatureRow>& rows,
                          const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::io_failure, "cannot write " + path);
    }
    out << features_csv_header() << '\n';
    for (const auto& row : rows) out << features_csv_row(row) << '\n';
    if (!out) {
        throw Error(ErrorCode::io_failure, "write failed for " + path);
    }
}

std::vector<FeatureRow> load_features_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::io_failure, "cannot open " + path);
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw Error(ErrorCode::malformed_file, path + " is empty");
    }
    chomp(line);
    if (line != features_csv_header()) {
        throw Error(ErrorCode::malformed_file,
                    "bad features header in " + path + ": '" + line + "'");
    }
    std::vector<FeatureRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        chomp(line);
        if (line.empty()) {
            if (in.eof()) break;
            throw Error(ErrorCode::malformed_file,
                        "blank line " + std::to_string(line_no) + " in " + path);
        }
        const auto fields = split_csv_line(line);
        if (fields.size() != 7) {
            throw Error(ErrorCode::malformed_file,
                        "expected 7 fields on line " + std::to_string(line_no) +
                            " of " + path);
        }
        FeatureRow row;
        row.subject_id = fields[0];
        row.label = parse_label(fields[1]);
        row.features.mean_nn_ms = parse_double_full(fields[2], "mean_nn_ms");
        row.features.rms_nn_ms = parse_double_full(fields[3], "rms_nn_ms");
        row.features.sdnn_ms = parse_double_full(fields[4], "sdnn_ms");
        row.features.rmssd_ms = parse_double_full(fields[5], "rmssd_ms");
        row.features.hr_bpm = parse_double_full(fields[6], "hr_bpm");
        for (double v : {row.features.mean_nn_ms, row.features.rms_nn_ms,
                         row.features.sdnn_ms, row.features.rmssd_ms,
                         row.features.hr_bpm}) {
            if (!std::isfinite(v)) {
                throw Error(ErrorCode::non_finite_sample,
                            "non-finite feature on line " +
                                std::to_string(line_no) + " of " + path);
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace hrvkit::io
