#include "hrvkit/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "hrvkit/error.hpp"
#include "hrvkit/hrv.hpp"

namespace hrvkit::pipeline {

namespace {

Error with_stage(const Error& e, const char* stage) {
    if (e.has_stage()) return e;
    std::string message = e.what();
    const std::string prefix = std::string(error_code_name(e.code())) + ": ";
    if (message.starts_with(prefix)) message = message.substr(prefix.size());
    return Error(e.code(), message, stage);
}

std::string without_stage_tag(const std::string& what) {
    if (what.starts_with("[stage=")) {
        const auto end = what.find("] ");
        if (end != std::string::npos) return what.substr(end + 2);
    }
    return what;
}

Protocol parse_protocol(const std::string& text, const std::string& path) {
    if (text == "kfold") return Protocol::kfold;
    if (text == "holdout") return Protocol::holdout;
    if (text == "both") return Protocol::both;
    throw Error(ErrorCode::malformed_file,
                "protocol must be kfold, holdout or both in " + path);
}

// The two config syntaxes funnel through one key dispatch; V adapts either a
// JSON value or a raw text value.
template <class V>
void apply_key(RunConfig& c, const std::string& key, const V& v,
               const std::string& path) {
    if (key == "band_low_hz") {
        c.filter.band_low_hz = v.as_double();
    } else if (key == "band_high_hz") {
        c.filter.band_high_hz = v.as_double();
    } else if (key == "notch_hz") {
        c.filter.notch_hz = v.as_double();
    } else if (key == "notch_q") {
        c.filter.notch_q = v.as_double();
    } else if (key == "bandpass_order") {
        c.filter.bandpass_order = v.as_int();
    } else if (key == "zero_phase") {
        c.filter.zero_phase = v.as_bool();
    } else if (key == "notch_enabled") {
        c.filter.notch_enabled = v.as_bool();
    } else if (key == "decimate") {
        c.detector.decimate = v.as_bool();
    } else if (key == "target_fs_hz") {
        c.detector.target_fs_hz = v.as_double();
    } else if (key == "refractory_ms") {
        c.detector.refractory_ms = v.as_double();
    } else if (key == "qrs_band_low_hz") {
        c.detector.qrs_band_low_hz = v.as_double();
    } else if (key == "qrs_band_high_hz") {
        c.detector.qrs_band_high_hz = v.as_double();
    } else if (key == "integration_window_ms") {
        c.detector.integration_window_ms = v.as_double();
    } else if (key == "threshold_fraction") {
        c.detector.threshold_fraction = v.as_double();
    } else if (key == "noise_multiplier") {
        c.detector.noise_multiplier = v.as_double();
    } else if (key == "learning_window_s") {
        c.detector.learning_window_s = v.as_double();
    } else if (key == "peak_update") {
        c.detector.peak_update = v.as_double();
    } else if (key == "refine_window_ms") {
        c.detector.refine_window_ms = v.as_double();
    } else if (key == "refine_fine_ms") {
        c.detector.refine_fine_ms = v.as_double();
    } else if (key == "gate_low_ms") {
        c.gate.low_ms = v.as_double();
    } else if (key == "gate_high_ms") {
        c.gate.high_ms = v.as_double();
    } else if (key == "k") {
        c.k = v.as_int();
    } else if (key == "train_fraction") {
        c.train_fraction = v.as_double();
    } else if (key == "protocol") {
        c.protocol = parse_protocol(v.as_string(), path);
    } else if (key == "seed") {
        c.seed = v.as_u64();
    } else if (key == "threads") {
        c.threads = v.as_int();
    } else {
        throw Error(ErrorCode::malformed_file,
                    "unknown config key '" + key + "' in " + path);
    }
}

struct JsonValue {
    const nlohmann::json& j;
    double as_double() const { return j.get<double>(); }
    int as_int() const { return j.get<int>(); }
    bool as_bool() const { return j.get<bool>(); }
    std::uint64_t as_u64() const { return j.get<std::uint64_t>(); }
    std::string as_string() const { return j.get<std::string>(); }
};

struct TextValue {
    const std::string& s;
    const std::string& path;

    template <class T>
    T parse_number() const {
        T out{};
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        if (ec != std::errc() || ptr != s.data() + s.size()) {
            throw Error(ErrorCode::malformed_file,
                        "cannot parse config value '" + s + "' in " + path);
        }
        return out;
    }
    double as_double() const { return parse_number<double>(); }
    int as_int() const { return parse_number<int>(); }
    std::uint64_t as_u64() const { return parse_number<std::uint64_t>(); }
    bool as_bool() const {
        if (s == "true" || s == "1") return true;
        if (s == "false" || s == "0") return false;
        throw Error(ErrorCode::malformed_file,
                    "cannot parse config boolean '" + s + "' in " + path);
    }
    std::string as_string() const { return s; }
};

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::io_failure, "cannot open " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();

    RunConfig config;
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        try {
            const auto j = nlohmann::json::parse(text);
            for (const auto& [key, value] : j.items()) {
                apply_key(config, key, JsonValue{value}, path);
            }
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::malformed_file, path + ": " + e.what());
        }
        return config;
    }

    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorCode::malformed_file,
                        "expected key=value, got '" + line + "' in " + path);
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        apply_key(config, key, TextValue{value, path}, path);
    }
    return config;
}

HrvFeatures process_recording(const EcgRecording& rec,
                              const RunConfig& config) {
    EcgRecording clean;
    try {
        clean = preprocess::preprocess_chain(rec, config.filter);
    } catch (const Error& e) {
        throw with_stage(e, "preprocess");
    }
    rpeak::NnSeries nn;
    try {
        const PeakList peaks = rpeak::detect_rpeaks(clean, config.detector);
        nn = rpeak::nn_from_peaks(peaks, clean.sampling_rate_hz, config.gate);
    } catch (const Error& e) {
        throw with_stage(e, "rpeak");
    }
    try {
        return hrv::compute_features(nn);
    } catch (const Error& e) {
        throw with_stage(e, "hrv");
    }
}

CohortResult process_cohort(const std::vector<io::CohortManifestRow>& manifest,
                            const RunConfig& config,
                            const std::string& base_dir) {
    if (manifest.empty()) {
        throw Error(ErrorCode::empty_cohort, "manifest has no rows");
    }

    struct Slot {
        bool ok = false;
        CohortRow row;
        Exclusion exclusion;
    };
    const std::size_t n = manifest.size();
    std::vector<Slot> slots(n);

    std::atomic<std::size_t> cursor{0};
    const auto worker = [&] {
        while (true) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= n) return;
            const auto& entry = manifest[i];
            Slot& slot = slots[i];
            try {
                std::string path = entry.recording_path;
                if (!base_dir.empty() && !path.starts_with('/')) {
                    path = base_dir + "/" + path;
                }
                EcgRecording rec;
                try {
                    rec = io::load_recording(path, io::format_from_path(path));
                } catch (const Error& e) {
                    throw with_stage(e, "io");
                }
                rec.subject_id = entry.subject_id;
                CohortRow row;
                row.subject_id = entry.subject_id;
                row.label = label_from_ace(entry.ace_iii_score);
                row.features = process_recording(rec, config);
                slot.row = std::move(row);
                slot.ok = true;
            } catch (const Error& e) {
                slot.exclusion = {entry.subject_id, e.stage(),
                                  without_stage_tag(e.what())};
            } catch (const std::exception& e) {
                slot.exclusion = {entry.subject_id, "", e.what()};
            }
        }
    };

    unsigned thread_count = config.threads > 0
                                ? static_cast<unsigned>(config.threads)
                                : std::thread::hardware_concurrency();
    if (thread_count == 0) thread_count = 1;
    thread_count = std::min<unsigned>(thread_count, static_cast<unsigned>(n));
    if (thread_count <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(thread_count);
        for (unsigned t = 0; t < thread_count; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    CohortResult result;
    for (Slot& slot : slots) {
        if (slot.ok) {
            result.table.rows.push_back(std::move(slot.row));
        } else {
            result.exclusions.push_back(std::move(slot.exclusion));
        }
    }
    if (result.table.rows.empty()) {
        throw Error(ErrorCode::empty_cohort,
                    "all " + std::to_string(n) + " subjects were excluded");
    }
    std::sort(result.table.rows.begin(), result.table.rows.end(),
              [](const CohortRow& a, const CohortRow& b) {
                  return a.subject_id < b.subject_id;
              });
    return result;
}

}  // namespace hrvkit::pipeline
