#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hrvkit/classify.hpp"
#include "hrvkit/cohort.hpp"
#include "hrvkit/error.hpp"
#include "hrvkit/format.hpp"
#include "hrvkit/hrv.hpp"
#include "hrvkit/pipeline.hpp"
#include "hrvkit/preprocess.hpp"
#include "hrvkit/rpeak.hpp"
#include "hrvkit/signal_io.hpp"
#include "hrvkit/stats.hpp"
#include "hrvkit/synth.hpp"
#include "hrvkit/version.hpp"

namespace {

using nlohmann::ordered_json;

// Doubles pass through the 6-significant-digit round trip before entering
// JSON so report bytes do not depend on accumulated low bits.
double g6(double v) { return hrvkit::round_g6(v); }

std::string pad(const std::string& text, std::size_t width) {
    std::string out = text;
    while (out.size() < width) out.push_back(' ');
    return out;
}

struct FilterFlags {
    hrvkit::FilterSpec spec;
    bool no_zero_phase = false;
    bool no_notch = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("--band-low", spec.band_low_hz,
                        "Band-pass low corner (Hz)")
            ->capture_default_str();
        cmd->add_option("--band-high", spec.band_high_hz,
                        "Band-pass high corner (Hz)")
            ->capture_default_str();
        cmd->add_option("--notch-hz", spec.notch_hz, "Notch frequency (Hz)")
            ->capture_default_str();
        cmd->add_option("--notch-q", spec.notch_q, "Notch quality factor")
            ->capture_default_str();
        cmd->add_option("--bandpass-order", spec.bandpass_order,
                        "Band-pass Butterworth order")
            ->capture_default_str();
        cmd->add_flag("--no-zero-phase", no_zero_phase,
                      "Single forward pass instead of forward-backward");
        cmd->add_flag("--no-notch", no_notch, "Skip the powerline notch");
    }
    hrvkit::FilterSpec resolve() const {
        hrvkit::FilterSpec out = spec;
        if (no_zero_phase) out.zero_phase = false;
        if (no_notch) out.notch_enabled = false;
        return out;
    }
};

struct DetectorFlags {
    hrvkit::DetectorParams params;
    hrvkit::GateBounds gate;
    bool no_decimate = false;

    void attach(CLI::App* cmd) {
        cmd->add_flag("--no-decimate", no_decimate,
                      "Detect at the native rate instead of ~1 kHz");
        cmd->add_option("--refractory-ms", params.refractory_ms,
                        "Minimum peak spacing (ms)")
            ->capture_default_str();
        cmd->add_option("--gate-low-ms", gate.low_ms,
                        "Lower NN-interval gate (ms)")
            ->capture_default_str();
        cmd->add_option("--gate-high-ms", gate.high_ms,
                        "Upper NN-interval gate (ms)")
            ->capture_default_str();
    }
    hrvkit::DetectorParams resolve() const {
        hrvkit::DetectorParams out = params;
        if (no_decimate) out.decimate = false;
        return out;
    }
};

ordered_json confusion_json(const hrvkit::classify::Confusion& c) {
    return ordered_json{{"tp", c.tp}, {"fp", c.fp}, {"tn", c.tn}, {"fn", c.fn}};
}

ordered_json rank_sum_json(const hrvkit::RankSumResult& r) {
    return ordered_json{
        {"w_statistic", g6(r.w_statistic)},
        {"p_value", g6(r.p_value)},
        {"method", r.method == hrvkit::RankSumMethod::exact ? "exact"
                                                            : "normal_approx"},
        {"n_mci", r.n_a},
        {"n_non_mci", r.n_b},
        {"significant", hrvkit::stats::significant(r)},
    };
}

hrvkit::CohortTable table_from_features_csv(const std::string& path) {
    hrvkit::CohortTable table;
    for (auto& row : hrvkit::io::load_features_table(path)) {
        table.rows.push_back({row.subject_id, row.label, row.features});
    }
    return table;
}

hrvkit::pipeline::Protocol parse_protocol_flag(const std::string& text) {
    if (text == "kfold") return hrvkit::pipeline::Protocol::kfold;
    if (text == "holdout") return hrvkit::pipeline::Protocol::holdout;
    if (text == "both") return hrvkit::pipeline::Protocol::both;
    throw CLI::ValidationError("--protocol",
                               "must be one of kfold, holdout, both");
}

std::string protocol_name(hrvkit::pipeline::Protocol p) {
    switch (p) {
        case hrvkit::pipeline::Protocol::kfold: return "kfold";
        case hrvkit::pipeline::Protocol::holdout: return "holdout";
        case hrvkit::pipeline::Protocol::both: return "both";
    }
    return "?";
}

std::vector<hrvkit::classify::FeatureSelection> selections(bool joint) {
    std::vector<hrvkit::classify::FeatureSelection> out;
    for (hrvkit::Feature f : hrvkit::hrv::all_features) {
        out.push_back(hrvkit::classify::FeatureSelection::single(f));
    }
    if (joint) out.push_back(hrvkit::classify::FeatureSelection::joint());
    return out;
}

struct GridCell {
    std::string feature;
    hrvkit::ClassifierKind classifier;
    std::optional<hrvkit::CvReport> kfold;
    std::optional<hrvkit::CvReport> holdout;
};

std::vector<GridCell> run_grid(const hrvkit::CohortTable& table,
                               hrvkit::pipeline::Protocol protocol, int k,
                               double train_fraction, std::uint64_t seed,
                               bool joint) {
    std::vector<GridCell> grid;
    for (const auto& sel : selections(joint)) {
        for (hrvkit::ClassifierKind kind : hrvkit::classify::all_classifiers) {
            GridCell cell;
            cell.feature = sel.name();
            cell.classifier = kind;
            if (protocol != hrvkit::pipeline::Protocol::holdout) {
                cell.kfold = hrvkit::classify::kfold_validate(table, kind, sel,
                                                              k, seed);
            }
            if (protocol != hrvkit::pipeline::Protocol::kfold) {
                cell.holdout = hrvkit::classify::holdout_validate(
                    table, kind, sel, train_fraction, seed);
            }
            grid.push_back(std::move(cell));
        }
    }
    return grid;
}

ordered_json grid_json(const std::vector<GridCell>& grid) {
    ordered_json out = ordered_json::array();
    for (const auto& cell : grid) {
        ordered_json j{
            {"feature", cell.feature},
            {"classifier",
             std::string(hrvkit::classify::classifier_name(cell.classifier))},
        };
        if (cell.kfold) {
            ordered_json folds = ordered_json::array();
            for (double a : cell.kfold->fold_accuracies) folds.push_back(g6(a));
            j["kfold"] = ordered_json{
                {"pooled_accuracy", g6(*cell.kfold->pooled_accuracy)},
                {"fold_accuracies", std::move(folds)},
                {"confusion", confusion_json(cell.kfold->confusion)},
            };
        }
        if (cell.holdout) {
            j["holdout"] = ordered_json{
                {"accuracy", g6(*cell.holdout->holdout_accuracy)},
                {"confusion", confusion_json(cell.holdout->holdout_confusion)},
            };
        }
        out.push_back(std::move(j));
    }
    return out;
}

void print_grid_text(const std::vector<GridCell>& grid, int k,
                     double train_fraction, std::uint64_t seed,
                     hrvkit::pipeline::Protocol protocol) {
    const auto print_block = [&](const std::string& title, bool use_holdout) {
        std::cout << title << "\n";
        std::cout << pad("feature", 10) << pad("svm", 10) << pad("da", 10)
                  << "nb\n";
        std::string feature;
        std::string line;
        for (const auto& cell : grid) {
            if (cell.feature != feature) {
                if (!line.empty()) std::cout << line << "\n";
                feature = cell.feature;
                line = pad(feature, 10);
            }
            const double acc = use_holdout ? *cell.holdout->holdout_accuracy
                                           : *cell.kfold->pooled_accuracy;
            line += pad(hrvkit::format_g6(acc), 10);
        }
        if (!line.empty()) std::cout << line << "\n";
    };
    if (protocol != hrvkit::pipeline::Protocol::holdout) {
        print_block("pooled accuracy, " + std::to_string(k) +
                        "-fold cross-validation (seed " +
                        std::to_string(seed) + ")",
                    false);
    }
    if (protocol != hrvkit::pipeline::Protocol::kfold) {
        if (protocol == hrvkit::pipeline::Protocol::both) std::cout << "\n";
        print_block("holdout accuracy, train fraction " +
                        hrvkit::format_g6(train_fraction) + " (seed " +
                        std::to_string(seed) + ")",
                    true);
    }
}

// ---------------------------------------------------------------- synth ----

struct SynthArgs {
    hrvkit::SynthSpec spec;
    double wander_amp = 0.0, wander_freq = 0.0;
    double powerline_amp = 0.0, powerline_freq = 50.0;
    std::optional<double> snr_db;
    std::string out;
    std::string truth;
};

int run_synth(const SynthArgs& args) {
    hrvkit::SynthSpec spec = args.spec;
    spec.noise_snr_db = args.snr_db;
    if (args.wander_amp != 0.0) {
        spec.baseline_wander =
            hrvkit::synth::SineComponent{args.wander_amp, args.wander_freq};
    }
    if (args.powerline_amp != 0.0) {
        spec.powerline = hrvkit::synth::SineComponent{args.powerline_amp,
                                                      args.powerline_freq};
    }
    hrvkit::SynthOutput out = hrvkit::synth::generate(spec);
    out.recording.subject_id =
        std::filesystem::path(args.out).stem().string();
    hrvkit::io::write_recording(out.recording, args.out,
                                hrvkit::io::format_from_path(args.out));
    if (!args.truth.empty()) {
        std::ofstream truth(args.truth, std::ios::binary);
        if (!truth) {
            throw hrvkit::Error(hrvkit::ErrorCode::io_failure,
                                "cannot write " + args.truth);
        }
        for (double t : out.true_peaks.times_s) {
            truth << hrvkit::format_g6(t) << '\n';
        }
    }
    std::cerr << "wrote " << args.out << " ("
              << out.true_peaks.indices.size() << " beats)\n";
    return 0;
}

// --------------------------------------------------------- synth-cohort ----

struct CohortArgs {
    hrvkit::synth::CohortSpec spec = hrvkit::synth::CohortSpec::reference_balance();
    std::optional<double> snr_db;
    double wander_amp = 0.0, wander_freq = 0.0;
    double powerline_amp = 0.0, powerline_freq = 50.0;
    std::string out_dir;
};

int run_synth_cohort(const CohortArgs& args) {
    hrvkit::synth::CohortSpec spec = args.spec;
    for (auto* group : {&spec.mci, &spec.healthy}) {
        group->noise_snr_db = args.snr_db;
        if (args.wander_amp != 0.0) {
            group->baseline_wander = hrvkit::synth::SineComponent{
                args.wander_amp, args.wander_freq};
        }
        if (args.powerline_amp != 0.0) {
            group->powerline = hrvkit::synth::SineComponent{
                args.powerline_amp, args.powerline_freq};
        }
    }
    const auto cohort = hrvkit::synth::generate_cohort(spec, args.out_dir);
    std::cerr << "wrote " << cohort.manifest.size() << " recordings, "
              << cohort.manifest_path << ", " << cohort.truth_path << "\n";
    return 0;
}

// ----------------------------------------------------------- preprocess ----

struct PreprocessArgs {
    FilterFlags filter;
    std::string in, out;
};

int run_preprocess(const PreprocessArgs& args) {
    const auto rec = hrvkit::io::load_recording(
        args.in, hrvkit::io::format_from_path(args.in));
    const auto clean =
        hrvkit::preprocess::preprocess_chain(rec, args.filter.resolve());
    hrvkit::io::write_recording(clean, args.out,
                                hrvkit::io::format_from_path(args.out));
    return 0;
}

// --------------------------------------------------------------- detect ----

struct DetectArgs {
    FilterFlags filter;
    DetectorFlags detector;
    bool no_preprocess = false;
    bool intervals = false;
    std::string in;
};

int run_detect(const DetectArgs& args) {
    auto rec = hrvkit::io::load_recording(
        args.in, hrvkit::io::format_from_path(args.in));
    if (!args.no_preprocess) {
        rec = hrvkit::preprocess::preprocess_chain(rec, args.filter.resolve());
    }
    const auto peaks = hrvkit::rpeak::detect_rpeaks(rec, args.detector.resolve());
    if (args.intervals) {
        const auto nn = hrvkit::rpeak::nn_from_peaks(
            peaks, rec.sampling_rate_hz, args.detector.gate);
        for (double ms : nn.intervals_ms) {
            std::cout << hrvkit::format_g6(ms) << "\n";
        }
    } else {
        for (double t : peaks.times_s) {
            std::cout << hrvkit::format_g6(t) << "\n";
        }
    }
    return 0;
}

// ------------------------------------------------------------- features ----

struct FeaturesArgs {
    FilterFlags filter;
    DetectorFlags detector;
    bool no_preprocess = false;
    bool header = false;
    int ace = 100;
    std::string subject_id;
    std::string in;
};

int run_features(const FeaturesArgs& args) {
    auto rec = hrvkit::io::load_recording(
        args.in, hrvkit::io::format_from_path(args.in));
    if (!args.no_preprocess) {
        rec = hrvkit::preprocess::preprocess_chain(rec, args.filter.resolve());
    }
    const auto peaks = hrvkit::rpeak::detect_rpeaks(rec, args.detector.resolve());
    const auto nn = hrvkit::rpeak::nn_from_peaks(peaks, rec.sampling_rate_hz,
                                                 args.detector.gate);
    hrvkit::io::FeatureRow row;
    row.subject_id = args.subject_id.empty()
                         ? std::filesystem::path(args.in).stem().string()
                         : args.subject_id;
    row.label = hrvkit::label_from_ace(args.ace);
    row.features = hrvkit::hrv::compute_features(nn);
    if (args.header) std::cout << hrvkit::io::features_csv_header() << "\n";
    std::cout << hrvkit::io::features_csv_row(row) << "\n";
    return 0;
}

// ---------------------------------------------------------- cohort-stats ----

struct StatsArgs {
    std::string features;
    bool json = false;
};

int run_cohort_stats(const StatsArgs& args) {
    const auto table = table_from_features_csv(args.features);
    const auto results = hrvkit::stats::feature_significance(table);
    if (args.json) {
        ordered_json j;
        for (hrvkit::Feature f : hrvkit::hrv::all_features) {
            j[std::string(hrvkit::hrv::feature_name(f))] =
                rank_sum_json(results.at(f));
        }
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    std::cout << pad("feature", 10) << pad("W", 12) << pad("p", 12)
              << "significant\n";
    for (hrvkit::Feature f : hrvkit::hrv::all_features) {
        const auto& r = results.at(f);
        std::cout << pad(std::string(hrvkit::hrv::feature_name(f)), 10)
                  << pad(hrvkit::format_g6(r.w_statistic), 12)
                  << pad(hrvkit::format_g6(r.p_value), 12)
                  << (hrvkit::stats::significant(r) ? "yes" : "no") << "\n";
    }
    return 0;
}

// ------------------------------------------------------------- classify ----

struct ClassifyArgs {
    std::string features;
    int k = 10;
    double train_fraction = 0.7;
    std::string protocol = "both";
    std::uint64_t seed = 0;
    bool joint = false;
    bool json = false;
};

int run_classify(const ClassifyArgs& args) {
    const auto protocol = parse_protocol_flag(args.protocol);
    const auto table = table_from_features_csv(args.features);
    const auto grid = run_grid(table, protocol, args.k, args.train_fraction,
                               args.seed, args.joint);
    if (args.json) {
        ordered_json j{
            {"protocol", protocol_name(protocol)},
            {"k", args.k},
            {"train_fraction", g6(args.train_fraction)},
            {"seed", args.seed},
            {"grid", grid_json(grid)},
        };
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    print_grid_text(grid, args.k, args.train_fraction, args.seed, protocol);
    return 0;
}

// --------------------------------------------------------------- report ----

struct ReportArgs {
    std::string manifest;
    std::string out;
    std::string base_dir;
    std::string config_path;
    FilterFlags filter;
    DetectorFlags detector;
    int k = 10;
    double train_fraction = 0.7;
    std::string protocol = "both";
    std::uint64_t seed = 0;
    int threads = 0;
    bool joint = false;
};

int run_report(const ReportArgs& args, const CLI::App& cmd) {
    hrvkit::RunConfig config;
    if (!args.config_path.empty()) {
        config = hrvkit::pipeline::load_config(args.config_path);
    }
    // Flags given on the command line win over the config file. Unset flags
    // leave the file (or default) value alone.
    const auto given = [&cmd](const std::string& name) {
        return cmd.count(name) > 0;
    };
    if (given("--band-low")) config.filter.band_low_hz = args.filter.spec.band_low_hz;
    if (given("--band-high")) config.filter.band_high_hz = args.filter.spec.band_high_hz;
    if (given("--notch-hz")) config.filter.notch_hz = args.filter.spec.notch_hz;
    if (given("--notch-q")) config.filter.notch_q = args.filter.spec.notch_q;
    if (given("--bandpass-order")) {
        config.filter.bandpass_order = args.filter.spec.bandpass_order;
    }
    if (args.filter.no_zero_phase) config.filter.zero_phase = false;
    if (args.filter.no_notch) config.filter.notch_enabled = false;
    if (args.detector.no_decimate) config.detector.decimate = false;
    if (given("--refractory-ms")) {
        config.detector.refractory_ms = args.detector.params.refractory_ms;
    }
    if (given("--gate-low-ms")) config.gate.low_ms = args.detector.gate.low_ms;
    if (given("--gate-high-ms")) config.gate.high_ms = args.detector.gate.high_ms;
    if (given("--k")) config.k = args.k;
    if (given("--train-fraction")) config.train_fraction = args.train_fraction;
    if (given("--protocol")) config.protocol = parse_protocol_flag(args.protocol);
    if (given("--seed")) config.seed = args.seed;
    if (given("--threads")) config.threads = args.threads;

    const auto manifest = hrvkit::io::load_manifest(args.manifest);
    const std::string base_dir =
        args.base_dir.empty()
            ? std::filesystem::path(args.manifest).parent_path().string()
            : args.base_dir;
    const auto cohort =
        hrvkit::pipeline::process_cohort(manifest, config, base_dir);
    for (const auto& e : cohort.exclusions) {
        std::cerr << "excluded " << e.subject_id;
        if (!e.stage.empty()) std::cerr << " at " << e.stage;
        std::cerr << ": " << e.reason << "\n";
    }

    const auto significance = hrvkit::stats::feature_significance(cohort.table);
    const auto grid = run_grid(cohort.table, config.protocol, config.k,
                               config.train_fraction, config.seed, args.joint);

    ordered_json j;
    j["version"] = std::string(hrvkit::version_string);
    j["config"] = ordered_json{
        {"band_low_hz", g6(config.filter.band_low_hz)},
        {"band_high_hz", g6(config.filter.band_high_hz)},
        {"notch_hz", g6(config.filter.notch_hz)},
        {"notch_q", g6(config.filter.notch_q)},
        {"bandpass_order", config.filter.bandpass_order},
        {"zero_phase", config.filter.zero_phase},
        {"notch_enabled", config.filter.notch_enabled},
        {"decimate", config.detector.decimate},
        {"refractory_ms", g6(config.detector.refractory_ms)},
        {"gate_low_ms", g6(config.gate.low_ms)},
        {"gate_high_ms", g6(config.gate.high_ms)},
        {"k", config.k},
        {"train_fraction", g6(config.train_fraction)},
        {"protocol", protocol_name(config.protocol)},
        {"seed", config.seed},
    };

    int n_mci = 0;
    double age_sum = 0.0;
    int age_count = 0;
    for (const auto& row : manifest) {
        if (row.age_years) {
            age_sum += *row.age_years;
            ++age_count;
        }
    }
    n_mci = static_cast<int>(cohort.table.count(hrvkit::Label::mci));
    ordered_json summary{
        {"manifest_rows", manifest.size()},
        {"included", cohort.table.size()},
        {"excluded", cohort.exclusions.size()},
        {"mci", n_mci},
        {"non_mci",
         static_cast<int>(cohort.table.count(hrvkit::Label::non_mci))},
    };
    if (age_count > 0) {
        summary["mean_age"] = g6(age_sum / age_count);
    }
    j["cohort"] = std::move(summary);

    ordered_json exclusions = ordered_json::array();
    for (const auto& e : cohort.exclusions) {
        exclusions.push_back(ordered_json{{"subject_id", e.subject_id},
                                          {"stage", e.stage},
                                          {"reason", e.reason}});
    }
    j["exclusions"] = std::move(exclusions);

    ordered_json features = ordered_json::array();
    for (const auto& row : cohort.table.rows) {
        features.push_back(ordered_json{
            {"subject_id", row.subject_id},
            {"label", std::string(hrvkit::label_name(row.label))},
            {"mean_nn_ms", g6(row.features.mean_nn_ms)},
            {"rms_nn_ms", g6(row.features.rms_nn_ms)},
            {"sdnn_ms", g6(row.features.sdnn_ms)},
            {"rmssd_ms", g6(row.features.rmssd_ms)},
            {"hr_bpm", g6(row.features.hr_bpm)},
            {"n_intervals", row.features.n_intervals},
        });
    }
    j["features"] = std::move(features);

    ordered_json sig;
    for (hrvkit::Feature f : hrvkit::hrv::all_features) {
        sig[std::string(hrvkit::hrv::feature_name(f))] =
            rank_sum_json(significance.at(f));
    }
    j["significance"] = std::move(sig);
    j["classification"] = grid_json(grid);

    std::ofstream out(args.out, std::ios::binary);
    if (!out) {
        throw hrvkit::Error(hrvkit::ErrorCode::io_failure,
                            "cannot write " + args.out);
    }
    out << j.dump(2) << "\n";
    if (!out) {
        throw hrvkit::Error(hrvkit::ErrorCode::io_failure,
                            "write failed for " + args.out);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"HR/HRV feature pipeline for short single-lead ECG"};
    app.set_version_flag("--version", std::string(hrvkit::version_string));
    app.require_subcommand(1);

    SynthArgs synth_args;
    auto* synth = app.add_subcommand("synth", "Generate one synthetic recording");
    synth->add_option("--fs", synth_args.spec.fs_hz, "Sampling rate (Hz)")
        ->capture_default_str();
    synth->add_option("--duration", synth_args.spec.duration_s, "Duration (s)")
        ->capture_default_str();
    synth->add_option("--hr", synth_args.spec.mean_hr_bpm, "Mean heart rate (bpm)")
        ->capture_default_str();
    synth->add_option("--sdnn", synth_args.spec.sdnn_target_ms,
                      "Target interval SD (ms)")
        ->capture_default_str();
    synth->add_option("--rmssd-weight", synth_args.spec.rmssd_weight,
                      "White vs correlated interval noise mix in [0,1]")
        ->capture_default_str();
    synth->add_option("--snr-db", synth_args.snr_db, "Additive white noise SNR (dB)");
    synth->add_option("--wander-amp", synth_args.wander_amp,
                      "Baseline wander amplitude (mV)");
    synth->add_option("--wander-freq", synth_args.wander_freq,
                      "Baseline wander frequency (Hz)");
    synth->add_option("--powerline-amp", synth_args.powerline_amp,
                      "Powerline amplitude (mV)");
    synth->add_option("--powerline-freq", synth_args.powerline_freq,
                      "Powerline frequency (Hz)")
        ->capture_default_str();
    synth->add_option("--seed", synth_args.spec.seed, "Random seed")
        ->capture_default_str();
    synth->add_option("--out", synth_args.out, "Output recording (.csv or .f32)")
        ->required();
    synth->add_option("--truth", synth_args.truth,
                      "Also write true peak times (s), one per line");

    CohortArgs cohort_args;
    auto* synth_cohort = app.add_subcommand(
        "synth-cohort", "Generate a labeled synthetic cohort");
    synth_cohort->add_option("--out-dir", cohort_args.out_dir, "Output directory")
        ->required();
    synth_cohort->add_option("--n-mci", cohort_args.spec.n_mci, "MCI subjects")
        ->capture_default_str();
    synth_cohort
        ->add_option("--n-healthy", cohort_args.spec.n_healthy,
                     "Healthy subjects")
        ->capture_default_str();
    synth_cohort->add_option("--fs", cohort_args.spec.fs_hz, "Sampling rate (Hz)")
        ->capture_default_str();
    synth_cohort->add_option("--duration", cohort_args.spec.duration_s,
                             "Duration (s)")
        ->capture_default_str();
    synth_cohort->add_option("--seed", cohort_args.spec.seed, "Random seed")
        ->capture_default_str();
    synth_cohort
        ->add_option("--mci-hr", cohort_args.spec.mci.mean_hr_bpm,
                     "MCI group mean HR (bpm)")
        ->capture_default_str();
    synth_cohort
        ->add_option("--mci-hr-sd", cohort_args.spec.mci.hr_sd_bpm,
                     "MCI group HR spread (bpm)")
        ->capture_default_str();
    synth_cohort
        ->add_option("--mci-sdnn", cohort_args.spec.mci.sdnn_ms,
                     "MCI group SDNN (ms)")
        ->capture_default_str();
    synth_cohort
        ->add_option("--mci-sdnn-sd", cohort_args.spec.mci.sdnn_sd_ms,
                     "MCI group SDNN spread (ms)")
        ->capture_default_str();
    synth_cohort
        ->add_option("--healthy-hr", cohort_args.spec.healthy.mean_hr_bpm,
                     "Healthy group mean HR (bpm)")
        ->capture_default_str();
    synth_cohort
        ->add_option("--healthy-hr-sd", cohort_args.spec.healthy.hr_sd_bpm,
                     "Healthy group HR spread (bpm)")
        ->capture_default_str();
    synth_cohort
        ->add_option("--healthy-sdnn", cohort_args.spec.healthy.sdnn_ms,
                     "Healthy group SDNN (ms)")
        ->capture_default_str();
    synth_cohort
        ->add_option("--healthy-sdnn-sd", cohort_args.spec.healthy.sdnn_sd_ms,
                     "Healthy group SDNN spread (ms)")
        ->capture_default_str();
    synth_cohort->add_option("--snr-db", cohort_args.snr_db,
                             "Additive white noise SNR (dB), both groups");
    synth_cohort->add_option("--wander-amp", cohort_args.wander_amp,
                             "Baseline wander amplitude (mV)");
    synth_cohort->add_option("--wander-freq", cohort_args.wander_freq,
                             "Baseline wander frequency (Hz)");
    synth_cohort->add_option("--powerline-amp", cohort_args.powerline_amp,
                             "Powerline amplitude (mV)");
    synth_cohort->add_option("--powerline-freq", cohort_args.powerline_freq,
                             "Powerline frequency (Hz)")
        ->capture_default_str();

    PreprocessArgs pre_args;
    auto* preprocess =
        app.add_subcommand("preprocess", "Detrend, band-pass and notch-filter");
    preprocess->add_option("--in", pre_args.in, "Input recording")->required();
    preprocess->add_option("--out", pre_args.out, "Output recording")->required();
    pre_args.filter.attach(preprocess);

    DetectArgs detect_args;
    auto* detect =
        app.add_subcommand("detect", "Detect R peaks, print times one per line");
    detect->add_option("--in", detect_args.in, "Input recording")->required();
    detect->add_flag("--no-preprocess", detect_args.no_preprocess,
                     "Input is already filtered");
    detect->add_flag("--intervals", detect_args.intervals,
                     "Print gated NN intervals (ms) instead of peak times");
    detect_args.filter.attach(detect);
    detect_args.detector.attach(detect);

    FeaturesArgs features_args;
    auto* features = app.add_subcommand(
        "features", "Compute one features-CSV row for a recording");
    features->add_option("--in", features_args.in, "Input recording")->required();
    features->add_option("--subject-id", features_args.subject_id,
                         "Subject id (default: file stem)");
    features->add_option("--ace", features_args.ace,
                         "ACE-III score used for the label column")
        ->capture_default_str();
    features->add_flag("--header", features_args.header,
                       "Print the CSV header line first");
    features->add_flag("--no-preprocess", features_args.no_preprocess,
                       "Input is already filtered");
    features_args.filter.attach(features);
    features_args.detector.attach(features);

    StatsArgs stats_args;
    auto* cohort_stats = app.add_subcommand(
        "cohort-stats", "Rank-sum significance per feature, MCI vs nonMCI");
    cohort_stats->add_option("--features", stats_args.features, "Features CSV")
        ->required();
    cohort_stats->add_flag("--json", stats_args.json, "Emit JSON");

    ClassifyArgs classify_args;
    auto* classify =
        app.add_subcommand("classify", "Single-feature classifier accuracy grid");
    classify->add_option("--features", classify_args.features, "Features CSV")
        ->required();
    classify->add_option("--k", classify_args.k, "Number of folds")
        ->capture_default_str();
    classify
        ->add_option("--train-fraction", classify_args.train_fraction,
                     "Holdout training fraction")
        ->capture_default_str();
    classify
        ->add_option("--protocol", classify_args.protocol,
                     "kfold, holdout or both")
        ->check(CLI::IsMember({"kfold", "holdout", "both"}))
        ->capture_default_str();
    classify->add_option("--seed", classify_args.seed, "Random seed")
        ->capture_default_str();
    classify->add_flag("--joint", classify_args.joint,
                       "Also evaluate all four features jointly");
    classify->add_flag("--json", classify_args.json, "Emit JSON");

    ReportArgs report_args;
    auto* report =
        app.add_subcommand("report", "Full pipeline over a manifest, JSON out");
    report->add_option("--manifest", report_args.manifest, "Manifest CSV")
        ->required();
    report->add_option("--out", report_args.out, "Report JSON path")->required();
    report->add_option("--base-dir", report_args.base_dir,
                       "Base directory for relative recording paths "
                       "(default: the manifest's directory)");
    report->add_option("--config", report_args.config_path,
                       "Run configuration file (JSON or key=value)");
    report_args.filter.attach(report);
    report_args.detector.attach(report);
    report->add_option("--k", report_args.k, "Number of folds")
        ->capture_default_str();
    report
        ->add_option("--train-fraction", report_args.train_fraction,
                     "Holdout training fraction")
        ->capture_default_str();
    report
        ->add_option("--protocol", report_args.protocol,
                     "kfold, holdout or both")
        ->check(CLI::IsMember({"kfold", "holdout", "both"}))
        ->capture_default_str();
    report->add_option("--seed", report_args.seed, "Random seed")
        ->capture_default_str();
    report->add_option("--threads", report_args.threads,
                       "Worker threads (0 = hardware)");
    report->add_flag("--joint", report_args.joint,
                     "Also evaluate all four features jointly");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (app.got_subcommand(synth)) return run_synth(synth_args);
        if (app.got_subcommand(synth_cohort)) return run_synth_cohort(cohort_args);
        if (app.got_subcommand(preprocess)) return run_preprocess(pre_args);
        if (app.got_subcommand(detect)) return run_detect(detect_args);
        if (app.got_subcommand(features)) return run_features(features_args);
        if (app.got_subcommand(cohort_stats)) return run_cohort_stats(stats_args);
        if (app.got_subcommand(classify)) return run_classify(classify_args);
        if (app.got_subcommand(report)) return run_report(report_args, *report);
    } catch (const hrvkit::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
