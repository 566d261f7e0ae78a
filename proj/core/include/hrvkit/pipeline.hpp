#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hrvkit/classify.hpp"
#include "hrvkit/cohort.hpp"
#include "hrvkit/preprocess.hpp"
#include "hrvkit/rpeak.hpp"
#include "hrvkit/signal_io.hpp"

namespace hrvkit::pipeline {

enum class Protocol { kfold, holdout, both };

/// Everything a run needs beyond the manifest: filters, detector, gate,
/// validation protocol, seed. Loadable from a JSON or key=value file so a
/// run is reproducible from (config, manifest, seed) alone.
struct RunConfig {
    FilterSpec filter;
    DetectorParams detector;
    GateBounds gate;
    int k = 10;
    double train_fraction = 0.7;
    Protocol protocol = Protocol::both;
    std::uint64_t seed = 0;
    int threads = 0;  // 0 = hardware concurrency
};

RunConfig load_config(const std::string& path);

/// preprocess_chain -> detect_rpeaks -> nn_from_peaks -> compute_features.
/// Stage failures rethrow with the failing stage tagged.
HrvFeatures process_recording(const EcgRecording& rec, const RunConfig& config);

struct Exclusion {
    std::string subject_id;
    std::string stage;
    std::string reason;
};

struct CohortResult {
    CohortTable table;        // sorted by subject_id
    std::vector<Exclusion> exclusions;
};

/// Runs every manifest row through the pipeline, in parallel across
/// subjects. Per-subject failures become exclusions, not errors; the result
/// is sorted by subject_id so it is independent of processing order.
/// Throws EmptyCohort when no subject survives.
CohortResult process_cohort(const std::vector<io::CohortManifestRow>& manifest,
                            const RunConfig& config,
                            const std::string& base_dir = "");

}  // namespace hrvkit::pipeline

namespace hrvkit {
using pipeline::RunConfig;
}  // namespace hrvkit
