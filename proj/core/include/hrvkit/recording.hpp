#pragma once

#include <string>
#include <vector>

namespace hrvkit {

/// Uniformly sampled single-lead voltage series, millivolts.
/// Duration is derived, never stored.
struct EcgRecording {
    std::vector<double> samples;
    double sampling_rate_hz = 0.0;
    std::string lead_name;
    std::string subject_id;

    double duration_s() const {
        return static_cast<double>(samples.size()) / sampling_rate_hz;
    }
};

/// Checks the EcgRecording invariants: positive sampling rate, non-empty,
/// all samples finite. Throws hrvkit::Error on violation.
void validate(const EcgRecording& rec);

}  // namespace hrvkit
