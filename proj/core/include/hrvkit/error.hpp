#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace hrvkit {

enum class ErrorCode {
    malformed_file,
    non_finite_sample,
    empty_signal,
    bad_sampling_rate,
    duplicate_subject,
    score_out_of_range,
    io_failure,
    too_short,
    invalid_band,
    no_peaks_found,
    too_few_intervals,
    empty_series,
    empty_group,
    non_finite_input,
    single_class_cohort,
    single_class,
    too_small_cohort,
    infeasible_spec,
    empty_cohort,
};

constexpr std::string_view error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::malformed_file: return "MalformedFile";
        case ErrorCode::non_finite_sample: return "NonFiniteSample";
        case ErrorCode::empty_signal: return "EmptySignal";
        case ErrorCode::bad_sampling_rate: return "BadSamplingRate";
        case ErrorCode::duplicate_subject: return "DuplicateSubject";
        case ErrorCode::score_out_of_range: return "ScoreOutOfRange";
        case ErrorCode::io_failure: return "IoFailure";
        case ErrorCode::too_short: return "TooShort";
        case ErrorCode::invalid_band: return "InvalidBand";
        case ErrorCode::no_peaks_found: return "NoPeaksFound";
        case ErrorCode::too_few_intervals: return "TooFewIntervals";
        case ErrorCode::empty_series: return "EmptySeries";
        case ErrorCode::empty_group: return "EmptyGroup";
        case ErrorCode::non_finite_input: return "NonFiniteInput";
        case ErrorCode::single_class_cohort: return "SingleClassCohort";
        case ErrorCode::single_class: return "SingleClass";
        case ErrorCode::too_small_cohort: return "TooSmallCohort";
        case ErrorCode::infeasible_spec: return "InfeasibleSpec";
        case ErrorCode::empty_cohort: return "EmptyCohort";
    }
    return "UnknownError";
}

/// Typed runtime error carrying an ErrorCode and, once it has crossed a
/// pipeline stage boundary, the name of the failing stage.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
          code_(code) {}

    Error(ErrorCode code, const std::string& message, std::string stage)
        : std::runtime_error("[stage=" + stage + "] " +
                             std::string(error_code_name(code)) + ": " + message),
          code_(code),
          stage_(std::move(stage)) {}

    ErrorCode code() const noexcept { return code_; }
    const std::string& stage() const noexcept { return stage_; }
    bool has_stage() const noexcept { return !stage_.empty(); }

private:
    ErrorCode code_;
    std::string stage_;
};

}  // namespace hrvkit
