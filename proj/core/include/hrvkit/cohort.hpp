#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "hrvkit/hrv.hpp"

namespace hrvkit {

enum class Label { mci, non_mci };

constexpr std::string_view label_name(Label label) {
    return label == Label::mci ? "MCI" : "nonMCI";
}

/// ACE-III total score to binary label: below 88 is MCI.
/// Throws ScoreOutOfRange unless score is in [0, 100].
Label label_from_ace(int score);

Label parse_label(std::string_view text);  // "MCI" or "nonMCI"

struct CohortRow {
    std::string subject_id;
    Label label = Label::non_mci;
    HrvFeatures features;
};

/// Per-subject feature table for group comparison and classification.
struct CohortTable {
    std::vector<CohortRow> rows;

    std::size_t size() const { return rows.size(); }
    std::size_t count(Label label) const;
    bool has_both_labels() const;
};

}  // namespace hrvkit
