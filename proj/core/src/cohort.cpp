#include "hrvkit/cohort.hpp"

#include <algorithm>

#include "hrvkit/error.hpp"

namespace hrvkit {

Label label_from_ace(int score) {
    if (score < 0 || score > 100) {
        throw Error(ErrorCode::score_out_of_range,
                    "ACE-III score " + std::to_string(score) +
                        " outside [0, 100]");
    }
    return score < 88 ? Label::mci : Label::non_mci;
}

Label parse_label(std::string_view text) {
    if (text == "MCI") return Label::mci;
    if (text == "nonMCI") return Label::non_mci;
    throw Error(ErrorCode::malformed_file,
                "unknown label '" + std::string(text) + "'");
}

std::size_t CohortTable::count(Label label) const {
    return static_cast<std::size_t>(
        std::count_if(rows.begin(), rows.end(),
                      [label](const CohortRow& r) { return r.label == label; }));
}

bool CohortTable::has_both_labels() const {
    return count(Label::mci) > 0 && count(Label::non_mci) > 0;
}

}  // namespace hrvkit
