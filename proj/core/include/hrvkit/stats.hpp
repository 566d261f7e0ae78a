#pragma once

#include <map>
#include <span>

#include "hrvkit/cohort.hpp"

namespace hrvkit::stats {

enum class RankSumMethod { exact, normal_approx };

struct RankSumResult {
    double w_statistic = 0.0;  // rank sum of group a, midranks for ties
    double p_value = 1.0;      // two-sided, in (0, 1]
    RankSumMethod method = RankSumMethod::exact;
    int n_a = 0;
    int n_b = 0;
};

inline bool significant(const RankSumResult& r, double alpha = 0.05) {
    return r.p_value < alpha;
}

/// Two-sample Wilcoxon rank-sum test, two-sided. Exact null distribution
/// when the pooled size is at most 20 and there are no ties; otherwise a
/// normal approximation with tie-corrected variance and 0.5 continuity
/// correction. Throws EmptyGroup / NonFiniteInput.
RankSumResult rank_sum_test(std::span<const double> a,
                            std::span<const double> b);

/// One rank-sum test per feature, MCI group vs non-MCI group.
/// Throws SingleClassCohort unless both labels are present.
std::map<Feature, RankSumResult> feature_significance(const CohortTable& table);

namespace detail {
// Both paths exposed so tests can compare them on the same input.
double exact_two_sided_p(std::span<const double> a, std::span<const double> b);
double normal_two_sided_p(std::span<const double> a, std::span<const double> b);
bool has_ties(std::span<const double> a, std::span<const double> b);
}  // namespace detail

}  // namespace hrvkit::stats

namespace hrvkit {
using stats::RankSumMethod;
using stats::RankSumResult;
}  // namespace hrvkit
