#include "hrvkit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hrvkit/error.hpp"
#include "hrvkit/hrv.hpp"

namespace hrvkit::stats {

namespace {

void check_groups(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) {
        throw Error(ErrorCode::empty_group,
                    "rank-sum test needs two non-empty groups (got " +
                        std::to_string(a.size()) + " and " +
                        std::to_string(b.size()) + ")");
    }
    for (double v : a) {
        if (!std::isfinite(v)) {
            throw Error(ErrorCode::non_finite_input,
                        "rank-sum test: non-finite value in first group");
        }
    }
    for (double v : b) {
        if (!std::isfinite(v)) {
            throw Error(ErrorCode::non_finite_input,
                        "rank-sum test: non-finite value in second group");
        }
    }
}

struct PooledRanks {
    double w_a = 0.0;                    // midrank sum over group a
    std::vector<std::size_t> tie_runs;   // length of every run of equal values
};

PooledRanks pooled_midranks(std::span<const double> a,
                            std::span<const double> b) {
    std::vector<std::pair<double, bool>> pooled;
    pooled.reserve(a.size() + b.size());
    for (double v : a) pooled.emplace_back(v, true);
    for (double v : b) pooled.emplace_back(v, false);
    std::sort(pooled.begin(), pooled.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });

    PooledRanks out;
    std::size_t i = 0;
    while (i < pooled.size()) {
        std::size_t j = i;
        while (j < pooled.size() && pooled[j].first == pooled[i].first) ++j;
        // ranks i+1 .. j share the midrank
        const double midrank = (static_cast<double>(i + 1 + j)) / 2.0;
        for (std::size_t k = i; k < j; ++k) {
            if (pooled[k].second) out.w_a += midrank;
        }
        out.tie_runs.push_back(j - i);
        i = j;
    }
    return out;
}

}  // namespace

namespace detail {

bool has_ties(std::span<const double> a, std::span<const double> b) {
    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    std::sort(pooled.begin(), pooled.end());
    return std::adjacent_find(pooled.begin(), pooled.end()) != pooled.end();
}

double exact_two_sided_p(std::span<const double> a,
                         std::span<const double> b) {
    const std::size_t n_a = a.size();
    const std::size_t n_b = b.size();
    const std::size_t n = n_a + n_b;

    // Integer rank sum of group a; no ties on this path, so each rank is
    // 1 + the number of strictly smaller pooled values.
    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    std::sort(pooled.begin(), pooled.end());
    std::size_t w = 0;
    for (double v : a) {
        const auto it = std::lower_bound(pooled.begin(), pooled.end(), v);
        w += static_cast<std::size_t>(it - pooled.begin()) + 1;
    }

    // counts[k][s] = number of k-subsets of {1..m} with rank sum s, built up
    // one rank m at a time.
    const std::size_t max_sum = n * (n + 1) / 2;
    std::vector<std::vector<std::uint64_t>> counts(
        n_a + 1, std::vector<std::uint64_t>(max_sum + 1, 0));
    counts[0][0] = 1;
    for (std::size_t m = 1; m <= n; ++m) {
        for (std::size_t k = std::min(m, n_a); k >= 1; --k) {
            for (std::size_t s = max_sum; s >= m; --s) {
                counts[k][s] += counts[k - 1][s - m];
            }
        }
    }

    std::uint64_t total = 0;
    std::uint64_t le = 0;
    std::uint64_t ge = 0;
    for (std::size_t s = 0; s <= max_sum; ++s) {
        const std::uint64_t c = counts[n_a][s];
        total += c;
        if (s <= w) le += c;
        if (s >= w) ge += c;
    }
    const double tail = static_cast<double>(std::min(le, ge)) /
                        static_cast<double>(total);
    return std::min(1.0, 2.0 * tail);
}

double normal_two_sided_p(std::span<const double> a,
                          std::span<const double> b) {
    const double n_a = static_cast<double>(a.size());
    const double n_b = static_cast<double>(b.size());
    const double n = n_a + n_b;

    const PooledRanks ranks = pooled_midranks(a, b);
    const double mean = n_a * (n + 1.0) / 2.0;

    double tie_term = 0.0;
    for (std::size_t t : ranks.tie_runs) {
        const double td = static_cast<double>(t);
        tie_term += td * td * td - td;
    }
    const double variance =
        n_a * n_b / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if (!(variance > 0.0)) return 1.0;  // all pooled values identical

    double d = ranks.w_a - mean;
    if (d > 0.0) {
        d -= 0.5;
    } else if (d < 0.0) {
        d += 0.5;
    }
    const double z = d / std::sqrt(variance);
    return std::erfc(std::abs(z) / std::sqrt(2.0));
}

}  // namespace detail

RankSumResult rank_sum_test(std::span<const double> a,
                            std::span<const double> b) {
    check_groups(a, b);

    RankSumResult result;
    result.n_a = static_cast<int>(a.size());
    result.n_b = static_cast<int>(b.size());
    result.w_statistic = pooled_midranks(a, b).w_a;

    const bool small = a.size() + b.size() <= 20;
    if (small && !detail::has_ties(a, b)) {
        result.method = RankSumMethod::exact;
        result.p_value = detail::exact_two_sided_p(a, b);
    } else {
        result.method = RankSumMethod::normal_approx;
        result.p_value = detail::normal_two_sided_p(a, b);
    }
    return result;
}

std::map<Feature, RankSumResult> feature_significance(
    const CohortTable& table) {
    if (!table.has_both_labels()) {
        throw Error(ErrorCode::single_class_cohort,
                    "significance testing needs both labels present (MCI: " +
                        std::to_string(table.count(Label::mci)) +
                        ", nonMCI: " +
                        std::to_string(table.count(Label::non_mci)) + ")");
    }
    std::map<Feature, RankSumResult> out;
    for (Feature f : hrv::all_features) {
        std::vector<double> mci;
        std::vector<double> rest;
        for (const auto& row : table.rows) {
            const double v = hrv::feature_value(row.features, f);
            (row.label == Label::mci ? mci : rest).push_back(v);
        }
        out.emplace(f, rank_sum_test(mci, rest));
    }
    return out;
}

}  // namespace hrvkit::stats
