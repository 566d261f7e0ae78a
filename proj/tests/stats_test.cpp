#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "doctest.h"

#include "hrvkit/cohort.hpp"
#include "hrvkit/error.hpp"
#include "hrvkit/stats.hpp"
#include "support.hpp"

using hrvkit::CohortRow;
using hrvkit::CohortTable;
using hrvkit::ErrorCode;
using hrvkit::Label;
using testsupport::error_code_of;
namespace stats = hrvkit::stats;

namespace {

// Brute-force reference: enumerate every way of assigning n_a of the pooled
// ranks to group a and count rank sums at or beyond the observed one.
double enum_two_sided_p(const std::vector<double>& a,
                        const std::vector<double>& b) {
    std::vector<double> pooled(a);
    pooled.insert(pooled.end(), b.begin(), b.end());
    std::vector<double> sorted = pooled;
    std::sort(sorted.begin(), sorted.end());

    double observed = 0.0;
    for (double x : a) {
        const auto it = std::lower_bound(sorted.begin(), sorted.end(), x);
        observed += static_cast<double>(it - sorted.begin()) + 1.0;
    }

    const std::size_t n = pooled.size();
    const std::size_t n_a = a.size();
    std::vector<std::size_t> pick(n_a);
    for (std::size_t i = 0; i < n_a; ++i) pick[i] = i;

    std::uint64_t le = 0, ge = 0, total = 0;
    for (;;) {
        double w = 0.0;
        for (std::size_t i : pick) w += static_cast<double>(i + 1);
        ++total;
        if (w <= observed) ++le;
        if (w >= observed) ++ge;

        // advance to the next size-n_a index combination
        std::size_t k = n_a;
        while (k > 0 && pick[k - 1] == n - n_a + k - 1) --k;
        if (k == 0) break;
        ++pick[k - 1];
        for (std::size_t i = k; i < n_a; ++i) pick[i] = pick[i - 1] + 1;
    }
    const double p =
        2.0 * static_cast<double>(std::min(le, ge)) / static_cast<double>(total);
    return std::min(1.0, p);
}

std::vector<double> distinct_random(std::mt19937_64& gen, std::size_t n,
                                    std::vector<double>& used) {
    std::uniform_real_distribution<double> dist(0.0, 100.0);
    std::vector<double> v;
    while (v.size() < n) {
        const double x = dist(gen);
        if (std::find(used.begin(), used.end(), x) == used.end()) {
            v.push_back(x);
            used.push_back(x);
        }
    }
    return v;
}

CohortTable separated_table(int n_mci, int n_non, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> mci_nn(750.0, 30.0), non_nn(860.0, 30.0);
    std::normal_distribution<double> mci_sd(30.0, 5.0), non_sd(50.0, 5.0);
    CohortTable table;
    for (int i = 0; i < n_mci + n_non; ++i) {
        const bool mci = i < n_mci;
        CohortRow row;
        row.subject_id = (mci ? "M" : "H") + std::to_string(i);
        row.label = mci ? Label::mci : Label::non_mci;
        const double nn = mci ? mci_nn(gen) : non_nn(gen);
        const double sd = std::abs(mci ? mci_sd(gen) : non_sd(gen));
        row.features.mean_nn_ms = nn;
        row.features.sdnn_ms = sd;
        row.features.rms_nn_ms = std::sqrt(nn * nn + sd * sd);
        row.features.rmssd_ms = sd * 1.1;
        row.features.hr_bpm = 60000.0 / nn;
        row.features.n_intervals = 12;
        table.rows.push_back(row);
    }
    return table;
}

}  // namespace

TEST_CASE("tiny exact cases") {
    const auto r1 = stats::rank_sum_test(std::vector<double>{1.0},
                                         std::vector<double>{2.0});
    CHECK(r1.p_value == 1.0);
    CHECK(r1.method == stats::RankSumMethod::exact);
    CHECK(r1.w_statistic == 1.0);
    CHECK(r1.n_a == 1);
    CHECK(r1.n_b == 1);

    const auto r2 = stats::rank_sum_test(std::vector<double>{1.0, 2.0, 3.0},
                                         std::vector<double>{4.0, 5.0, 6.0});
    CHECK(r2.p_value == 0.1);
    CHECK(r2.method == stats::RankSumMethod::exact);
    CHECK(r2.w_statistic == 6.0);
}

TEST_CASE("all-tied groups give p = 1") {
    const std::vector<double> v{5.0, 5.0, 5.0};
    const auto r = stats::rank_sum_test(v, v);
    CHECK(r.p_value == 1.0);
    CHECK(r.method == stats::RankSumMethod::normal_approx);
}

TEST_CASE("midranks for tied values") {
    const auto r = stats::rank_sum_test(std::vector<double>{1.0, 2.0},
                                        std::vector<double>{2.0, 3.0});
    CHECK(r.w_statistic == 3.5);
    CHECK(r.method == stats::RankSumMethod::normal_approx);
}

TEST_CASE("exact path equals subset enumeration") {
    std::mt19937_64 gen(123);
    int cases = 0;
    for (std::size_t n_a = 1; n_a <= 9; ++n_a) {
        for (std::size_t n_b = 1; n_a + n_b <= 10; ++n_b) {
            for (int rep = 0; rep < 4; ++rep) {
                std::vector<double> used;
                const auto a = distinct_random(gen, n_a, used);
                const auto b = distinct_random(gen, n_b, used);
                const auto r = stats::rank_sum_test(a, b);
                REQUIRE(r.method == stats::RankSumMethod::exact);
                CHECK(r.p_value == enum_two_sided_p(a, b));
                ++cases;
            }
        }
    }
    CHECK(cases == 180);
}

// Groups of at least four: the null distribution for smaller groups is too
// coarse for a normal fit (for a singleton group it is uniform and the gap
// reaches 0.12 no matter the correction).
TEST_CASE("normal approximation tracks the exact p for mid sizes") {
    std::mt19937_64 gen(456);
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t pooled = 11 + rep % 10;  // 11..20
        std::uniform_int_distribution<std::size_t> na_dist(4, pooled - 4);
        const std::size_t n_a = na_dist(gen);
        std::vector<double> used;
        const auto a = distinct_random(gen, n_a, used);
        const auto b = distinct_random(gen, pooled - n_a, used);
        const double exact = stats::detail::exact_two_sided_p(a, b);
        const double approx = stats::detail::normal_two_sided_p(a, b);
        CHECK(std::abs(approx - exact) <= 0.02);
    }
}

TEST_CASE("group swap symmetry") {
    std::mt19937_64 gen(789);
    std::uniform_real_distribution<double> dist(0.0, 10.0);
    for (int rep = 0; rep < 40; ++rep) {
        std::vector<double> a(4 + rep % 5), b(3 + rep % 7);
        for (double& x : a) x = dist(gen);
        for (double& x : b) x = dist(gen);
        const auto r1 = stats::rank_sum_test(a, b);
        const auto r2 = stats::rank_sum_test(b, a);
        CHECK(r1.p_value == doctest::Approx(r2.p_value).epsilon(1e-12));
    }
}

TEST_CASE("invariant under strictly increasing transforms") {
    std::mt19937_64 gen(321);
    for (int rep = 0; rep < 40; ++rep) {
        std::vector<double> used;
        const auto a = distinct_random(gen, 4, used);
        const auto b = distinct_random(gen, 5, used);
        auto a3 = a, b3 = b;
        for (double& x : a3) x = x * x * x;
        for (double& x : b3) x = x * x * x;
        const auto r = stats::rank_sum_test(a, b);
        const auto rt = stats::rank_sum_test(a3, b3);
        CHECK(r.w_statistic == rt.w_statistic);
        CHECK(r.p_value == rt.p_value);
    }
}

TEST_CASE("statistic stays within its range") {
    std::mt19937_64 gen(654);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (int rep = 0; rep < 60; ++rep) {
        std::vector<double> a(1 + rep % 12), b(1 + (rep * 7) % 12);
        for (double& x : a) x = dist(gen);
        for (double& x : b) x = dist(gen);
        const auto r = stats::rank_sum_test(a, b);
        const double n_a = static_cast<double>(a.size());
        const double n_b = static_cast<double>(b.size());
        const double lo = n_a * (n_a + 1.0) / 2.0;
        CHECK(r.w_statistic >= lo);
        CHECK(r.w_statistic <= lo + n_a * n_b);
        CHECK(r.p_value > 0.0);
        CHECK(r.p_value <= 1.0);
    }
}

TEST_CASE("input validation") {
    const std::vector<double> empty;
    const std::vector<double> ok{1.0, 2.0};
    const std::vector<double> bad{1.0, std::nan("")};
    CHECK(error_code_of([&] { stats::rank_sum_test(empty, ok); }) ==
          ErrorCode::empty_group);
    CHECK(error_code_of([&] { stats::rank_sum_test(ok, empty); }) ==
          ErrorCode::empty_group);
    CHECK(error_code_of([&] { stats::rank_sum_test(bad, ok); }) ==
          ErrorCode::non_finite_input);
}

TEST_CASE("feature significance on a separated cohort") {
    const auto table = separated_table(40, 40, 99);
    const auto results = stats::feature_significance(table);
    REQUIRE(results.size() == 4);
    for (hrvkit::Feature f : hrvkit::hrv::all_features) {
        const auto& r = results.at(f);
        CHECK(r.n_a == 40);
        CHECK(r.n_b == 40);
        CHECK(r.p_value < 0.05);
        CHECK(stats::significant(r));
        CHECK(r.method == stats::RankSumMethod::normal_approx);
    }
}

TEST_CASE("feature significance needs both labels") {
    CohortTable table = separated_table(0, 10, 5);
    CHECK(error_code_of([&] { stats::feature_significance(table); }) ==
          ErrorCode::single_class_cohort);
}
