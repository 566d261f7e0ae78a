#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"

#include "hrvkit/classify.hpp"
#include "hrvkit/cohort.hpp"
#include "hrvkit/error.hpp"
#include "support.hpp"

using hrvkit::ClassifierKind;
using hrvkit::CohortRow;
using hrvkit::CohortTable;
using hrvkit::ErrorCode;
using hrvkit::Feature;
using hrvkit::HrvFeatures;
using hrvkit::Label;
using testsupport::error_code_of;
namespace classify = hrvkit::classify;

namespace {

HrvFeatures uniform_features(double v) {
    HrvFeatures f;
    f.mean_nn_ms = v;
    f.rms_nn_ms = v;
    f.sdnn_ms = v;
    f.rmssd_ms = v;
    f.hr_bpm = v > 0.0 ? 60000.0 / v : 0.0;
    f.n_intervals = 10;
    return f;
}

CohortTable table_from_values(const std::vector<double>& mci,
                              const std::vector<double>& non) {
    CohortTable table;
    int id = 0;
    for (double v : mci) {
        table.rows.push_back(
            {"M" + std::to_string(id++), Label::mci, uniform_features(v)});
    }
    for (double v : non) {
        table.rows.push_back(
            {"H" + std::to_string(id++), Label::non_mci, uniform_features(v)});
    }
    return table;
}

std::vector<double> jittered(double center, double spread, int n,
                             std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> dist(-spread, spread);
    std::vector<double> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) out.push_back(center + dist(gen));
    return out;
}

const auto sel_mean = classify::FeatureSelection::single(Feature::mean_nn);

}  // namespace

TEST_CASE("ace score to label") {
    CHECK(hrvkit::label_from_ace(87) == Label::mci);
    CHECK(hrvkit::label_from_ace(88) == Label::non_mci);
    CHECK(hrvkit::label_from_ace(0) == Label::mci);
    CHECK(hrvkit::label_from_ace(100) == Label::non_mci);
    CHECK(error_code_of([] { hrvkit::label_from_ace(101); }) ==
          ErrorCode::score_out_of_range);
    CHECK(error_code_of([] { hrvkit::label_from_ace(-1); }) ==
          ErrorCode::score_out_of_range);
    CHECK(hrvkit::parse_label("MCI") == Label::mci);
    CHECK(hrvkit::parse_label("nonMCI") == Label::non_mci);
}

TEST_CASE("separable training data is learned by every classifier") {
    const auto mci = jittered(2.0, 0.3, 20, 11);
    const auto non = jittered(-2.0, 0.3, 20, 12);
    std::vector<double> xs;
    std::vector<Label> ys;
    for (double v : mci) {
        xs.push_back(v);
        ys.push_back(Label::mci);
    }
    for (double v : non) {
        xs.push_back(v);
        ys.push_back(Label::non_mci);
    }
    for (ClassifierKind kind : classify::all_classifiers) {
        const auto model = classify::train_classifier(kind, xs, ys);
        int correct = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (model.predict(xs[i]) == ys[i]) ++correct;
        }
        CHECK(correct == static_cast<int>(xs.size()));
    }
}

TEST_CASE("constant feature falls back to the majority class") {
    std::vector<double> xs(297, 5.0);
    std::vector<Label> ys(297, Label::non_mci);
    for (int i = 0; i < 57; ++i) ys[i] = Label::mci;
    for (ClassifierKind kind : classify::all_classifiers) {
        const auto model = classify::train_classifier(kind, xs, ys);
        for (double probe : {-5.0, 0.0, 5.0, 7.0}) {
            CHECK(model.predict(probe) == Label::non_mci);
        }
    }
}

TEST_CASE("naive bayes boundary sits between the class means") {
    std::mt19937_64 gen(99);
    std::normal_distribution<double> lo(0.0, 1.0);
    std::normal_distribution<double> hi(3.0, 1.0);
    std::vector<double> xs;
    std::vector<Label> ys;
    for (int i = 0; i < 2000; ++i) {
        xs.push_back(lo(gen));
        ys.push_back(Label::non_mci);
        xs.push_back(hi(gen));
        ys.push_back(Label::mci);
    }
    const auto model = classify::train_classifier(ClassifierKind::nb, xs, ys);
    REQUIRE(model.predict(0.0) == Label::non_mci);
    REQUIRE(model.predict(3.0) == Label::mci);
    double a = 0.0, b = 3.0;
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (a + b);
        (model.predict(mid) == Label::non_mci ? a : b) = mid;
    }
    CHECK(std::abs(0.5 * (a + b) - 1.5) <= 0.075);
}

TEST_CASE("affine rescaling of the feature leaves predictions unchanged") {
    const auto mci = jittered(710.0, 40.0, 25, 21);
    const auto non = jittered(890.0, 40.0, 25, 22);
    std::vector<double> xs, xs_t;
    std::vector<Label> ys;
    for (double v : mci) {
        xs.push_back(v);
        ys.push_back(Label::mci);
    }
    for (double v : non) {
        xs.push_back(v);
        ys.push_back(Label::non_mci);
    }
    const auto transform = [](double v) { return 3.7 * v - 12.0; };
    for (double v : xs) xs_t.push_back(transform(v));

    const auto probes = jittered(800.0, 150.0, 50, 23);
    for (ClassifierKind kind : classify::all_classifiers) {
        const auto base = classify::train_classifier(kind, xs, ys);
        const auto moved = classify::train_classifier(kind, xs_t, ys);
        for (double p : probes) {
            CHECK(base.predict(p) == moved.predict(transform(p)));
        }
    }
}

TEST_CASE("k-fold on a constant feature reproduces the class balance") {
    std::vector<double> mci(57, 800.0);
    std::vector<double> non(240, 800.0);
    const auto table = table_from_values(mci, non);
    for (ClassifierKind kind : classify::all_classifiers) {
        const auto report = classify::kfold_validate(table, kind, sel_mean, 10, 5);
        REQUIRE(report.fold_accuracies.size() == 10);
        REQUIRE(report.pooled_accuracy.has_value());
        CHECK(*report.pooled_accuracy == 240.0 / 297.0);
        CHECK(report.confusion.total() == 297);
        CHECK(report.confusion.tp == 0);
        CHECK(report.confusion.tn == 240);
        CHECK(report.confusion.fn == 57);
        CHECK(report.confusion.fp == 0);

        // 57 = 6*7 + 5*3 and 240 = 24*10, so folds hold either 30 or 29 rows
        auto accs = report.fold_accuracies;
        std::sort(accs.begin(), accs.end());
        std::vector<double> expected;
        for (int i = 0; i < 3; ++i) expected.push_back(24.0 / 29.0);
        for (int i = 0; i < 7; ++i) expected.push_back(24.0 / 30.0);
        std::sort(expected.begin(), expected.end());
        CHECK(accs == expected);
    }
}

TEST_CASE("k-fold on separated classes reaches full accuracy") {
    const auto table =
        table_from_values(jittered(700.0, 10.0, 30, 31), jittered(900.0, 10.0, 60, 32));
    for (ClassifierKind kind : classify::all_classifiers) {
        const auto report = classify::kfold_validate(table, kind, sel_mean, 10, 1);
        CHECK(*report.pooled_accuracy == 1.0);
        CHECK(report.confusion.fp == 0);
        CHECK(report.confusion.fn == 0);
    }
}

TEST_CASE("k-fold accuracy is stable across seeds on overlapping classes") {
    const auto table = table_from_values(jittered(760.0, 90.0, 80, 41),
                                         jittered(860.0, 90.0, 80, 42));
    for (ClassifierKind kind : classify::all_classifiers) {
        const auto a = classify::kfold_validate(table, kind, sel_mean, 10, 7);
        const auto b = classify::kfold_validate(table, kind, sel_mean, 10, 8);
        CHECK(std::abs(*a.pooled_accuracy - *b.pooled_accuracy) <= 0.08);
    }
}

TEST_CASE("k-fold is deterministic for a fixed seed") {
    const auto table = table_from_values(jittered(740.0, 60.0, 40, 51),
                                         jittered(880.0, 60.0, 70, 52));
    const auto a = classify::kfold_validate(table, ClassifierKind::da, sel_mean, 10, 3);
    const auto b = classify::kfold_validate(table, ClassifierKind::da, sel_mean, 10, 3);
    CHECK(a.fold_accuracies == b.fold_accuracies);
    CHECK(*a.pooled_accuracy == *b.pooled_accuracy);
    CHECK(a.confusion.tp == b.confusion.tp);
    CHECK(a.confusion.fp == b.confusion.fp);
    CHECK(a.confusion.tn == b.confusion.tn);
    CHECK(a.confusion.fn == b.confusion.fn);
    CHECK(a.feature == "mean_nn");
    CHECK(a.seed == 3);
}

TEST_CASE("holdout split arithmetic on the reference balance") {
    std::vector<double> mci(57, 800.0);
    std::vector<double> non(240, 800.0);
    const auto table = table_from_values(mci, non);
    const auto report = classify::holdout_validate(table, ClassifierKind::svm,
                                                   sel_mean, 0.7, 5);
    REQUIRE(report.holdout_accuracy.has_value());
    CHECK(report.holdout_confusion.total() == 89);  // 17 MCI + 72 healthy test rows
    CHECK(*report.holdout_accuracy == 72.0 / 89.0);

    const auto separated = table_from_values(jittered(700.0, 10.0, 30, 61),
                                             jittered(900.0, 10.0, 60, 62));
    for (ClassifierKind kind : classify::all_classifiers) {
        const auto r = classify::holdout_validate(separated, kind, sel_mean, 0.7, 2);
        CHECK(*r.holdout_accuracy == 1.0);
    }
}

TEST_CASE("validation error paths") {
    const auto tiny = table_from_values(jittered(700.0, 5.0, 5, 71),
                                        jittered(900.0, 5.0, 5, 72));
    CHECK(error_code_of([&] {
              classify::holdout_validate(tiny, ClassifierKind::svm, sel_mean, 0.999);
          }) == ErrorCode::too_small_cohort);
    CHECK(error_code_of([&] {
              classify::kfold_validate(tiny, ClassifierKind::svm, sel_mean, 11);
          }) == ErrorCode::too_small_cohort);

    CohortTable one_class;
    for (int i = 0; i < 20; ++i) {
        one_class.rows.push_back(
            {"H" + std::to_string(i), Label::non_mci, uniform_features(800.0)});
    }
    CHECK(error_code_of([&] {
              classify::kfold_validate(one_class, ClassifierKind::nb, sel_mean);
          }) == ErrorCode::single_class);
    CHECK(error_code_of([&] {
              classify::holdout_validate(one_class, ClassifierKind::nb, sel_mean);
          }) == ErrorCode::single_class);

    std::vector<double> xs(10, 1.0);
    std::vector<Label> ys(10, Label::mci);
    CHECK(error_code_of([&] {
              classify::train_classifier(ClassifierKind::svm, xs, ys);
          }) == ErrorCode::single_class);
}

TEST_CASE("predict rejects a wrong-dimension input") {
    const auto mci = jittered(2.0, 0.3, 10, 81);
    const auto non = jittered(-2.0, 0.3, 10, 82);
    std::vector<double> xs;
    std::vector<Label> ys;
    for (double v : mci) {
        xs.push_back(v);
        ys.push_back(Label::mci);
    }
    for (double v : non) {
        xs.push_back(v);
        ys.push_back(Label::non_mci);
    }
    const auto model = classify::train_classifier(ClassifierKind::da, xs, ys);
    const double pair[2] = {0.0, 1.0};
    CHECK_THROWS_AS(model.predict(std::span<const double>(pair, 2)),
                    std::invalid_argument);
}

TEST_CASE("joint selection uses all four features") {
    const auto sel = classify::FeatureSelection::joint();
    CHECK(sel.name() == "joint");
    CHECK(sel.features.size() == 4);

    // separate the classes in every feature dimension
    CohortTable table;
    std::mt19937_64 gen(91);
    std::uniform_real_distribution<double> d(-5.0, 5.0);
    for (int i = 0; i < 30; ++i) {
        HrvFeatures f;
        f.mean_nn_ms = 700.0 + d(gen);
        f.rms_nn_ms = 701.0 + d(gen);
        f.sdnn_ms = 20.0 + 0.2 * d(gen);
        f.rmssd_ms = 18.0 + 0.2 * d(gen);
        f.hr_bpm = 60000.0 / f.mean_nn_ms;
        f.n_intervals = 9;
        table.rows.push_back({"M" + std::to_string(i), Label::mci, f});
    }
    for (int i = 0; i < 50; ++i) {
        HrvFeatures f;
        f.mean_nn_ms = 900.0 + d(gen);
        f.rms_nn_ms = 902.0 + d(gen);
        f.sdnn_ms = 55.0 + 0.2 * d(gen);
        f.rmssd_ms = 50.0 + 0.2 * d(gen);
        f.hr_bpm = 60000.0 / f.mean_nn_ms;
        f.n_intervals = 9;
        table.rows.push_back({"H" + std::to_string(i), Label::non_mci, f});
    }
    for (ClassifierKind kind : classify::all_classifiers) {
        const auto report = classify::kfold_validate(table, kind, sel, 10, 4);
        CHECK(*report.pooled_accuracy == 1.0);
    }
}
