#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "hrvkit/cohort.hpp"

namespace hrvkit::classify {

enum class ClassifierKind { svm, da, nb };

inline constexpr ClassifierKind all_classifiers[] = {
    ClassifierKind::svm, ClassifierKind::da, ClassifierKind::nb};

constexpr std::string_view classifier_name(ClassifierKind kind) {
    switch (kind) {
        case ClassifierKind::svm: return "svm";
        case ClassifierKind::da: return "da";
        case ClassifierKind::nb: return "nb";
    }
    return "?";
}

/// Trained two-class model over a d-dimensional feature vector (d = 1 for
/// the single-feature wrapper protocol). Inputs are standardized with the
/// training mean/sd, so affine rescaling of a feature cannot change
/// predictions. Ties at the decision boundary go to the training majority
/// class.
struct ClassifierModel {
    ClassifierKind kind = ClassifierKind::svm;
    std::vector<double> mean;   // standardization, per dimension
    std::vector<double> scale;  // 1/sd, 0 for constant dimensions
    Label majority = Label::non_mci;

    // svm: w, b on standardized inputs
    std::vector<double> svm_w;
    double svm_b = 0.0;

    // da: linear discriminant weights and per-class offsets
    std::vector<double> da_w;
    double da_threshold = 0.0;  // predict MCI when da_w.x > da_threshold ... see impl

    // nb: per-class Gaussians and log priors
    std::vector<double> nb_mean_mci, nb_var_mci;
    std::vector<double> nb_mean_non, nb_var_non;
    double nb_log_prior_mci = 0.0, nb_log_prior_non = 0.0;

    Label predict(std::span<const double> x) const;
    Label predict(double x) const { return predict(std::span<const double>(&x, 1)); }
};

/// Train on feature vectors xs (row-major, n x d) with labels ys. Both
/// classes must be present. Degenerate variances are floored, never fatal.
ClassifierModel train_classifier(ClassifierKind kind,
                                 std::span<const double> xs,
                                 std::span<const Label> ys,
                                 std::size_t dims = 1);

struct Confusion {
    int tp = 0, fp = 0, tn = 0, fn = 0;
    int total() const { return tp + fp + tn + fn; }
    double accuracy() const {
        return total() ? static_cast<double>(tp + tn) / total() : 0.0;
    }
};

/// Feature column selection for validation: one Feature for the wrapper
/// protocol, all four when joint (the multi-feature mode).
struct FeatureSelection {
    std::vector<Feature> features;

    static FeatureSelection single(Feature f) { return {{f}}; }
    static FeatureSelection joint();
    std::string name() const;
};

struct CvReport {
    ClassifierKind classifier = ClassifierKind::svm;
    std::string feature;
    std::vector<double> fold_accuracies;      // k entries when k-fold ran
    std::optional<double> pooled_accuracy;    // over concatenated out-of-fold predictions
    Confusion confusion;                      // pooled out-of-fold counts
    std::optional<double> holdout_accuracy;   // when the 70/30 protocol ran
    Confusion holdout_confusion;
    std::uint64_t seed = 0;
};

/// Stratified k-fold cross-validation, deterministic for a fixed seed.
CvReport kfold_validate(const CohortTable& table, ClassifierKind kind,
                        const FeatureSelection& sel, int k = 10,
                        std::uint64_t seed = 0);

/// Stratified holdout split: round(train_fraction * n) per class trains,
/// the rest tests. Throws TooSmallCohort when either side of a class is empty.
CvReport holdout_validate(const CohortTable& table, ClassifierKind kind,
                          const FeatureSelection& sel,
                          double train_fraction = 0.7, std::uint64_t seed = 0);

}  // namespace hrvkit::classify

namespace hrvkit {
using classify::ClassifierKind;
using classify::CvReport;
}  // namespace hrvkit
