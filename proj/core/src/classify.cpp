#include "hrvkit/classify.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hrvkit/error.hpp"
#include "hrvkit/hrv.hpp"
#include "hrvkit/rng.hpp"

namespace hrvkit::classify {

namespace {

constexpr double kSdFloor = 1e-12;
constexpr double kVarFloor = 1e-12;
constexpr int kSvmEpochs = 1000;
constexpr double kSvmLambda = 1.0;
constexpr double kSvmStep = 0.1;

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// In-place lower Cholesky factor of a row-major d x d matrix; false when a
// pivot is not strictly positive.
bool cholesky(std::vector<double>& a, std::size_t d) {
    for (std::size_t j = 0; j < d; ++j) {
        double diag = a[j * d + j];
        for (std::size_t k = 0; k < j; ++k) diag -= a[j * d + k] * a[j * d + k];
        if (!(diag > 0.0)) return false;
        const double l = std::sqrt(diag);
        a[j * d + j] = l;
        for (std::size_t i = j + 1; i < d; ++i) {
            double v = a[i * d + j];
            for (std::size_t k = 0; k < j; ++k) v -= a[i * d + k] * a[j * d + k];
            a[i * d + j] = v / l;
        }
    }
    return true;
}

std::vector<double> solve_cholesky(const std::vector<double>& l, std::size_t d,
                                   std::vector<double> b) {
    for (std::size_t i = 0; i < d; ++i) {
        double v = b[i];
        for (std::size_t k = 0; k < i; ++k) v -= l[i * d + k] * b[k];
        b[i] = v / l[i * d + i];
    }
    for (std::size_t i = d; i-- > 0;) {
        double v = b[i];
        for (std::size_t k = i + 1; k < d; ++k) v -= l[k * d + i] * b[k];
        b[i] = v / l[i * d + i];
    }
    return b;
}

void train_svm(ClassifierModel& model, const std::vector<double>& z,
               std::span<const Label> ys, std::size_t d) {
    const std::size_t n = ys.size();
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = ys[i] == Label::mci ? 1.0 : -1.0;
    }
    std::vector<double> w(d, 0.0);
    double b = 0.0;
    std::vector<double> gw(d);
    for (int t = 1; t <= kSvmEpochs; ++t) {
        for (std::size_t j = 0; j < d; ++j) gw[j] = kSvmLambda * w[j];
        double gb = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double margin = b;
            for (std::size_t j = 0; j < d; ++j) margin += w[j] * z[i * d + j];
            if (y[i] * margin < 1.0) {
                const double c = y[i] / static_cast<double>(n);
                for (std::size_t j = 0; j < d; ++j) gw[j] -= c * z[i * d + j];
                gb -= c;
            }
        }
        const double step = kSvmStep / t;
        for (std::size_t j = 0; j < d; ++j) w[j] -= step * gw[j];
        b -= step * gb;
    }
    model.svm_w = std::move(w);
    model.svm_b = b;
}

void train_da(ClassifierModel& model, const std::vector<double>& z,
              std::span<const Label> ys, std::size_t d,
              const std::vector<double>& global_var, std::size_t n_mci,
              std::size_t n_non) {
    const std::size_t n = ys.size();
    std::vector<double> m1(d, 0.0);
    std::vector<double> m0(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        auto& m = ys[i] == Label::mci ? m1 : m0;
        for (std::size_t j = 0; j < d; ++j) m[j] += z[i * d + j];
    }
    for (std::size_t j = 0; j < d; ++j) {
        m1[j] /= static_cast<double>(n_mci);
        m0[j] /= static_cast<double>(n_non);
    }

    std::vector<double> cov(d * d, 0.0);
    std::vector<double> dev(d);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& m = ys[i] == Label::mci ? m1 : m0;
        for (std::size_t j = 0; j < d; ++j) dev[j] = z[i * d + j] - m[j];
        for (std::size_t j = 0; j < d; ++j) {
            for (std::size_t k = 0; k <= j; ++k) {
                cov[j * d + k] += dev[j] * dev[k];
            }
        }
    }
    if (n > 2) {
        const double inv = 1.0 / static_cast<double>(n - 2);
        for (double& v : cov) v *= inv;
    }
    for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t k = j + 1; k < d; ++k) cov[j * d + k] = cov[k * d + j];
        if (cov[j * d + j] < kVarFloor) {
            cov[j * d + j] = kVarFloor * (global_var[j] + 1.0);
        }
    }

    // Cholesky with an escalating ridge for rank-deficient splits (e.g. two
    // affinely dependent feature columns).
    double mean_diag = 0.0;
    for (std::size_t j = 0; j < d; ++j) mean_diag += cov[j * d + j];
    mean_diag /= static_cast<double>(d);
    double ridge = 0.0;
    std::vector<double> factor;
    for (int attempt = 0; attempt < 64; ++attempt) {
        factor = cov;
        for (std::size_t j = 0; j < d; ++j) factor[j * d + j] += ridge;
        if (cholesky(factor, d)) break;
        ridge = ridge == 0.0 ? kVarFloor * (mean_diag + 1.0) : ridge * 10.0;
    }

    std::vector<double> diff(d);
    for (std::size_t j = 0; j < d; ++j) diff[j] = m1[j] - m0[j];
    model.da_w = solve_cholesky(factor, d, std::move(diff));

    double mid = 0.0;
    for (std::size_t j = 0; j < d; ++j) mid += model.da_w[j] * (m1[j] + m0[j]);
    const double log_prior_ratio = std::log(static_cast<double>(n_mci) /
                                            static_cast<double>(n_non));
    model.da_threshold = 0.5 * mid - log_prior_ratio;
}

void train_nb(ClassifierModel& model, const std::vector<double>& z,
              std::span<const Label> ys, std::size_t d,
              const std::vector<double>& global_var, std::size_t n_mci,
              std::size_t n_non) {
    const std::size_t n = ys.size();
    model.nb_mean_mci.assign(d, 0.0);
    model.nb_mean_non.assign(d, 0.0);
    model.nb_var_mci.assign(d, 0.0);
    model.nb_var_non.assign(d, 0.0);

    for (std::size_t i = 0; i < n; ++i) {
        auto& m = ys[i] == Label::mci ? model.nb_mean_mci : model.nb_mean_non;
        for (std::size_t j = 0; j < d; ++j) m[j] += z[i * d + j];
    }
    for (std::size_t j = 0; j < d; ++j) {
        model.nb_mean_mci[j] /= static_cast<double>(n_mci);
        model.nb_mean_non[j] /= static_cast<double>(n_non);
    }
    for (std::size_t i = 0; i < n; ++i) {
        const bool mci = ys[i] == Label::mci;
        const auto& m = mci ? model.nb_mean_mci : model.nb_mean_non;
        auto& var = mci ? model.nb_var_mci : model.nb_var_non;
        for (std::size_t j = 0; j < d; ++j) {
            const double dv = z[i * d + j] - m[j];
            var[j] += dv * dv;
        }
    }
    for (std::size_t j = 0; j < d; ++j) {
        model.nb_var_mci[j] /= static_cast<double>(n_mci);
        model.nb_var_non[j] /= static_cast<double>(n_non);
        if (model.nb_var_mci[j] < kVarFloor) {
            model.nb_var_mci[j] = kVarFloor * (global_var[j] + 1.0);
        }
        if (model.nb_var_non[j] < kVarFloor) {
            model.nb_var_non[j] = kVarFloor * (global_var[j] + 1.0);
        }
    }
    model.nb_log_prior_mci =
        std::log(static_cast<double>(n_mci) / static_cast<double>(n));
    model.nb_log_prior_non =
        std::log(static_cast<double>(n_non) / static_cast<double>(n));
}

std::vector<double> row_features(const CohortRow& row,
                                 const FeatureSelection& sel) {
    std::vector<double> out;
    out.reserve(sel.features.size());
    for (Feature f : sel.features) {
        out.push_back(hrv::feature_value(row.features, f));
    }
    return out;
}

void shuffle(std::vector<std::size_t>& idx, Rng& rng) {
    for (std::size_t i = idx.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.bounded(i));
        std::swap(idx[i - 1], idx[j]);
    }
}

// Indices of each class in row order, MCI first. Shuffled per class so fold
// and holdout assignment depend only on the seed.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> class_indices(
    const CohortTable& table, Rng& rng) {
    std::vector<std::size_t> mci;
    std::vector<std::size_t> non;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        (table.rows[i].label == Label::mci ? mci : non).push_back(i);
    }
    shuffle(mci, rng);
    shuffle(non, rng);
    return {std::move(mci), std::move(non)};
}

ClassifierModel train_on_rows(const CohortTable& table,
                              const std::vector<std::size_t>& rows,
                              ClassifierKind kind, const FeatureSelection& sel) {
    const std::size_t d = sel.features.size();
    std::vector<double> xs;
    xs.reserve(rows.size() * d);
    std::vector<Label> ys;
    ys.reserve(rows.size());
    for (std::size_t i : rows) {
        const auto values = row_features(table.rows[i], sel);
        xs.insert(xs.end(), values.begin(), values.end());
        ys.push_back(table.rows[i].label);
    }
    return train_classifier(kind, xs, ys, d);
}

void score_rows(const CohortTable& table, const std::vector<std::size_t>& rows,
                const ClassifierModel& model, const FeatureSelection& sel,
                Confusion& confusion) {
    for (std::size_t i : rows) {
        const auto values = row_features(table.rows[i], sel);
        const Label predicted = model.predict(values);
        const bool truth_mci = table.rows[i].label == Label::mci;
        if (predicted == Label::mci) {
            truth_mci ? ++confusion.tp : ++confusion.fp;
        } else {
            truth_mci ? ++confusion.fn : ++confusion.tn;
        }
    }
}

}  // namespace

FeatureSelection FeatureSelection::joint() {
    return {{Feature::mean_nn, Feature::rms_nn, Feature::sdnn, Feature::rmssd}};
}

std::string FeatureSelection::name() const {
    if (features.size() == 1) {
        return std::string(hrv::feature_name(features[0]));
    }
    return "joint";
}

Label ClassifierModel::predict(std::span<const double> x) const {
    const std::size_t d = mean.size();
    if (x.size() != d) {
        throw std::invalid_argument("feature vector has wrong dimension");
    }
    std::vector<double> z(d);
    for (std::size_t j = 0; j < d; ++j) z[j] = (x[j] - mean[j]) * scale[j];

    double score = 0.0;
    switch (kind) {
        case ClassifierKind::svm:
            score = dot(svm_w, z) + svm_b;
            break;
        case ClassifierKind::da:
            score = dot(da_w, z) - da_threshold;
            break;
        case ClassifierKind::nb: {
            score = nb_log_prior_mci - nb_log_prior_non;
            for (std::size_t j = 0; j < d; ++j) {
                const double d1 = z[j] - nb_mean_mci[j];
                const double d0 = z[j] - nb_mean_non[j];
                score -= 0.5 * (std::log(nb_var_mci[j]) +
                                d1 * d1 / nb_var_mci[j]);
                score += 0.5 * (std::log(nb_var_non[j]) +
                                d0 * d0 / nb_var_non[j]);
            }
            break;
        }
    }
    if (score > 0.0) return Label::mci;
    if (score < 0.0) return Label::non_mci;
    return majority;
}

ClassifierModel train_classifier(ClassifierKind kind,
                                 std::span<const double> xs,
                                 std::span<const Label> ys, std::size_t dims) {
    const std::size_t n = ys.size();
    if (dims == 0) {
        throw std::invalid_argument("dims must be positive");
    }
    if (n == 0 || xs.size() != n * dims) {
        throw std::invalid_argument("xs must hold ys.size() rows of dims values");
    }
    for (double v : xs) {
        if (!std::isfinite(v)) {
            throw Error(ErrorCode::non_finite_input,
                        "training features must be finite");
        }
    }
    std::size_t n_mci = 0;
    for (Label y : ys) n_mci += y == Label::mci;
    const std::size_t n_non = n - n_mci;
    if (n_mci == 0 || n_non == 0) {
        throw Error(ErrorCode::single_class,
                    "training split has a single class (MCI: " +
                        std::to_string(n_mci) + ", nonMCI: " +
                        std::to_string(n_non) + ")");
    }

    ClassifierModel model;
    model.kind = kind;
    model.majority = n_mci > n_non ? Label::mci : Label::non_mci;

    model.mean.assign(dims, 0.0);
    model.scale.assign(dims, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < dims; ++j) {
            model.mean[j] += xs[i * dims + j];
        }
    }
    for (std::size_t j = 0; j < dims; ++j) {
        model.mean[j] /= static_cast<double>(n);
    }
    for (std::size_t j = 0; j < dims; ++j) {
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double dv = xs[i * dims + j] - model.mean[j];
            ss += dv * dv;
        }
        const double sd = std::sqrt(ss / static_cast<double>(n - 1));
        model.scale[j] = sd < kSdFloor ? 0.0 : 1.0 / sd;
    }

    std::vector<double> z(n * dims);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < dims; ++j) {
            z[i * dims + j] = (xs[i * dims + j] - model.mean[j]) * model.scale[j];
        }
    }

    // Per-dimension variance over the whole split, used to floor degenerate
    // class variances.
    std::vector<double> global_var(dims, 0.0);
    for (std::size_t j = 0; j < dims; ++j) {
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i) m += z[i * dims + j];
        m /= static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double dv = z[i * dims + j] - m;
            ss += dv * dv;
        }
        global_var[j] = ss / static_cast<double>(n - 1);
    }

    switch (kind) {
        case ClassifierKind::svm:
            train_svm(model, z, ys, dims);
            break;
        case ClassifierKind::da:
            train_da(model, z, ys, dims, global_var, n_mci, n_non);
            break;
        case ClassifierKind::nb:
            train_nb(model, z, ys, dims, global_var, n_mci, n_non);
            break;
    }
    return model;
}

CvReport kfold_validate(const CohortTable& table, ClassifierKind kind,
                        const FeatureSelection& sel, int k,
                        std::uint64_t seed) {
    const std::size_t n = table.size();
    if (!table.has_both_labels()) {
        throw Error(ErrorCode::single_class,
                    "cross-validation needs both labels in the cohort");
    }
    if (k < 2 || static_cast<std::size_t>(k) > n) {
        throw Error(ErrorCode::too_small_cohort,
                    "cannot split " + std::to_string(n) + " rows into " +
                        std::to_string(k) + " folds");
    }

    Rng rng(seed);
    const auto [mci_idx, non_idx] = class_indices(table, rng);

    // One round-robin cursor runs through both classes, which keeps totals
    // and per-class counts within one of proportional.
    std::vector<int> fold_of(n, 0);
    std::size_t cursor = 0;
    for (std::size_t i : mci_idx) fold_of[i] = static_cast<int>(cursor++ % k);
    for (std::size_t i : non_idx) fold_of[i] = static_cast<int>(cursor++ % k);

    CvReport report;
    report.classifier = kind;
    report.feature = sel.name();
    report.seed = seed;

    for (int f = 0; f < k; ++f) {
        std::vector<std::size_t> train;
        std::vector<std::size_t> test;
        for (std::size_t i = 0; i < n; ++i) {
            (fold_of[i] == f ? test : train).push_back(i);
        }
        const ClassifierModel model = train_on_rows(table, train, kind, sel);
        Confusion fold_counts;
        score_rows(table, test, model, sel, fold_counts);
        report.fold_accuracies.push_back(fold_counts.accuracy());
        report.confusion.tp += fold_counts.tp;
        report.confusion.fp += fold_counts.fp;
        report.confusion.tn += fold_counts.tn;
        report.confusion.fn += fold_counts.fn;
    }
    report.pooled_accuracy = report.confusion.accuracy();
    return report;
}

CvReport holdout_validate(const CohortTable& table, ClassifierKind kind,
                          const FeatureSelection& sel, double train_fraction,
                          std::uint64_t seed) {
    if (!table.has_both_labels()) {
        throw Error(ErrorCode::single_class,
                    "holdout validation needs both labels in the cohort");
    }
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw Error(ErrorCode::too_small_cohort,
                    "train fraction must lie strictly between 0 and 1");
    }

    Rng rng(seed);
    const auto [mci_idx, non_idx] = class_indices(table, rng);

    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
    for (const auto* cls : {&mci_idx, &non_idx}) {
        const auto n_c = static_cast<long>(cls->size());
        const long n_train = std::lround(train_fraction * static_cast<double>(n_c));
        if (n_train <= 0 || n_train >= n_c) {
            throw Error(ErrorCode::too_small_cohort,
                        "stratified holdout leaves an empty split for a class "
                        "of " + std::to_string(n_c) + " at train fraction " +
                            std::to_string(train_fraction));
        }
        for (long i = 0; i < n_c; ++i) {
            (i < n_train ? train : test).push_back((*cls)[static_cast<std::size_t>(i)]);
        }
    }

    const ClassifierModel model = train_on_rows(table, train, kind, sel);
    CvReport report;
    report.classifier = kind;
    report.feature = sel.name();
    report.seed = seed;
    score_rows(table, test, model, sel, report.holdout_confusion);
    report.holdout_accuracy = report.holdout_confusion.accuracy();
    return report;
}

}  // namespace hrvkit::classify
