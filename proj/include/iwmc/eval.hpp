#pragma once

// Classification metrics, KNN classifier, stratified folds and the
// feature-selection success rate.

#include "iwmc/data.hpp"

#include <cstdint>
#include <vector>

namespace iwmc::eval {

/// counts(t, p): samples of true class t predicted as p.
class ConfusionMatrix {
public:
    explicit ConfusionMatrix(int n_classes);
    ConfusionMatrix(const Labels& y_true, const Labels& y_pred);
    static ConfusionMatrix from_counts(Eigen::MatrixXi counts);

    int classes() const { return static_cast<int>(counts_.rows()); }
    int count(int truth, int predicted) const { return counts_(truth, predicted); }
    void add(int truth, int predicted);
    long total() const { return counts_.sum(); }

    long true_positives(int c) const { return counts_(c, c); }
    long false_positives(int c) const { return counts_.col(c).sum() - counts_(c, c); }
    long false_negatives(int c) const { return counts_.row(c).sum() - counts_(c, c); }
    long support(int c) const { return counts_.row(c).sum(); }

private:
    Eigen::MatrixXi counts_;
};

struct PrecisionRecallF1 {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// One-vs-rest scores for `positive_class`. Any 0/0 ratio is 0.
PrecisionRecallF1 precision_recall_f1(const ConfusionMatrix& cm, int positive_class);

double accuracy(const Labels& y_true, const Labels& y_pred);

/// Unweighted mean of one-vs-rest F1 over the classes present in y_true.
double macro_f1(const Labels& y_true, const Labels& y_pred);

/// Euclidean k-nearest-neighbor majority vote. Distance ties go to the
/// smaller training index, vote ties to the smaller class code.
Labels knn_predict(const Matrix& train_X, const Labels& train_y, const Matrix& test_X, int k);

/// Partition of {0..n-1} into k folds. Each class is shuffled and dealt
/// round-robin, continuing the fold cursor across classes, so per-class
/// counts and fold sizes differ by at most one. Depends only on y and seed.
std::vector<std::vector<Index>> stratified_kfold(const Labels& y, int k, std::uint64_t seed);

/// Indices of the top_k largest weights, ties to the smaller index.
std::vector<Index> top_features(const FeatureWeights& w, Index top_k);

/// |top_k(w) ∩ relevant| / |relevant|.
double success_rate(const FeatureWeights& w, const std::vector<Index>& relevant, Index top_k);

}  // namespace iwmc::eval
