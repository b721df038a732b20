#include "iwmc/eval.hpp"

#include "iwmc/random.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

namespace iwmc::eval {

namespace {

int max_label(const Labels& a, const Labels& b) {
    int top = -1;
    for (int c : a) top = std::max(top, c);
    for (int c : b) top = std::max(top, c);
    return top;
}

double ratio(long num, long den) { return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den); }

}  // namespace

ConfusionMatrix::ConfusionMatrix(int n_classes) : counts_(Eigen::MatrixXi::Zero(n_classes, n_classes)) {
    if (n_classes < 1) throw DataError("confusion matrix needs at least one class");
}

ConfusionMatrix::ConfusionMatrix(const Labels& y_true, const Labels& y_pred)
    : ConfusionMatrix(std::max(1, max_label(y_true, y_pred) + 1)) {
    if (y_true.size() != y_pred.size()) throw DataError("confusion matrix: label vectors differ in length");
    for (std::size_t i = 0; i < y_true.size(); ++i) add(y_true[i], y_pred[i]);
}

ConfusionMatrix ConfusionMatrix::from_counts(Eigen::MatrixXi counts) {
    if (counts.rows() != counts.cols() || counts.rows() < 1) throw DataError("confusion matrix must be square");
    if ((counts.array() < 0).any()) throw DataError("confusion matrix counts must be nonnegative");
    ConfusionMatrix cm(static_cast<int>(counts.rows()));
    cm.counts_ = std::move(counts);
    return cm;
}

void ConfusionMatrix::add(int truth, int predicted) {
    if (truth < 0 || predicted < 0 || truth >= classes() || predicted >= classes())
        throw DataError("confusion matrix: label out of range");
    ++counts_(truth, predicted);
}

PrecisionRecallF1 precision_recall_f1(const ConfusionMatrix& cm, int positive_class) {
    if (positive_class < 0 || positive_class >= cm.classes()) return {};
    const long tp = cm.true_positives(positive_class);
    PrecisionRecallF1 out;
    out.precision = ratio(tp, tp + cm.false_positives(positive_class));
    out.recall = ratio(tp, tp + cm.false_negatives(positive_class));
    // 2PR / (P + R) in counts, so the result is the correctly rounded ratio
    out.f1 = ratio(2 * tp, 2 * tp + cm.false_positives(positive_class) + cm.false_negatives(positive_class));
    return out;
}

double accuracy(const Labels& y_true, const Labels& y_pred) {
    if (y_true.size() != y_pred.size()) throw DataError("accuracy: label vectors differ in length");
    if (y_true.empty()) throw DataError("accuracy: empty input");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < y_true.size(); ++i) correct += y_true[i] == y_pred[i];
    return static_cast<double>(correct) / static_cast<double>(y_true.size());
}

double macro_f1(const Labels& y_true, const Labels& y_pred) {
    if (y_true.empty()) throw DataError("macro_f1: empty input");
    const ConfusionMatrix cm(y_true, y_pred);
    const std::set<int> present(y_true.begin(), y_true.end());
    double sum = 0.0;
    for (int c : present) sum += precision_recall_f1(cm, c).f1;
    return sum / static_cast<double>(present.size());
}

Labels knn_predict(const Matrix& train_X, const Labels& train_y, const Matrix& test_X, int k) {
    const Index n = train_X.rows();
    if (n == 0) throw DataError("knn_predict: empty training set");
    if (static_cast<Index>(train_y.size()) != n) throw DataError("knn_predict: label count mismatch");
    if (train_X.cols() != test_X.cols()) throw DataError("knn_predict: feature count mismatch");
    if (k < 1 || k > n) throw DataError("knn_predict: k must lie in [1, n_train]");

    Labels out(static_cast<std::size_t>(test_X.rows()));
    std::vector<std::pair<double, Index>> ranked(static_cast<std::size_t>(n));
    std::map<int, int> votes;
    for (Index t = 0; t < test_X.rows(); ++t) {
        for (Index i = 0; i < n; ++i) ranked[i] = {(train_X.row(i) - test_X.row(t)).squaredNorm(), i};
        std::partial_sort(ranked.begin(), ranked.begin() + k, ranked.end());
        votes.clear();
        for (int j = 0; j < k; ++j) ++votes[train_y[ranked[j].second]];
        // std::map iterates by increasing class code, so the first maximum wins ties
        int best = votes.begin()->first;
        int best_votes = -1;
        for (const auto& [cls, count] : votes) {
            if (count > best_votes) {
                best = cls;
                best_votes = count;
            }
        }
        out[t] = best;
    }
    return out;
}

std::vector<std::vector<Index>> stratified_kfold(const Labels& y, int k, std::uint64_t seed) {
    const auto n = static_cast<Index>(y.size());
    if (k < 2) throw DataError("stratified_kfold: k must be at least 2");
    if (k > n) throw DataError("stratified_kfold: k exceeds the number of samples");

    std::map<int, std::vector<Index>> by_class;
    for (Index i = 0; i < n; ++i) by_class[y[i]].push_back(i);

    Rng rng(derive_seed(seed, {seed_tag::folds}));
    std::vector<std::vector<Index>> folds(static_cast<std::size_t>(k));
    std::size_t cursor = 0;
    for (auto& [cls, members] : by_class) {
        if (static_cast<int>(members.size()) < k)
            spdlog::warn("stratified_kfold: class {} has {} members for {} folds", cls, members.size(), k);
        std::shuffle(members.begin(), members.end(), rng);
        for (Index i : members) {
            folds[cursor].push_back(i);
            cursor = (cursor + 1) % folds.size();
        }
    }
    for (auto& f : folds) std::sort(f.begin(), f.end());
    return folds;
}

std::vector<Index> top_features(const FeatureWeights& w, Index top_k) {
    if (top_k < 0 || top_k > w.size()) throw DataError("top_features: top_k out of range");
    std::vector<Index> order(static_cast<std::size_t>(w.size()));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return w[a] > w[b]; });
    order.resize(static_cast<std::size_t>(top_k));
    return order;
}

double success_rate(const FeatureWeights& w, const std::vector<Index>& relevant, Index top_k) {
    if (relevant.empty()) throw DataError("success_rate: empty relevant set");
    const auto top = top_features(w, top_k);
    const std::set<Index> chosen(top.begin(), top.end());
    const std::set<Index> truth(relevant.begin(), relevant.end());
    std::size_t hits = 0;
    for (Index f : truth) hits += chosen.contains(f);
    return static_cast<double>(hits) / static_cast<double>(truth.size());
}

}  // namespace iwmc::eval
