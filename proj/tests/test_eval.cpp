#include "oracles.hpp"

#include "iwmc/eval.hpp"

#include <doctest.h>

#include <map>

using namespace iwmc;
using namespace iwmc::eval;

TEST_CASE("confusion matrix bookkeeping") {
    const ConfusionMatrix cm(Labels{0, 0, 1, 2, 2}, Labels{0, 1, 1, 2, 0});
    CHECK(cm.classes() == 3);
    CHECK(cm.total() == 5);
    CHECK(cm.true_positives(0) == 1);
    CHECK(cm.false_positives(0) == 1);
    CHECK(cm.false_negatives(0) == 1);
    CHECK(cm.support(2) == 2);
    CHECK_THROWS_AS(ConfusionMatrix(Labels{0}, Labels{0, 1}), DataError);
    Eigen::MatrixXi bad(2, 2);
    bad << 1, -1, 0, 0;
    CHECK_THROWS_AS(ConfusionMatrix::from_counts(bad), DataError);
}

TEST_CASE("precision, recall, F1 hand cases") {
    Eigen::MatrixXi c(2, 2);
    // positive class 1: TP = 3, FP = 1, FN = 3
    c << 5, 1, 3, 3;
    const auto s = precision_recall_f1(ConfusionMatrix::from_counts(c), 1);
    CHECK(s.precision == 0.75);
    CHECK(s.recall == 0.5);
    CHECK(s.f1 == doctest::Approx(0.6).epsilon(1e-15));

    const auto perfect = precision_recall_f1(ConfusionMatrix(Labels{0, 1, 1}, Labels{0, 1, 1}), 1);
    CHECK(perfect.precision == 1.0);
    CHECK(perfect.recall == 1.0);
    CHECK(perfect.f1 == 1.0);

    Eigen::MatrixXi absent(3, 3);
    absent << 2, 1, 0, 1, 3, 0, 0, 0, 0;
    const auto zero = precision_recall_f1(ConfusionMatrix::from_counts(absent), 2);
    CHECK(zero.precision == 0.0);
    CHECK(zero.recall == 0.0);
    CHECK(zero.f1 == 0.0);
}

TEST_CASE("accuracy") {
    CHECK(accuracy({0, 1, 1}, {0, 1, 1}) == 1.0);
    CHECK(accuracy({0, 1, 1}, {1, 0, 0}) == 0.0);
    CHECK(accuracy({0, 1, 1, 0}, {0, 1, 0, 0}) == 0.75);
    CHECK_THROWS_AS(accuracy({0, 1}, {0}), DataError);
    CHECK_THROWS_AS(accuracy({}, {}), DataError);
    std::mt19937_64 rng(1);
    for (int t = 0; t < 50; ++t) {
        Labels a, b;
        int same = 0;
        for (int i = 0; i < 30; ++i) {
            a.push_back(static_cast<int>(rng() % 3));
            b.push_back(static_cast<int>(rng() % 3));
            same += a.back() == b.back();
        }
        CHECK(accuracy(a, b) == static_cast<double>(same) / 30.0);
    }
}

TEST_CASE("macro F1") {
    CHECK(macro_f1({0, 1, 2, 2}, {0, 1, 2, 2}) == 1.0);
    const Labels t{0, 0, 1, 1}, p{0, 1, 1, 1};
    const double f0 = 2.0 * 1.0 * 0.5 / 1.5, f1 = 2.0 * (2.0 / 3.0) * 1.0 / (2.0 / 3.0 + 1.0);
    CHECK(macro_f1(t, p) == doctest::Approx((f0 + f1) / 2.0).epsilon(1e-15));
    // a predicted-only class does not enter the average
    CHECK(macro_f1({0, 0}, {0, 1}) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK_THROWS_AS(macro_f1({}, {}), DataError);

    std::mt19937_64 rng(2);
    for (int t2 = 0; t2 < 50; ++t2) {
        Labels a, b;
        for (int i = 0; i < 25; ++i) {
            a.push_back(static_cast<int>(rng() % 3));
            b.push_back(static_cast<int>(rng() % 3));
        }
        const double got = macro_f1(a, b);
        CHECK(std::abs(got - oracle::macro_f1(a, b)) < 1e-12);
        CHECK(got >= 0.0);
        CHECK(got <= 1.0);
    }
}

TEST_CASE("knn_predict") {
    Matrix train(3, 2);
    train << 0, 0, 5, 5, 10, 10;
    CHECK(knn_predict(train, {0, 1, 2}, train.row(1), 1) == Labels{1});
    CHECK(knn_predict(train, {4, 4, 4}, train, 3) == Labels{4, 4, 4});
    // vote tie between classes 1 and 0 goes to 0
    Matrix mid(1, 2);
    mid << 2.5, 2.5;
    CHECK(knn_predict(train, {1, 0, 0}, mid, 2) == Labels{0});
    CHECK_THROWS_AS(knn_predict(Matrix(0, 2), {}, mid, 1), DataError);
    CHECK_THROWS_AS(knn_predict(train, {0, 1, 2}, mid, 4), DataError);

    std::mt19937_64 rng(3);
    for (int t = 0; t < 100; ++t) {
        const Matrix tr = oracle::random_matrix(30, 3, rng);
        const Matrix te = oracle::random_matrix(10, 3, rng);
        Labels y;
        for (int i = 0; i < 30; ++i) y.push_back(static_cast<int>(rng() % 3));
        CHECK(knn_predict(tr, y, te, 5) == oracle::knn_predict(tr, y, te, 5));
    }
}

TEST_CASE("stratified_kfold") {
    Labels y;
    for (int i = 0; i < 53; ++i) y.push_back(i % 3 == 0 ? 1 : 0);
    const auto folds = stratified_kfold(y, 5, 11);
    REQUIRE(folds.size() == 5);
    std::vector<int> seen(53, 0);
    for (const auto& f : folds)
        for (Index i : f) ++seen[i];
    CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
    for (int cls : {0, 1}) {
        const double total = static_cast<double>(std::count(y.begin(), y.end(), cls));
        for (const auto& f : folds) {
            const auto in_fold = std::count_if(f.begin(), f.end(), [&](Index i) { return y[i] == cls; });
            CHECK(std::abs(static_cast<double>(in_fold) - total / 5.0) <= 1.0);
        }
    }
    CHECK(stratified_kfold(y, 5, 11) == folds);

    Labels distinct{0, 1, 2, 3};
    const auto loo = stratified_kfold(distinct, 4, 0);
    for (const auto& f : loo) CHECK(f.size() == 1);
    CHECK_THROWS_AS(stratified_kfold(y, 1, 0), DataError);
    CHECK_THROWS_AS(stratified_kfold(distinct, 5, 0), DataError);
}

TEST_CASE("top_features and success_rate") {
    Vector w(5);
    w << 0.1, 0.9, 0.9, 0.0, 0.5;
    CHECK(top_features(FeatureWeights(w), 3) == std::vector<Index>{1, 2, 4});
    CHECK(success_rate(FeatureWeights(w), {1, 2}, 3) == 1.0);
    CHECK(success_rate(FeatureWeights(w), {0, 3}, 3) == 0.0);
    CHECK_THROWS_AS(success_rate(FeatureWeights(w), {}, 3), DataError);

    Vector ten = Vector::Zero(20);
    for (Index l = 0; l < 10; ++l) ten(l) = 10.0 - static_cast<double>(l);
    std::vector<Index> relevant{0, 1, 2, 3, 4, 5, 6, 15, 16, 17};
    CHECK(success_rate(FeatureWeights(ten), relevant, 10) == doctest::Approx(0.7).epsilon(1e-15));

    std::mt19937_64 rng(4);
    for (int t = 0; t < 50; ++t) {
        const Vector r = oracle::random_matrix(15, 1, rng).cwiseAbs();
        std::vector<Index> rel{0, 3, 5, 9};
        CHECK(success_rate(FeatureWeights(r), rel, 6) == oracle::success_rate(r, rel, 6));
    }
}
