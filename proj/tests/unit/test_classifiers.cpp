// Copyright 2026 The earid Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <numeric>
#include <random>
#include <sstream>

#include "earid/classifiers.hpp"

using namespace earid;

namespace {

Matrix rows_of(std::initializer_list<std::vector<double>> rows) {
    Matrix m(0, rows.begin()->size());
    for (const auto& r : rows) m.push_row(r);
    return m;
}

struct Toy {
    Matrix x;
    std::vector<int> y;
};

/// Two isotropic Gaussian classes in d dims, means separated by `gap` along
/// the first axis.
Toy gaussians(std::size_t per_class, std::size_t d, double gap, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal;
    Toy t{Matrix(0, d), {}};
    std::vector<double> row(d);
    for (int cls : {1, -1})
        for (std::size_t i = 0; i < per_class; ++i) {
            for (auto& v : row) v = normal(gen);
            row[0] += cls > 0 ? gap : 0.0;
            t.x.push_row(row);
            t.y.push_back(cls);
        }
    return t;
}

Toy xor_points(std::size_t per_quadrant, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(0.15, 1.0);
    Toy t{Matrix(0, 2), {}};
    for (int sx : {-1, 1})
        for (int sy : {-1, 1})
            for (std::size_t i = 0; i < per_quadrant; ++i) {
                t.x.push_row(std::vector<double>{sx * u(gen), sy * u(gen)});
                t.y.push_back(sx * sy);
            }
    return t;
}

template <class F>
double accuracy(const Toy& t, F&& predict) {
    std::size_t ok = 0;
    for (std::size_t r = 0; r < t.x.rows(); ++r) ok += predict(t.x.row(r)) == t.y[r];
    return static_cast<double>(ok) / static_cast<double>(t.x.rows());
}

} // namespace

// ---------------------------------------------------------------------------
// Cosine

TEST(Cosine, DistanceValues) {
    const std::vector<double> a{1, 0}, b{0, 1}, c{-2, 0}, d{3, 0};
    EXPECT_DOUBLE_EQ(cosine_distance(a, b), 1.0);
    EXPECT_DOUBLE_EQ(cosine_distance(a, c), 2.0);
    EXPECT_DOUBLE_EQ(cosine_distance(a, d), 0.0);
    EXPECT_THROW(cosine_distance(a, std::vector<double>{0, 0}), Error);
}

TEST(Cosine, NearestByAngleNotMagnitude) {
    const auto t = make_cosine_template(rows_of({{1, 0}, {1, 1}, {0, 1}}), std::vector<int>{1, -1, -1});
    EXPECT_EQ(cosine_nn_predict(t, std::vector<double>{100, 1}), 1);
    EXPECT_EQ(cosine_nn_predict(t, std::vector<double>{0.01, 0.009}), -1);
    EXPECT_EQ(nearest(t, std::vector<double>{0.1, 5}).index, 2u);
}

TEST(Cosine, TiesGoToTheFirstRow) {
    const auto t = make_cosine_template(rows_of({{1, 0}, {0, 1}, {2, 0}}), std::vector<int>{-1, 1, 1});
    EXPECT_EQ(nearest(t, std::vector<double>{1, 1}).index, 0u);
    EXPECT_EQ(nearest(t, std::vector<double>{5, 0}).index, 0u); // rows 0 and 2 both at distance 0
}

TEST(Cosine, ScaleInvariant) {
    const Toy t = gaussians(20, 5, 3.0, 7);
    Matrix scaled = t.x;
    for (std::size_t r = 0; r < scaled.rows(); ++r)
        for (auto& v : scaled.row(r)) v *= 8.0; // power of two keeps it exact
    const auto a = make_cosine_template(t.x, t.y);
    const auto b = make_cosine_template(scaled, t.y);
    const Toy q = gaussians(10, 5, 3.0, 8);
    for (std::size_t r = 0; r < q.x.rows(); ++r) {
        std::vector<double> v(q.x.row(r).begin(), q.x.row(r).end());
        std::vector<double> w = v;
        for (auto& x : w) x *= 0.25;
        EXPECT_EQ(nearest(a, v).index, nearest(b, w).index);
    }
}

TEST(Cosine, OpenSetRejects) {
    const auto t = make_cosine_template(rows_of({{1, 0}}), std::vector<int>{7});
    EXPECT_EQ(cosine_nn_predict(t, std::vector<double>{1, 0.1}, 0.1, -1), 7);
    EXPECT_EQ(cosine_nn_predict(t, std::vector<double>{0, 1}, 0.1, -1), -1);
}

TEST(Cosine, ZeroNormErrors) {
    try {
        make_cosine_template(rows_of({{1, 0}, {0, 0}}), std::vector<int>{1, -1});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ZeroNorm);
    }
    const auto t = make_cosine_template(rows_of({{1, 0}}), std::vector<int>{1});
    EXPECT_THROW(nearest(t, std::vector<double>{0, 0}), Error);
    EXPECT_THROW(nearest(t, std::vector<double>{1, 0, 0}), Error);
}

TEST(Identify, NearestSubject) {
    const auto t = make_cosine_template(rows_of({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}),
                                        std::vector<std::string>{"R01", "R02", "R03"});
    EXPECT_EQ(identify(t, std::vector<double>{0.1, 0.2, 3.0}), "R03");
    EXPECT_EQ(identify(t, std::vector<double>{2.0, 0.2, 0.1}), "R01");
}

TEST(Identify, RandomFeaturesAreAtChance) {
    std::mt19937_64 gen(99);
    std::normal_distribution<double> normal;
    const std::size_t subjects = 15, d = 26;
    auto random_rows = [&](std::size_t n) {
        Matrix m(0, d);
        std::vector<double> r(d);
        for (std::size_t i = 0; i < n; ++i) {
            for (auto& v : r) v = normal(gen);
            m.push_row(r);
        }
        return m;
    };
    std::vector<int> labels;
    for (std::size_t s = 0; s < subjects; ++s)
        for (int i = 0; i < 20; ++i) labels.push_back(static_cast<int>(s));
    const auto t = make_cosine_template(random_rows(labels.size()), labels);
    const Matrix q = random_rows(3000);
    std::size_t hits = 0;
    for (std::size_t r = 0; r < q.rows(); ++r) hits += identify(t, q.row(r)) == static_cast<int>(r % subjects);
    EXPECT_NEAR(static_cast<double>(hits) / 3000.0, 1.0 / 15.0, 0.02);
}

// ---------------------------------------------------------------------------
// LDA

TEST(Lda, SeparatesWellSeparatedGaussians) {
    const Toy train = gaussians(200, 4, 4.0, 1);
    const Toy test = gaussians(500, 4, 4.0, 2);
    const auto m = lda_train(train.x, train.y);
    EXPECT_GT(accuracy(test, [&](auto v) { return lda_predict(m, v); }), 0.95);
}

TEST(Lda, SymmetricClassesGiveZeroBias) {
    // mirror-image classes about the origin, equal counts
    Matrix x(0, 2);
    std::vector<int> y;
    for (const auto& r : std::vector<std::vector<double>>{{2, 1}, {3, -1}, {2.5, 0.5}, {1.5, 0.2}}) {
        x.push_row(r);
        y.push_back(1);
        x.push_row(std::vector<double>{-r[0], -r[1]});
        y.push_back(-1);
    }
    const auto m = lda_train(x, y);
    EXPECT_NEAR(m.bias, 0.0, 1e-9);
    EXPECT_GT(m.weights[0], 0.0);
}

TEST(Lda, PriorShiftsTheBias) {
    const Toy t = gaussians(50, 2, 2.0, 5);
    const Toy more = gaussians(200, 2, 2.0, 5);
    Matrix x(0, 2);
    std::vector<int> y;
    for (std::size_t r = 0; r < more.x.rows(); ++r)
        if (more.y[r] < 0 || r < 50) {
            x.push_row(more.x.row(r));
            y.push_back(more.y[r]);
        }
    const auto balanced = lda_train(t.x, t.y);
    const auto skewed = lda_train(x, y); // 50 client vs 200 imposter rows
    const std::vector<double> midpoint{1.0, 0.0};
    EXPECT_LT(lda_score(skewed, midpoint), lda_score(balanced, midpoint) - 0.5);
}

TEST(Lda, DuplicatedColumnStaysFinite) {
    Toy t = gaussians(40, 3, 3.0, 3);
    Matrix x(0, 4);
    for (std::size_t r = 0; r < t.x.rows(); ++r) {
        const auto row = t.x.row(r);
        x.push_row(std::vector<double>{row[0], row[1], row[2], row[0]});
    }
    const auto m = lda_train(x, t.y);
    for (double w : m.weights) EXPECT_TRUE(std::isfinite(w));
    EXPECT_TRUE(std::isfinite(m.bias));
    // the copy shares the original column's weight and the decisions do not move
    const auto plain = lda_train(t.x, t.y);
    EXPECT_NEAR(m.weights[0], m.weights[3], 1e-6);
    EXPECT_NEAR(m.weights[0] + m.weights[3], plain.weights[0], 1e-2);
    EXPECT_EQ(accuracy({x, t.y}, [&](auto v) { return lda_predict(m, v); }),
              accuracy(t, [&](auto v) { return lda_predict(plain, v); }));
}

TEST(Lda, RowPermutationInvariant) {
    const Toy t = gaussians(30, 5, 1.0, 4);
    std::vector<std::size_t> perm(t.x.rows());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), std::mt19937_64(11));
    Matrix x(0, t.x.cols());
    std::vector<int> y;
    for (auto p : perm) {
        x.push_row(t.x.row(p));
        y.push_back(t.y[p]);
    }
    const auto a = lda_train(t.x, t.y);
    const auto b = lda_train(x, y);
    EXPECT_EQ(a.weights, b.weights);
    EXPECT_EQ(a.bias, b.bias);
}

TEST(Lda, Errors) {
    const auto x = rows_of({{1, 0}, {2, 0}, {0, 1}});
    try {
        lda_train(x, std::vector<int>{1, -1, -1});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InsufficientClass);
    }
    EXPECT_THROW(lda_train(x, std::vector<int>{1, -1}), Error);
    EXPECT_THROW(lda_train(x, std::vector<int>{1, 1, -1}, 2.0), Error);
}

// ---------------------------------------------------------------------------
// SVM

TEST(Svm, LinearSeparableIsPerfect) {
    const Toy t = gaussians(40, 2, 10.0, 21);
    const auto m = svm_train(t.x, t.y, {Kernel::Linear, 10.0});
    EXPECT_EQ(accuracy(t, [&](auto v) { return svm_predict(m, v); }), 1.0);
}

TEST(Svm, RbfSolvesXorLinearCannot) {
    const Toy t = xor_points(25, 5);
    const auto rbf = svm_train(t.x, t.y, {Kernel::Rbf, 10.0, 2.0});
    EXPECT_EQ(accuracy(t, [&](auto v) { return svm_predict(rbf, v); }), 1.0);
    const auto lin = svm_train(t.x, t.y, {Kernel::Linear, 10.0});
    EXPECT_LE(accuracy(t, [&](auto v) { return svm_predict(lin, v); }), 0.75);
}

TEST(Svm, DualSolutionIsFeasible) {
    const Toy t = gaussians(60, 3, 1.5, 31);
    const SvmHyper h{Kernel::Rbf, 1.0, 0.5};
    const GramBase base(t.x);
    const auto k = base.kernel(h);
    const double c_pos = 3.0, c_neg = 1.0;
    const auto r = smo_solve(k, t.y, c_pos, c_neg, 1e-3, 0);
    double balance = 0.0;
    for (std::size_t i = 0; i < r.alpha.size(); ++i) {
        balance += r.alpha[i] * t.y[i];
        EXPECT_GE(r.alpha[i], 0.0);
        EXPECT_LE(r.alpha[i], t.y[i] > 0 ? c_pos : c_neg);
    }
    EXPECT_NEAR(balance, 0.0, 1e-6);
    EXPECT_LE(r.kkt_gap, 1e-3);
}

TEST(Svm, ClientWeightScalesTheClientBox) {
    const Toy t = gaussians(30, 2, 0.5, 41);
    SvmOptions opt;
    opt.client_weight = 14.0;
    const auto m = svm_train(t.x, t.y, {Kernel::Linear, 0.1}, opt);
    for (double c : m.coef) EXPECT_LE(std::abs(c), c > 0 ? 1.4 + 1e-12 : 0.1 + 1e-12);
    EXPECT_EQ(m.client_weight, 14.0);
}

TEST(Svm, IterationCapRaisesNonConvergence) {
    const Toy t = gaussians(50, 3, 0.3, 51);
    SvmOptions opt;
    opt.max_iterations = 3;
    try {
        svm_train(t.x, t.y, {Kernel::Rbf, 100.0, 1.0}, opt);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NonConvergence);
    }
}

TEST(Svm, InputErrors) {
    const auto x = rows_of({{1, 0}, {0, 1}});
    EXPECT_THROW(svm_train(x, std::vector<int>{1, 1}, {}), Error);
    EXPECT_THROW(svm_train(x, std::vector<int>{1, 2}, {}), Error);
    EXPECT_THROW(svm_train(x, std::vector<int>{1, -1}, {Kernel::Rbf, 0.0}), Error);
    EXPECT_THROW(parse_kernel("quadratic"), Error);
    EXPECT_EQ(parse_kernel("poly"), Kernel::Polynomial);
}

TEST(Tuning, GridHasSixtyEightSettings) {
    const auto s = SvmGrid{}.settings();
    ASSERT_EQ(s.size(), 68u);
    EXPECT_EQ(s[0].kernel, Kernel::Linear);
    EXPECT_EQ(s[4].kernel, Kernel::Sigmoid);
    EXPECT_EQ(s[20].kernel, Kernel::Rbf);
    EXPECT_EQ(s[36].kernel, Kernel::Polynomial);
    EXPECT_EQ(s[37].degree, 3);
}

TEST(Tuning, FoldsAreStratified) {
    std::vector<int> y(23, -1);
    for (int i = 0; i < 7; ++i) y[static_cast<std::size_t>(i) * 3] = 1;
    std::size_t k = 0;
    const auto f = stratified_folds(y, 5, 1, &k);
    EXPECT_EQ(k, 5u);
    for (std::size_t fold = 0; fold < k; ++fold) {
        int pos = 0;
        for (std::size_t i = 0; i < y.size(); ++i) pos += f[i] == fold && y[i] > 0;
        EXPECT_GE(pos, 1);
        EXPECT_LE(pos, 2);
    }
    std::vector<int> few{1, 1, 1, -1, -1, -1, -1, -1, -1, -1};
    stratified_folds(few, 5, 1, &k);
    EXPECT_EQ(k, 3u);
}

TEST(Tuning, PicksAPerfectSettingOnXor) {
    const Toy t = xor_points(10, 9);
    SvmGrid grid;
    grid.kernels = {Kernel::Linear, Kernel::Rbf};
    const auto r = tune_svm(t.x, t.y, {}, 3, grid, 4);
    EXPECT_EQ(r.best.kernel, Kernel::Rbf);
    EXPECT_DOUBLE_EQ(r.best_score, 1.0);
    const auto again = tune_svm(t.x, t.y, {}, 3, grid, 4);
    EXPECT_EQ(again.scores, r.scores);
}

TEST(Tuning, TiesGoToTheFirstSetting) {
    // duplicated rows with opposite labels: every setting scores the same
    Matrix x(0, 2);
    std::vector<int> y;
    for (int i = 0; i < 12; ++i) {
        x.push_row(std::vector<double>{1.0, 1.0});
        y.push_back(i % 2 ? 1 : -1);
    }
    SvmGrid grid;
    grid.kernels = {Kernel::Linear, Kernel::Rbf};
    const auto r = tune_svm(x, y, {}, 1, grid, 3);
    const auto settings = grid.settings();
    std::size_t first = 0;
    while (r.scores[first] != r.best_score) ++first;
    EXPECT_EQ(r.best.kernel, settings[first].kernel);
    EXPECT_EQ(r.best.C, settings[first].C);
    EXPECT_EQ(r.best.gamma, settings[first].gamma);
}

TEST(TrainClassifier, DispatchesAndPredicts) {
    const Toy t = gaussians(30, 3, 6.0, 61);
    TrainOptions opt;
    opt.grid.kernels = {Kernel::Linear};
    for (auto k : {ClassifierKind::Cosine, ClassifierKind::Lda, ClassifierKind::Svm}) {
        const auto m = train_classifier(k, t.x, t.y, opt);
        EXPECT_GT(accuracy(t, [&](auto v) { return predict(m, v); }), 0.9) << to_string(k);
        std::ostringstream out;
        write_model(out, m);
        EXPECT_EQ(out.str().rfind("kind," + to_string(k), 0), 0u);
    }
    EXPECT_EQ(parse_classifier("cosine"), ClassifierKind::Cosine);
    EXPECT_THROW(parse_classifier("knn"), Error);
}
