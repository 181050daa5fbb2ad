// Copyright 2026 The earid Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EARID_CLASSIFIERS_LDA_HPP
#define EARID_CLASSIFIERS_LDA_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "../error.hpp"
#include "../matrix.hpp"

namespace earid {

inline constexpr double kDefaultLdaShrinkage = 1e-3;

/// Binary linear discriminant: predict client iff w.x + b > 0.
struct LdaModel {
    std::vector<double> weights;
    double bias = 0.0;
    double shrinkage = kDefaultLdaShrinkage;
};

/// Pooled within-class covariance S is regularized as (1-l) S + l diag(S);
/// the bias includes the log prior ratio of the training class counts.
/// Rows are accumulated in lexicographic order, so the model is bit-for-bit
/// invariant to row permutations.
inline LdaModel lda_train(const Matrix& x, std::span<const int> labels, double shrinkage = kDefaultLdaShrinkage) {
    if (x.rows() != labels.size()) throw Error(ErrorKind::InvalidArgument, "label count mismatch");
    if (shrinkage < 0.0 || shrinkage > 1.0) throw Error(ErrorKind::InvalidArgument, "shrinkage must lie in [0, 1]");
    const std::size_t d = x.cols();

    std::vector<std::size_t> order(x.rows());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (labels[a] != labels[b]) return labels[a] < labels[b];
        const auto ra = x.row(a), rb = x.row(b);
        return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
    });

    Eigen::VectorXd mean_pos = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
    Eigen::VectorXd mean_neg = mean_pos;
    std::size_t n_pos = 0, n_neg = 0;
    for (auto r : order) {
        const Eigen::Map<const Eigen::VectorXd> v(x.row(r).data(), static_cast<Eigen::Index>(d));
        if (labels[r] > 0) {
            mean_pos += v;
            ++n_pos;
        } else {
            mean_neg += v;
            ++n_neg;
        }
    }
    if (n_pos < 2 || n_neg < 2) throw Error(ErrorKind::InsufficientClass, "LDA needs at least two rows per class");
    mean_pos /= static_cast<double>(n_pos);
    mean_neg /= static_cast<double>(n_neg);

    Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (auto r : order) {
        const Eigen::Map<const Eigen::VectorXd> v(x.row(r).data(), static_cast<Eigen::Index>(d));
        const Eigen::VectorXd c = v - (labels[r] > 0 ? mean_pos : mean_neg);
        scatter.noalias() += c * c.transpose();
    }
    scatter /= static_cast<double>(n_pos + n_neg - 2);
    Eigen::MatrixXd shrunk = (1.0 - shrinkage) * scatter;
    shrunk.diagonal() += shrinkage * scatter.diagonal();

    const Eigen::VectorXd w = shrunk.completeOrthogonalDecomposition().solve(mean_pos - mean_neg);
    LdaModel m;
    m.shrinkage = shrinkage;
    m.weights.assign(w.data(), w.data() + w.size());
    m.bias = -0.5 * w.dot(mean_pos + mean_neg) + std::log(static_cast<double>(n_pos) / static_cast<double>(n_neg));
    for (double v : m.weights)
        if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "LDA produced non-finite weights");
    return m;
}

inline double lda_score(const LdaModel& m, std::span<const double> v) {
    if (v.size() != m.weights.size()) throw Error(ErrorKind::InvalidArgument, "dimension mismatch");
    double s = m.bias;
    for (std::size_t i = 0; i < v.size(); ++i) s += m.weights[i] * v[i];
    return s;
}

inline int lda_predict(const LdaModel& m, std::span<const double> v) { return lda_score(m, v) > 0.0 ? 1 : -1; }

} // namespace earid

#endif
