// Copyright 2026 The earid Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EARID_CLASSIFIERS_COSINE_HPP
#define EARID_CLASSIFIERS_COSINE_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "../error.hpp"
#include "../matrix.hpp"

namespace earid {

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

/// 1 - cos(angle between u and w).
inline double cosine_distance(std::span<const double> u, std::span<const double> w) {
    if (u.size() != w.size()) throw Error(ErrorKind::InvalidArgument, "dimension mismatch");
    const double nu = std::sqrt(dot(u, u));
    const double nw = std::sqrt(dot(w, w));
    if (nu == 0.0 || nw == 0.0) throw Error(ErrorKind::ZeroNorm, "cosine distance of a zero vector");
    return 1.0 - dot(u, w) / (nu * nw);
}

/// Labeled training rows matched by minimum cosine distance. `Label` is
/// int (+1 client / -1 imposter) for verification and a subject id for
/// identification.
template <class Label>
struct CosineTemplate {
    Matrix rows;
    std::vector<Label> labels;
    std::vector<double> norms;
};

template <class Label>
CosineTemplate<Label> make_cosine_template(Matrix rows, std::vector<Label> labels) {
    if (rows.empty()) throw Error(ErrorKind::InvalidArgument, "empty template");
    if (rows.rows() != labels.size()) throw Error(ErrorKind::InvalidArgument, "label count mismatch");
    CosineTemplate<Label> t{std::move(rows), std::move(labels), {}};
    t.norms.resize(t.rows.rows());
    for (std::size_t r = 0; r < t.rows.rows(); ++r) {
        t.norms[r] = std::sqrt(dot(t.rows.row(r), t.rows.row(r)));
        if (t.norms[r] == 0.0) throw Error(ErrorKind::ZeroNorm, "zero-norm template row " + std::to_string(r));
    }
    return t;
}

struct Match {
    std::size_t index = 0;
    double distance = 0.0;
};

/// Nearest template row; ties go to the lowest row index.
template <class Label>
Match nearest(const CosineTemplate<Label>& t, std::span<const double> v) {
    if (v.size() != t.rows.cols()) throw Error(ErrorKind::InvalidArgument, "dimension mismatch");
    const double nv = std::sqrt(dot(v, v));
    if (nv == 0.0) throw Error(ErrorKind::ZeroNorm, "zero-norm query vector");
    Match best{0, std::numeric_limits<double>::infinity()};
    for (std::size_t r = 0; r < t.rows.rows(); ++r) {
        const double d = 1.0 - dot(v, t.rows.row(r)) / (nv * t.norms[r]);
        if (d < best.distance) best = {r, d};
    }
    return best;
}

template <class Label>
Label cosine_nn_predict(const CosineTemplate<Label>& t, std::span<const double> v) {
    return t.labels[nearest(t, v).index];
}

/// Open-set variant: a query farther than `max_distance` from every row is
/// assigned `reject`.
template <class Label>
Label cosine_nn_predict(const CosineTemplate<Label>& t, std::span<const double> v, double max_distance, Label reject) {
    const Match m = nearest(t, v);
    return m.distance > max_distance ? reject : t.labels[m.index];
}

/// Identification: the subject of the nearest training row.
template <class Label>
Label identify(const CosineTemplate<Label>& t, std::span<const double> v) {
    return cosine_nn_predict(t, v);
}

} // namespace earid

#endif
