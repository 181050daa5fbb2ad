// Copyright 2026 The earid Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EARID_CLASSIFIERS_SVM_HPP
#define EARID_CLASSIFIERS_SVM_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "../error.hpp"
#include "../matrix.hpp"

namespace earid {

enum class Kernel { Linear, Sigmoid, Rbf, Polynomial };

inline std::string to_string(Kernel k) {
    switch (k) {
    case Kernel::Linear: return "linear";
    case Kernel::Sigmoid: return "sigmoid";
    case Kernel::Rbf: return "rbf";
    case Kernel::Polynomial: return "polynomial";
    }
    return "?";
}

inline Kernel parse_kernel(std::string_view s) {
    if (s == "linear") return Kernel::Linear;
    if (s == "sigmoid") return Kernel::Sigmoid;
    if (s == "rbf") return Kernel::Rbf;
    if (s == "polynomial" || s == "poly") return Kernel::Polynomial;
    throw Error(ErrorKind::Parse, "unknown kernel '" + std::string(s) + "'");
}

struct SvmHyper {
    Kernel kernel = Kernel::Rbf;
    double C = 1.0;
    double gamma = 1.0;
    int degree = 3;
    double coef0 = 0.0;
};

inline void check_hyper(const SvmHyper& h) {
    if (!(h.C > 0.0)) throw Error(ErrorKind::InvalidArgument, "C must be positive");
    if (h.kernel != Kernel::Linear && !(h.gamma > 0.0)) throw Error(ErrorKind::InvalidArgument, "gamma must be positive");
    if (h.kernel == Kernel::Polynomial && h.degree < 1) throw Error(ErrorKind::InvalidArgument, "degree must be >= 1");
}

/// Kernel value from the inner product and the two squared norms.
inline double kernel_value(const SvmHyper& h, double xy, double xx, double yy) {
    switch (h.kernel) {
    case Kernel::Linear: return xy;
    case Kernel::Sigmoid: return std::tanh(h.gamma * xy + h.coef0);
    case Kernel::Rbf: return std::exp(-h.gamma * std::max(0.0, xx + yy - 2.0 * xy));
    case Kernel::Polynomial: return std::pow(h.gamma * xy + h.coef0, h.degree);
    }
    return 0.0;
}

/// Pairwise inner products of a row set, shared by every kernel.
struct GramBase {
    std::size_t n = 0;
    std::vector<double> dots; // n x n

    explicit GramBase(const Matrix& x) : n(x.rows()), dots(x.rows() * x.rows()) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j) {
                double s = 0.0;
                const auto a = x.row(i), b = x.row(j);
                for (std::size_t c = 0; c < a.size(); ++c) s += a[c] * b[c];
                dots[i * n + j] = dots[j * n + i] = s;
            }
    }

    double dot(std::size_t i, std::size_t j) const { return dots[i * n + j]; }

    std::vector<double> kernel(const SvmHyper& h) const {
        std::vector<double> k(n * n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j)
                k[i * n + j] = k[j * n + i] = kernel_value(h, dot(i, j), dot(i, i), dot(j, j));
        return k;
    }
};

struct SvmOptions {
    double client_weight = 1.0; // C_client = client_weight * C
    double tolerance = 1e-3;    // maximal KKT violation at convergence
    std::size_t max_iterations = 0; // 0: max(100000, 100 n)
};

struct SmoResult {
    std::vector<double> alpha;
    double rho = 0.0;
    std::size_t iterations = 0;
    double kkt_gap = 0.0;
};

/// Soft-margin dual by sequential minimal optimization with second-order
/// working-set selection. `kernel` is the dense n x n Gram matrix of the
/// training rows, `y` holds +1 / -1 labels, and the box is [0, C_y].
inline SmoResult smo_solve(std::span<const double> kernel, std::span<const int> y, double c_pos, double c_neg,
                           double eps, std::size_t max_iter) {
    const std::size_t n = y.size();
    constexpr double tau = 1e-12;
    auto K = [&](std::size_t i, std::size_t j) { return kernel[i * n + j]; };
    auto upper = [&](std::size_t i) { return y[i] > 0 ? c_pos : c_neg; };

    SmoResult res;
    res.alpha.assign(n, 0.0);
    auto& a = res.alpha;
    std::vector<double> grad(n, -1.0); // gradient of 1/2 a'Qa - e'a

    if (max_iter == 0) max_iter = std::max<std::size_t>(100000, 100 * n);
    for (;;) {
        // i: most violating index in I_up
        double gmax = -std::numeric_limits<double>::infinity();
        std::size_t i = n;
        for (std::size_t t = 0; t < n; ++t) {
            if (y[t] > 0) {
                if (a[t] < upper(t) && -grad[t] >= gmax) { gmax = -grad[t]; i = t; }
            } else {
                if (a[t] > 0.0 && grad[t] >= gmax) { gmax = grad[t]; i = t; }
            }
        }
        // j: largest objective decrease in I_low
        double gmax2 = -std::numeric_limits<double>::infinity();
        double best_obj = std::numeric_limits<double>::infinity();
        std::size_t j = n;
        if (i < n) {
            for (std::size_t t = 0; t < n; ++t) {
                const double q_it = static_cast<double>(y[i] * y[t]) * K(i, t);
                if (y[t] > 0) {
                    if (a[t] > 0.0) {
                        const double diff = gmax + grad[t];
                        gmax2 = std::max(gmax2, grad[t]);
                        if (diff > 0.0) {
                            double quad = K(i, i) + K(t, t) - 2.0 * y[i] * q_it;
                            if (quad <= 0.0) quad = tau;
                            const double obj = -(diff * diff) / quad;
                            if (obj <= best_obj) { best_obj = obj; j = t; }
                        }
                    }
                } else {
                    if (a[t] < upper(t)) {
                        const double diff = gmax - grad[t];
                        gmax2 = std::max(gmax2, -grad[t]);
                        if (diff > 0.0) {
                            double quad = K(i, i) + K(t, t) + 2.0 * y[i] * q_it;
                            if (quad <= 0.0) quad = tau;
                            const double obj = -(diff * diff) / quad;
                            if (obj <= best_obj) { best_obj = obj; j = t; }
                        }
                    }
                }
            }
        }
        res.kkt_gap = gmax + gmax2;
        if (i == n || j == n || res.kkt_gap < eps) break;
        if (res.iterations >= max_iter)
            throw Error(ErrorKind::NonConvergence, "SMO stopped after " + std::to_string(res.iterations) +
                                                       " iterations with KKT gap " + std::to_string(res.kkt_gap));
        ++res.iterations;

        const double ci = upper(i), cj = upper(j);
        const double old_i = a[i], old_j = a[j];
        const double q_ij = static_cast<double>(y[i] * y[j]) * K(i, j);
        if (y[i] != y[j]) {
            double quad = K(i, i) + K(j, j) + 2.0 * q_ij;
            if (quad <= 0.0) quad = tau;
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = a[i] - a[j];
            a[i] += delta;
            a[j] += delta;
            if (diff > 0.0) {
                if (a[j] < 0.0) { a[j] = 0.0; a[i] = diff; }
            } else {
                if (a[i] < 0.0) { a[i] = 0.0; a[j] = -diff; }
            }
            if (diff > ci - cj) {
                if (a[i] > ci) { a[i] = ci; a[j] = ci - diff; }
            } else {
                if (a[j] > cj) { a[j] = cj; a[i] = cj + diff; }
            }
        } else {
            double quad = K(i, i) + K(j, j) - 2.0 * q_ij;
            if (quad <= 0.0) quad = tau;
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = a[i] + a[j];
            a[i] -= delta;
            a[j] += delta;
            if (sum > ci) {
                if (a[i] > ci) { a[i] = ci; a[j] = sum - ci; }
            } else {
                if (a[j] < 0.0) { a[j] = 0.0; a[i] = sum; }
            }
            if (sum > cj) {
                if (a[j] > cj) { a[j] = cj; a[i] = sum - cj; }
            } else {
                if (a[i] < 0.0) { a[i] = 0.0; a[j] = sum; }
            }
        }

        const double di = a[i] - old_i, dj = a[j] - old_j;
        for (std::size_t t = 0; t < n; ++t)
            grad[t] += static_cast<double>(y[t]) * (y[i] * K(i, t) * di + y[j] * K(j, t) * dj);
    }

    // rho: mean y*grad over free vectors, else midpoint of the feasible interval
    double ub = std::numeric_limits<double>::infinity(), lb = -ub, sum_free = 0.0;
    std::size_t n_free = 0;
    for (std::size_t t = 0; t < n; ++t) {
        const double yg = y[t] * grad[t];
        if (a[t] >= upper(t)) {
            if (y[t] < 0) ub = std::min(ub, yg);
            else lb = std::max(lb, yg);
        } else if (a[t] <= 0.0) {
            if (y[t] > 0) ub = std::min(ub, yg);
            else lb = std::max(lb, yg);
        } else {
            ++n_free;
            sum_free += yg;
        }
    }
    res.rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2.0;
    return res;
}

/// decision(x) = sum_i coef_i K(sv_i, x) - rho; client iff decision > 0.
struct SvmModel {
    SvmHyper hyper;
    Matrix support;
    std::vector<double> support_norms;
    std::vector<double> coef; // alpha_i * y_i
    double rho = 0.0;
    double client_weight = 1.0;
    std::size_t iterations = 0;
    double kkt_gap = 0.0;
};

inline SvmModel svm_model_from(const Matrix& x, std::span<const int> y, const SvmHyper& h, const SvmOptions& opt,
                               const SmoResult& r) {
    SvmModel m;
    m.hyper = h;
    m.rho = r.rho;
    m.client_weight = opt.client_weight;
    m.iterations = r.iterations;
    m.kkt_gap = r.kkt_gap;
    m.support = Matrix(0, x.cols());
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (r.alpha[i] <= 0.0) continue;
        m.support.push_row(x.row(i));
        double s = 0.0;
        for (double v : x.row(i)) s += v * v;
        m.support_norms.push_back(s);
        m.coef.push_back(r.alpha[i] * y[i]);
    }
    return m;
}

inline void check_binary_labels(std::span<const int> y) {
    bool pos = false, neg = false;
    for (int v : y) {
        if (v == 1) pos = true;
        else if (v == -1) neg = true;
        else throw Error(ErrorKind::InvalidArgument, "labels must be +1 or -1");
    }
    if (!pos || !neg) throw Error(ErrorKind::InsufficientClass, "both classes are required");
}

/// Trains on a precomputed Gram matrix of the rows of `x`.
inline SvmModel svm_train(const Matrix& x, std::span<const int> y, const SvmHyper& h, const SvmOptions& opt,
                          std::span<const double> kernel) {
    check_hyper(h);
    check_binary_labels(y);
    if (x.rows() != y.size()) throw Error(ErrorKind::InvalidArgument, "label count mismatch");
    const SmoResult r = smo_solve(kernel, y, opt.client_weight * h.C, h.C, opt.tolerance, opt.max_iterations);
    return svm_model_from(x, y, h, opt, r);
}

inline SvmModel svm_train(const Matrix& x, std::span<const int> y, const SvmHyper& h, const SvmOptions& opt = {}) {
    const GramBase base(x);
    const auto k = base.kernel(h);
    return svm_train(x, y, h, opt, k);
}

inline double svm_decision(const SvmModel& m, std::span<const double> v) {
    if (v.size() != m.support.cols()) throw Error(ErrorKind::InvalidArgument, "dimension mismatch");
    double vv = 0.0;
    for (double a : v) vv += a * a;
    double s = -m.rho;
    for (std::size_t i = 0; i < m.coef.size(); ++i) {
        double xy = 0.0;
        const auto sv = m.support.row(i);
        for (std::size_t c = 0; c < v.size(); ++c) xy += sv[c] * v[c];
        s += m.coef[i] * kernel_value(m.hyper, xy, m.support_norms[i], vv);
    }
    return s;
}

inline int svm_predict(const SvmModel& m, std::span<const double> v) { return svm_decision(m, v) > 0.0 ? 1 : -1; }

} // namespace earid

#endif
