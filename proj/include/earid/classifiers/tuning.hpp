// Copyright 2026 The earid Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EARID_CLASSIFIERS_TUNING_HPP
#define EARID_CLASSIFIERS_TUNING_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "../error.hpp"
#include "../matrix.hpp"
#include "../rng.hpp"
#include "svm.hpp"

namespace earid {

/// Grid axes. Settings are enumerated kernel-major in the order linear,
/// sigmoid, rbf, polynomial; then C; then gamma; then degree.
struct SvmGrid {
    std::vector<Kernel> kernels{Kernel::Linear, Kernel::Sigmoid, Kernel::Rbf, Kernel::Polynomial};
    std::vector<double> C{0.1, 1.0, 10.0, 100.0};
    std::vector<double> gamma{0.01, 0.1, 1.0, 10.0};
    std::vector<int> degree{2, 3};

    std::vector<SvmHyper> settings() const {
        std::vector<SvmHyper> out;
        for (Kernel k : kernels)
            for (double c : C) {
                if (k == Kernel::Linear) {
                    out.push_back({k, c, 0.0, 1, 0.0});
                    continue;
                }
                for (double g : gamma) {
                    if (k != Kernel::Polynomial) {
                        out.push_back({k, c, g, 1, 0.0});
                        continue;
                    }
                    for (int d : degree) out.push_back({k, c, g, d, 0.0});
                }
            }
        return out;
    }
};

/// Stratified fold index (0..k-1) per row. Each class is shuffled with the
/// seeded stream and dealt round-robin. When the smaller class has fewer
/// than k rows the fold count shrinks to that size; below two rows per
/// class no stratification is possible.
inline std::vector<std::size_t> stratified_folds(std::span<const int> y, std::size_t k, std::uint64_t seed,
                                                 std::size_t* used_folds = nullptr) {
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < y.size(); ++i) (y[i] > 0 ? pos : neg).push_back(i);
    const std::size_t smallest = std::min(pos.size(), neg.size());
    if (smallest < 2) throw Error(ErrorKind::InsufficientClass, "cannot stratify: a class has fewer than two rows");
    k = std::min(k, smallest);
    Rng rng(seed);
    std::vector<std::size_t> fold(y.size());
    for (auto* cls : {&pos, &neg}) {
        rng.shuffle(std::span<std::size_t>(*cls));
        for (std::size_t r = 0; r < cls->size(); ++r) fold[(*cls)[r]] = r % k;
    }
    if (used_folds) *used_folds = k;
    return fold;
}

struct TuningResult {
    SvmHyper best;
    double best_score = 0.0;
    std::vector<double> scores; // per grid setting; -inf when a fold failed to converge
    std::size_t folds = 0;
};

/// Mean over folds of the held-out balanced accuracy (mean of the two
/// class sensitivities). The first setting reaching the maximum wins.
inline TuningResult tune_svm(const Matrix& x, std::span<const int> y, const SvmOptions& opt, std::uint64_t seed,
                             const SvmGrid& grid = {}, std::size_t k = 5) {
    if (x.rows() != y.size()) throw Error(ErrorKind::InvalidArgument, "label count mismatch");
    if (x.rows() < 10) throw Error(ErrorKind::InvalidArgument, "tuning needs at least 10 rows");
    check_binary_labels(y);

    TuningResult res;
    const auto fold = stratified_folds(y, k, seed, &res.folds);
    const GramBase base(x);
    const std::size_t n = x.rows();

    std::vector<std::vector<std::size_t>> train_idx(res.folds), test_idx(res.folds);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t f = 0; f < res.folds; ++f) (fold[i] == f ? test_idx[f] : train_idx[f]).push_back(i);

    const auto settings = grid.settings();
    if (settings.empty()) throw Error(ErrorKind::InvalidArgument, "empty tuning grid");
    res.scores.assign(settings.size(), -std::numeric_limits<double>::infinity());
    res.best_score = -std::numeric_limits<double>::infinity();
    res.best = settings.front();

    std::vector<double> sub;
    std::vector<int> sub_y;
    for (std::size_t s = 0; s < settings.size(); ++s) {
        const SvmHyper& h = settings[s];
        const auto kern = base.kernel(h);
        double total = 0.0;
        bool ok = true;
        for (std::size_t f = 0; f < res.folds && ok; ++f) {
            const auto& tr = train_idx[f];
            const std::size_t m = tr.size();
            sub.resize(m * m);
            sub_y.resize(m);
            for (std::size_t a = 0; a < m; ++a) {
                sub_y[a] = y[tr[a]];
                for (std::size_t b = 0; b < m; ++b) sub[a * m + b] = kern[tr[a] * n + tr[b]];
            }
            SmoResult r;
            try {
                r = smo_solve(sub, sub_y, opt.client_weight * h.C, h.C, opt.tolerance, opt.max_iterations);
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::NonConvergence) throw;
                ok = false;
                break;
            }
            std::size_t tp = 0, pos = 0, tn = 0, neg = 0;
            for (auto t : test_idx[f]) {
                double dv = -r.rho;
                for (std::size_t a = 0; a < m; ++a)
                    if (r.alpha[a] > 0.0) dv += r.alpha[a] * sub_y[a] * kern[tr[a] * n + t];
                const int pred = dv > 0.0 ? 1 : -1;
                if (y[t] > 0) {
                    ++pos;
                    tp += pred > 0;
                } else {
                    ++neg;
                    tn += pred < 0;
                }
            }
            total += 0.5 * (static_cast<double>(tp) / static_cast<double>(pos) +
                            static_cast<double>(tn) / static_cast<double>(neg));
        }
        if (!ok) continue;
        res.scores[s] = total / static_cast<double>(res.folds);
        if (res.scores[s] > res.best_score) {
            res.best_score = res.scores[s];
            res.best = h;
        }
    }
    if (res.best_score == -std::numeric_limits<double>::infinity())
        throw Error(ErrorKind::NonConvergence, "no grid setting converged on every fold");
    return res;
}

} // namespace earid

#endif
