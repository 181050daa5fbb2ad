// Copyright 2026 The earid Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EARID_METRICS_HPP
#define EARID_METRICS_HPP

#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "error.hpp"
#include "features.hpp"
#include "protocol.hpp"

namespace earid {

/// Exact non-negative rational, always in lowest terms.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    static Rational make(std::int64_t n, std::int64_t d) {
        if (d == 0) throw Error(ErrorKind::ZeroDenominator, "rational with zero denominator");
        if (d < 0) {
            n = -n;
            d = -d;
        }
        const std::int64_t g = std::gcd(n < 0 ? -n : n, d);
        return g > 1 ? Rational{n / g, d / g} : Rational{n, d};
    }

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    double percent() const { return 100.0 * value(); }

    friend Rational operator+(Rational a, Rational b) { return make(a.num * b.den + b.num * a.den, a.den * b.den); }
    friend Rational operator-(Rational a, Rational b) { return make(a.num * b.den - b.num * a.den, a.den * b.den); }
    friend Rational operator*(Rational a, Rational b) { return make(a.num * b.num, a.den * b.den); }
    friend Rational operator/(Rational a, Rational b) { return make(a.num * b.den, a.den * b.num); }
    friend bool operator==(Rational a, Rational b) { return a.num == b.num && a.den == b.den; }
};

/// Decimal text with `digits` places, rounded half away from zero.
inline std::string render_decimal(const Rational& r, int digits) {
    std::int64_t scale = 1;
    for (int i = 0; i < digits; ++i) scale *= 10;
    const bool negative = r.num < 0;
    const std::int64_t mag = (negative ? -r.num : r.num) * scale;
    std::int64_t q = mag / r.den;
    if (2 * (mag % r.den) >= r.den) ++q;
    std::string frac = std::to_string(q % scale);
    frac.insert(0, static_cast<std::size_t>(digits) - frac.size(), '0');
    std::string out = (negative && q != 0 ? "-" : "") + std::to_string(q / scale);
    return digits > 0 ? out + "." + frac : out;
}

/// Percentage with one decimal, e.g. "95.7".
inline std::string render_percent(const Rational& r) { return render_decimal(r * Rational{100, 1}, 1); }

// ---------------------------------------------------------------------------
// Verification (client = positive class)

struct BinaryCounts {
    std::int64_t tp = 0, fn = 0, fp = 0, tn = 0;

    std::int64_t total() const { return tp + fn + fp + tn; }
    BinaryCounts& operator+=(const BinaryCounts& o) {
        tp += o.tp;
        fn += o.fn;
        fp += o.fp;
        tn += o.tn;
        return *this;
    }
    friend BinaryCounts operator+(BinaryCounts a, const BinaryCounts& b) { return a += b; }
    bool operator==(const BinaryCounts&) const = default;

    void add(int truth, int predicted) {
        if (truth > 0) (predicted > 0 ? tp : fn) += 1;
        else (predicted > 0 ? fp : tn) += 1;
    }
};

inline Rational rate(std::int64_t num, std::int64_t den, const char* name) {
    if (den <= 0) throw Error(ErrorKind::UndefinedMetric, std::string(name) + " has a zero denominator");
    return Rational::make(num, den);
}

struct VerificationMetrics {
    Rational far, frr, hter, ac, tpr;
};

/// FAR = FP/(FP+TN), FRR = FN/(TP+FN), HTER = (FAR+FRR)/2,
/// AC = (TP+TN)/total, TPR = TP/(TP+FN). All exact.
inline VerificationMetrics verification_metrics(const BinaryCounts& c) {
    VerificationMetrics m;
    m.far = rate(c.fp, c.fp + c.tn, "FAR");
    m.frr = rate(c.fn, c.tp + c.fn, "FRR");
    m.hter = (m.far + m.frr) * Rational{1, 2};
    m.ac = rate(c.tp + c.tn, c.total(), "AC");
    m.tpr = rate(c.tp, c.tp + c.fn, "TPR");
    return m;
}

/// Per-cohort sensitivity: share of rows predicted as their true class.
inline Rational class_sensitivity(const BinaryCounts& c, bool client_rows) {
    return client_rows ? rate(c.tp, c.tp + c.fn, "client TPR") : rate(c.tn, c.fp + c.tn, "imposter TPR");
}

// ---------------------------------------------------------------------------
// Identification

/// counts[true][predicted] over a fixed, ordered label set.
struct MultiConfusion {
    std::vector<std::string> labels;
    std::vector<std::vector<std::int64_t>> counts;

    explicit MultiConfusion(std::vector<std::string> l = {})
        : labels(std::move(l)), counts(labels.size(), std::vector<std::int64_t>(labels.size(), 0)) {}

    std::size_t index_of(const std::string& label) const {
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == label) return i;
        throw Error(ErrorKind::InvalidArgument, "unknown class label " + label);
    }

    void add(const std::string& truth, const std::string& predicted) { ++counts[index_of(truth)][index_of(predicted)]; }

    std::int64_t total() const {
        std::int64_t s = 0;
        for (const auto& r : counts)
            for (auto v : r) s += v;
        return s;
    }
};

struct IdentificationMetrics {
    std::vector<std::optional<Rational>> sensitivity; // empty when a class has no rows
    Rational ir;
    Rational chance_agreement; // pi_e
    Rational kappa;
};

/// SE_i = TP_i/(TP_i+FN_i), IR = sum TP_i / N,
/// pi_e = sum (TP_i+FP_i)(TP_i+FN_i) / N^2, kappa = (IR - pi_e)/(1 - pi_e).
inline IdentificationMetrics identification_metrics(const MultiConfusion& m) {
    const std::int64_t n = m.total();
    if (n <= 0) throw Error(ErrorKind::UndefinedMetric, "identification over zero segments");
    const std::size_t k = m.labels.size();
    IdentificationMetrics out;
    std::int64_t trace = 0, agreement = 0;
    for (std::size_t i = 0; i < k; ++i) {
        std::int64_t row = 0, col = 0;
        for (std::size_t j = 0; j < k; ++j) {
            row += m.counts[i][j];
            col += m.counts[j][i];
        }
        trace += m.counts[i][i];
        agreement += row * col;
        out.sensitivity.push_back(row > 0 ? std::optional<Rational>(Rational::make(m.counts[i][i], row)) : std::nullopt);
    }
    out.ir = Rational::make(trace, n);
    out.chance_agreement = Rational::make(agreement, n * n);
    if (agreement == n * n) throw Error(ErrorKind::UndefinedMetric, "kappa undefined when chance agreement is 1");
    out.kappa = Rational::make(trace * n - agreement, n * n - agreement);
    return out;
}

// ---------------------------------------------------------------------------
// Aggregation of per-run predictions

struct RunKey {
    Setup setup = Setup::R;
    std::string client;
    int day = 1;
    int trial = 1;

    auto key() const { return std::tie(setup, client, day, trial); }
    bool operator<(const RunKey& o) const { return key() < o.key(); }
    bool operator==(const RunKey& o) const { return key() == o.key(); }
};

inline RunKey run_key(const SplitPlan& p) { return RunKey{p.setup, p.client, p.day, p.trial}; }

struct Prediction {
    RunKey run;
    RowLabel source;
    Role role = Role::VC;
    int truth = -1;
    int predicted = -1;
};

/// Verification counts over several slicings. `overall`, `per_subject` and
/// `per_validation_day` cover the registered rows (VC + VI); never-enrolled
/// imposters appear only under `by_role[VIN]`.
struct VerificationSlices {
    BinaryCounts overall;
    std::map<Role, BinaryCounts> by_role;
    std::map<std::string, BinaryCounts> per_subject;
    std::map<int, BinaryCounts> per_validation_day;
    std::map<std::pair<std::string, int>, BinaryCounts> per_subject_day;
};

inline VerificationSlices aggregate(const std::vector<Prediction>& preds, const std::vector<SplitPlan>& plans) {
    std::set<RunKey> expected;
    for (const auto& p : plans)
        if (!expected.insert(run_key(p)).second)
            throw Error(ErrorKind::InconsistentRuns, "duplicate run for client " + p.client);
    std::set<RunKey> seen;
    std::set<std::tuple<RunKey, RowLabel, Role>> rows;
    VerificationSlices s;
    for (Role r : {Role::VC, Role::VI, Role::VIN}) s.by_role[r] = {};
    for (const auto& pr : preds) {
        if (!expected.contains(pr.run))
            throw Error(ErrorKind::InconsistentRuns, "prediction for unplanned run (client " + pr.run.client + ")");
        if (!rows.insert({pr.run, pr.source, pr.role}).second)
            throw Error(ErrorKind::InconsistentRuns, "row predicted twice in run of client " + pr.run.client);
        seen.insert(pr.run);
        BinaryCounts one;
        one.add(pr.truth, pr.predicted);
        s.by_role[pr.role] += one;
        if (pr.role == Role::VIN) continue;
        s.overall += one;
        s.per_subject[pr.run.client] += one;
        s.per_validation_day[pr.run.day] += one;
        s.per_subject_day[{pr.run.client, pr.run.day}] += one;
    }
    if (seen.size() != expected.size())
        throw Error(ErrorKind::InconsistentRuns, std::to_string(expected.size() - seen.size()) + " planned runs have no predictions");
    return s;
}

} // namespace earid

#endif
