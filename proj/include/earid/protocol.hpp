// Copyright 2026 The earid Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EARID_PROTOCOL_HPP
#define EARID_PROTOCOL_HPP

#include <algorithm>
#include <cstddef>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "dataset.hpp"
#include "error.hpp"
#include "features.hpp"
#include "matrix.hpp"

namespace earid {

/// R: training never shares a recording day with validation.
/// B: the client-day's other trials are mixed into training.
enum class Setup { R, B };

inline char setup_char(Setup s) { return s == Setup::R ? 'R' : 'B'; }

inline Setup parse_setup(std::string_view s) {
    if (s == "r" || s == "R") return Setup::R;
    if (s == "b" || s == "B") return Setup::B;
    throw Error(ErrorKind::Parse, "unknown setup '" + std::string(s) + "'");
}

struct TrialRef {
    std::string subject;
    int day = 1;
    int trial = 1;

    auto key() const { return std::tie(subject, day, trial); }
    bool operator==(const TrialRef& o) const { return key() == o.key(); }
    bool operator<(const TrialRef& o) const { return key() < o.key(); }
};

/// Validation row roles: the client's trial, registered imposters, and
/// never-enrolled imposters.
enum class Role { VC, VI, VIN };

inline const char* role_name(Role r) {
    switch (r) {
    case Role::VC: return "VC";
    case Role::VI: return "VI";
    case Role::VIN: return "VIN";
    }
    return "?";
}

/// Matrix-row sources for one validation run (client i, day j, trial k).
struct SplitPlan {
    Setup setup = Setup::R;
    int client_index = 1; // 1-based position among cohort-R subjects
    std::string client;
    int day = 1;
    int trial = 1;

    std::vector<TrialRef> train_client;    // Y_TC
    std::vector<TrialRef> train_imposter;  // Y_TI
    TrialRef validation_client;            // Y_VC
    std::vector<TrialRef> validation_imposter; // Y_VI
    std::vector<TrialRef> validation_sn;   // Y_VI_N

    /// Y_T sources in canonical (subject, day, trial) order. The order does
    /// not depend on which subject is the client.
    std::vector<TrialRef> training_sources() const {
        std::vector<TrialRef> all = train_client;
        all.insert(all.end(), train_imposter.begin(), train_imposter.end());
        std::sort(all.begin(), all.end());
        return all;
    }
};

namespace detail {

struct CohortLayout {
    std::vector<std::string> r_subjects;
    std::vector<std::string> n_subjects;
    std::set<int> r_days;
    std::set<int> r_trials;
    std::set<int> n_trials;
};

inline CohortLayout cohort_layout(const Dataset& ds) {
    CohortLayout out;
    out.r_subjects = ds.subjects(Cohort::R);
    out.n_subjects = ds.subjects(Cohort::N);
    for (const auto& e : ds.entries()) {
        if (e.cohort == Cohort::R) {
            out.r_days.insert(e.day);
            out.r_trials.insert(e.trial);
        } else {
            out.n_trials.insert(e.trial);
        }
    }
    return out;
}

} // namespace detail

/// Every cohort-R subject must have each (day, trial) seen in the cohort,
/// over exactly two days.
inline void check_complete_cohort(const Dataset& ds) {
    const auto layout = detail::cohort_layout(ds);
    if (layout.r_subjects.empty()) throw Error(ErrorKind::IncompleteCohort, "no cohort-R subjects");
    if (layout.r_days != std::set<int>{1, 2})
        throw Error(ErrorKind::IncompleteCohort, "cohort R must be recorded on exactly days 1 and 2");
    std::string missing;
    for (const auto& s : layout.r_subjects)
        for (int d : layout.r_days)
            for (int t : layout.r_trials)
                if (!ds.find(s, d, t))
                    missing += (missing.empty() ? "" : ", ") + std::string("(") + s + "," + std::to_string(d) + "," +
                               std::to_string(t) + ")";
    if (!missing.empty()) throw Error(ErrorKind::IncompleteCohort, "missing trials: " + missing);
}

inline SplitPlan make_split(Setup setup, const std::string& client, int day, int trial, const Dataset& ds) {
    const auto layout = detail::cohort_layout(ds);
    const auto& rs = layout.r_subjects;
    const auto pos = std::find(rs.begin(), rs.end(), client);
    if (pos == rs.end()) {
        if (std::find(layout.n_subjects.begin(), layout.n_subjects.end(), client) != layout.n_subjects.end())
            throw Error(ErrorKind::InvalidCohort, client + " belongs to the imposter-only cohort and cannot be a client");
        throw Error(ErrorKind::InvalidIndex, "unknown subject " + client);
    }
    if (layout.r_days != std::set<int>{1, 2})
        throw Error(ErrorKind::IncompleteCohort, "cohort R must be recorded on exactly days 1 and 2");
    if (!layout.r_days.contains(day) || !layout.r_trials.contains(trial))
        throw Error(ErrorKind::InvalidIndex, "no trial (" + client + "," + std::to_string(day) + "," + std::to_string(trial) + ")");

    SplitPlan plan;
    plan.setup = setup;
    plan.client_index = static_cast<int>(pos - rs.begin()) + 1;
    plan.client = client;
    plan.day = day;
    plan.trial = trial;
    const int other_day = day == 1 ? 2 : 1;

    for (const auto& s : rs) {
        auto& train = s == client ? plan.train_client : plan.train_imposter;
        for (int t : layout.r_trials) train.push_back({s, other_day, t});
        if (setup == Setup::B)
            for (int t : layout.r_trials)
                if (t != trial) train.push_back({s, day, t});
        if (s == client) plan.validation_client = {s, day, trial};
        else plan.validation_imposter.push_back({s, day, trial});
    }
    for (const auto& s : layout.n_subjects) {
        if (!layout.n_trials.contains(trial))
            throw Error(ErrorKind::InvalidIndex, "imposter-only subjects lack trial " + std::to_string(trial));
        plan.validation_sn.push_back({s, 1, trial});
    }
    return plan;
}

inline SplitPlan make_split(Setup setup, int client_index, int day, int trial, const Dataset& ds) {
    const auto rs = ds.subjects(Cohort::R);
    if (client_index < 1 || client_index > static_cast<int>(rs.size()))
        throw Error(ErrorKind::InvalidIndex, "client index " + std::to_string(client_index) + " out of range");
    return make_split(setup, rs[static_cast<std::size_t>(client_index - 1)], day, trial, ds);
}

/// One plan per (client, day, trial), ordered by client, then day, then trial.
inline std::vector<SplitPlan> enumerate_runs(Setup setup, const Dataset& ds) {
    check_complete_cohort(ds);
    const auto layout = detail::cohort_layout(ds);
    std::vector<SplitPlan> plans;
    for (const auto& s : layout.r_subjects)
        for (int d : layout.r_days)
            for (int t : layout.r_trials) plans.push_back(make_split(setup, s, d, t, ds));
    return plans;
}

/// Audit dump: one line per matrix-row source.
inline void write_plan_csv(std::ostream& out, const std::vector<SplitPlan>& plans) {
    out << "setup,client,day,trial,role,source_subject,source_day,source_trial\n";
    for (const auto& p : plans) {
        auto emit = [&](const char* role, const TrialRef& r) {
            out << setup_char(p.setup) << ',' << p.client << ',' << p.day << ',' << p.trial << ',' << role << ','
                << r.subject << ',' << r.day << ',' << r.trial << '\n';
        };
        for (const auto& r : p.train_client) emit("TC", r);
        for (const auto& r : p.train_imposter) emit("TI", r);
        emit("VC", p.validation_client);
        for (const auto& r : p.validation_imposter) emit("VI", r);
        for (const auto& r : p.validation_sn) emit("VIN", r);
    }
}

// ---------------------------------------------------------------------------
// Min-max normalization

struct NormalizationBounds {
    std::vector<double> min;
    std::vector<double> max;
};

inline NormalizationBounds fit_bounds(const Matrix& train) {
    if (train.empty()) throw Error(ErrorKind::InvalidArgument, "empty training matrix");
    NormalizationBounds b;
    b.min.assign(train.cols(), std::numeric_limits<double>::infinity());
    b.max.assign(train.cols(), -std::numeric_limits<double>::infinity());
    for (std::size_t r = 0; r < train.rows(); ++r)
        for (std::size_t c = 0; c < train.cols(); ++c) {
            b.min[c] = std::min(b.min[c], train(r, c));
            b.max[c] = std::max(b.max[c], train(r, c));
        }
    return b;
}

/// (x - min) / (max - min) per column, unclamped; a constant training
/// column maps every value to 0.
inline Matrix apply_bounds(const Matrix& m, const NormalizationBounds& b) {
    if (m.cols() != b.min.size()) throw Error(ErrorKind::InvalidArgument, "bounds width mismatch");
    Matrix out = m;
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) {
            const double span = b.max[c] - b.min[c];
            out(r, c) = span > 0.0 ? (m(r, c) - b.min[c]) / span : 0.0;
        }
    return out;
}

// ---------------------------------------------------------------------------
// Assembly of feature rows for one run

using FeatureStore = std::map<TrialRef, FeatureMatrix>;

struct ValidationRow {
    RowLabel source;
    Role role = Role::VC;
};

/// Normalized training and validation matrices of one run. Labels: +1
/// client, -1 imposter.
struct RunData {
    Matrix train;
    std::vector<int> train_labels;
    std::vector<std::string> train_subjects;
    Matrix validation;
    std::vector<ValidationRow> validation_rows;
    NormalizationBounds bounds;
};

inline const FeatureMatrix& lookup(const FeatureStore& store, const TrialRef& r) {
    const auto it = store.find(r);
    if (it == store.end())
        throw Error(ErrorKind::MissingFile, "no features for (" + r.subject + "," + std::to_string(r.day) + "," +
                                                std::to_string(r.trial) + ")");
    return it->second;
}

inline RunData assemble_run(const SplitPlan& plan, const FeatureStore& store, const std::vector<std::size_t>& columns,
                            bool include_sn) {
    RunData run;
    std::vector<double> buf(columns.size());
    auto take = [&](const FeatureVector& v) {
        for (std::size_t i = 0; i < columns.size(); ++i) buf[i] = v[columns[i]];
        return std::span<const double>(buf);
    };

    Matrix raw_train(0, columns.size());
    for (const auto& src : plan.training_sources()) {
        const auto& fm = lookup(store, src);
        for (const auto& row : fm.rows) {
            raw_train.push_row(take(row));
            run.train_labels.push_back(src.subject == plan.client ? 1 : -1);
            run.train_subjects.push_back(src.subject);
        }
    }
    Matrix raw_val(0, columns.size());
    auto add_validation = [&](const TrialRef& src, Role role) {
        const auto& fm = lookup(store, src);
        for (std::size_t r = 0; r < fm.rows.size(); ++r) {
            raw_val.push_row(take(fm.rows[r]));
            run.validation_rows.push_back({fm.labels[r], role});
        }
    };
    add_validation(plan.validation_client, Role::VC);
    for (const auto& src : plan.validation_imposter) add_validation(src, Role::VI);
    if (include_sn)
        for (const auto& src : plan.validation_sn) add_validation(src, Role::VIN);

    run.bounds = fit_bounds(raw_train);
    run.train = apply_bounds(raw_train, run.bounds);
    run.validation = apply_bounds(raw_val, run.bounds);
    return run;
}

} // namespace earid

#endif
