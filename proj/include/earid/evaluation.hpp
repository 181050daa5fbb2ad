// Copyright 2026 The earid Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EARID_EVALUATION_HPP
#define EARID_EVALUATION_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "classifiers.hpp"
#include "config.hpp"
#include "csv.hpp"
#include "dataset.hpp"
#include "error.hpp"
#include "features.hpp"
#include "metrics.hpp"
#include "parallel.hpp"
#include "protocol.hpp"
#include "rng.hpp"
#include "signal.hpp"

namespace earid {

struct PipelineConfig {
    FilterSpec filter;
    double trim_seconds = 5.0;
    double artifact_threshold_uv = 50.0;
};

inline PipelineConfig pipeline_of(const EvalConfig& cfg) {
    return PipelineConfig{cfg.filter, cfg.trim_seconds, cfg.artifact_threshold_uv};
}

/// Bandpass the whole recording, then drop the head. Trimming after the
/// causal filter also discards its start-up transient.
inline Recording preprocess(const Recording& rec, const PipelineConfig& p) {
    return trim_head(filter_recording(rec, design_bandpass(p.filter, rec.fs)), p.trim_seconds);
}

/// One feature store per segment length, covering every recording.
inline std::map<double, FeatureStore> extract_features(const Dataset& ds, const std::vector<double>& lengths,
                                                       const PipelineConfig& p, unsigned threads = worker_count()) {
    const auto& entries = ds.entries();
    std::vector<std::vector<FeatureMatrix>> slots(entries.size());
    parallel_for(
        entries.size(),
        [&](std::size_t i) {
            const Recording rec = preprocess(ds.load(entries[i]), p);
            for (double len : lengths) {
                if (len > rec.duration())
                    throw Error(ErrorKind::InvalidArgument, "segment length " + csv::format(len) +
                                                                " s exceeds the trimmed recording of " + rec.subject);
                slots[i].push_back(build_feature_matrix(rec, {len, p.artifact_threshold_uv}));
            }
        },
        threads);
    std::map<double, FeatureStore> out;
    for (std::size_t i = 0; i < entries.size(); ++i)
        for (std::size_t l = 0; l < lengths.size(); ++l)
            out[lengths[l]][TrialRef{entries[i].subject, entries[i].day, entries[i].trial}] = std::move(slots[i][l]);
    return out;
}

// ---------------------------------------------------------------------------
// Verification cells

struct Cell {
    Setup setup = Setup::R;
    double segment_seconds = 60.0;
    ClassifierKind classifier = ClassifierKind::Cosine;
    FeatureSet features = FeatureSet::PsdAr;

    std::string name() const {
        return std::string(1, setup_char(setup)) + "_" + csv::format(segment_seconds) + "s_" + to_string(classifier) +
               "_" + to_string(features);
    }
};

struct RunRecord {
    RunKey run;
    std::size_t train_rows = 0;
    std::size_t validation_rows = 0;
    std::string model; // tuned SVM setting, empty otherwise
};

struct CellResult {
    Cell cell;
    std::vector<Prediction> predictions; // run order, then validation row order
    std::vector<RunRecord> runs;
    VerificationSlices slices;
};

inline std::uint64_t run_seed(std::uint64_t master, const SplitPlan& plan, double segment_seconds) {
    return derive_seed(master, {3, static_cast<std::uint64_t>(setup_char(plan.setup)),
                                static_cast<std::uint64_t>(std::llround(segment_seconds * 1000.0)),
                                static_cast<std::uint64_t>(plan.client_index), static_cast<std::uint64_t>(plan.day),
                                static_cast<std::uint64_t>(plan.trial)});
}

inline std::string describe(const SvmHyper& h) {
    std::string s = to_string(h.kernel) + " C=" + csv::format(h.C);
    if (h.kernel != Kernel::Linear) s += " gamma=" + csv::format(h.gamma);
    if (h.kernel == Kernel::Polynomial) s += " d=" + std::to_string(h.degree);
    return s;
}

inline CellResult run_cell(const Cell& cell, const std::vector<SplitPlan>& plans, const FeatureStore& store,
                           const EvalConfig& cfg, std::size_t n_clients, unsigned threads = worker_count()) {
    const auto columns = feature_columns(cell.features);
    std::vector<std::vector<Prediction>> preds(plans.size());
    std::vector<RunRecord> records(plans.size());
    parallel_for(
        plans.size(),
        [&](std::size_t r) {
            const SplitPlan& plan = plans[r];
            const RunData data = assemble_run(plan, store, columns, cfg.include_sn);
            TrainOptions opt;
            opt.lda_shrinkage = cfg.lda_shrinkage;
            opt.svm.client_weight = cfg.svm_client_weight.value_or(static_cast<double>(n_clients) - 1.0);
            opt.svm.tolerance = cfg.svm_tolerance;
            opt.grid = cfg.svm_grid;
            opt.folds = cfg.svm_folds;
            opt.seed = run_seed(cfg.seed, plan, cell.segment_seconds);
            const TrainedClassifier model = train_classifier(cell.classifier, data.train, data.train_labels, opt);

            RunRecord& rec = records[r];
            rec.run = run_key(plan);
            rec.train_rows = data.train.rows();
            rec.validation_rows = data.validation.rows();
            if (const auto* svm = std::get_if<SvmModel>(&model)) rec.model = describe(svm->hyper);

            const auto* cos = std::get_if<CosineTemplate<int>>(&model);
            auto& out = preds[r];
            out.reserve(data.validation.rows());
            for (std::size_t i = 0; i < data.validation.rows(); ++i) {
                const auto v = data.validation.row(i);
                const int predicted = cos && cfg.cos_threshold ? cosine_nn_predict(*cos, v, *cfg.cos_threshold, -1)
                                                               : predict(model, v);
                const auto& row = data.validation_rows[i];
                out.push_back(Prediction{rec.run, row.source, row.role, row.role == Role::VC ? 1 : -1, predicted});
            }
        },
        threads);

    CellResult res;
    res.cell = cell;
    res.runs = std::move(records);
    for (auto& p : preds) res.predictions.insert(res.predictions.end(), p.begin(), p.end());
    res.slices = aggregate(res.predictions, plans);
    return res;
}

// ---------------------------------------------------------------------------
// Identification

struct IdentificationResult {
    Setup setup = Setup::R;
    double segment_seconds = 60.0;
    FeatureSet features = FeatureSet::PsdAr;
    MultiConfusion confusion;
    IdentificationMetrics metrics;
    double se_mean = 0.0;
    double se_stderr = 0.0; // standard error of the per-subject SE values
};

/// One-to-many matching with the cosine nearest neighbour. For every
/// (day, trial) the template is the training matrix of that split labeled
/// by subject, and the queries are all cohort-R subjects' (day, trial)
/// segments. Training rows do not depend on the client, so the first
/// client's plan stands for all of them.
inline IdentificationResult run_identification(Setup setup, double segment_seconds, FeatureSet features,
                                               const std::vector<SplitPlan>& plans, const FeatureStore& store,
                                               const std::vector<std::string>& subjects,
                                               unsigned threads = worker_count()) {
    std::vector<const SplitPlan*> reps;
    for (const auto& p : plans)
        if (p.client_index == 1) reps.push_back(&p);
    const auto columns = feature_columns(features);

    std::vector<std::vector<std::pair<std::string, std::string>>> slots(reps.size());
    parallel_for(
        reps.size(),
        [&](std::size_t r) {
            const RunData data = assemble_run(*reps[r], store, columns, false);
            const auto tmpl = make_cosine_template(data.train, data.train_subjects);
            for (std::size_t i = 0; i < data.validation.rows(); ++i)
                slots[r].emplace_back(data.validation_rows[i].source.subject, identify(tmpl, data.validation.row(i)));
        },
        threads);

    IdentificationResult res;
    res.setup = setup;
    res.segment_seconds = segment_seconds;
    res.features = features;
    res.confusion = MultiConfusion(subjects);
    for (const auto& s : slots)
        for (const auto& [truth, predicted] : s) res.confusion.add(truth, predicted);
    res.metrics = identification_metrics(res.confusion);

    std::vector<double> se;
    for (const auto& v : res.metrics.sensitivity)
        if (v) se.push_back(v->value());
    double sum = 0.0;
    for (double v : se) sum += v;
    res.se_mean = se.empty() ? 0.0 : sum / static_cast<double>(se.size());
    if (se.size() > 1) {
        double ss = 0.0;
        for (double v : se) ss += (v - res.se_mean) * (v - res.se_mean);
        res.se_stderr = std::sqrt(ss / static_cast<double>(se.size() - 1)) / std::sqrt(static_cast<double>(se.size()));
    }
    return res;
}

// ---------------------------------------------------------------------------
// Output

namespace detail {

inline std::ofstream open_out(const fs::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + p.string());
    return out;
}

/// Rendered metric or NA when its denominator is zero.
template <class F>
std::string metric_or_na(F&& f) {
    try {
        return render_percent(f());
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::UndefinedMetric) throw;
        return "NA";
    }
}

inline std::string counts_fields(const BinaryCounts& c) {
    return std::to_string(c.tp) + "," + std::to_string(c.fn) + "," + std::to_string(c.fp) + "," + std::to_string(c.tn);
}

inline std::string rate_fields(const BinaryCounts& c) {
    const auto far = [&] { return rate(c.fp, c.fp + c.tn, "FAR"); };
    const auto frr = [&] { return rate(c.fn, c.tp + c.fn, "FRR"); };
    const auto hter = [&] { return (far() + frr()) * Rational{1, 2}; };
    const auto ac = [&] { return rate(c.tp + c.tn, c.total(), "AC"); };
    return metric_or_na(far) + "," + metric_or_na(frr) + "," + metric_or_na(hter) + "," + metric_or_na(ac);
}

inline std::string cell_fields(const Cell& c) {
    return std::string(1, setup_char(c.setup)) + "," + csv::format(c.segment_seconds) + "," + to_string(c.classifier) +
           "," + to_string(c.features);
}

} // namespace detail

inline const char* verification_header() {
    return "setup,segment_s,classifier,features,TP,FN,FP,TN,FAR,FRR,HTER,AC";
}
inline const char* cohort_header() {
    return "setup,segment_s,classifier,features,cohort,total,predicted_client,predicted_imposter,TPR";
}
inline const char* identification_header() {
    return "setup,segment_s,features,segments,correct,IR,kappa,SE_mean,SE_stderr";
}
inline const char* identification_subject_header() { return "setup,segment_s,features,subject,segments,correct,SE"; }

/// cells/<name>/{predictions,runs,counts,metrics}.csv
inline void write_cell(const fs::path& dir, const CellResult& res) {
    fs::create_directories(dir);
    {
        auto out = detail::open_out(dir / "predictions.csv");
        out << "setup,client,day,trial,role,source_subject,source_day,source_trial,source_segment,truth,predicted\n";
        for (const auto& p : res.predictions)
            out << setup_char(p.run.setup) << ',' << p.run.client << ',' << p.run.day << ',' << p.run.trial << ','
                << role_name(p.role) << ',' << p.source.subject << ',' << p.source.day << ',' << p.source.trial << ','
                << p.source.segment << ',' << p.truth << ',' << p.predicted << '\n';
    }
    {
        auto out = detail::open_out(dir / "runs.csv");
        out << "client,day,trial,train_rows,validation_rows,model\n";
        for (const auto& r : res.runs)
            out << r.run.client << ',' << r.run.day << ',' << r.run.trial << ',' << r.train_rows << ','
                << r.validation_rows << ',' << r.model << '\n';
    }
    std::vector<std::pair<std::string, BinaryCounts>> slices;
    slices.emplace_back("overall,all", res.slices.overall);
    for (const auto& [role, c] : res.slices.by_role) slices.emplace_back(std::string("cohort,") + role_name(role), c);
    for (const auto& [day, c] : res.slices.per_validation_day)
        slices.emplace_back("validation_day," + std::to_string(day), c);
    for (const auto& [subject, c] : res.slices.per_subject) slices.emplace_back("subject," + subject, c);
    for (const auto& [key, c] : res.slices.per_subject_day)
        slices.emplace_back("subject_day," + key.first + "/" + std::to_string(key.second), c);
    {
        auto out = detail::open_out(dir / "counts.csv");
        out << "slice,key,TP,FN,FP,TN\n";
        for (const auto& [name, c] : slices) out << name << ',' << detail::counts_fields(c) << '\n';
    }
    {
        auto out = detail::open_out(dir / "metrics.csv");
        out << "slice,key,FAR,FRR,HTER,AC\n";
        for (const auto& [name, c] : slices) out << name << ',' << detail::rate_fields(c) << '\n';
    }
}

inline std::string verification_row(const CellResult& r) {
    return detail::cell_fields(r.cell) + "," + detail::counts_fields(r.slices.overall) + "," +
           detail::rate_fields(r.slices.overall);
}

/// Client rows report TP/(TP+FN); imposter cohorts report TN/(FP+TN).
inline std::vector<std::string> cohort_rows(const CellResult& r) {
    std::vector<std::string> out;
    for (const auto& [role, c] : r.slices.by_role) {
        if (c.total() == 0) continue;
        const bool clients = role == Role::VC;
        out.push_back(detail::cell_fields(r.cell) + "," + role_name(role) + "," + std::to_string(c.total()) + "," +
                      std::to_string(c.tp + c.fp) + "," + std::to_string(c.fn + c.tn) + "," +
                      detail::metric_or_na([&] { return class_sensitivity(c, clients); }));
    }
    return out;
}

inline std::string identification_row(const IdentificationResult& r) {
    const auto& m = r.metrics;
    return std::string(1, setup_char(r.setup)) + "," + csv::format(r.segment_seconds) + "," + to_string(r.features) +
           "," + std::to_string(r.confusion.total()) + "," + std::to_string(m.ir.num * r.confusion.total() / m.ir.den) +
           "," + render_percent(m.ir) + "," + render_decimal(m.kappa, 4) + "," +
           render_decimal(Rational::make(std::llround(r.se_mean * 1e6), 1000000), 4) + "," +
           render_decimal(Rational::make(std::llround(r.se_stderr * 1e6), 1000000), 4);
}

inline std::vector<std::string> identification_subject_rows(const IdentificationResult& r) {
    std::vector<std::string> out;
    const std::string prefix =
        std::string(1, setup_char(r.setup)) + "," + csv::format(r.segment_seconds) + "," + to_string(r.features) + ",";
    for (std::size_t i = 0; i < r.confusion.labels.size(); ++i) {
        std::int64_t n = 0;
        for (auto v : r.confusion.counts[i]) n += v;
        const auto& se = r.metrics.sensitivity[i];
        out.push_back(prefix + r.confusion.labels[i] + "," + std::to_string(n) + "," +
                      std::to_string(r.confusion.counts[i][i]) + "," + (se ? render_percent(*se) : "NA"));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Whole evaluation

struct EvalSummary {
    std::vector<std::string> verification;
    std::vector<std::string> cohorts;
    std::vector<std::string> identification;
    std::vector<std::string> identification_subjects;
};

/// Runs every (setup x segment length x classifier x feature set) cell and,
/// when enabled, identification per (setup x segment length x feature set).
/// Each cell is written as soon as it finishes; `FAILED` marks an
/// interrupted output directory.
inline EvalSummary run_evaluation(const EvalConfig& cfg, const Dataset& ds, const fs::path& out_dir,
                                  std::ostream* log = nullptr, unsigned threads = worker_count()) {
    check_config(cfg);
    fs::create_directories(out_dir);
    const fs::path failed = out_dir / "FAILED";
    fs::remove(failed);
    try {
        const auto subjects = ds.subjects(Cohort::R);
        std::map<Setup, std::vector<SplitPlan>> plans;
        for (Setup s : cfg.setups) plans[s] = enumerate_runs(s, ds);
        if (log) *log << "extracting features for " << ds.entries().size() << " recordings\n";
        const auto stores = extract_features(ds, cfg.segment_lengths, pipeline_of(cfg), threads);
        {
            auto out = detail::open_out(out_dir / "config.txt");
            write_config(out, cfg);
        }

        EvalSummary sum;
        for (Setup setup : cfg.setups) {
            {
                auto out = detail::open_out(out_dir / (std::string("plans_") + setup_char(setup) + ".csv"));
                write_plan_csv(out, plans[setup]);
            }
            for (double len : cfg.segment_lengths)
                for (FeatureSet fset : cfg.feature_sets) {
                    for (ClassifierKind kind : cfg.classifiers) {
                        const Cell cell{setup, len, kind, fset};
                        if (log) *log << "cell " << cell.name() << '\n';
                        const CellResult res = run_cell(cell, plans[setup], stores.at(len), cfg, subjects.size(), threads);
                        write_cell(out_dir / "cells" / cell.name(), res);
                        sum.verification.push_back(verification_row(res));
                        for (auto& row : cohort_rows(res)) sum.cohorts.push_back(std::move(row));
                    }
                    if (cfg.identification) {
                        if (log)
                            *log << "identification " << setup_char(setup) << ' ' << csv::format(len) << "s "
                                 << to_string(fset) << '\n';
                        const auto id =
                            run_identification(setup, len, fset, plans[setup], stores.at(len), subjects, threads);
                        sum.identification.push_back(identification_row(id));
                        for (auto& row : identification_subject_rows(id))
                            sum.identification_subjects.push_back(std::move(row));
                    }
                }
        }

        auto write_table = [&](const char* file, const char* header, const std::vector<std::string>& rows) {
            auto out = detail::open_out(out_dir / file);
            out << header << '\n';
            for (const auto& r : rows) out << r << '\n';
        };
        write_table("verification.csv", verification_header(), sum.verification);
        write_table("cohorts.csv", cohort_header(), sum.cohorts);
        if (cfg.identification) {
            write_table("identification.csv", identification_header(), sum.identification);
            write_table("identification_subjects.csv", identification_subject_header(), sum.identification_subjects);
        }
        {
            auto out = detail::open_out(out_dir / "summary.txt");
            out << "dataset checksum " << std::hex << dataset_checksum(ds) << std::dec << '\n'
                << "recordings " << ds.entries().size() << ", cohort-R subjects " << subjects.size() << '\n'
                << "cells " << sum.verification.size() << "\n\n"
                << verification_header() << '\n';
            for (const auto& r : sum.verification) out << r << '\n';
            if (cfg.identification) {
                out << '\n' << identification_header() << '\n';
                for (const auto& r : sum.identification) out << r << '\n';
            }
        }
        return sum;
    } catch (const std::exception& e) {
        std::ofstream mark(failed);
        mark << e.what() << '\n';
        throw;
    }
}

} // namespace earid

#endif
