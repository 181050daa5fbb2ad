// Copyright 2026 The earid Authors
// SPDX-License-Identifier: Apache-2.0
//
// earid gen | features | eval | report
//
// Exit codes: 0 success, 1 runtime error, 2 usage error.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "earid/earid.hpp"

namespace {

using namespace earid;

constexpr int kUsageError = 2;
constexpr int kRuntimeError = 1;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Validation failures before any work starts are usage errors.
template <class F>
void validate(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
}

std::string hex(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

int cmd_gen(const GeneratorConfig& cfg, const std::string& out) {
    validate([&] { check_generator_config(cfg); });
    const Dataset ds = generate_dataset(cfg, out);
    std::cout << "wrote " << ds.entries().size() << " recordings (" << ds.subjects(Cohort::R).size()
              << " cohort-R subjects, " << ds.subjects(Cohort::N).size() << " cohort-N subjects) to " << out << '\n'
              << "checksum " << hex(dataset_checksum(ds)) << '\n';
    return 0;
}

int cmd_features(const std::string& dataset, const std::string& out, const std::vector<double>& lengths,
                 const PipelineConfig& p) {
    validate([&] {
        if (lengths.empty()) throw Error(ErrorKind::InvalidArgument, "no segment length given");
        for (double l : lengths)
            if (!(l >= kEpochSeconds)) throw Error(ErrorKind::InvalidArgument, "segment length below 2 s");
    });
    const Dataset ds = load_dataset(dataset);
    const auto stores = extract_features(ds, lengths, p);
    fs::create_directories(out);
    for (const auto& [len, store] : stores) {
        std::vector<FeatureMatrix> mats;
        std::size_t rows = 0, dropped = 0;
        for (const auto& [ref, fm] : store) {
            mats.push_back(fm);
            rows += fm.size();
            dropped += fm.dropped.size();
        }
        const fs::path file = fs::path(out) / ("features_" + csv::format(len) + "s.csv");
        std::ofstream f(file, std::ios::binary);
        if (!f) throw Error(ErrorKind::Io, "cannot write " + file.string());
        write_feature_csv(f, mats);
        std::cout << file.string() << ": " << rows << " rows, " << dropped << " segments dropped\n";
    }
    return 0;
}

int cmd_eval(EvalConfig cfg) {
    validate([&] {
        check_config(cfg);
        if (cfg.output.empty()) throw Error(ErrorKind::InvalidArgument, "no output directory given");
    });
    const Dataset ds = load_dataset(cfg.dataset);
    run_evaluation(cfg, ds, cfg.output, &std::cerr);
    std::cout << "results in " << cfg.output.string() << '\n';
    return 0;
}

int cmd_report(const std::string& eval_dir, const std::string& out, const ReportOptions& opt) {
    write_report(eval_dir, out, opt);
    std::cout << "report in " << out << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"earid: in-ear EEG biometrics pipeline"};
    app.require_subcommand(1);

    // gen
    GeneratorConfig gen;
    std::string gen_out;
    bool no_drift = false;
    auto* g = app.add_subcommand("gen", "generate a synthetic dataset");
    g->add_option("--out", gen_out, "output directory")->required();
    g->add_option("--seed", gen.seed, "master seed");
    g->add_option("--subjects", gen.n_clients, "cohort-R subjects (clients)");
    g->add_option("--imposters", gen.n_imposters, "cohort-N subjects (never enrolled)");
    g->add_option("--days", gen.days, "recording days per cohort-R subject");
    g->add_option("--trials", gen.trials, "trials per day");
    g->add_option("--duration", gen.duration_s, "seconds per trial");
    g->add_option("--fs", gen.fs, "sampling rate in Hz");
    g->add_flag("--no-drift", no_drift, "disable inter-day drift");
    g->add_option("--max-peak-shift", gen.max_peak_shift_hz, "inter-day alpha peak shift bound in Hz");
    g->add_option("--artifact-rate", gen.artifact_rate, "fraction of 2 s epochs with a transient");

    // features
    std::string feat_dataset, feat_out;
    std::vector<double> feat_lengths{60};
    PipelineConfig feat_pipe;
    auto* f = app.add_subcommand("features", "extract per-segment feature matrices");
    f->add_option("--dataset", feat_dataset, "dataset directory")->required();
    f->add_option("--out", feat_out, "output directory")->required();
    f->add_option("--seg-len", feat_lengths, "segment lengths in seconds");
    f->add_option("--trim", feat_pipe.trim_seconds, "seconds dropped from each recording's head");
    f->add_option("--threshold", feat_pipe.artifact_threshold_uv, "epoch rejection threshold in microvolts");

    // eval
    std::string config_file, ev_dataset, ev_out, ev_features;
    std::vector<std::string> ev_setups, ev_classifiers, ev_feature_sets;
    std::vector<double> ev_lengths;
    std::optional<std::uint64_t> ev_seed;
    std::optional<double> ev_cos_threshold;
    bool ev_no_sn = false, ev_no_id = false;
    auto* e = app.add_subcommand("eval", "run verification and identification");
    e->add_option("--config", config_file, "key = value config file (flags override it)");
    e->add_option("--dataset", ev_dataset, "dataset directory");
    e->add_option("--out", ev_out, "output directory");
    e->add_option("--setup", ev_setups, "r and/or b");
    e->add_option("--seg-len", ev_lengths, "segment lengths in seconds");
    e->add_option("--classifier", ev_classifiers, "cos, lda and/or svm");
    e->add_option("--features", ev_feature_sets, "psd, ar and/or psd+ar");
    e->add_option("--seed", ev_seed, "master seed for SVM fold assignment");
    e->add_option("--cos-threshold", ev_cos_threshold, "open-set cosine distance threshold");
    e->add_flag("--no-sn", ev_no_sn, "skip never-enrolled imposters");
    e->add_flag("--no-identification", ev_no_id, "skip identification");

    // report
    std::string rep_eval, rep_out, rep_dataset;
    bool rep_no_psd = false;
    auto* r = app.add_subcommand("report", "summary tables and plot data from eval outputs");
    r->add_option("--eval", rep_eval, "evaluation directory")->required();
    r->add_option("--out", rep_out, "report directory (default: <eval>/report)");
    r->add_option("--dataset", rep_dataset, "dataset directory (default: the one evaluated)");
    r->add_flag("--no-psd", rep_no_psd, "skip PSD plot data");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? 0 : kUsageError;
    }

    try {
        if (g->parsed()) {
            gen.drift = !no_drift;
            return cmd_gen(gen, gen_out);
        }
        if (f->parsed()) return cmd_features(feat_dataset, feat_out, feat_lengths, feat_pipe);
        if (e->parsed()) {
            EvalConfig cfg;
            validate([&] {
                if (!config_file.empty()) cfg = load_config(config_file);
                if (!ev_dataset.empty()) cfg.dataset = ev_dataset;
                if (!ev_out.empty()) cfg.output = ev_out;
                if (!ev_setups.empty()) set_option(cfg, "setups", detail::join(ev_setups));
                if (!ev_classifiers.empty()) set_option(cfg, "classifiers", detail::join(ev_classifiers));
                if (!ev_feature_sets.empty()) set_option(cfg, "features", detail::join(ev_feature_sets));
                if (!ev_lengths.empty()) cfg.segment_lengths = ev_lengths;
                if (ev_seed) cfg.seed = *ev_seed;
                if (ev_cos_threshold) cfg.cos_threshold = ev_cos_threshold;
                if (ev_no_sn) cfg.include_sn = false;
                if (ev_no_id) cfg.identification = false;
            });
            return cmd_eval(cfg);
        }
        if (r->parsed()) {
            ReportOptions opt;
            if (!rep_dataset.empty()) opt.dataset = rep_dataset;
            opt.psd = !rep_no_psd;
            return cmd_report(rep_eval, rep_out.empty() ? (fs::path(rep_eval) / "report").string() : rep_out, opt);
        }
    } catch (const UsageError& err) {
        std::cerr << "error: " << err.what() << '\n' << "run with --help for usage\n";
        return kUsageError;
    } catch (const Error& err) {
        std::cerr << "error (" << to_string(err.kind()) << "): " << err.what() << '\n';
        return kRuntimeError;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kRuntimeError;
    }
    return kUsageError;
}
