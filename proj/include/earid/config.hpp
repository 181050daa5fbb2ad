// Copyright 2026 The earid Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EARID_CONFIG_HPP
#define EARID_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "classifiers.hpp"
#include "csv.hpp"
#include "error.hpp"
#include "features.hpp"
#include "protocol.hpp"
#include "signal.hpp"

namespace earid {

/// Everything `eval` needs. Plain text form is one `key = value` per line,
/// `#` starts a comment, lists are comma separated:
///
///     dataset = data/
///     setups = r, b
///     segment_lengths = 10, 20, 30, 60, 90
///     classifiers = cos, lda, svm
///     features = psd+ar
struct EvalConfig {
    std::filesystem::path dataset;
    std::filesystem::path output;
    std::vector<Setup> setups{Setup::R, Setup::B};
    std::vector<double> segment_lengths{10, 20, 30, 60, 90};
    std::vector<ClassifierKind> classifiers{ClassifierKind::Cosine, ClassifierKind::Lda, ClassifierKind::Svm};
    std::vector<FeatureSet> feature_sets{FeatureSet::PsdAr};
    bool include_sn = true;
    bool identification = true;
    std::uint64_t seed = 42;

    FilterSpec filter;
    double trim_seconds = 5.0;
    double artifact_threshold_uv = 50.0;

    double lda_shrinkage = kDefaultLdaShrinkage;
    SvmGrid svm_grid;
    std::size_t svm_folds = 5;
    double svm_tolerance = 1e-3;
    std::optional<double> svm_client_weight; // default: imposter subjects per client
    std::optional<double> cos_threshold;     // open-set rejection, off by default
};

namespace detail {

template <class T, class F>
std::vector<T> parse_list(std::string_view value, F&& one) {
    std::vector<T> out;
    for (const auto& item : csv::split(value)) {
        const auto t = csv::trim(item);
        if (t.empty()) continue;
        out.push_back(one(t));
    }
    return out;
}

inline bool parse_bool(std::string_view v) {
    if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
    if (v == "false" || v == "no" || v == "0" || v == "off") return false;
    throw Error(ErrorKind::Parse, "not a boolean: '" + std::string(v) + "'");
}

inline std::string join(const std::vector<std::string>& parts) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? ", " : "") + parts[i];
    return out;
}

} // namespace detail

/// Applies one setting. Unknown keys are errors so typos do not go unnoticed.
inline void set_option(EvalConfig& cfg, std::string_view key, std::string_view value) {
    using detail::parse_list;
    const auto num = [](std::string_view s) { return csv::to_double(s); };
    if (key == "dataset") cfg.dataset = std::string(value);
    else if (key == "output") cfg.output = std::string(value);
    else if (key == "setups") cfg.setups = parse_list<Setup>(value, parse_setup);
    else if (key == "segment_lengths") cfg.segment_lengths = parse_list<double>(value, num);
    else if (key == "classifiers") cfg.classifiers = parse_list<ClassifierKind>(value, parse_classifier);
    else if (key == "features") cfg.feature_sets = parse_list<FeatureSet>(value, parse_feature_set);
    else if (key == "include_sn") cfg.include_sn = detail::parse_bool(value);
    else if (key == "identification") cfg.identification = detail::parse_bool(value);
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(csv::to_int(value));
    else if (key == "filter_order") cfg.filter.order = static_cast<int>(csv::to_int(value));
    else if (key == "filter_low_hz") cfg.filter.low_hz = num(value);
    else if (key == "filter_high_hz") cfg.filter.high_hz = num(value);
    else if (key == "trim_seconds") cfg.trim_seconds = num(value);
    else if (key == "artifact_threshold_uv") cfg.artifact_threshold_uv = num(value);
    else if (key == "lda_shrinkage") cfg.lda_shrinkage = num(value);
    else if (key == "svm_C") cfg.svm_grid.C = parse_list<double>(value, num);
    else if (key == "svm_gamma") cfg.svm_grid.gamma = parse_list<double>(value, num);
    else if (key == "svm_degree")
        cfg.svm_grid.degree = parse_list<int>(value, [](std::string_view s) { return static_cast<int>(csv::to_int(s)); });
    else if (key == "svm_kernels") cfg.svm_grid.kernels = parse_list<Kernel>(value, parse_kernel);
    else if (key == "svm_folds") cfg.svm_folds = static_cast<std::size_t>(csv::to_int(value));
    else if (key == "svm_tolerance") cfg.svm_tolerance = num(value);
    else if (key == "svm_client_weight") cfg.svm_client_weight = num(value);
    else if (key == "cos_threshold") cfg.cos_threshold = num(value);
    else throw Error(ErrorKind::Parse, "unknown config key '" + std::string(key) + "'");
}

inline void parse_config(std::istream& in, EvalConfig& cfg, std::string_view what = "config") {
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view s = line;
        if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
        s = csv::trim(s);
        if (s.empty()) continue;
        const auto eq = s.find('=');
        if (eq == std::string_view::npos)
            throw Error(ErrorKind::Parse, std::string(what) + ":" + std::to_string(lineno) + ": expected key = value");
        try {
            set_option(cfg, csv::trim(s.substr(0, eq)), csv::trim(s.substr(eq + 1)));
        } catch (const Error& e) {
            throw Error(e.kind(), std::string(what) + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
}

inline EvalConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open config " + path.string());
    EvalConfig cfg;
    parse_config(in, cfg, path.string());
    return cfg;
}

inline void check_config(const EvalConfig& cfg) {
    auto bad = [](const std::string& m) { throw Error(ErrorKind::InvalidArgument, m); };
    if (cfg.dataset.empty()) bad("no dataset given");
    if (cfg.setups.empty()) bad("no setup selected");
    if (cfg.segment_lengths.empty()) bad("no segment length selected");
    if (cfg.classifiers.empty()) bad("no classifier selected");
    if (cfg.feature_sets.empty()) bad("no feature set selected");
    for (double l : cfg.segment_lengths)
        if (!(l >= kEpochSeconds)) bad("segment length must be at least one 2 s epoch");
    if (cfg.trim_seconds < 0.0) bad("trim_seconds must be non-negative");
    if (!(cfg.artifact_threshold_uv > 0.0)) bad("artifact threshold must be positive");
    if (cfg.lda_shrinkage < 0.0 || cfg.lda_shrinkage > 1.0) bad("lda_shrinkage must lie in [0, 1]");
    if (cfg.svm_folds < 2) bad("svm_folds must be at least 2");
    if (!(cfg.svm_tolerance > 0.0)) bad("svm_tolerance must be positive");
    if (cfg.svm_client_weight && !(*cfg.svm_client_weight > 0.0)) bad("svm_client_weight must be positive");
    if (cfg.svm_grid.settings().empty()) bad("empty SVM grid");
}

/// Canonical dump, readable back by parse_config.
inline void write_config(std::ostream& out, const EvalConfig& cfg) {
    std::vector<std::string> parts;
    auto list = [&](auto const& values, auto&& fmt) {
        parts.clear();
        for (const auto& v : values) parts.push_back(fmt(v));
        return detail::join(parts);
    };
    const auto num = [](double v) { return csv::format(v); };
    out << "dataset = " << cfg.dataset.string() << '\n'
        << "output = " << cfg.output.string() << '\n'
        << "setups = " << list(cfg.setups, [](Setup s) { return std::string(1, setup_char(s)); }) << '\n'
        << "segment_lengths = " << list(cfg.segment_lengths, num) << '\n'
        << "classifiers = " << list(cfg.classifiers, [](ClassifierKind k) { return to_string(k); }) << '\n'
        << "features = " << list(cfg.feature_sets, [](FeatureSet f) { return to_string(f); }) << '\n'
        << "include_sn = " << (cfg.include_sn ? "true" : "false") << '\n'
        << "identification = " << (cfg.identification ? "true" : "false") << '\n'
        << "seed = " << cfg.seed << '\n'
        << "filter_order = " << cfg.filter.order << '\n'
        << "filter_low_hz = " << num(cfg.filter.low_hz) << '\n'
        << "filter_high_hz = " << num(cfg.filter.high_hz) << '\n'
        << "trim_seconds = " << num(cfg.trim_seconds) << '\n'
        << "artifact_threshold_uv = " << num(cfg.artifact_threshold_uv) << '\n'
        << "lda_shrinkage = " << num(cfg.lda_shrinkage) << '\n'
        << "svm_kernels = " << list(cfg.svm_grid.kernels, [](Kernel k) { return to_string(k); }) << '\n'
        << "svm_C = " << list(cfg.svm_grid.C, num) << '\n'
        << "svm_gamma = " << list(cfg.svm_grid.gamma, num) << '\n'
        << "svm_degree = " << list(cfg.svm_grid.degree, [](int d) { return std::to_string(d); }) << '\n'
        << "svm_folds = " << cfg.svm_folds << '\n'
        << "svm_tolerance = " << num(cfg.svm_tolerance) << '\n';
    if (cfg.svm_client_weight) out << "svm_client_weight = " << num(*cfg.svm_client_weight) << '\n';
    if (cfg.cos_threshold) out << "cos_threshold = " << num(*cfg.cos_threshold) << '\n';
}

} // namespace earid

#endif
