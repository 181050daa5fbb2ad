// Copyright 2026 The earid Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EARID_REPORT_HPP
#define EARID_REPORT_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "config.hpp"
#include "csv.hpp"
#include "dataset.hpp"
#include "error.hpp"
#include "evaluation.hpp"
#include "parallel.hpp"
#include "spectral.hpp"

namespace earid {

inline constexpr double kPlotWindowSeconds = 20.0;
inline constexpr double kPlotOverlap = 0.5;
inline constexpr double kPlotMaxHz = 30.0;

/// Per (subject, day, channel): mean 20 s / 50 % overlap Welch PSD of the
/// preprocessed recordings of that day, 0-30 Hz.
struct PsdCurve {
    std::string subject;
    Cohort cohort = Cohort::R;
    int day = 1;
    std::size_t channel = 0;
    std::vector<double> frequencies;
    std::vector<double> power;
};

inline std::vector<PsdCurve> psd_plot_data(const Dataset& ds, const PipelineConfig& p,
                                           unsigned threads = worker_count()) {
    std::map<std::tuple<std::string, int>, std::vector<const ManifestEntry*>> groups;
    for (const auto& e : ds.entries()) groups[{e.subject, e.day}].push_back(&e);
    std::vector<std::vector<const ManifestEntry*>> jobs;
    for (auto& [key, g] : groups) jobs.push_back(g);

    std::vector<std::array<PsdCurve, kChannels>> slots(jobs.size());
    parallel_for(
        jobs.size(),
        [&](std::size_t j) {
            auto& curves = slots[j];
            for (const ManifestEntry* e : jobs[j]) {
                const Recording rec = preprocess(ds.load(*e), p);
                for (std::size_t c = 0; c < kChannels; ++c) {
                    const Psd psd = welch(rec.channels[c], rec.fs, kPlotWindowSeconds, kPlotOverlap);
                    auto& curve = curves[c];
                    if (curve.frequencies.empty()) {
                        curve.subject = e->subject;
                        curve.cohort = e->cohort;
                        curve.day = e->day;
                        curve.channel = c;
                        for (std::size_t b = 0; b < psd.frequencies.size() && psd.frequencies[b] <= kPlotMaxHz + 1e-9; ++b)
                            curve.frequencies.push_back(psd.frequencies[b]);
                        curve.power.assign(curve.frequencies.size(), 0.0);
                    }
                    for (std::size_t b = 0; b < curve.power.size(); ++b) curve.power[b] += psd.power[b];
                }
            }
            for (auto& curve : curves)
                for (double& v : curve.power) v /= static_cast<double>(jobs[j].size());
        },
        threads);

    std::vector<PsdCurve> out;
    for (auto& s : slots)
        for (auto& c : s) out.push_back(std::move(c));
    return out;
}

inline void write_psd_plot_csv(std::ostream& out, const std::vector<PsdCurve>& curves) {
    out << "subject,cohort,day,channel,freq_hz,power\n";
    for (const auto& c : curves)
        for (std::size_t b = 0; b < c.frequencies.size(); ++b)
            out << c.subject << ',' << cohort_char(c.cohort) << ',' << c.day << ",ch" << c.channel + 1 << ','
                << csv::format(c.frequencies[b]) << ',' << csv::format(c.power[b]) << '\n';
}

namespace detail {

inline csv::Table read_table(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error(ErrorKind::MissingFile, "cannot open " + p.string());
    return csv::read(in, p.string());
}

inline std::size_t column(const csv::Table& t, const std::string& name) {
    const auto it = std::find(t.header.begin(), t.header.end(), name);
    if (it == t.header.end()) throw Error(ErrorKind::Parse, "missing column " + name);
    return static_cast<std::size_t>(it - t.header.begin());
}

/// Fixed-width text rendering of a table.
inline void write_text_table(std::ostream& out, const std::vector<std::string>& header,
                             const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> width(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
    for (const auto& r : rows)
        for (std::size_t c = 0; c < r.size() && c < width.size(); ++c) width[c] = std::max(width[c], r[c].size());
    auto line = [&](const std::vector<std::string>& r) {
        for (std::size_t c = 0; c < r.size(); ++c) {
            out << r[c];
            if (c + 1 < r.size()) out << std::string(width[c] - r[c].size() + 2, ' ');
        }
        out << '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
}

} // namespace detail

/// Files `report` reads from an evaluation directory.
inline std::vector<std::string> expected_eval_files(bool identification) {
    std::vector<std::string> files{"config.txt", "verification.csv", "cohorts.csv"};
    if (identification) {
        files.push_back("identification.csv");
        files.push_back("identification_subjects.csv");
    }
    return files;
}

struct ReportOptions {
    std::optional<fs::path> dataset; // overrides the dataset recorded in config.txt
    bool psd = true;
};

/// Writes verification_table.csv, cohort_table.csv, subject_table.csv,
/// identification_vs_length.csv, psd_plot.csv and summary.txt.
inline void write_report(const fs::path& eval_dir, const fs::path& out_dir, const ReportOptions& opt = {},
                         unsigned threads = worker_count()) {
    if (fs::exists(eval_dir / "FAILED"))
        throw Error(ErrorKind::InvalidArgument, "evaluation in " + eval_dir.string() + " did not complete");
    {
        std::string missing;
        for (const auto& f : expected_eval_files(false))
            if (!fs::exists(eval_dir / f)) missing += (missing.empty() ? "" : ", ") + f;
        if (!missing.empty())
            throw Error(ErrorKind::MissingFile, "evaluation directory " + eval_dir.string() +
                                                    " lacks: " + missing + " (expected " +
                                                    detail::join(expected_eval_files(true)) + ")");
    }
    const EvalConfig cfg = load_config(eval_dir / "config.txt");
    for (const auto& f : expected_eval_files(cfg.identification))
        if (!fs::exists(eval_dir / f)) throw Error(ErrorKind::MissingFile, "evaluation directory lacks " + f);
    fs::create_directories(out_dir);
    std::ofstream summary = detail::open_out(out_dir / "summary.txt");

    // verification (one row per cell) and per-cohort confusion
    const csv::Table ver = detail::read_table(eval_dir / "verification.csv");
    csv::expect_header(ver, csv::split(verification_header()), "verification.csv");
    {
        auto out = detail::open_out(out_dir / "verification_table.csv");
        out << verification_header() << '\n';
        for (const auto& r : ver.rows) {
            for (std::size_t c = 0; c < r.size(); ++c) out << (c ? "," : "") << r[c];
            out << '\n';
        }
    }
    summary << "Verification (cohort-R validation rows)\n";
    detail::write_text_table(summary, ver.header, ver.rows);

    const csv::Table coh = detail::read_table(eval_dir / "cohorts.csv");
    csv::expect_header(coh, csv::split(cohort_header()), "cohorts.csv");
    {
        auto out = detail::open_out(out_dir / "cohort_table.csv");
        out << cohort_header() << '\n';
        for (const auto& r : coh.rows) {
            for (std::size_t c = 0; c < r.size(); ++c) out << (c ? "," : "") << r[c];
            out << '\n';
        }
    }
    summary << "\nConfusion by validation cohort\n";
    detail::write_text_table(summary, coh.header, coh.rows);

    // per-subject accuracy and HTER of every cell
    {
        auto out = detail::open_out(out_dir / "subject_table.csv");
        out << "setup,segment_s,classifier,features,subject,AC,HTER\n";
        for (const auto& r : ver.rows) {
            const Cell cell{parse_setup(r[0]), csv::to_double(r[1]), parse_classifier(r[2]), parse_feature_set(r[3])};
            const auto metrics = detail::read_table(eval_dir / "cells" / cell.name() / "metrics.csv");
            const auto slice = detail::column(metrics, "slice"), key = detail::column(metrics, "key");
            const auto ac = detail::column(metrics, "AC"), hter = detail::column(metrics, "HTER");
            for (const auto& m : metrics.rows)
                if (m[slice] == "subject")
                    out << r[0] << ',' << r[1] << ',' << r[2] << ',' << r[3] << ',' << m[key] << ',' << m[ac] << ','
                        << m[hter] << '\n';
        }
    }

    if (cfg.identification) {
        const csv::Table id = detail::read_table(eval_dir / "identification.csv");
        csv::expect_header(id, csv::split(identification_header()), "identification.csv");
        const auto setup = detail::column(id, "setup"), len = detail::column(id, "segment_s");
        const auto feats = detail::column(id, "features"), ir = detail::column(id, "IR");
        const auto kappa = detail::column(id, "kappa"), err = detail::column(id, "SE_stderr");
        std::vector<std::vector<std::string>> rows;
        for (const auto& r : id.rows) {
            const std::string stderr_pp = render_decimal(
                Rational::make(std::llround(csv::to_double(r[err]) * 1e5), 1000), 1); // fraction -> percentage points
            rows.push_back({r[setup], r[feats], r[len], r[ir], stderr_pp, r[kappa]});
        }
        std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
            return std::tie(a[0], a[1]) < std::tie(b[0], b[1]) ||
                   (std::tie(a[0], a[1]) == std::tie(b[0], b[1]) && csv::to_double(a[2]) < csv::to_double(b[2]));
        });
        const std::vector<std::string> header{"setup", "features", "segment_s", "IR", "IR_stderr", "kappa"};
        auto out = detail::open_out(out_dir / "identification_vs_length.csv");
        for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
        out << '\n';
        for (const auto& r : rows) {
            for (std::size_t c = 0; c < r.size(); ++c) out << (c ? "," : "") << r[c];
            out << '\n';
        }
        summary << "\nIdentification rate vs segment length (percent; stderr across subjects)\n";
        detail::write_text_table(summary, header, rows);
    }

    if (opt.psd) {
        const Dataset ds = load_dataset(opt.dataset.value_or(cfg.dataset));
        const auto curves = psd_plot_data(ds, pipeline_of(cfg), threads);
        auto out = detail::open_out(out_dir / "psd_plot.csv");
        write_psd_plot_csv(out, curves);
        summary << "\nPSD plot data: " << curves.size() << " curves, "
                << (curves.empty() ? 0 : curves.front().frequencies.size()) << " bins each (0-30 Hz)\n";
    }
}

} // namespace earid

#endif
