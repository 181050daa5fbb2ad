// Copyright 2026 The earid Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EARID_FEATURES_HPP
#define EARID_FEATURES_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "burg.hpp"
#include "csv.hpp"
#include "error.hpp"
#include "signal.hpp"
#include "spectral.hpp"

namespace earid {

inline constexpr std::size_t kArOrder = 10;
inline constexpr std::size_t kPsdFeatures = 3;
inline constexpr std::size_t kPerChannel = kPsdFeatures + kArOrder;
inline constexpr std::size_t kFeatureDim = kChannels * kPerChannel; // 26

// Band edges, all inclusive on the bin grid.
inline constexpr double kAlphaLowHz = 8.0;
inline constexpr double kAlphaHighHz = 13.0;
inline constexpr double kBroadLowHz = 4.0;
inline constexpr double kBroadHighHz = 16.0;

/// Column layout, Ch1 block then Ch2 block:
///   [alpha_ratio, alpha_peak_power, alpha_peak_freq, ar_1 .. ar_10]
using FeatureVector = std::array<double, kFeatureDim>;

inline std::string feature_name(std::size_t column) {
    const std::size_t ch = column / kPerChannel + 1;
    const std::size_t k = column % kPerChannel;
    static constexpr const char* psd_names[] = {"alpha_ratio", "alpha_peak_power", "alpha_peak_freq"};
    const std::string prefix = "ch" + std::to_string(ch) + "_";
    if (k < kPsdFeatures) return prefix + psd_names[k];
    return prefix + "ar" + std::to_string(k - kPsdFeatures + 1);
}

enum class FeatureSet { Psd, Ar, PsdAr };

inline std::string to_string(FeatureSet s) {
    switch (s) {
    case FeatureSet::Psd: return "psd";
    case FeatureSet::Ar: return "ar";
    case FeatureSet::PsdAr: return "psd+ar";
    }
    return "?";
}

inline FeatureSet parse_feature_set(std::string_view s) {
    if (s == "psd") return FeatureSet::Psd;
    if (s == "ar") return FeatureSet::Ar;
    if (s == "psd+ar" || s == "ar+psd") return FeatureSet::PsdAr;
    throw Error(ErrorKind::Parse, "unknown feature set '" + std::string(s) + "'");
}

/// Column indices selected by a feature set, in layout order.
inline std::vector<std::size_t> feature_columns(FeatureSet set) {
    std::vector<std::size_t> cols;
    for (std::size_t c = 0; c < kFeatureDim; ++c) {
        const bool psd = c % kPerChannel < kPsdFeatures;
        if (set == FeatureSet::PsdAr || (set == FeatureSet::Psd) == psd) cols.push_back(c);
    }
    return cols;
}

// ---------------------------------------------------------------------------
// Spectral features

struct PsdFeatures {
    double alpha_ratio = 0.0;
    double alpha_peak_power = 0.0;
    double alpha_peak_freq = 0.0;
};

namespace detail {
inline bool in_band(double f, double lo, double hi, double df) {
    const double eps = 1e-9 * df;
    return f >= lo - eps && f <= hi + eps;
}
} // namespace detail

inline PsdFeatures psd_features(const Psd& psd) {
    const double df = psd.resolution();
    if (psd.frequencies.empty() || psd.frequencies.back() < kBroadHighHz)
        throw Error(ErrorKind::InvalidArgument, "PSD does not cover the 4-16 Hz band");
    double alpha = 0.0, broad = 0.0;
    PsdFeatures out;
    bool have_peak = false;
    for (std::size_t k = 0; k < psd.frequencies.size(); ++k) {
        const double f = psd.frequencies[k];
        const double p = psd.power[k];
        if (detail::in_band(f, kBroadLowHz, kBroadHighHz, df)) broad += p;
        if (detail::in_band(f, kAlphaLowHz, kAlphaHighHz, df)) {
            alpha += p;
            if (!have_peak || p > out.alpha_peak_power) {
                out.alpha_peak_power = p;
                out.alpha_peak_freq = f;
                have_peak = true;
            }
        }
    }
    if (broad == 0.0) throw Error(ErrorKind::ZeroDenominator, "no power in the 4-16 Hz band");
    out.alpha_ratio = alpha / broad;
    return out;
}

inline PsdFeatures psd_features(const PsdEstimate& psd, std::size_t channel) {
    return psd_features(psd.channels.at(channel));
}

// ---------------------------------------------------------------------------
// Alpha-band AR features

inline FilterSpec alpha_band_spec() { return FilterSpec{4, kAlphaLowHz, kAlphaHighHz}; }

/// Burg AR(10) of each retained epoch after an 8-13 Hz bandpass, averaged
/// element-wise over epochs.
inline std::vector<double> alpha_ar_features(const Segment& seg, std::size_t channel,
                                             const FilterCoefficients& alpha_filter) {
    if (seg.retained() == 0) throw Error(ErrorKind::NoRetainedEpochs, "segment has no retained epochs");
    std::vector<double> mean(kArOrder, 0.0);
    std::size_t used = 0;
    for (std::size_t e = 0; e < seg.epoch_mask.size(); ++e) {
        if (!seg.epoch_mask[e]) continue;
        const auto band = filter_samples(alpha_filter, seg.epoch(channel, e));
        const ArModel model = burg_ar(band, kArOrder);
        for (std::size_t i = 0; i < kArOrder; ++i) mean[i] += model.coefficients[i];
        ++used;
    }
    for (double& v : mean) v /= static_cast<double>(used);
    return mean;
}

inline std::vector<double> alpha_ar_features(const Segment& seg, std::size_t channel) {
    return alpha_ar_features(seg, channel, design_bandpass(alpha_band_spec(), seg.fs));
}

// ---------------------------------------------------------------------------
// Feature matrix

struct RowLabel {
    std::string subject;
    int day = 1;
    int trial = 1;
    int segment = 0;

    auto key() const { return std::tie(subject, day, trial, segment); }
    bool operator==(const RowLabel& o) const { return key() == o.key(); }
    bool operator<(const RowLabel& o) const { return key() < o.key(); }
};

struct DroppedSegment {
    int segment = 0;
    std::string reason;
};

/// Feature rows of one trial, one per surviving segment.
struct FeatureMatrix {
    std::vector<RowLabel> labels;
    std::vector<FeatureVector> rows;
    std::vector<DroppedSegment> dropped;

    std::size_t size() const { return rows.size(); }
};

struct ExtractionConfig {
    double segment_seconds = 60.0;
    double artifact_threshold_uv = 50.0;
};

inline FeatureVector segment_features(const Segment& seg, const FilterCoefficients& alpha_filter) {
    const PsdEstimate psd = welch_psd(seg);
    FeatureVector v{};
    for (std::size_t c = 0; c < kChannels; ++c) {
        const PsdFeatures pf = psd_features(psd, c);
        const std::size_t base = c * kPerChannel;
        v[base + 0] = pf.alpha_ratio;
        v[base + 1] = pf.alpha_peak_power;
        v[base + 2] = pf.alpha_peak_freq;
        const auto ar = alpha_ar_features(seg, c, alpha_filter);
        for (std::size_t i = 0; i < kArOrder; ++i) v[base + kPsdFeatures + i] = ar[i];
    }
    return v;
}

/// Expects a trimmed and band-passed recording. Segments that cannot yield
/// features (every epoch rejected, degenerate spectrum) are listed in
/// `dropped` instead of producing a row.
inline FeatureMatrix build_feature_matrix(const Recording& rec, const ExtractionConfig& cfg = {}) {
    const FilterCoefficients alpha_filter = design_bandpass(alpha_band_spec(), rec.fs);
    FeatureMatrix out;
    for (const Segment& raw : segmentize(rec, cfg.segment_seconds)) {
        const Segment seg = reject_artifacts(raw, cfg.artifact_threshold_uv);
        try {
            out.rows.push_back(segment_features(seg, alpha_filter));
            out.labels.push_back(RowLabel{seg.subject, seg.day, seg.trial, seg.index});
        } catch (const Error& e) {
            out.dropped.push_back(DroppedSegment{seg.index, e.what()});
        }
    }
    if (out.rows.empty())
        throw Error(ErrorKind::AllSegmentsDropped, "no usable segment in " + rec.subject + " day " +
                                                       std::to_string(rec.day) + " trial " + std::to_string(rec.trial));
    return out;
}

// ---------------------------------------------------------------------------
// CSV: subject,day,trial,segment,f1..f26

inline std::vector<std::string> feature_csv_header() {
    std::vector<std::string> h{"subject", "day", "trial", "segment"};
    for (std::size_t c = 1; c <= kFeatureDim; ++c) h.push_back("f" + std::to_string(c));
    return h;
}

inline void write_feature_csv(std::ostream& out, const std::vector<FeatureMatrix>& matrices) {
    const auto header = feature_csv_header();
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << '\n';
    for (const auto& m : matrices) {
        for (std::size_t r = 0; r < m.rows.size(); ++r) {
            const auto& l = m.labels[r];
            out << l.subject << ',' << l.day << ',' << l.trial << ',' << l.segment;
            for (double v : m.rows[r]) out << ',' << csv::format(v);
            out << '\n';
        }
    }
}

/// Groups rows back into per-trial matrices, ordered by (subject, day, trial).
inline std::vector<FeatureMatrix> read_feature_csv(std::istream& in) {
    const csv::Table t = csv::read(in, "feature csv");
    csv::expect_header(t, feature_csv_header(), "feature csv");
    std::map<std::tuple<std::string, int, int>, FeatureMatrix> groups;
    for (const auto& row : t.rows) {
        RowLabel l{row[0], static_cast<int>(csv::to_int(row[1])), static_cast<int>(csv::to_int(row[2])),
                   static_cast<int>(csv::to_int(row[3]))};
        FeatureVector v{};
        for (std::size_t c = 0; c < kFeatureDim; ++c) v[c] = csv::to_double(row[4 + c]);
        auto& m = groups[{l.subject, l.day, l.trial}];
        m.labels.push_back(std::move(l));
        m.rows.push_back(v);
    }
    std::vector<FeatureMatrix> out;
    for (auto& [key, m] : groups) out.push_back(std::move(m));
    return out;
}

} // namespace earid

#endif
