// Copyright 2026 The earid Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EARID_SIGNAL_HPP
#define EARID_SIGNAL_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"

namespace earid {

inline constexpr std::size_t kChannels = 2;

/// Length of the artifact-rejection epoch and of the Welch/Burg analysis
/// window. Both grids are anchored at the segment start.
inline constexpr double kEpochSeconds = 2.0;

/// One trial of two-channel in-ear EEG, samples in microvolts.
struct Recording {
    std::string subject;
    int day = 1;
    int trial = 1;
    double fs = 0.0;
    std::array<std::vector<double>, kChannels> channels;

    std::size_t samples() const { return channels[0].size(); }
    double duration() const { return fs > 0.0 ? static_cast<double>(samples()) / fs : 0.0; }
};

inline void check_recording(const Recording& rec) {
    if (!(rec.fs > 0.0)) throw Error(ErrorKind::InvalidArgument, "sampling rate must be positive");
    if (rec.channels[0].size() != rec.channels[1].size())
        throw Error(ErrorKind::InvalidArgument, "channels of " + rec.subject + " differ in length");
}

// ---------------------------------------------------------------------------
// Butterworth bandpass design

/// `order` is the order of the lowpass prototype. The bandpass built from it
/// has 2*order poles, realized as `order` second-order sections.
struct FilterSpec {
    int order = 4;
    double low_hz = 0.5;
    double high_hz = 30.0;
};

/// y[n] = b0 x[n] + b1 x[n-1] + b2 x[n-2] - a1 y[n-1] - a2 y[n-2]
struct Biquad {
    double b0 = 1.0, b1 = 0.0, b2 = 0.0;
    double a1 = 0.0, a2 = 0.0;
};

struct FilterCoefficients {
    double fs = 0.0;
    std::vector<Biquad> sections;

    std::vector<std::complex<double>> poles() const {
        std::vector<std::complex<double>> out;
        for (const auto& s : sections) {
            const std::complex<double> disc = std::sqrt(std::complex<double>(s.a1 * s.a1 - 4.0 * s.a2, 0.0));
            out.push_back((-s.a1 + disc) / 2.0);
            out.push_back((-s.a1 - disc) / 2.0);
        }
        return out;
    }
};

/// Complex frequency response of the cascade at `hz`.
inline std::complex<double> frequency_response(const FilterCoefficients& f, double hz) {
    const std::complex<double> zinv = std::polar(1.0, -2.0 * std::numbers::pi * hz / f.fs);
    const std::complex<double> zinv2 = zinv * zinv;
    std::complex<double> h = 1.0;
    for (const auto& s : f.sections)
        h *= (s.b0 + s.b1 * zinv + s.b2 * zinv2) / (1.0 + s.a1 * zinv + s.a2 * zinv2);
    return h;
}

/// Bilinear-transform Butterworth bandpass with pre-warped band edges.
inline FilterCoefficients design_bandpass(const FilterSpec& spec, double fs) {
    if (!(fs > 0.0)) throw Error(ErrorKind::InvalidSpec, "sampling rate must be positive");
    if (!(spec.low_hz > 0.0 && spec.low_hz < spec.high_hz && spec.high_hz < fs / 2.0))
        throw Error(ErrorKind::InvalidSpec, "band edges must satisfy 0 < low < high < fs/2");
    if (spec.order < 2 || spec.order % 2 != 0)
        throw Error(ErrorKind::InvalidSpec, "filter order must be even and >= 2");

    using cd = std::complex<double>;
    const double pi = std::numbers::pi;
    const double k = 2.0 * fs;
    const double w_lo = k * std::tan(pi * spec.low_hz / fs);
    const double w_hi = k * std::tan(pi * spec.high_hz / fs);
    const double bw = w_hi - w_lo;
    const double w0_sq = w_lo * w_hi;

    FilterCoefficients out;
    out.fs = fs;
    const int n = spec.order;
    for (int m = 1; m <= n / 2; ++m) {
        // upper-half-plane prototype pole; its conjugate yields the mirrored sections
        const cd p = std::polar(1.0, pi * (2.0 * m + n - 1.0) / (2.0 * n));
        const cd root = std::sqrt(p * p * bw * bw - 4.0 * w0_sq);
        for (const cd s : {(p * bw + root) / 2.0, (p * bw - root) / 2.0}) {
            const cd z = (k + s) / (k - s);
            Biquad q;
            q.b0 = 1.0;
            q.b1 = 0.0;
            q.b2 = -1.0;
            q.a1 = -2.0 * z.real();
            q.a2 = std::norm(z);
            out.sections.push_back(q);
        }
    }

    // unit gain at the digital image of the geometric centre frequency
    const double f0 = fs / pi * std::atan(std::sqrt(w0_sq) / k);
    const double gain = 1.0 / std::abs(frequency_response(out, f0));
    const double per_section = std::pow(gain, 1.0 / static_cast<double>(out.sections.size()));
    for (auto& s : out.sections) {
        s.b0 *= per_section;
        s.b1 *= per_section;
        s.b2 *= per_section;
    }
    return out;
}

/// Causal single forward pass, transposed direct form II per section.
inline std::vector<double> filter_samples(const FilterCoefficients& f, std::span<const double> x) {
    std::vector<double> y(x.begin(), x.end());
    for (const auto& s : f.sections) {
        double z1 = 0.0, z2 = 0.0;
        for (double& v : y) {
            const double in = v;
            const double out = s.b0 * in + z1;
            z1 = s.b1 * in - s.a1 * out + z2;
            z2 = s.b2 * in - s.a2 * out;
            v = out;
        }
    }
    return y;
}

inline Recording filter_recording(const Recording& rec, const FilterCoefficients& coeffs) {
    check_recording(rec);
    if (rec.samples() == 0) throw Error(ErrorKind::InvalidArgument, "empty recording");
    Recording out = rec;
    for (std::size_t c = 0; c < kChannels; ++c) out.channels[c] = filter_samples(coeffs, rec.channels[c]);
    return out;
}

inline Recording trim_head(const Recording& rec, double seconds) {
    check_recording(rec);
    if (seconds < 0.0) throw Error(ErrorKind::InvalidArgument, "negative trim");
    const auto drop = static_cast<std::size_t>(std::floor(seconds * rec.fs));
    if (drop == 0) return rec;
    if (drop >= rec.samples())
        throw Error(ErrorKind::TooShort, "recording of " + std::to_string(rec.duration()) +
                                             " s is not longer than the " + std::to_string(seconds) + " s trim");
    Recording out;
    out.subject = rec.subject;
    out.day = rec.day;
    out.trial = rec.trial;
    out.fs = rec.fs;
    for (std::size_t c = 0; c < kChannels; ++c)
        out.channels[c].assign(rec.channels[c].begin() + static_cast<std::ptrdiff_t>(drop), rec.channels[c].end());
    return out;
}

// ---------------------------------------------------------------------------
// Segmentation and artifact rejection

struct Segment {
    std::string subject;
    int day = 1;
    int trial = 1;
    int index = 0;
    double fs = 0.0;
    std::array<std::vector<double>, kChannels> channels;
    std::vector<bool> epoch_mask; // true = retained

    std::size_t epoch_samples() const { return static_cast<std::size_t>(std::floor(kEpochSeconds * fs)); }

    std::span<const double> epoch(std::size_t channel, std::size_t e) const {
        const std::size_t len = epoch_samples();
        return std::span<const double>(channels[channel]).subspan(e * len, len);
    }

    std::size_t retained() const {
        return static_cast<std::size_t>(std::count(epoch_mask.begin(), epoch_mask.end(), true));
    }
};

/// Non-overlapping segments of floor(L_seg*fs) samples; the trailing
/// remainder is discarded. Every epoch starts out retained.
inline std::vector<Segment> segmentize(const Recording& rec, double seg_seconds) {
    check_recording(rec);
    if (!(seg_seconds > 0.0)) throw Error(ErrorKind::InvalidArgument, "segment length must be positive");
    const auto len = static_cast<std::size_t>(std::floor(seg_seconds * rec.fs));
    const auto epochs = static_cast<std::size_t>(std::floor(seg_seconds / kEpochSeconds));
    std::vector<Segment> out;
    if (len == 0) return out;
    const std::size_t count = rec.samples() / len;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        Segment s;
        s.subject = rec.subject;
        s.day = rec.day;
        s.trial = rec.trial;
        s.index = static_cast<int>(i);
        s.fs = rec.fs;
        for (std::size_t c = 0; c < kChannels; ++c) {
            const auto first = rec.channels[c].begin() + static_cast<std::ptrdiff_t>(i * len);
            s.channels[c].assign(first, first + static_cast<std::ptrdiff_t>(len));
        }
        s.epoch_mask.assign(epochs, true);
        out.push_back(std::move(s));
    }
    return out;
}

/// An epoch survives iff max |x| <= threshold on both channels. Epochs
/// already rejected stay rejected.
inline Segment reject_artifacts(const Segment& seg, double threshold_uv) {
    if (!(threshold_uv > 0.0)) throw Error(ErrorKind::InvalidArgument, "rejection threshold must be positive");
    Segment out = seg;
    for (std::size_t e = 0; e < out.epoch_mask.size(); ++e) {
        if (!out.epoch_mask[e]) continue;
        for (std::size_t c = 0; c < kChannels; ++c) {
            const auto ep = seg.epoch(c, e);
            const bool clean = std::all_of(ep.begin(), ep.end(), [&](double v) { return std::abs(v) <= threshold_uv; });
            if (!clean) {
                out.epoch_mask[e] = false;
                break;
            }
        }
    }
    return out;
}

} // namespace earid

#endif
