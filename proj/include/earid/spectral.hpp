// Copyright 2026 The earid Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EARID_SPECTRAL_HPP
#define EARID_SPECTRAL_HPP

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <vector>

#include "error.hpp"
#include "signal.hpp"

namespace earid {

namespace detail {

// FFTW planning is not thread-safe; execution with per-plan buffers is.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

class RealFft {
public:
    explicit RealFft(std::size_t n) : n_(n) {
        std::lock_guard lock(fftw_planner_mutex());
        in_ = fftw_alloc_real(n);
        out_ = fftw_alloc_complex(n / 2 + 1);
        plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_, out_, FFTW_ESTIMATE);
    }
    ~RealFft() {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(plan_);
        fftw_free(in_);
        fftw_free(out_);
    }
    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;

    std::size_t size() const { return n_; }
    double* input() { return in_; }

    // |X_k|^2 for k = 0..n/2
    void power(std::vector<double>& out) {
        fftw_execute(plan_);
        out.resize(n_ / 2 + 1);
        for (std::size_t k = 0; k < out.size(); ++k) out[k] = out_[k][0] * out_[k][0] + out_[k][1] * out_[k][1];
    }

private:
    std::size_t n_;
    double* in_ = nullptr;
    fftw_complex* out_ = nullptr;
    fftw_plan plan_ = nullptr;
};

inline RealFft& fft_for(std::size_t n) {
    thread_local std::map<std::size_t, std::unique_ptr<RealFft>> cache;
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<RealFft>(n);
    return *slot;
}

// Periodic Hann window.
inline std::vector<double> hann(std::size_t n) {
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i)
        w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
    return w;
}

} // namespace detail

/// One-sided power spectral density of a single channel, in uV^2/Hz.
/// Summing power * df over all bins gives the mean signal power.
struct Psd {
    std::vector<double> frequencies;
    std::vector<double> power;
    double window_seconds = 0.0;
    double overlap = 0.0;

    double resolution() const { return frequencies.size() > 1 ? frequencies[1] - frequencies[0] : 0.0; }
};

/// Accumulates Hann-windowed periodograms of equal-length windows.
class WelchAccumulator {
public:
    WelchAccumulator(std::size_t window, double fs) : fs_(fs), window_(detail::hann(window)) {
        for (double w : window_) window_power_ += w * w;
        sum_.assign(window / 2 + 1, 0.0);
    }

    void add(std::span<const double> x) {
        auto& fft = detail::fft_for(window_.size());
        double* in = fft.input();
        for (std::size_t i = 0; i < window_.size(); ++i) in[i] = x[i] * window_[i];
        fft.power(scratch_);
        for (std::size_t k = 0; k < sum_.size(); ++k) sum_[k] += scratch_[k];
        ++count_;
    }

    std::size_t count() const { return count_; }

    Psd result(double overlap) const {
        const std::size_t n = window_.size();
        Psd out;
        out.window_seconds = static_cast<double>(n) / fs_;
        out.overlap = overlap;
        out.frequencies.resize(sum_.size());
        out.power.resize(sum_.size());
        const double scale = 1.0 / (fs_ * window_power_ * static_cast<double>(count_));
        for (std::size_t k = 0; k < sum_.size(); ++k) {
            out.frequencies[k] = static_cast<double>(k) * fs_ / static_cast<double>(n);
            const bool edge = k == 0 || (n % 2 == 0 && k == n / 2);
            out.power[k] = sum_[k] * scale * (edge ? 1.0 : 2.0);
        }
        return out;
    }

private:
    double fs_;
    std::vector<double> window_;
    double window_power_ = 0.0;
    std::vector<double> sum_;
    std::vector<double> scratch_;
    std::size_t count_ = 0;
};

/// Welch's averaged periodogram over a contiguous signal.
inline Psd welch(std::span<const double> x, double fs, double window_seconds, double overlap) {
    if (!(fs > 0.0) || !(window_seconds > 0.0) || overlap < 0.0 || overlap >= 1.0)
        throw Error(ErrorKind::InvalidArgument, "invalid Welch parameters");
    const auto window = static_cast<std::size_t>(std::floor(window_seconds * fs));
    if (window < 2 || window > x.size()) throw Error(ErrorKind::TooShort, "signal shorter than one Welch window");
    const auto step = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(static_cast<double>(window) * (1.0 - overlap))));
    WelchAccumulator acc(window, fs);
    for (std::size_t start = 0; start + window <= x.size(); start += step) acc.add(x.subspan(start, window));
    return acc.result(overlap);
}

/// Per-channel PSD of a segment, averaged over its retained epochs only.
struct PsdEstimate {
    std::array<Psd, kChannels> channels;
};

inline PsdEstimate welch_psd(const Segment& seg) {
    if (seg.retained() == 0) throw Error(ErrorKind::NoRetainedEpochs, "segment has no retained epochs");
    PsdEstimate out;
    const std::size_t len = seg.epoch_samples();
    for (std::size_t c = 0; c < kChannels; ++c) {
        WelchAccumulator acc(len, seg.fs);
        for (std::size_t e = 0; e < seg.epoch_mask.size(); ++e)
            if (seg.epoch_mask[e]) acc.add(seg.epoch(c, e));
        out.channels[c] = acc.result(0.0);
    }
    return out;
}

} // namespace earid

#endif
