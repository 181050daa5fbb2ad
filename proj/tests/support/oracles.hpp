// Copyright 2026 The earid Authors
// SPDX-License-Identifier: Apache-2.0
//
// Reference computations for tests. None of these reuse library code paths:
// spectra come from direct DFT summation, filter magnitudes from the analog
// Butterworth prototype, AR processes from explicitly placed poles.

#ifndef EARID_TESTS_ORACLES_HPP
#define EARID_TESTS_ORACLES_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <vector>

namespace oracle {

/// One-sided periodogram of a Hann-windowed block by O(n^2) DFT summation,
/// scaled so that sum(power) * fs / n equals the windowed mean power.
inline std::vector<double> hann_periodogram(std::span<const double> x, double fs) {
    const std::size_t n = x.size();
    const double pi = std::numbers::pi;
    std::vector<double> w(n);
    double wp = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        w[i] = 0.5 - 0.5 * std::cos(2.0 * pi * static_cast<double>(i) / static_cast<double>(n));
        wp += w[i] * w[i];
    }
    std::vector<double> out(n / 2 + 1);
    for (std::size_t k = 0; k < out.size(); ++k) {
        long double re = 0.0L, im = 0.0L;
        for (std::size_t t = 0; t < n; ++t) {
            const long double ang = -2.0L * std::numbers::pi_v<long double> * static_cast<long double>(k * t % n) /
                                    static_cast<long double>(n);
            re += static_cast<long double>(x[t] * w[t]) * std::cos(ang);
            im += static_cast<long double>(x[t] * w[t]) * std::sin(ang);
        }
        const bool edge = k == 0 || (n % 2 == 0 && k == n / 2);
        out[k] = static_cast<double>(re * re + im * im) / (fs * wp) * (edge ? 1.0 : 2.0);
    }
    return out;
}

/// |H| of a digital Butterworth bandpass obtained by the bilinear transform
/// of the analog prototype of order n: |H_a(jW)| = 1/sqrt(1 + ((W^2 - W0^2)/(W B))^(2n))
/// evaluated at the warped frequency W = 2 fs tan(pi f / fs).
inline double butterworth_bandpass_magnitude(int n, double lo, double hi, double fs, double f) {
    const double pi = std::numbers::pi;
    auto warp = [&](double hz) { return 2.0 * fs * std::tan(pi * hz / fs); };
    const double wl = warp(lo), wh = warp(hi), w = warp(f);
    if (w == 0.0) return 0.0;
    const double x = (w * w - wl * wh) / (w * (wh - wl));
    return 1.0 / std::sqrt(1.0 + std::pow(x * x, n));
}

/// Coefficients c_k of x_t = sum_k c_k x_{t-k} + e_t whose characteristic
/// polynomial has the given roots (conjugate pairs supplied explicitly).
inline std::vector<double> coefficients_from_poles(const std::vector<std::complex<double>>& poles) {
    std::vector<std::complex<double>> poly{1.0}; // z^p + ... in descending powers
    for (const auto& p : poles) {
        std::vector<std::complex<double>> next(poly.size() + 1, 0.0);
        for (std::size_t i = 0; i < poly.size(); ++i) {
            next[i] += poly[i];
            next[i + 1] -= p * poly[i];
        }
        poly = next;
    }
    std::vector<double> c;
    for (std::size_t k = 1; k < poly.size(); ++k) c.push_back(-poly[k].real());
    return c;
}

/// Simulates x_t = sum c_k x_{t-k} + e_t with N(0,1) innovations and a burn-in.
inline std::vector<double> simulate_ar(const std::vector<double>& c, std::size_t n, std::uint64_t seed,
                                       std::size_t burn_in = 2000) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> x(n + burn_in, 0.0);
    for (std::size_t t = 0; t < x.size(); ++t) {
        double v = normal(gen);
        for (std::size_t k = 0; k < c.size() && k < t; ++k) v += c[k] * x[t - 1 - k];
        x[t] = v;
    }
    return {x.begin() + static_cast<std::ptrdiff_t>(burn_in), x.end()};
}

inline std::vector<double> white_noise(std::size_t n, std::uint64_t seed, double sd = 1.0) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal(0.0, sd);
    std::vector<double> x(n);
    for (auto& v : x) v = normal(gen);
    return x;
}

inline std::vector<double> sine(std::size_t n, double fs, double hz, double amplitude = 1.0, double phase = 0.0) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = amplitude * std::sin(2.0 * std::numbers::pi * hz * static_cast<double>(i) / fs + phase);
    return x;
}

/// Frequency of the maximum of the AR power spectrum 1/|1 - sum c_k e^{-i w k}|^2
/// on a fine grid.
inline double ar_spectrum_peak(const std::vector<double>& c, double fs, double lo, double hi, double step = 0.01) {
    double best_f = lo, best = -1.0;
    for (double f = lo; f <= hi + 1e-12; f += step) {
        std::complex<double> d = 1.0;
        for (std::size_t k = 0; k < c.size(); ++k)
            d -= c[k] * std::polar(1.0, -2.0 * std::numbers::pi * f / fs * static_cast<double>(k + 1));
        const double p = 1.0 / std::norm(d);
        if (p > best) {
            best = p;
            best_f = f;
        }
    }
    return best_f;
}

/// Roots of z^p - c_1 z^{p-1} - ... - c_p via the Durand-Kerner iteration.
inline std::vector<std::complex<double>> ar_roots(const std::vector<double>& c) {
    const std::size_t p = c.size();
    std::vector<std::complex<double>> z(p);
    for (std::size_t i = 0; i < p; ++i) z[i] = std::pow(std::complex<double>(0.4, 0.9), static_cast<double>(i));
    auto poly = [&](std::complex<double> x) {
        std::complex<double> v = 1.0;
        for (std::size_t k = 0; k < p; ++k) v = v * x - c[k];
        return v;
    };
    for (int it = 0; it < 2000; ++it)
        for (std::size_t i = 0; i < p; ++i) {
            std::complex<double> den = 1.0;
            for (std::size_t j = 0; j < p; ++j)
                if (j != i) den *= z[i] - z[j];
            z[i] -= poly(z[i]) / den;
        }
    return z;
}

} // namespace oracle

#endif
