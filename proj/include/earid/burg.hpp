// Copyright 2026 The earid Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EARID_BURG_HPP
#define EARID_BURG_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "error.hpp"

namespace earid {

/// AR model in prediction form: x[t] = sum_k coefficients[k-1] * x[t-k] + e[t].
struct ArModel {
    std::vector<double> coefficients;
    std::vector<double> reflection;
    double error_power = 0.0;
};

/// Burg lattice estimate of an order-p AR model. Each stage picks the
/// reflection coefficient minimizing the summed forward and backward
/// prediction error power, so |k| <= 1 holds by construction.
inline ArModel burg_ar(std::span<const double> x, std::size_t order) {
    if (order == 0) throw Error(ErrorKind::InvalidArgument, "AR order must be positive");
    if (x.size() <= 2 * order)
        throw Error(ErrorKind::TooShort, "Burg needs more than 2p samples, got " + std::to_string(x.size()));
    double energy = 0.0;
    for (double v : x) {
        if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "non-finite sample");
        energy += v * v;
    }
    if (energy == 0.0) throw Error(ErrorKind::ZeroVariance, "zero-energy input");

    const std::size_t n = x.size();
    std::vector<double> f(x.begin(), x.end());
    std::vector<double> b(x.begin(), x.end());
    std::vector<double> a(order + 1, 0.0); // A(z) = 1 + a1 z^-1 + ...
    std::vector<double> prev(order + 1, 0.0);
    a[0] = 1.0;

    ArModel out;
    out.reflection.reserve(order);
    double err = energy / static_cast<double>(n);

    for (std::size_t m = 1; m <= order; ++m) {
        double num = 0.0, den = 0.0;
        for (std::size_t t = m; t < n; ++t) {
            num += f[t] * b[t - 1];
            den += f[t] * f[t] + b[t - 1] * b[t - 1];
        }
        if (den == 0.0) throw Error(ErrorKind::ZeroVariance, "prediction error vanished at stage " + std::to_string(m));
        const double k = -2.0 * num / den;

        prev = a;
        for (std::size_t i = 1; i <= m; ++i) a[i] = prev[i] + k * prev[m - i];

        // update from the end so b[t-1] is still the previous stage's value
        for (std::size_t t = n - 1; t >= m; --t) {
            const double ft = f[t];
            f[t] = ft + k * b[t - 1];
            b[t] = b[t - 1] + k * ft;
        }
        err *= (1.0 - k * k);
        out.reflection.push_back(k);
    }

    out.coefficients.resize(order);
    for (std::size_t i = 0; i < order; ++i) out.coefficients[i] = -a[i + 1];
    out.error_power = err;
    return out;
}

} // namespace earid

#endif
