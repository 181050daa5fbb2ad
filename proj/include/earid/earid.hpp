// Copyright 2026 The earid Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EARID_EARID_HPP
#define EARID_EARID_HPP

#include "burg.hpp"
#include "classifiers.hpp"
#include "config.hpp"
#include "csv.hpp"
#include "dataset.hpp"
#include "error.hpp"
#include "evaluation.hpp"
#include "features.hpp"
#include "matrix.hpp"
#include "metrics.hpp"
#include "parallel.hpp"
#include "protocol.hpp"
#include "report.hpp"
#include "rng.hpp"
#include "signal.hpp"
#include "spectral.hpp"

#endif
