// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>

#include "firepower/error.hpp"

namespace firepower {

// 100 * mean(|pred - label| / label); labels must be positive.
double mape(std::span<const double> preds, std::span<const double> labels);

// Sample Pearson correlation; both sides need nonzero variance.
double pearson_r(std::span<const double> preds, std::span<const double> labels);

}  // namespace firepower
