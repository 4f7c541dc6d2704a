// SPDX-License-Identifier: Apache-2.0
#include "firepower/metrics.hpp"

#include <cmath>

namespace firepower {

double mape(std::span<const double> preds, std::span<const double> labels) {
  if (preds.size() != labels.size()) throw Error(ErrorKind::kDimensionMismatch, "mape: length mismatch");
  if (preds.empty()) throw Error(ErrorKind::kInvalidArgument, "mape: empty input");
  double acc = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (!(labels[i] > 0.0)) throw Error(ErrorKind::kInvalidArgument, "mape: labels must be > 0");
    acc += std::abs(preds[i] - labels[i]) / labels[i];
  }
  return 100.0 * acc / static_cast<double>(preds.size());
}

double pearson_r(std::span<const double> preds, std::span<const double> labels) {
  if (preds.size() != labels.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "pearson_r: length mismatch");
  }
  if (preds.size() < 2) throw Error(ErrorKind::kInvalidArgument, "pearson_r: need >= 2 points");
  const double n = static_cast<double>(preds.size());
  double mp = 0.0;
  double ml = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    mp += preds[i];
    ml += labels[i];
  }
  mp /= n;
  ml /= n;
  double spl = 0.0;
  double spp = 0.0;
  double sll = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const double dp = preds[i] - mp;
    const double dl = labels[i] - ml;
    spl += dp * dl;
    spp += dp * dp;
    sll += dl * dl;
  }
  if (!(spp > 0.0) || !(sll > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "pearson_r: zero variance");
  }
  return spl / std::sqrt(spp * sll);
}

}  // namespace firepower
