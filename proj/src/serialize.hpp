// SPDX-License-Identifier: Apache-2.0
//
// JSON encoders/decoders for the model types, shared by the knowledge base,
// target-model and synthetic-truth files.
#pragma once

#include "firepower/dataset.hpp"
#include "firepower/trees.hpp"
#include "json_io.hpp"

namespace firepower::detail {

json hyperparams_to_json(const GbtHyperparams& hp);
GbtHyperparams hyperparams_from_json(const json& j);

json gbt_to_json(const GbtModel& m);
GbtModel gbt_from_json(const json& j);

json linear_to_json(const LinearModel& m);
LinearModel linear_from_json(const json& j);

json table_to_json(const ComponentTable& table);
ComponentTable table_from_json(const json& j, const ParameterRegistry& registry);
ComponentTable table_from_json(const json& j);

}  // namespace firepower::detail
