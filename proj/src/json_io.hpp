// SPDX-License-Identifier: Apache-2.0
//
// Internal JSON helpers shared by the serializers.
#pragma once

#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>

#include "json.hpp"

#include "firepower/error.hpp"

namespace firepower::detail {

using nlohmann::json;

std::string read_text_file(const std::filesystem::path& path);
// Writes to a sibling temporary file and renames it into place.
void write_text_atomic(const std::filesystem::path& path, std::string_view text);

json parse_json(std::string_view text, std::string_view what);

const json& require(const json& j, std::string_view key, std::string_view where);
void reject_unknown_keys(const json& j, std::initializer_list<std::string_view> allowed,
                         std::string_view where);

double require_number(const json& j, std::string_view key, std::string_view where);
std::string require_string(const json& j, std::string_view key, std::string_view where);

}  // namespace firepower::detail
