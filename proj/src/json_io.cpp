// SPDX-License-Identifier: Apache-2.0
#include "json_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace firepower {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParse: return "parse error";
    case ErrorKind::kSchema: return "schema error";
    case ErrorKind::kAlias: return "alias error";
    case ErrorKind::kDuplicate: return "duplicate";
    case ErrorKind::kValidation: return "validation error";
    case ErrorKind::kInvalidArgument: return "invalid argument";
    case ErrorKind::kDimensionMismatch: return "dimension mismatch";
    case ErrorKind::kMissingData: return "missing data";
  }
  return "error";
}

namespace detail {

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::kParse, "cannot open '" + path.string() + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_atomic(const std::filesystem::path& path, std::string_view text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(ErrorKind::kInvalidArgument, "cannot write '" + tmp.string() + "'");
    }
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) {
      throw Error(ErrorKind::kInvalidArgument, "short write to '" + tmp.string() + "'");
    }
  }
  std::filesystem::rename(tmp, path);
}

json parse_json(std::string_view text, std::string_view what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kParse, std::string(what) + ": " + e.what());
  }
}

const json& require(const json& j, std::string_view key, std::string_view where) {
  if (!j.is_object()) {
    throw Error(ErrorKind::kSchema, std::string(where) + ": expected an object");
  }
  auto it = j.find(key);
  if (it == j.end()) {
    throw Error(ErrorKind::kSchema,
                std::string(where) + ": missing field '" + std::string(key) + "'");
  }
  return *it;
}

void reject_unknown_keys(const json& j, std::initializer_list<std::string_view> allowed,
                         std::string_view where) {
  if (!j.is_object()) {
    throw Error(ErrorKind::kSchema, std::string(where) + ": expected an object");
  }
  for (const auto& [key, _] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw Error(ErrorKind::kSchema, std::string(where) + ": unknown field '" + key + "'");
    }
  }
}

double require_number(const json& j, std::string_view key, std::string_view where) {
  const auto& v = require(j, key, where);
  if (!v.is_number()) {
    throw Error(ErrorKind::kSchema,
                std::string(where) + ": field '" + std::string(key) + "' must be a number");
  }
  return v.get<double>();
}

std::string require_string(const json& j, std::string_view key, std::string_view where) {
  const auto& v = require(j, key, where);
  if (!v.is_string()) {
    throw Error(ErrorKind::kSchema,
                std::string(where) + ": field '" + std::string(key) + "' must be a string");
  }
  return v.get<std::string>();
}

}  // namespace detail
}  // namespace firepower
