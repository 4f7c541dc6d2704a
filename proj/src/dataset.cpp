// SPDX-License-Identifier: Apache-2.0
#include "firepower/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "serialize.hpp"

namespace firepower {

using detail::json;

// ---------------------------------------------------------------------------
// Parameter registry

ParameterRegistry::ParameterRegistry(std::vector<HardwareParameter> params)
    : params_(std::move(params)) {
  for (const auto& p : params_) {
    if (p.name.empty()) {
      throw Error(ErrorKind::kValidation, "parameter registry: empty parameter name");
    }
    if (!lookup_.emplace(p.name, p.name).second) {
      throw Error(ErrorKind::kDuplicate, "parameter registry: '" + p.name + "' defined twice");
    }
  }
  for (const auto& p : params_) {
    for (const auto& alias : p.aliases) {
      auto [it, inserted] = lookup_.emplace(alias, p.name);
      if (!inserted && it->second != p.name) {
        throw Error(ErrorKind::kAlias, "parameter registry: alias '" + alias +
                                           "' maps to both '" + it->second + "' and '" +
                                           p.name + "'");
      }
    }
  }
}

const ParameterRegistry& ParameterRegistry::builtin() {
  static const ParameterRegistry registry({
      {"FetchWidth", {}},
      {"DecodeWidth", {}},
      {"FetchBufferEntry", {}},
      {"RobEntry", {}},
      {"IntPhyRegister", {}},
      {"FpPhyRegister", {}},
      {"LDQ/STQEntry", {"LDQEntry", "STQEntry"}},
      {"BranchCount", {}},
      {"Mem/FpIssueWidth", {"MemIssueWidth", "FpIssueWidth"}},
      {"IntIssueWidth", {}},
      {"DCache/ICacheWay", {"DCacheWay", "ICacheWay"}},
      {"DTLBEntry", {"DCacheTLBEntry", "ICacheTLBEntry"}},
      {"MSHREntry", {}},
      {"ICacheFetchBytes", {}},
  });
  return registry;
}

std::string ParameterRegistry::canonicalize(std::string_view name) const {
  auto it = lookup_.find(name);
  if (it == lookup_.end()) {
    throw Error(ErrorKind::kAlias, "unknown hardware parameter '" + std::string(name) + "'");
  }
  return it->second;
}

bool ParameterRegistry::contains(std::string_view canonical) const {
  return std::any_of(params_.begin(), params_.end(),
                     [&](const HardwareParameter& p) { return p.name == canonical; });
}

std::size_t ParameterRegistry::index_of(std::string_view canonical) const {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (params_[i].name == canonical) return i;
  }
  throw Error(ErrorKind::kAlias, "unknown hardware parameter '" + std::string(canonical) + "'");
}

std::vector<std::string> ParameterRegistry::canonical_names() const {
  std::vector<std::string> names;
  names.reserve(params_.size());
  for (const auto& p : params_) names.push_back(p.name);
  return names;
}

// ---------------------------------------------------------------------------
// Plain records

std::int64_t Configuration::value(const std::string& param) const {
  auto it = params.find(param);
  if (it == params.end()) {
    throw Error(ErrorKind::kMissingData,
                "configuration '" + id + "' has no parameter '" + param + "'");
  }
  return it->second;
}

double PowerSample::component(const std::string& name) const {
  auto it = component_power.find(name);
  if (it == component_power.end()) {
    throw Error(ErrorKind::kMissingData, "sample (" + config_id + ", " + workload +
                                             ") has no power label for '" + name + "'");
  }
  return it->second;
}

namespace {

std::vector<std::string> canonical_list(const ParameterRegistry& registry,
                                        const std::vector<std::string>& raw) {
  std::vector<std::string> out;
  for (const auto& name : raw) {
    auto canonical = registry.canonicalize(name);
    if (std::find(out.begin(), out.end(), canonical) == out.end()) {
      out.push_back(std::move(canonical));
    }
  }
  return out;
}

struct RawComponent {
  const char* name;
  std::vector<std::string> hw_params;
  const char* important;
};

}  // namespace

ComponentTable builtin_component_table() {
  // Parameter lists use the raw names of the component table; they are
  // canonicalized below. ICacheDataArray carries FetchWidth because it is
  // the parameter detected as important for it.
  static const std::vector<RawComponent> raw = {
      {"BPTAGE", {"FetchWidth", "BranchCount"}, "FetchWidth"},
      {"BPBTB", {"FetchWidth", "BranchCount"}, "FetchWidth"},
      {"BPOthers", {"FetchWidth", "BranchCount"}, "FetchWidth"},
      {"IFU", {"FetchWidth", "DecodeWidth", "FetchBufferEntry", "ICacheFetchBytes"}, nullptr},
      {"I-TLB", {"ICacheTLBEntry"}, nullptr},
      {"ICacheTagArray", {"ICacheWay", "ICacheFetchBytes"}, "DCache/ICacheWay"},
      {"ICacheDataArray", {"ICacheWay", "ICacheFetchBytes", "FetchWidth"}, "FetchWidth"},
      {"ICacheOthers", {"ICacheWay", "ICacheFetchBytes"}, nullptr},
      {"RNU", {"DecodeWidth"}, "DecodeWidth"},
      {"ROB", {"DecodeWidth", "RobEntry"}, nullptr},
      {"FP ISU", {"DecodeWidth", "FpIssueWidth"}, nullptr},
      {"Int ISU", {"DecodeWidth", "IntIssueWidth"}, "DecodeWidth"},
      {"Mem ISU", {"DecodeWidth", "MemIssueWidth"}, nullptr},
      {"Regfile", {"DecodeWidth", "IntPhyRegister", "FpPhyRegister"}, nullptr},
      {"FU Pool", {"Mem/FpIssueWidth", "IntIssueWidth"}, "Mem/FpIssueWidth"},
      {"LSU", {"LDQEntry", "STQEntry", "MemIssueWidth"}, nullptr},
      {"D-TLB", {"DCacheTLBEntry"}, "DTLBEntry"},
      {"DCacheTagArray", {"DCacheWay", "DCacheTLBEntry", "MemIssueWidth"}, nullptr},
      {"DCacheDataArray", {"DCacheWay", "DCacheTLBEntry", "MemIssueWidth"}, nullptr},
      {"DCacheMSHR", {"MSHREntry"}, "MSHREntry"},
      {"DCacheOthers", {"DCacheWay", "DCacheTLBEntry", "MSHREntry", "MemIssueWidth"}, nullptr},
  };
  const auto& registry = ParameterRegistry::builtin();
  ComponentTable table;
  table.reserve(raw.size() + 1);
  for (const auto& r : raw) {
    ComponentDef def;
    def.name = r.name;
    def.hw_params = canonical_list(registry, r.hw_params);
    if (r.important != nullptr) def.important_param = registry.canonicalize(r.important);
    table.push_back(std::move(def));
  }
  table.push_back({std::string(kOtherLogic), registry.canonical_names(), {}, std::nullopt});
  return table;
}

std::vector<std::string> example_event_stats(std::string_view component) {
  std::string slug(component);
  std::replace(slug.begin(), slug.end(), ' ', '_');
  return {slug + ".access_rate", slug + ".active_ratio"};
}

const ComponentDef& find_component(const ComponentTable& table, std::string_view name) {
  for (const auto& c : table) {
    if (c.name == name) return c;
  }
  throw Error(ErrorKind::kInvalidArgument, "unknown component '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Dataset

namespace {

void validate_table(const ParameterRegistry& registry, const ComponentTable& table) {
  if (table.empty()) throw Error(ErrorKind::kSchema, "component table is empty");
  std::set<std::string> names;
  for (const auto& c : table) {
    if (c.name.empty()) throw Error(ErrorKind::kValidation, "component with empty name");
    if (!names.insert(c.name).second) {
      throw Error(ErrorKind::kDuplicate, "component '" + c.name + "' defined twice");
    }
    if (c.hw_params.empty() || c.hw_params.size() > registry.size()) {
      throw Error(ErrorKind::kValidation,
                  "component '" + c.name + "' must have 1.." +
                      std::to_string(registry.size()) + " hardware parameters");
    }
    std::set<std::string> seen;
    for (const auto& p : c.hw_params) {
      if (!registry.contains(p)) {
        throw Error(ErrorKind::kAlias,
                    "component '" + c.name + "': unknown hardware parameter '" + p + "'");
      }
      if (!seen.insert(p).second) {
        throw Error(ErrorKind::kDuplicate,
                    "component '" + c.name + "' lists '" + p + "' twice");
      }
    }
    std::set<std::string> stats;
    for (const auto& e : c.event_stats) {
      if (!stats.insert(e).second) {
        throw Error(ErrorKind::kDuplicate,
                    "component '" + c.name + "' lists event statistic '" + e + "' twice");
      }
    }
    if (c.important_param &&
        std::find(c.hw_params.begin(), c.hw_params.end(), *c.important_param) ==
            c.hw_params.end()) {
      throw Error(ErrorKind::kValidation, "component '" + c.name + "': important parameter '" +
                                              *c.important_param +
                                              "' is not one of its hardware parameters");
    }
  }
}

std::string sample_key(const PowerSample& s) {
  return "(" + s.config_id + ", " + s.workload + ")";
}

}  // namespace

Dataset::Dataset(std::string architecture, ParameterRegistry registry, ComponentTable table,
                 std::vector<Configuration> configs, std::vector<PowerSample> samples,
                 LoadOptions options)
    : architecture_(std::move(architecture)),
      registry_(std::move(registry)),
      table_(std::move(table)),
      configs_(std::move(configs)),
      samples_(std::move(samples)),
      options_(options) {
  if (registry_.size() == 0) throw Error(ErrorKind::kSchema, "parameter registry is empty");
  validate_table(registry_, table_);
  if (configs_.empty()) throw Error(ErrorKind::kSchema, "dataset has no configurations");

  for (std::size_t i = 0; i < configs_.size(); ++i) {
    auto& c = configs_[i];
    if (c.id.empty()) throw Error(ErrorKind::kValidation, "configuration with empty id");
    c.architecture = architecture_;
    if (!config_index_.emplace(c.id, i).second) {
      throw Error(ErrorKind::kDuplicate, "configuration '" + c.id + "' defined twice");
    }
    for (const auto& [name, value] : c.params) {
      if (!registry_.contains(name)) {
        throw Error(ErrorKind::kAlias, "configuration '" + c.id +
                                           "': non-canonical parameter '" + name + "'");
      }
      if (value < 1) {
        throw Error(ErrorKind::kValidation, "configuration '" + c.id + "': parameter '" +
                                                name + "' must be >= 1");
      }
    }
    for (const auto& p : registry_.parameters()) {
      if (!c.params.contains(p.name)) {
        throw Error(ErrorKind::kSchema,
                    "configuration '" + c.id + "' is missing parameter '" + p.name + "'");
      }
    }
  }

  const bool has_other = std::any_of(table_.begin(), table_.end(),
                                     [](const ComponentDef& c) { return c.name == kOtherLogic; });
  std::set<std::pair<std::string, std::string>> keys;
  for (auto& s : samples_) {
    if (!config_index_.contains(s.config_id)) {
      throw Error(ErrorKind::kValidation,
                  "sample " + sample_key(s) + " references unknown configuration");
    }
    if (!keys.emplace(s.config_id, s.workload).second) {
      throw Error(ErrorKind::kDuplicate, "duplicate sample " + sample_key(s));
    }
    if (!std::isfinite(s.total_power) || s.total_power < 0.0) {
      throw Error(ErrorKind::kValidation, "sample " + sample_key(s) + ": invalid total_power");
    }
    if (!s.labeled()) {
      if (options_.require_labels || !s.component_power.empty()) {
        throw Error(ErrorKind::kValidation,
                    "sample " + sample_key(s) + ": total_power must be > 0");
      }
    }
    for (const auto& [name, mw] : s.component_power) {
      if (!std::any_of(table_.begin(), table_.end(),
                       [&](const ComponentDef& c) { return c.name == name; })) {
        throw Error(ErrorKind::kValidation,
                    "sample " + sample_key(s) + ": unknown component '" + name + "'");
      }
      if (!std::isfinite(mw) || mw <= 0.0) {
        throw Error(ErrorKind::kValidation, "sample " + sample_key(s) + ": power of '" +
                                                name + "' must be a positive number");
      }
    }
    for (const auto& [name, v] : s.event_stats) {
      if (!std::isfinite(v)) {
        throw Error(ErrorKind::kValidation, "sample " + sample_key(s) + ": event statistic '" +
                                                name + "' is not finite");
      }
    }
    if (s.analytical_estimate &&
        (!std::isfinite(*s.analytical_estimate) || *s.analytical_estimate < 0.0)) {
      throw Error(ErrorKind::kValidation,
                  "sample " + sample_key(s) + ": invalid analytical_estimate");
    }
    if (!s.labeled()) continue;

    // Other Logic absorbs whatever the named components do not cover.
    if (has_other && !s.component_power.contains(std::string(kOtherLogic))) {
      double rest = 0.0;
      bool covered = true;
      for (const auto& c : table_) {
        if (c.name == kOtherLogic) continue;
        auto it = s.component_power.find(c.name);
        if (it == s.component_power.end()) {
          covered = false;
          break;
        }
        rest += it->second;
      }
      if (covered) {
        const double other = s.total_power - rest;
        if (!(other > 0.0)) {
          throw Error(ErrorKind::kValidation,
                      "sample " + sample_key(s) +
                          ": components exceed total_power, cannot derive Other Logic");
        }
        s.component_power.emplace(std::string(kOtherLogic), other);
      }
    }
    if (s.component_power.size() == table_.size()) {
      double sum = 0.0;
      for (const auto& c : table_) sum += s.component_power.at(c.name);
      if (std::abs(sum - s.total_power) > 0.005 * s.total_power) {
        throw Error(ErrorKind::kValidation,
                    "sample " + sample_key(s) + ": component powers sum to " +
                        std::to_string(sum) + " but total_power is " +
                        std::to_string(s.total_power));
      }
    }
  }
}

const Configuration& Dataset::config(std::string_view id) const {
  auto it = config_index_.find(id);
  if (it == config_index_.end()) {
    throw Error(ErrorKind::kInvalidArgument, "unknown configuration '" + std::string(id) + "'");
  }
  return configs_[it->second];
}

bool Dataset::has_config(std::string_view id) const { return config_index_.contains(id); }

const ComponentDef& Dataset::component(std::string_view name) const {
  return find_component(table_, name);
}

std::vector<const PowerSample*> Dataset::samples_of(std::string_view config_id) const {
  std::vector<const PowerSample*> out;
  for (const auto& s : samples_) {
    if (s.config_id == config_id) out.push_back(&s);
  }
  return out;
}

std::vector<std::string> Dataset::config_ids() const {
  std::vector<std::string> ids;
  ids.reserve(configs_.size());
  for (const auto& c : configs_) ids.push_back(c.id);
  return ids;
}

bool Dataset::fully_labeled() const {
  return std::all_of(samples_.begin(), samples_.end(),
                     [](const PowerSample& s) { return s.labeled(); });
}

Dataset Dataset::subset(const std::vector<std::string>& ids) const {
  std::set<std::string> keep(ids.begin(), ids.end());
  std::vector<Configuration> configs;
  for (const auto& c : configs_) {
    if (keep.contains(c.id)) configs.push_back(c);
  }
  std::vector<PowerSample> samples;
  for (const auto& s : samples_) {
    if (keep.contains(s.config_id)) samples.push_back(s);
  }
  return Dataset(architecture_, registry_, table_, std::move(configs), std::move(samples),
                 options_);
}

Dataset Dataset::with_component_table(ComponentTable table) const {
  return Dataset(architecture_, registry_, std::move(table), configs_, samples_, options_);
}

bool Dataset::operator==(const Dataset& o) const {
  return architecture_ == o.architecture_ && registry_ == o.registry_ && table_ == o.table_ &&
         configs_ == o.configs_ && samples_ == o.samples_;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

std::vector<std::string> string_list(const json& j, std::string_view where) {
  if (!j.is_array()) throw Error(ErrorKind::kSchema, std::string(where) + ": expected an array");
  std::vector<std::string> out;
  for (const auto& v : j) {
    if (!v.is_string()) {
      throw Error(ErrorKind::kSchema, std::string(where) + ": expected strings");
    }
    out.push_back(v.get<std::string>());
  }
  return out;
}

ParameterRegistry parse_registry(const json& j) {
  if (!j.is_array()) throw Error(ErrorKind::kSchema, "parameters: expected an array");
  std::vector<HardwareParameter> params;
  for (const auto& p : j) {
    detail::reject_unknown_keys(p, {"name", "aliases"}, "parameters[]");
    HardwareParameter hp;
    hp.name = detail::require_string(p, "name", "parameters[]");
    if (p.contains("aliases")) hp.aliases = string_list(p["aliases"], "parameters[].aliases");
    params.push_back(std::move(hp));
  }
  return ParameterRegistry(std::move(params));
}

std::map<std::string, double> number_map(const json& j, std::string_view where) {
  if (!j.is_object()) throw Error(ErrorKind::kSchema, std::string(where) + ": expected an object");
  std::map<std::string, double> out;
  for (const auto& [k, v] : j.items()) {
    if (!v.is_number()) {
      throw Error(ErrorKind::kSchema, std::string(where) + "." + k + ": expected a number");
    }
    out.emplace(k, v.get<double>());
  }
  return out;
}

}  // namespace

namespace detail {

ComponentTable table_from_json(const json& j, const ParameterRegistry& registry) {
  if (!j.is_array()) throw Error(ErrorKind::kSchema, "component_table: expected an array");
  ComponentTable table;
  for (const auto& c : j) {
    detail::reject_unknown_keys(c, {"name", "hw_params", "event_stats", "important_param"},
                                "component_table[]");
    ComponentDef def;
    def.name = detail::require_string(c, "name", "component_table[]");
    def.hw_params = canonical_list(
        registry, string_list(detail::require(c, "hw_params", def.name), def.name + ".hw_params"));
    if (c.contains("event_stats")) {
      def.event_stats = string_list(c["event_stats"], def.name + ".event_stats");
    }
    if (c.contains("important_param") && !c["important_param"].is_null()) {
      if (!c["important_param"].is_string()) {
        throw Error(ErrorKind::kSchema, def.name + ".important_param must be a string");
      }
      def.important_param = registry.canonicalize(c["important_param"].get<std::string>());
    }
    table.push_back(std::move(def));
  }
  return table;
}

json table_to_json(const ComponentTable& table) {
  json arr = json::array();
  for (const auto& c : table) {
    json jc = {{"name", c.name}, {"hw_params", c.hw_params}, {"event_stats", c.event_stats}};
    jc["important_param"] = c.important_param ? json(*c.important_param) : json(nullptr);
    arr.push_back(std::move(jc));
  }
  return arr;
}

ComponentTable table_from_json(const json& j) {
  // Tables stored inside model files are already canonical; accept their
  // parameter names verbatim.
  if (!j.is_array()) throw Error(ErrorKind::kSchema, "component_table: expected an array");
  std::vector<HardwareParameter> params;
  std::set<std::string> seen;
  for (const auto& c : j) {
    for (const auto& p : require(c, "hw_params", "component_table[]")) {
      if (p.is_string() && seen.insert(p.get<std::string>()).second) {
        params.push_back({p.get<std::string>(), {}});
      }
    }
  }
  return table_from_json(j, ParameterRegistry(std::move(params)));
}

}  // namespace detail

Dataset parse_dataset(std::string_view text, LoadOptions options) {
  const json root = detail::parse_json(text, "dataset");
  detail::reject_unknown_keys(
      root, {"architecture", "parameters", "component_table", "configurations", "samples"},
      "dataset");
  std::string arch = detail::require_string(root, "architecture", "dataset");

  ParameterRegistry registry = root.contains("parameters")
                                   ? parse_registry(root["parameters"])
                                   : ParameterRegistry::builtin();
  ComponentTable table = root.contains("component_table")
                             ? detail::table_from_json(root["component_table"], registry)
                             : builtin_component_table();

  const auto& jconfigs = detail::require(root, "configurations", "dataset");
  if (!jconfigs.is_array() || jconfigs.empty()) {
    throw Error(ErrorKind::kSchema, "dataset: 'configurations' must be a non-empty array");
  }
  std::vector<Configuration> configs;
  for (const auto& jc : jconfigs) {
    detail::reject_unknown_keys(jc, {"id", "params"}, "configurations[]");
    Configuration c;
    c.id = detail::require_string(jc, "id", "configurations[]");
    c.architecture = arch;
    const auto& jp = detail::require(jc, "params", c.id);
    if (!jp.is_object()) throw Error(ErrorKind::kSchema, c.id + ".params: expected an object");
    for (const auto& [name, v] : jp.items()) {
      if (!v.is_number_integer()) {
        throw Error(ErrorKind::kSchema, c.id + "." + name + ": expected an integer");
      }
      auto canonical = registry.canonicalize(name);
      const auto value = v.get<std::int64_t>();
      auto [it, inserted] = c.params.emplace(canonical, value);
      if (!inserted && it->second != value) {
        throw Error(ErrorKind::kValidation, c.id + ": conflicting values for '" + canonical +
                                                "' through its aliases");
      }
    }
    configs.push_back(std::move(c));
  }

  std::vector<PowerSample> samples;
  const auto& jsamples = detail::require(root, "samples", "dataset");
  if (!jsamples.is_array()) throw Error(ErrorKind::kSchema, "dataset: 'samples' must be an array");
  for (const auto& js : jsamples) {
    detail::reject_unknown_keys(js,
                                {"config_id", "workload", "total_power", "component_power",
                                 "event_stats", "analytical_estimate"},
                                "samples[]");
    PowerSample s;
    s.config_id = detail::require_string(js, "config_id", "samples[]");
    s.workload = detail::require_string(js, "workload", "samples[]");
    if (options.require_labels || js.contains("total_power")) {
      s.total_power = detail::require_number(js, "total_power", "samples[]");
    }
    if (js.contains("component_power")) {
      s.component_power = number_map(js["component_power"], "component_power");
    }
    if (js.contains("event_stats")) s.event_stats = number_map(js["event_stats"], "event_stats");
    if (js.contains("analytical_estimate") && !js["analytical_estimate"].is_null()) {
      s.analytical_estimate = detail::require_number(js, "analytical_estimate", "samples[]");
    }
    samples.push_back(std::move(s));
  }
  return Dataset(std::move(arch), std::move(registry), std::move(table), std::move(configs),
                 std::move(samples), options);
}

Dataset load_dataset(const std::filesystem::path& path, LoadOptions options) {
  return parse_dataset(detail::read_text_file(path), options);
}

std::string dataset_to_string(const Dataset& ds) {
  json params = json::array();
  for (const auto& p : ds.registry().parameters()) {
    params.push_back({{"name", p.name}, {"aliases", p.aliases}});
  }
  json configs = json::array();
  for (const auto& c : ds.configurations()) {
    json jp = json::object();
    for (const auto& [k, v] : c.params) jp[k] = v;
    configs.push_back({{"id", c.id}, {"params", std::move(jp)}});
  }
  json samples = json::array();
  for (const auto& s : ds.samples()) {
    json js = {{"config_id", s.config_id}, {"workload", s.workload}};
    if (s.labeled()) {
      js["total_power"] = s.total_power;
      js["component_power"] = s.component_power;
    }
    js["event_stats"] = s.event_stats;
    js["analytical_estimate"] =
        s.analytical_estimate ? json(*s.analytical_estimate) : json(nullptr);
    samples.push_back(std::move(js));
  }
  json root = {{"architecture", ds.architecture()},
               {"parameters", std::move(params)},
               {"component_table", detail::table_to_json(ds.component_table())},
               {"configurations", std::move(configs)},
               {"samples", std::move(samples)}};
  return root.dump(1) + "\n";
}

void write_dataset(const Dataset& ds, const std::filesystem::path& path) {
  detail::write_text_atomic(path, dataset_to_string(ds));
}

ComponentTable load_component_table(const std::filesystem::path& path) {
  const json root = detail::parse_json(detail::read_text_file(path), "component table");
  const json& arr = root.is_object() ? detail::require(root, "component_table", "file") : root;
  auto table = detail::table_from_json(arr, ParameterRegistry::builtin());
  validate_table(ParameterRegistry::builtin(), table);
  return table;
}

// ---------------------------------------------------------------------------
// Queries

std::map<std::string, double> average_power_per_config(const Dataset& ds,
                                                       std::string_view component) {
  const auto& comp = ds.component(component);
  std::map<std::string, std::pair<double, std::size_t>> acc;
  for (const auto& c : ds.configurations()) acc.emplace(c.id, std::pair{0.0, std::size_t{0}});
  for (const auto& s : ds.samples()) {
    auto& [sum, n] = acc.at(s.config_id);
    sum += s.component(comp.name);
    ++n;
  }
  std::map<std::string, double> out;
  for (const auto& [id, sn] : acc) {
    if (sn.second == 0) {
      throw Error(ErrorKind::kMissingData, "configuration '" + id + "' has no samples");
    }
    out.emplace(id, sn.first / static_cast<double>(sn.second));
  }
  return out;
}

std::pair<Dataset, Dataset> few_shot_split(const Dataset& ds,
                                           const std::vector<std::string>& labeled) {
  std::set<std::string> chosen;
  for (const auto& id : labeled) {
    if (!ds.has_config(id)) {
      throw Error(ErrorKind::kInvalidArgument, "unknown configuration '" + id + "'");
    }
    if (!chosen.insert(id).second) {
      throw Error(ErrorKind::kDuplicate, "configuration '" + id + "' labeled twice");
    }
  }
  if (chosen.empty()) throw Error(ErrorKind::kInvalidArgument, "no labeled configurations");
  if (chosen.size() >= ds.configurations().size()) {
    throw Error(ErrorKind::kInvalidArgument, "few-shot split leaves no test configurations");
  }
  std::vector<std::string> rest;
  for (const auto& c : ds.configurations()) {
    if (!chosen.contains(c.id)) rest.push_back(c.id);
  }
  return {ds.subset(labeled), ds.subset(rest)};
}

std::vector<double> hardware_features(const ComponentDef& comp, const Configuration& config) {
  std::vector<double> x;
  x.reserve(comp.hw_params.size());
  for (const auto& p : comp.hw_params) x.push_back(static_cast<double>(config.value(p)));
  return x;
}

std::vector<double> event_features(const ComponentDef& comp,
                                   const std::map<std::string, double>& event_stats) {
  std::vector<double> x;
  x.reserve(comp.event_stats.size());
  for (const auto& e : comp.event_stats) {
    auto it = event_stats.find(e);
    if (it == event_stats.end()) {
      throw Error(ErrorKind::kMissingData,
                  "component '" + comp.name + "': missing event statistic '" + e + "'");
    }
    x.push_back(it->second);
  }
  return x;
}

std::vector<double> feature_vector(const Dataset& ds, const ComponentDef& comp,
                                   const PowerSample& sample, bool include_events) {
  auto x = hardware_features(comp, ds.config(sample.config_id));
  if (include_events) {
    auto e = event_features(comp, sample.event_stats);
    x.insert(x.end(), e.begin(), e.end());
  }
  return x;
}

}  // namespace firepower
