// SPDX-License-Identifier: Apache-2.0
#include "firepower/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "json_io.hpp"

namespace firepower {

using detail::json;

std::vector<ParamRange> default_param_ranges() {
  return {
      {"FetchWidth", 4, 8},        {"DecodeWidth", 1, 5},      {"FetchBufferEntry", 5, 40},
      {"RobEntry", 16, 140},       {"IntPhyRegister", 36, 140}, {"FpPhyRegister", 36, 140},
      {"LDQ/STQEntry", 4, 40},     {"BranchCount", 6, 20},     {"Mem/FpIssueWidth", 1, 2},
      {"IntIssueWidth", 1, 6},     {"DCache/ICacheWay", 2, 8}, {"DTLBEntry", 8, 32},
      {"MSHREntry", 2, 8},         {"ICacheFetchBytes", 2, 4},
  };
}

std::string_view to_string(HwFormKind k) {
  switch (k) {
    case HwFormKind::kLinear: return "linear";
    case HwFormKind::kProduct: return "product";
    case HwFormKind::kPolynomial: return "polynomial";
    case HwFormKind::kConstant: return "constant";
  }
  return "unknown";
}

HwFormKind parse_hw_form_kind(std::string_view s) {
  for (auto k : {HwFormKind::kLinear, HwFormKind::kProduct, HwFormKind::kPolynomial,
                 HwFormKind::kConstant}) {
    if (to_string(k) == s) return k;
  }
  throw Error(ErrorKind::kSchema, "unknown hardware form '" + std::string(s) + "'");
}

namespace {

void check_form_shape(const HwForm& f) {
  const std::size_t n = f.params.size();
  if (f.refs.size() != n || f.coeffs.size() != n) {
    throw Error(ErrorKind::kValidation, "hardware form: params, refs and coeffs differ in length");
  }
  if ((f.kind == HwFormKind::kLinear || f.kind == HwFormKind::kPolynomial ||
       f.kind == HwFormKind::kProduct) &&
      n == 0) {
    throw Error(ErrorKind::kValidation,
                "hardware form '" + std::string(to_string(f.kind)) + "' needs a parameter");
  }
  for (double r : f.refs) {
    if (!(r > 0.0)) throw Error(ErrorKind::kValidation, "hardware form: refs must be > 0");
  }
}

double param_value(const Configuration& config, const std::string& p) {
  auto it = config.params.find(p);
  if (it == config.params.end()) {
    throw Error(ErrorKind::kInvalidArgument,
                "configuration '" + config.id + "' lacks parameter '" + p + "'");
  }
  return static_cast<double>(it->second);
}

}  // namespace

double evaluate(const HwForm& f, const Configuration& config) {
  check_form_shape(f);
  double v = 0.0;
  switch (f.kind) {
    case HwFormKind::kLinear:
      v = f.scale * param_value(config, f.params[0]) + f.offset;
      break;
    case HwFormKind::kProduct:
      v = f.scale;
      for (std::size_t j = 0; j < f.params.size(); ++j) {
        v *= std::pow(param_value(config, f.params[j]) / f.refs[j], f.coeffs[j]);
      }
      break;
    case HwFormKind::kPolynomial: {
      double acc = f.offset;
      std::vector<double> u;
      for (std::size_t j = 0; j < f.params.size(); ++j) {
        u.push_back(param_value(config, f.params[j]) / f.refs[j]);
        acc += f.coeffs[j] * u.back();
      }
      if (u.size() >= 2) acc += f.interaction * u[0] * u[1];
      v = f.scale * acc;
      break;
    }
    case HwFormKind::kConstant:
      v = f.scale;
      break;
  }
  if (!std::isfinite(v) || !(v > 0.0)) {
    throw Error(ErrorKind::kValidation, "hardware form gives non-positive power on '" +
                                            config.id + "'");
  }
  return v;
}

double evaluate(const EventFn& f, double e0, double e1) {
  const double d0 = e0 / f.ref0 - 1.0;
  const double d1 = e1 / f.ref1 - 1.0;
  const double v = 1.0 + f.a1 * d0 + f.a2 * d1 + f.a3 * d0 * d1;
  if (!std::isfinite(v) || !(v > 0.0)) {
    throw Error(ErrorKind::kValidation, "event function gives non-positive factor");
  }
  return v;
}

SynthSpec default_synth_spec(std::uint64_t seed) {
  SynthSpec spec;
  spec.seed = seed;
  for (const auto& comp : builtin_component_table()) {
    ComponentSpec c;
    c.name = comp.name;
    if (comp.important_param) {
      c.form = HwFormKind::kLinear;
      c.dominant_param = comp.important_param;
    } else if (comp.name == "I-TLB") {
      c.form = HwFormKind::kConstant;
    } else if (comp.name == "Regfile" || comp.name == "DCacheOthers") {
      c.form = HwFormKind::kPolynomial;
    } else {
      c.form = HwFormKind::kProduct;
    }
    spec.components.push_back(std::move(c));
  }
  return spec;
}

namespace {

const ParamRange& range_in(const std::vector<ParamRange>& ranges, const std::string& name) {
  for (const auto& r : ranges) {
    if (r.name == name) return r;
  }
  throw Error(ErrorKind::kValidation, "no range for parameter '" + name + "'");
}

const ParamRange& range_of(const SynthSpec& spec, const std::string& name) {
  return range_in(spec.ranges, name);
}

void validate_ranges(const std::vector<ParamRange>& ranges) {
  const auto& registry = ParameterRegistry::builtin();
  std::set<std::string> seen;
  for (const auto& r : ranges) {
    if (!registry.contains(r.name)) {
      throw Error(ErrorKind::kValidation, "range for unknown parameter '" + r.name + "'");
    }
    if (!seen.insert(r.name).second) {
      throw Error(ErrorKind::kValidation, "duplicate range for '" + r.name + "'");
    }
    if (r.lo < 1 || r.lo > r.hi) {
      throw Error(ErrorKind::kValidation, "invalid range for '" + r.name + "': [" +
                                              std::to_string(r.lo) + ", " + std::to_string(r.hi) +
                                              "]");
    }
  }
  for (const auto& name : registry.canonical_names()) range_in(ranges, name);
}

}  // namespace

void validate(const SynthSpec& spec) {
  if (spec.n_known_configs < 2) throw Error(ErrorKind::kValidation, "n_known_configs must be >= 2");
  if (spec.n_target_configs < 2) {
    throw Error(ErrorKind::kValidation, "n_target_configs must be >= 2");
  }
  if (spec.n_workloads < 1) throw Error(ErrorKind::kValidation, "n_workloads must be >= 1");
  if (!(spec.noise_sigma >= 0.0 && spec.noise_sigma < 0.5)) {
    throw Error(ErrorKind::kValidation, "noise_sigma must lie in [0, 0.5)");
  }
  if (!(spec.event_shift >= 0.0 && spec.event_shift < 1.0)) {
    throw Error(ErrorKind::kValidation, "event_shift must lie in [0, 1)");
  }
  if (!(spec.event_coupling >= 0.0 && spec.event_coupling < 1.0)) {
    throw Error(ErrorKind::kValidation, "event_coupling must lie in [0, 1)");
  }
  if (!std::isfinite(spec.intercept_shift) || spec.intercept_shift < 0.0) {
    throw Error(ErrorKind::kValidation, "intercept_shift must be >= 0");
  }
  if (!(spec.product_strength > 0.0 && spec.product_strength < 5.0)) {
    throw Error(ErrorKind::kValidation, "product_strength must lie in (0, 5)");
  }
  validate_ranges(spec.ranges);
  validate_ranges(spec.target_ranges);

  if (spec.components.empty()) throw Error(ErrorKind::kValidation, "no components");
  const auto table = builtin_component_table();
  std::set<std::string> names;
  for (const auto& c : spec.components) {
    const auto& def = find_component(table, c.name);
    if (!names.insert(c.name).second) {
      throw Error(ErrorKind::kValidation, "duplicate component '" + c.name + "'");
    }
    if (c.dominant_param &&
        std::find(def.hw_params.begin(), def.hw_params.end(), *c.dominant_param) ==
            def.hw_params.end()) {
      throw Error(ErrorKind::kValidation, "dominant_param '" + *c.dominant_param +
                                              "' is not a parameter of " + c.name);
    }
    for (const auto& s : {c.arch_scale_known, c.arch_scale_target}) {
      if (s && !(*s > 0.0 && std::isfinite(*s))) {
        throw Error(ErrorKind::kValidation, "arch scale of " + c.name + " must be > 0");
      }
    }
    for (const auto* f : {&c.hw_known, &c.hw_target}) {
      if (!*f) continue;
      check_form_shape(**f);
      for (const auto& p : (*f)->params) {
        if (std::find(def.hw_params.begin(), def.hw_params.end(), p) == def.hw_params.end()) {
          throw Error(ErrorKind::kValidation,
                      "form parameter '" + p + "' is not a parameter of " + c.name);
        }
      }
    }
  }
}

namespace {

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::vector<std::string> workload_names(int n) {
  static const std::vector<std::string> base = {"dhrystone", "median", "multiply", "qsort",
                                                "rsort",     "towers", "spmv",     "vvadd"};
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) {
    out.push_back(i < static_cast<int>(base.size()) ? base[i] : "w" + std::to_string(i + 1));
  }
  return out;
}

std::vector<std::string> form_params(const ComponentSpec& c, const ComponentDef& def) {
  if (c.form == HwFormKind::kLinear) {
    return {c.dominant_param.value_or(def.hw_params.front())};
  }
  if (def.name == kOtherLogic && c.form != HwFormKind::kConstant) {
    return {"DecodeWidth", "RobEntry"};
  }
  return def.hw_params;
}

// Standard deviation of ln(x) for x uniform over the integer range.
double log_spread(const ParamRange& r) {
  double m = 0.0;
  double m2 = 0.0;
  const double n = static_cast<double>(r.hi - r.lo + 1);
  for (auto x = r.lo; x <= r.hi; ++x) {
    const double l = std::log(static_cast<double>(x));
    m += l / n;
    m2 += l * l / n;
  }
  return std::sqrt(std::max(0.0, m2 - m * m));
}

double sample_log_spread(const std::vector<Configuration>& configs, const std::string& p) {
  if (configs.size() < 2) return 0.0;
  double m = 0.0;
  double m2 = 0.0;
  const double n = static_cast<double>(configs.size());
  for (const auto& c : configs) {
    const double l = std::log(static_cast<double>(c.params.at(p)));
    m += l / n;
    m2 += l * l / n;
  }
  return std::sqrt(std::max(0.0, m2 - m * m));
}

HwForm draw_known_form(const SynthSpec& spec, const ComponentSpec& c, const ComponentDef& def,
                       double s, const std::vector<Configuration>& known_configs,
                       std::mt19937_64& rng) {
  HwForm f;
  f.kind = c.form;
  f.params = form_params(c, def);
  for (const auto& p : f.params) f.refs.push_back(static_cast<double>(range_of(spec, p).hi));
  f.coeffs.assign(f.params.size(), 0.0);
  switch (c.form) {
    case HwFormKind::kLinear:
      f.coeffs[0] = 1.0;
      f.scale = s / f.refs[0];
      f.offset = s * uniform(rng, 0.2, 0.4);
      break;
    case HwFormKind::kProduct:
      f.scale = s;
      // Exponents equalize the spread of each log factor over the drawn known
      // configs, so no single parameter dominates by sampling accident.
      for (std::size_t j = 0; j < f.params.size(); ++j) {
        double sd = sample_log_spread(known_configs, f.params[j]);
        if (!(sd > 0.0)) sd = log_spread(range_of(spec, f.params[j]));
        const double jitter = uniform(rng, 0.9, 1.1);
        f.coeffs[j] = sd > 0.0 ? spec.product_strength * jitter / (2.0 * sd) : 0.0;
      }
      break;
    case HwFormKind::kPolynomial:
      f.scale = s;
      f.offset = 1.0;
      for (auto& b : f.coeffs) b = spec.product_strength * uniform(rng, 0.5, 1.0);
      f.interaction = spec.product_strength * uniform(rng, 0.2, 0.5);
      break;
    case HwFormKind::kConstant:
      f.scale = s;
      break;
  }
  return f;
}

// Polynomial decreasing in the first parameter; replaces the known shape.
HwForm dissimilar_form(const SynthSpec& spec, const HwForm& known) {
  HwForm f;
  f.kind = HwFormKind::kPolynomial;
  f.params = known.params;
  f.refs.clear();
  for (const auto& p : f.params) f.refs.push_back(static_cast<double>(range_of(spec, p).hi));
  f.coeffs.assign(f.params.size(), 0.0);
  const auto& r0 = range_of(spec, f.params[0]);
  const double lo_u = static_cast<double>(r0.lo) / static_cast<double>(r0.hi);
  f.coeffs[0] = -1.2;
  f.offset = 0.2 + 1.2 * (1.0 + lo_u);
  f.scale = known.kind == HwFormKind::kLinear ? known.scale * known.refs[0] : known.scale;
  return f;
}

HwForm shifted_target_form(const SynthSpec& spec, const HwForm& known) {
  HwForm f = known;
  if (f.kind == HwFormKind::kLinear) {
    f.offset += spec.intercept_shift * std::abs(f.scale) *
                static_cast<double>(range_of(spec, f.params[0]).hi);
  }
  return f;
}

EventFn draw_event_fn(std::mt19937_64& rng) {
  EventFn e;
  e.a1 = uniform(rng, 0.3, 0.7);
  e.a2 = uniform(rng, 0.2, 0.5);
  e.a3 = uniform(rng, -0.2, 0.2);
  e.ref0 = 0.65;
  e.ref1 = 0.65;
  return e;
}

std::size_t workload_index(const GroundTruth& truth, std::string_view workload) {
  for (std::size_t i = 0; i < truth.workloads.size(); ++i) {
    if (truth.workloads[i] == workload) return i;
  }
  throw Error(ErrorKind::kInvalidArgument, "unknown workload '" + std::string(workload) + "'");
}

std::size_t component_index(const GroundTruth& truth, std::string_view component) {
  for (std::size_t i = 0; i < truth.components.size(); ++i) {
    if (truth.components[i].name == component) return i;
  }
  throw Error(ErrorKind::kInvalidArgument, "unknown component '" + std::string(component) + "'");
}

void check_domain(const GroundTruth& truth, bool target, const Configuration& config) {
  for (const auto& r : target ? truth.spec.target_ranges : truth.spec.ranges) {
    const double v = param_value(config, r.name);
    if (v < static_cast<double>(r.lo) || v > static_cast<double>(r.hi)) {
      throw Error(ErrorKind::kInvalidArgument, "configuration '" + config.id + "' has " + r.name +
                                                   " outside [" + std::to_string(r.lo) + ", " +
                                                   std::to_string(r.hi) + "]");
    }
  }
}

}  // namespace

double activity_index(const GroundTruth& truth, std::string_view component,
                      const Configuration& config) {
  const auto& f = truth.components[component_index(truth, component)].hw_known;
  if (f.kind == HwFormKind::kConstant || f.params.empty()) return 0.5;
  double acc = 0.0;
  for (const auto& p : f.params) {
    const auto& r = range_of(truth.spec, p);
    if (r.hi > r.lo) {
      acc += std::clamp((param_value(config, p) - static_cast<double>(r.lo)) /
                            static_cast<double>(r.hi - r.lo),
                        0.0, 1.0);
    } else {
      acc += 0.5;
    }
  }
  return acc / static_cast<double>(f.params.size());
}

std::pair<double, double> truth_event_stats(const GroundTruth& truth, bool target,
                                            std::string_view component,
                                            const Configuration& config,
                                            std::string_view workload) {
  check_domain(truth, target, config);
  const auto c = component_index(truth, component);
  const auto w = workload_index(truth, workload);
  const auto& arch = target ? truth.target : truth.known;
  const double couple =
      1.0 + truth.spec.event_coupling * (activity_index(truth, component, config) - 0.5);
  const auto& [b0, b1] = arch.activity.at(w).at(c);
  return {b0 * couple, b1 * couple};
}

double truth_component_power(const GroundTruth& truth, bool target, std::string_view component,
                             const Configuration& config, std::string_view workload) {
  const auto [e0, e1] = truth_event_stats(truth, target, component, config, workload);
  const auto& ct = truth.components[component_index(truth, component)];
  if (target) {
    return evaluate(ct.hw_target, config) * ct.arch_scale_target * evaluate(ct.event_target, e0, e1);
  }
  return evaluate(ct.hw_known, config) * ct.arch_scale_known * evaluate(ct.event_known, e0, e1);
}

namespace {

std::vector<Configuration> draw_configs(const std::vector<ParamRange>& ranges,
                                        const std::string& arch, const std::string& prefix, int n,
                                        std::mt19937_64& rng) {
  std::vector<Configuration> out;
  for (int i = 0; i < n; ++i) {
    Configuration c;
    c.id = prefix + std::to_string(i + 1);
    c.architecture = arch;
    for (const auto& name : ParameterRegistry::builtin().canonical_names()) {
      const auto& r = range_in(ranges, name);
      c.params[name] = std::uniform_int_distribution<std::int64_t>(r.lo, r.hi)(rng);
    }
    out.push_back(std::move(c));
  }
  return out;
}

Dataset build_dataset(const GroundTruth& truth, bool target, const ComponentTable& table,
                      const std::vector<Configuration>& configs, std::mt19937_64& noise_rng) {
  const auto& arch = target ? truth.target : truth.known;
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<PowerSample> samples;
  for (const auto& config : configs) {
    for (const auto& w : truth.workloads) {
      PowerSample s;
      s.config_id = config.id;
      s.workload = w;
      double total = 0.0;
      double analytical = 0.0;
      for (std::size_t c = 0; c < table.size(); ++c) {
        const auto& comp = table[c];
        const auto [e0, e1] = truth_event_stats(truth, target, comp.name, config, w);
        s.event_stats[comp.event_stats[0]] = e0;
        s.event_stats[comp.event_stats[1]] = e1;
        const double clean = truth_component_power(truth, target, comp.name, config, w);
        // Gaussian clipped at 3 sigma.
        const double z = std::clamp(gauss(noise_rng), -3.0, 3.0);
        const double factor = std::max(1e-3, 1.0 + truth.spec.noise_sigma * z);
        const double p = clean * factor;
        s.component_power[comp.name] = p;
        total += p;
        analytical += truth.components[c].analytical_bias * clean;
      }
      s.total_power = total;
      if (truth.spec.emit_analytical) s.analytical_estimate = analytical;
      samples.push_back(std::move(s));
    }
  }
  return Dataset(arch.name, ParameterRegistry::builtin(), table, configs, std::move(samples));
}

}  // namespace

SynthPair generate_pair(const SynthSpec& spec) {
  validate(spec);
  GroundTruth truth;
  truth.spec = spec;
  truth.workloads = workload_names(spec.n_workloads);

  truth.known.name = "known-synth";
  truth.target.name = "target-synth";
  std::mt19937_64 config_rng(stream_seed(spec.seed, 1));
  const auto known_configs =
      draw_configs(spec.ranges, truth.known.name, "K", spec.n_known_configs, config_rng);
  const auto target_configs =
      draw_configs(spec.target_ranges, truth.target.name, "T", spec.n_target_configs, config_rng);

  const auto builtin = builtin_component_table();
  ComponentTable table;
  for (std::size_t ci = 0; ci < spec.components.size(); ++ci) {
    const auto& c = spec.components[ci];
    auto def = find_component(builtin, c.name);
    def.event_stats = example_event_stats(def.name);
    table.push_back(def);

    std::mt19937_64 rng(stream_seed(spec.seed, 100 + ci));
    const bool big = def.name == kOtherLogic;
    const double s = big ? uniform(rng, 40.0, 80.0) : std::exp(uniform(rng, std::log(2.0), std::log(40.0)));
    ComponentTruth ct;
    ct.name = c.name;
    ct.dissimilar = c.dissimilar;
    const HwForm drawn = draw_known_form(spec, c, def, s, known_configs, rng);
    ct.hw_known = c.hw_known.value_or(drawn);
    const double drawn_target_scale = uniform(rng, 0.6, 1.6);
    ct.arch_scale_known = c.arch_scale_known.value_or(1.0);
    ct.arch_scale_target = c.arch_scale_target.value_or(drawn_target_scale);
    const EventFn ek = draw_event_fn(rng);
    const EventFn et = draw_event_fn(rng);
    ct.event_known = c.event_known.value_or(ek);
    ct.event_target = c.event_target.value_or(et);
    ct.analytical_bias = uniform(rng, 0.7, 1.3);
    if (c.hw_target) {
      ct.hw_target = *c.hw_target;
    } else if (c.dissimilar) {
      ct.hw_target = dissimilar_form(spec, ct.hw_known);
    } else {
      ct.hw_target = shifted_target_form(spec, ct.hw_known);
    }
    truth.components.push_back(std::move(ct));
  }

  std::mt19937_64 activity_rng(stream_seed(spec.seed, 3));
  for (int w = 0; w < spec.n_workloads; ++w) {
    std::vector<std::pair<double, double>> k_row;
    std::vector<std::pair<double, double>> t_row;
    for (std::size_t c = 0; c < table.size(); ++c) {
      const double b0 = uniform(activity_rng, 0.3, 1.0);
      const double b1 = uniform(activity_rng, 0.3, 1.0);
      const double d0 = uniform(activity_rng, -1.0, 1.0);
      const double d1 = uniform(activity_rng, -1.0, 1.0);
      k_row.emplace_back(b0, b1);
      t_row.emplace_back(b0 * (1.0 + spec.event_shift * d0), b1 * (1.0 + spec.event_shift * d1));
    }
    truth.known.activity.push_back(std::move(k_row));
    truth.target.activity.push_back(std::move(t_row));
  }

  for (const auto& c : known_configs) truth.known.config_ids.push_back(c.id);
  for (const auto& c : target_configs) truth.target.config_ids.push_back(c.id);

  std::mt19937_64 known_noise(stream_seed(spec.seed, 4));
  std::mt19937_64 target_noise(stream_seed(spec.seed, 5));
  Dataset known = build_dataset(truth, false, table, known_configs, known_noise);
  Dataset target = build_dataset(truth, true, table, target_configs, target_noise);
  return SynthPair{std::move(known), std::move(target), std::move(truth)};
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

json form_to_json(const HwForm& f) {
  return json{{"kind", std::string(to_string(f.kind))},
              {"params", f.params},
              {"refs", f.refs},
              {"coeffs", f.coeffs},
              {"scale", f.scale},
              {"offset", f.offset},
              {"interaction", f.interaction}};
}

HwForm form_from_json(const json& j) {
  const std::string where = "hardware form";
  detail::reject_unknown_keys(j, {"kind", "params", "refs", "coeffs", "scale", "offset",
                                  "interaction"},
                              where);
  HwForm f;
  f.kind = parse_hw_form_kind(detail::require_string(j, "kind", where));
  try {
    if (j.contains("params")) f.params = j.at("params").get<std::vector<std::string>>();
    if (j.contains("refs")) f.refs = j.at("refs").get<std::vector<double>>();
    if (j.contains("coeffs")) f.coeffs = j.at("coeffs").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kSchema, where + ": " + e.what());
  }
  if (f.kind == HwFormKind::kLinear && f.coeffs.empty() && f.params.size() == 1) {
    f.coeffs = {1.0};
  }
  if (f.refs.empty()) f.refs.assign(f.params.size(), 1.0);
  f.scale = detail::require_number(j, "scale", where);
  if (j.contains("offset")) f.offset = detail::require_number(j, "offset", where);
  if (j.contains("interaction")) f.interaction = detail::require_number(j, "interaction", where);
  check_form_shape(f);
  return f;
}

json event_to_json(const EventFn& e) {
  return json{{"a1", e.a1}, {"a2", e.a2}, {"a3", e.a3}, {"ref0", e.ref0}, {"ref1", e.ref1}};
}

EventFn event_from_json(const json& j) {
  const std::string where = "event function";
  detail::reject_unknown_keys(j, {"a1", "a2", "a3", "ref0", "ref1"}, where);
  EventFn e;
  e.a1 = detail::require_number(j, "a1", where);
  e.a2 = detail::require_number(j, "a2", where);
  e.a3 = detail::require_number(j, "a3", where);
  if (j.contains("ref0")) e.ref0 = detail::require_number(j, "ref0", where);
  if (j.contains("ref1")) e.ref1 = detail::require_number(j, "ref1", where);
  if (!(e.ref0 > 0.0) || !(e.ref1 > 0.0)) {
    throw Error(ErrorKind::kValidation, "event function refs must be > 0");
  }
  return e;
}

json spec_to_json(const SynthSpec& spec) {
  auto ranges_json = [](const std::vector<ParamRange>& rs) {
    json out = json::array();
    for (const auto& r : rs) out.push_back({{"name", r.name}, {"lo", r.lo}, {"hi", r.hi}});
    return out;
  };
  json comps = json::array();
  for (const auto& c : spec.components) {
    json jc{{"name", c.name}, {"form", std::string(to_string(c.form))}, {"dissimilar", c.dissimilar}};
    if (c.dominant_param) jc["dominant_param"] = *c.dominant_param;
    if (c.arch_scale_known) jc["arch_scale_known"] = *c.arch_scale_known;
    if (c.arch_scale_target) jc["arch_scale_target"] = *c.arch_scale_target;
    if (c.hw_known) jc["hw_known"] = form_to_json(*c.hw_known);
    if (c.hw_target) jc["hw_target"] = form_to_json(*c.hw_target);
    if (c.event_known) jc["event_known"] = event_to_json(*c.event_known);
    if (c.event_target) jc["event_target"] = event_to_json(*c.event_target);
    comps.push_back(std::move(jc));
  }
  return json{{"seed", spec.seed},
              {"n_known_configs", spec.n_known_configs},
              {"n_target_configs", spec.n_target_configs},
              {"n_workloads", spec.n_workloads},
              {"noise_sigma", spec.noise_sigma},
              {"intercept_shift", spec.intercept_shift},
              {"event_shift", spec.event_shift},
              {"event_coupling", spec.event_coupling},
              {"product_strength", spec.product_strength},
              {"emit_analytical", spec.emit_analytical},
              {"ranges", ranges_json(spec.ranges)},
              {"target_ranges", ranges_json(spec.target_ranges)},
              {"components", comps}};
}

int require_int(const json& j, std::string_view key, std::string_view where) {
  const auto& v = detail::require(j, key, where);
  if (!v.is_number_integer()) {
    throw Error(ErrorKind::kSchema, std::string(where) + ": '" + std::string(key) +
                                        "' must be an integer");
  }
  return v.get<int>();
}

bool require_bool(const json& j, std::string_view key, std::string_view where) {
  const auto& v = detail::require(j, key, where);
  if (!v.is_boolean()) {
    throw Error(ErrorKind::kSchema, std::string(where) + ": '" + std::string(key) +
                                        "' must be a boolean");
  }
  return v.get<bool>();
}

SynthSpec spec_from_json(const json& j) {
  const std::string where = "synth spec";
  if (!j.is_object()) throw Error(ErrorKind::kSchema, where + " must be an object");
  detail::reject_unknown_keys(
      j, {"seed", "n_known_configs", "n_target_configs", "n_workloads", "noise_sigma",
          "intercept_shift", "event_shift", "event_coupling", "product_strength",
          "emit_analytical", "ranges", "target_ranges", "components"},
      where);
  SynthSpec spec;
  if (j.contains("seed")) {
    const auto& v = j.at("seed");
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      throw Error(ErrorKind::kSchema, where + ": 'seed' must be a non-negative integer");
    }
    spec.seed = v.get<std::uint64_t>();
  }
  spec = default_synth_spec(spec.seed);
  if (j.contains("n_known_configs")) spec.n_known_configs = require_int(j, "n_known_configs", where);
  if (j.contains("n_target_configs")) {
    spec.n_target_configs = require_int(j, "n_target_configs", where);
  }
  if (j.contains("n_workloads")) spec.n_workloads = require_int(j, "n_workloads", where);
  if (j.contains("noise_sigma")) spec.noise_sigma = detail::require_number(j, "noise_sigma", where);
  if (j.contains("intercept_shift")) {
    spec.intercept_shift = detail::require_number(j, "intercept_shift", where);
  }
  if (j.contains("event_shift")) spec.event_shift = detail::require_number(j, "event_shift", where);
  if (j.contains("event_coupling")) {
    spec.event_coupling = detail::require_number(j, "event_coupling", where);
  }
  if (j.contains("product_strength")) {
    spec.product_strength = detail::require_number(j, "product_strength", where);
  }
  if (j.contains("emit_analytical")) spec.emit_analytical = require_bool(j, "emit_analytical", where);
  // Listed ranges override the defaults by name.
  auto merge_ranges = [&](const char* key, std::vector<ParamRange>& into) {
    if (!j.contains(key)) return;
    const auto& jr = j.at(key);
    if (!jr.is_array()) {
      throw Error(ErrorKind::kSchema, where + ": '" + key + "' must be an array");
    }
    for (const auto& r : jr) {
      detail::reject_unknown_keys(r, {"name", "lo", "hi"}, "range");
      ParamRange pr{ParameterRegistry::builtin().canonicalize(detail::require_string(r, "name", "range")),
                    require_int(r, "lo", "range"), require_int(r, "hi", "range")};
      auto it = std::find_if(into.begin(), into.end(),
                             [&](const ParamRange& x) { return x.name == pr.name; });
      if (it == into.end()) {
        into.push_back(pr);
      } else {
        *it = pr;
      }
    }
  };
  merge_ranges("ranges", spec.ranges);
  merge_ranges("target_ranges", spec.target_ranges);
  if (j.contains("components")) {
    const auto& jc = j.at("components");
    if (!jc.is_array()) throw Error(ErrorKind::kSchema, where + ": 'components' must be an array");
    spec.components.clear();
    for (const auto& c : jc) {
      const std::string cw = "synth component";
      detail::reject_unknown_keys(c, {"name", "form", "dominant_param", "arch_scale_known",
                                      "arch_scale_target", "dissimilar", "hw_known", "hw_target",
                                      "event_known", "event_target"},
                                  cw);
      ComponentSpec cs;
      cs.name = detail::require_string(c, "name", cw);
      if (c.contains("form")) cs.form = parse_hw_form_kind(detail::require_string(c, "form", cw));
      if (c.contains("dominant_param")) {
        cs.dominant_param =
            ParameterRegistry::builtin().canonicalize(detail::require_string(c, "dominant_param", cw));
      }
      if (c.contains("arch_scale_known")) {
        cs.arch_scale_known = detail::require_number(c, "arch_scale_known", cw);
      }
      if (c.contains("arch_scale_target")) {
        cs.arch_scale_target = detail::require_number(c, "arch_scale_target", cw);
      }
      if (c.contains("dissimilar")) cs.dissimilar = require_bool(c, "dissimilar", cw);
      if (c.contains("hw_known")) cs.hw_known = form_from_json(c.at("hw_known"));
      if (c.contains("hw_target")) cs.hw_target = form_from_json(c.at("hw_target"));
      if (c.contains("event_known")) cs.event_known = event_from_json(c.at("event_known"));
      if (c.contains("event_target")) cs.event_target = event_from_json(c.at("event_target"));
      spec.components.push_back(std::move(cs));
    }
  }
  validate(spec);
  return spec;
}

json arch_to_json(const ArchitectureTruth& a) {
  json activity = json::array();
  for (const auto& row : a.activity) {
    json jr = json::array();
    for (const auto& [b0, b1] : row) jr.push_back(json::array({b0, b1}));
    activity.push_back(std::move(jr));
  }
  return json{{"name", a.name}, {"config_ids", a.config_ids}, {"activity", activity}};
}

ArchitectureTruth arch_from_json(const json& j) {
  const std::string where = "architecture truth";
  detail::reject_unknown_keys(j, {"name", "config_ids", "activity"}, where);
  ArchitectureTruth a;
  a.name = detail::require_string(j, "name", where);
  try {
    a.config_ids = detail::require(j, "config_ids", where).get<std::vector<std::string>>();
    for (const auto& row : detail::require(j, "activity", where)) {
      std::vector<std::pair<double, double>> r;
      for (const auto& cell : row) r.emplace_back(cell.at(0).get<double>(), cell.at(1).get<double>());
      a.activity.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kSchema, where + ": " + e.what());
  }
  return a;
}

}  // namespace

std::string spec_to_string(const SynthSpec& spec) { return spec_to_json(spec).dump(2) + "\n"; }

SynthSpec spec_from_string(std::string_view text) {
  return spec_from_json(detail::parse_json(text, "synth spec"));
}

SynthSpec load_spec(const std::filesystem::path& path) {
  return spec_from_string(detail::read_text_file(path));
}

std::string truth_to_string(const GroundTruth& truth) {
  json comps = json::array();
  for (const auto& c : truth.components) {
    comps.push_back({{"name", c.name},
                     {"hw_known", form_to_json(c.hw_known)},
                     {"hw_target", form_to_json(c.hw_target)},
                     {"arch_scale_known", c.arch_scale_known},
                     {"arch_scale_target", c.arch_scale_target},
                     {"event_known", event_to_json(c.event_known)},
                     {"event_target", event_to_json(c.event_target)},
                     {"analytical_bias", c.analytical_bias},
                     {"dissimilar", c.dissimilar}});
  }
  json j{{"spec", spec_to_json(truth.spec)},
         {"workloads", truth.workloads},
         {"components", comps},
         {"known", arch_to_json(truth.known)},
         {"target", arch_to_json(truth.target)}};
  return j.dump(2) + "\n";
}

GroundTruth truth_from_string(std::string_view text) {
  const json j = detail::parse_json(text, "ground truth");
  const std::string where = "ground truth";
  detail::reject_unknown_keys(j, {"spec", "workloads", "components", "known", "target"}, where);
  GroundTruth t;
  t.spec = spec_from_json(detail::require(j, "spec", where));
  try {
    t.workloads = detail::require(j, "workloads", where).get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kSchema, where + ": " + e.what());
  }
  for (const auto& c : detail::require(j, "components", where)) {
    const std::string cw = "component truth";
    detail::reject_unknown_keys(c, {"name", "hw_known", "hw_target", "arch_scale_known",
                                    "arch_scale_target", "event_known", "event_target",
                                    "analytical_bias", "dissimilar"},
                                cw);
    ComponentTruth ct;
    ct.name = detail::require_string(c, "name", cw);
    ct.hw_known = form_from_json(detail::require(c, "hw_known", cw));
    ct.hw_target = form_from_json(detail::require(c, "hw_target", cw));
    ct.arch_scale_known = detail::require_number(c, "arch_scale_known", cw);
    ct.arch_scale_target = detail::require_number(c, "arch_scale_target", cw);
    ct.event_known = event_from_json(detail::require(c, "event_known", cw));
    ct.event_target = event_from_json(detail::require(c, "event_target", cw));
    ct.analytical_bias = detail::require_number(c, "analytical_bias", cw);
    ct.dissimilar = require_bool(c, "dissimilar", cw);
    t.components.push_back(std::move(ct));
  }
  t.known = arch_from_json(detail::require(j, "known", where));
  t.target = arch_from_json(detail::require(j, "target", where));
  return t;
}

}  // namespace firepower
