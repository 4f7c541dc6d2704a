// SPDX-License-Identifier: Apache-2.0
//
// Seeded generator of paired known/target datasets with recorded ground truth.
// Per sample: power = hw(H_i) * arch_scale * ev(E_i) * (1 + sigma * N(0,1)).
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "firepower/dataset.hpp"

namespace firepower {

struct ParamRange {
  std::string name;
  std::int64_t lo = 1;
  std::int64_t hi = 1;
  bool operator==(const ParamRange&) const = default;
};

// Min/max of each parameter over the BOOM and XiangShan configurations.
std::vector<ParamRange> default_param_ranges();

enum class HwFormKind { kLinear, kProduct, kPolynomial, kConstant };
std::string_view to_string(HwFormKind k);
HwFormKind parse_hw_form_kind(std::string_view s);

// Concrete hardware-scale function.
//   linear:     scale * x0 + offset
//   product:    scale * prod (x_j / ref_j)^coeffs_j
//   polynomial: scale * (offset + sum coeffs_j u_j + interaction u0 u1), u_j = x_j / ref_j
//   constant:   scale
struct HwForm {
  HwFormKind kind = HwFormKind::kConstant;
  std::vector<std::string> params;
  std::vector<double> refs;
  std::vector<double> coeffs;
  double scale = 1.0;
  double offset = 0.0;
  double interaction = 0.0;
  bool operator==(const HwForm&) const = default;
};

double evaluate(const HwForm& f, const Configuration& config);

// ev = 1 + a1 (e0/ref0 - 1) + a2 (e1/ref1 - 1) + a3 (e0/ref0 - 1)(e1/ref1 - 1)
struct EventFn {
  double a1 = 0.5;
  double a2 = 0.3;
  double a3 = 0.0;
  double ref0 = 0.6;
  double ref1 = 0.6;
  bool operator==(const EventFn&) const = default;
};

double evaluate(const EventFn& f, double e0, double e1);

struct ComponentSpec {
  std::string name;
  HwFormKind form = HwFormKind::kProduct;
  std::optional<std::string> dominant_param;  // linear forms only
  std::optional<double> arch_scale_known;     // drawn when unset
  std::optional<double> arch_scale_target;    // drawn when unset
  bool dissimilar = false;
  // Explicit overrides; drawn from the seed when unset.
  std::optional<HwForm> hw_known;
  std::optional<HwForm> hw_target;
  std::optional<EventFn> event_known;
  std::optional<EventFn> event_target;
  bool operator==(const ComponentSpec&) const = default;
};

struct SynthSpec {
  std::uint64_t seed = 1;
  int n_known_configs = 15;
  int n_target_configs = 10;
  int n_workloads = 8;
  double noise_sigma = 0.01;
  // Relative change of the linear intercept in the target (Retrain components).
  double intercept_shift = 0.2;
  // Relative perturbation of per-workload activity in the target.
  double event_shift = 0.1;
  // Coupling of event statistics to the component's activity index.
  double event_coupling = 0.2;
  double product_strength = 0.1;
  bool emit_analytical = false;
  std::vector<ParamRange> ranges = default_param_ranges();
  std::vector<ParamRange> target_ranges = default_param_ranges();
  std::vector<ComponentSpec> components;
  bool operator==(const SynthSpec&) const = default;
};

// One entry per built-in component; Table-1 dominance drives the forms:
// components with an important parameter get a linear form on it, I-TLB a
// constant, the rest products (Regfile and DCacheOthers polynomials).
SynthSpec default_synth_spec(std::uint64_t seed = 1);
void validate(const SynthSpec& spec);

struct ArchitectureTruth {
  std::string name;
  std::vector<std::string> config_ids;
  // activity[w][c] = {base e0, base e1} of workload w for component c.
  std::vector<std::vector<std::pair<double, double>>> activity;
};

struct ComponentTruth {
  std::string name;
  HwForm hw_known;
  HwForm hw_target;
  double arch_scale_known = 1.0;
  double arch_scale_target = 1.0;
  EventFn event_known;
  EventFn event_target;
  double analytical_bias = 1.0;
  bool dissimilar = false;
};

struct GroundTruth {
  SynthSpec spec;
  std::vector<std::string> workloads;
  std::vector<ComponentTruth> components;
  ArchitectureTruth known;
  ArchitectureTruth target;
};

struct SynthPair {
  Dataset known;
  Dataset target;
  GroundTruth truth;
};

SynthPair generate_pair(const SynthSpec& spec);

// Position of the configuration within the known ranges of the component's
// hardware-form parameters, in [0, 1]; 0.5 for constant forms.
double activity_index(const GroundTruth& truth, std::string_view component,
                      const Configuration& config);
// Noise-free event statistics {e0, e1}.
std::pair<double, double> truth_event_stats(const GroundTruth& truth, bool target,
                                            std::string_view component,
                                            const Configuration& config,
                                            std::string_view workload);
// Noise-free component power; `target` selects the architecture.
double truth_component_power(const GroundTruth& truth, bool target, std::string_view component,
                             const Configuration& config, std::string_view workload);

std::string spec_to_string(const SynthSpec& spec);
SynthSpec spec_from_string(std::string_view text);
SynthSpec load_spec(const std::filesystem::path& path);

std::string truth_to_string(const GroundTruth& truth);
GroundTruth truth_from_string(std::string_view text);

}  // namespace firepower
