#include "sinkdiv/config.hpp"

#include <cmath>
#include <limits>

#include "sinkdiv/errors.hpp"

namespace sinkdiv::config {

namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

const Json* find(const Json& obj, const std::string& key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

// Library validation errors raised while building a value from `path`.
template <class F>
auto at_path(const std::string& path, F&& build) {
  try {
    return build();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace

void reject_unknown_keys(const Json& obj, std::initializer_list<std::string_view> allowed,
                         const std::string& path) {
  if (!obj.is_object()) throw ConfigError((path.empty() ? "config" : path) + ": expected an object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (std::string_view a : allowed) known = known || item.key() == a;
    if (!known) throw ConfigError(join(path, item.key()) + ": unknown key");
  }
}

const Json& require(const Json& obj, const std::string& key, const std::string& path) {
  const Json* v = find(obj, key);
  if (v == nullptr) throw ConfigError(join(path, key) + ": missing required key");
  return *v;
}

double get_number(const Json& node, const std::string& path) {
  if (!node.is_number()) throw ConfigError(path + ": expected a number");
  return node.get<double>();
}

double get_extended_number(const Json& node, const std::string& path) {
  if (node.is_string() && node.get<std::string>() == "inf") {
    return std::numeric_limits<double>::infinity();
  }
  if (!node.is_number()) throw ConfigError(path + ": expected a number or \"inf\"");
  return node.get<double>();
}

std::size_t get_count(const Json& node, const std::string& path) {
  if (!node.is_number_integer() || node.get<long long>() < 0) {
    throw ConfigError(path + ": expected a non-negative integer");
  }
  return node.get<std::size_t>();
}

std::string get_string(const Json& node, const std::string& path) {
  if (!node.is_string()) throw ConfigError(path + ": expected a string");
  return node.get<std::string>();
}

std::vector<double> get_numbers(const Json& node, const std::string& path) {
  if (!node.is_array()) throw ConfigError(path + ": expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < node.size(); ++i) {
    out.push_back(get_number(node[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

BoundingBox parse_box(const Json& node, const std::string& path) {
  reject_unknown_keys(node, {"lower", "upper"}, path);
  auto lower = get_numbers(require(node, "lower", path), join(path, "lower"));
  auto upper = get_numbers(require(node, "upper", path), join(path, "upper"));
  if (lower.size() != upper.size()) {
    throw ConfigError(path + ": lower and upper have different lengths");
  }
  return at_path(path, [&] { return BoundingBox(std::move(lower), std::move(upper)); });
}

Kernel parse_kernel(const Json& node, const BoundingBox& box, const std::string& path) {
  reject_unknown_keys(node, {"variant", "params"}, path);
  const std::string variant = get_string(require(node, "variant", path), join(path, "variant"));
  static const Json kEmpty = Json::object();
  const Json* p = find(node, "params");
  const Json& params = p != nullptr ? *p : kEmpty;
  const std::string pp = join(path, "params");
  auto num = [&](const char* key, double fallback) {
    const Json* v = find(params, key);
    return v == nullptr ? fallback : get_number(*v, join(pp, key));
  };

  KernelVariant kv;
  if (variant == "gaussian") {
    reject_unknown_keys(params, {"c"}, pp);
    kv = kernel::Gaussian{num("c", 1.0)};
  } else if (variant == "inverse_multiquadric") {
    reject_unknown_keys(params, {"c", "p"}, pp);
    kv = kernel::InverseMultiquadric{num("c", 1.0), num("p", 0.5)};
  } else if (variant == "wendland_power") {
    reject_unknown_keys(params, {"p"}, pp);
    kv = kernel::WendlandPower{num("p", std::floor(box.dim() / 2.0) + 1.0)};
  } else if (variant == "negative_distance") {
    reject_unknown_keys(params, {}, pp);
    kv = kernel::NegativeDistance{};
  } else if (variant == "shifted_negative_distance") {
    reject_unknown_keys(params, {"C"}, pp);
    kv = kernel::ShiftedNegativeDistance{num("C", default_distance_shift(box))};
  } else if (variant == "smoothed_negative_distance") {
    reject_unknown_keys(params, {"c"}, pp);
    kv = kernel::SmoothedNegativeDistance{num("c", kDefaultSmoothing)};
  } else if (variant == "cpd_shifted") {
    reject_unknown_keys(params, {"base", "anchor"}, pp);
    const Kernel base = parse_kernel(require(params, "base", pp), box, join(pp, "base"));
    const Json* a = find(params, "anchor");
    std::vector<double> anchor = a == nullptr ? box.lower() : get_numbers(*a, join(pp, "anchor"));
    if (anchor.size() != box.dim()) throw ConfigError(join(pp, "anchor") + ": wrong dimension");
    return at_path(path, [&] { return make_cpd_shifted(base, std::move(anchor), box); });
  } else {
    throw ConfigError(join(path, "variant") + ": unknown kernel variant '" + variant + "'");
  }
  return at_path(path, [&] { return Kernel(kv, box); });
}

Cost parse_cost(const Json& node, const BoundingBox& box, const std::string& path) {
  reject_unknown_keys(node, {"variant", "params"}, path);
  const std::string variant = get_string(require(node, "variant", path), join(path, "variant"));
  static const Json kEmpty = Json::object();
  const Json* p = find(node, "params");
  const Json& params = p != nullptr ? *p : kEmpty;
  const std::string pp = join(path, "params");
  if (variant == "abs_distance") {
    reject_unknown_keys(params, {}, pp);
    return Cost(cost::AbsDistance{}, box);
  }
  if (variant == "power_distance") {
    reject_unknown_keys(params, {"p"}, pp);
    const Json* v = find(params, "p");
    const double exponent = v == nullptr ? 2.0 : get_number(*v, join(pp, "p"));
    return at_path(path, [&] { return Cost(cost::PowerDistance{exponent}, box); });
  }
  if (variant == "negated_kernel") {
    reject_unknown_keys(params, {"kernel"}, pp);
    const Kernel k = parse_kernel(require(params, "kernel", pp), box, join(pp, "kernel"));
    return Cost::negated(k, box);
  }
  throw ConfigError(join(path, "variant") + ": unknown cost variant '" + variant + "'");
}

SpectralKernel parse_spectral(const Json& node, const std::string& path) {
  reject_unknown_keys(node, {"alpha"}, path);
  auto alpha = get_numbers(require(node, "alpha", path), join(path, "alpha"));
  return at_path(path, [&] { return SpectralKernel(std::move(alpha)); });
}

SinkhornConfig parse_sinkhorn(const Json& node, const std::string& path) {
  reject_unknown_keys(node, {"epsilon", "max_iter", "tol", "normalize"}, path);
  SinkhornConfig cfg;
  if (const Json* v = find(node, "epsilon")) cfg.epsilon = get_number(*v, join(path, "epsilon"));
  if (const Json* v = find(node, "max_iter")) cfg.max_iter = get_count(*v, join(path, "max_iter"));
  if (const Json* v = find(node, "tol")) cfg.tol = get_number(*v, join(path, "tol"));
  if (const Json* v = find(node, "normalize")) {
    if (!v->is_boolean()) throw ConfigError(join(path, "normalize") + ": expected a boolean");
    cfg.normalize = v->get<bool>();
  }
  at_path(path, [&] {
    cfg.check();
    return 0;
  });
  return cfg;
}

void apply_dither_section(const Json& node, DitherConfig& cfg, const std::string& path) {
  reject_unknown_keys(node,
                      {"atoms", "epsilon", "max_outer_iter", "grad_tol", "initial_step", "max_step",
                       "backtrack", "armijo", "min_step", "seed", "inner_tol", "inner_max_iter"},
                      path);
  auto number = [&](const char* key, double& field) {
    if (const Json* v = find(node, key)) field = get_number(*v, join(path, key));
  };
  auto count = [&](const char* key, std::size_t& field) {
    if (const Json* v = find(node, key)) field = get_count(*v, join(path, key));
  };
  count("atoms", cfg.atoms);
  if (const Json* v = find(node, "epsilon")) {
    cfg.epsilon = get_extended_number(*v, join(path, "epsilon"));
  }
  count("max_outer_iter", cfg.max_outer_iter);
  number("grad_tol", cfg.grad_tol);
  number("initial_step", cfg.initial_step);
  number("max_step", cfg.max_step);
  number("backtrack", cfg.backtrack);
  number("armijo", cfg.armijo);
  number("min_step", cfg.min_step);
  if (const Json* v = find(node, "seed")) cfg.seed = get_count(*v, join(path, "seed"));
  number("inner_tol", cfg.inner_tol);
  count("inner_max_iter", cfg.inner_max_iter);
  at_path(path, [&] {
    cfg.check();
    return 0;
  });
}

void apply_override(Json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("--set " + assignment + ": expected KEY=VALUE");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  Json value = Json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;

  Json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot - start);
    if (part.empty()) throw ConfigError("--set " + key + ": empty key component");
    if (!node->is_object()) throw ConfigError("--set " + key + ": " + part + " is not inside an object");
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    if (node->is_null()) *node = Json::object();
    start = dot + 1;
  }
}

Json solver_diagnostics(const SinkhornSolution& sol, double kappa) {
  return Json{{"epsilon", sol.potentials.epsilon},
              {"value", sol.value},
              {"iterations", sol.iterations},
              {"final_residual", sol.final_residual},
              {"duality_gap", sol.duality_gap},
              {"kappa", kappa},
              {"converged", sol.converged}};
}

}  // namespace sinkdiv::config
