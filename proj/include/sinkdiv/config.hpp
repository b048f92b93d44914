#pragma once

#include <initializer_list>
#include <string>
#include <string_view>

#include <json.hpp>

#include "sinkdiv/discrepancy.hpp"
#include "sinkdiv/dither.hpp"
#include "sinkdiv/kernels.hpp"
#include "sinkdiv/measures.hpp"
#include "sinkdiv/sinkhorn.hpp"

// JSON parsing for run configurations. Every parser takes the dotted key path
// of the node it reads so that ConfigError messages name the offending key.
namespace sinkdiv::config {

using Json = nlohmann::json;

// Throws ConfigError if obj is not an object or has a key outside `allowed`.
void reject_unknown_keys(const Json& obj, std::initializer_list<std::string_view> allowed,
                         const std::string& path);

const Json& require(const Json& obj, const std::string& key, const std::string& path);

double get_number(const Json& node, const std::string& path);
// A number, or the string "inf".
double get_extended_number(const Json& node, const std::string& path);
std::size_t get_count(const Json& node, const std::string& path);
std::string get_string(const Json& node, const std::string& path);
std::vector<double> get_numbers(const Json& node, const std::string& path);

// {"lower": [...], "upper": [...]}
BoundingBox parse_box(const Json& node, const std::string& path);

// {"variant": "gaussian", "params": {"c": 0.5}}; cpd_shifted takes
// {"base": <kernel>, "anchor": [...]} with the anchor defaulting to the box's lower corner.
Kernel parse_kernel(const Json& node, const BoundingBox& box, const std::string& path);

// {"variant": "abs_distance"} | {"variant": "power_distance", "params": {"p": 2}} |
// {"variant": "negated_kernel", "params": {"kernel": <kernel>}}
Cost parse_cost(const Json& node, const BoundingBox& box, const std::string& path);

// {"alpha": [a0, ..., aN]}
SpectralKernel parse_spectral(const Json& node, const std::string& path);

// {"epsilon", "max_iter", "tol", "normalize"}, all optional.
SinkhornConfig parse_sinkhorn(const Json& node, const std::string& path);

// Reads the optional "dither" section on top of a config carrying box and cost.
void apply_dither_section(const Json& node, DitherConfig& cfg, const std::string& path);

// Applies "a.b.c=value"; value is parsed as JSON when possible, else kept as a string.
void apply_override(Json& doc, const std::string& assignment);

Json solver_diagnostics(const SinkhornSolution& sol, double kappa);

}  // namespace sinkdiv::config
