#pragma once

#include "subquad/problem.hpp"

#include <string>
#include <variant>

namespace subquad::io {

using Instance = std::variant<CubicProblem, TrustRegionProblem>;

/// Instance file schema:
///   {"kind": "cubic"|"tr",
///    "matrix": {"diag": [...]} | {"dense": [[...]]},
///    "b": [...],
///    "rho": x | "radius": x,
///    "meta": {"kappa","lambda_tr","seed","gap","tau","solution","f_star"}}
/// All floats round-trip exactly (shortest-representation encoding).
/// Serialization requires a diagonal or dense operator.
std::string to_json(const CubicProblem& p);
std::string to_json(const TrustRegionProblem& p);

Instance from_json(const std::string& text);

void save_instance(const std::string& path, const CubicProblem& p);
void save_instance(const std::string& path, const TrustRegionProblem& p);
Instance load_instance(const std::string& path);

}  // namespace subquad::io
