#pragma once

#include <string>

#include <json.hpp>

#include "santalo/body.hpp"
#include "santalo/kernel.hpp"
#include "santalo/legendre.hpp"
#include "santalo/logconcave.hpp"
#include "santalo/measure.hpp"

namespace santalo {

using Json = nlohmann::json;

/// {"dim": n, "kind": "polytopeV", "vertices": [[...], ...]} or
/// {"dim": n, "kind": "starbody", "grid_size": m, "radial": [...]}.
Json body_to_json(const ConvexBody& k);

/// Accepts the two forms above, stock names ("cube3", "square", "ball2",
/// "cross3", "simplex2", "triangle", "hexagon") and stock objects such as
/// {"kind": "ellipsoid", "matrix": [[2, 0], [0, 0.5]]}.
ConvexBody body_from_json(const Json& j, int grid_size = 0);

/// +inf is written as the string "inf".
Json gridfn_to_json(const GridFn& f);
/// Either {"axes", "values"} or a sampled formula, e.g.
/// {"kind": "quadratic", "matrix": [[1, 0], [0, 1]], "shift": [...], "offset": c,
///  "lo": -6, "hi": 6, "nodes": 129}, or {"kind": "max-affine", "slopes": [[...]],
///  "offsets": [...], "matrix": M} for max_i(<a_i, x> + b_i) + |M x|^2 / 2.
GridFn gridfn_from_json(const Json& j);

Json rho_to_json(const RhoKernel& rho);
/// "exp", "indicator", {"family": "power", "m": 2} or
/// {"family": "piecewise", "knots": [...], "log_values": [...], "cutoff": false}.
RhoKernel rho_from_json(const Json& j);

/// {"family": "gaussian", "matrix": ..., "shift": ..., "scale": ...},
/// {"family": "standard-gaussian", "dim": n}, {"family": "indicator", "body": ...},
/// {"family": "ball-indicator", "dim": n, "radius": r},
/// {"family": "exp-gauge", "body": ...},
/// {"family": "product", "factors": [{"kind": "laplace", "p": 1, "q": 0}, ...]}.
LogConcaveFn function_from_json(const Json& j);
Json function_to_json(const LogConcaveFn& f);

/// "gaussian", {"kind": "gaussian-radial"}, {"kind": "truncated-lebesgue", "radius": R}.
DensityMeasure measure_from_json(const Json& j, int dim);

Vector vector_from_json(const Json& j);
Json vector_to_json(const Vector& v);
Eigen::MatrixXd matrix_from_json(const Json& j);
Json matrix_to_json(const Eigen::MatrixXd& m);

/// Parse JSON text; syntax errors become InvalidInput with line and column.
Json parse_json(const std::string& text, const std::string& source = "config");
Json read_json_file(const std::string& path);

}  // namespace santalo
