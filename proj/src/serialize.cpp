#include "santalo/serialize.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <regex>
#include <sstream>

#include "santalo/error.hpp"

namespace santalo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::InvalidInput, what); }

const Json& need(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad(std::string("missing field '") + key + "'");
  return j.at(key);
}

double number(const Json& j, const std::string& what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  bad("field '" + what + "' must be a number");
}

double number_or(const Json& j, const char* key, double fallback) {
  return j.contains(key) ? number(j.at(key), key) : fallback;
}

std::vector<double> numbers(const Json& j, const std::string& what) {
  if (!j.is_array()) bad("field '" + what + "' must be an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], what + "[" + std::to_string(i) + "]"));
  return out;
}

Json finite_or_tag(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

PolytopeV polytope_from(const Json& j) {
  const auto& vs = need(j, "vertices");
  if (!vs.is_array() || vs.empty()) bad("field 'vertices' must be a non-empty array");
  std::vector<Vector> v;
  for (const auto& x : vs) v.push_back(vector_from_json(x));
  for (const auto& x : v) {
    if (x.size() != v.front().size()) bad("vertices have mixed dimensions");
  }
  if (j.contains("dim") && need(j, "dim").get<int>() != v.front().size()) bad("field 'dim' disagrees with vertices");
  return PolytopeV(std::move(v));
}

std::optional<ConvexBody> stock_body(const std::string& name, int grid_size) {
  static const std::regex pattern("(cube|ball|cross|simplex)([1-9])");
  std::smatch m;
  if (std::regex_match(name, m, pattern)) {
    const int n = std::stoi(m[2]);
    if (m[1] == "cube") return make_cube(n);
    if (m[1] == "cross") return make_cross_polytope(n);
    if (m[1] == "simplex") return make_simplex(n);
    return make_ball(n, 1.0, grid_size);
  }
  if (name == "square") return make_cube(2);
  if (name == "triangle") return make_simplex(2);
  if (name == "hexagon") return make_regular_polygon(6);
  return std::nullopt;
}

}  // namespace

Vector vector_from_json(const Json& j) {
  const auto v = numbers(j, "vector");
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Json vector_to_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(finite_or_tag(v(i)));
  return a;
}

Eigen::MatrixXd matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) bad("matrix must be a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(numbers(j[0], "matrix[0]").size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto row = numbers(j[r], "matrix[" + std::to_string(r) + "]");
    if (static_cast<Eigen::Index>(row.size()) != cols) bad("matrix rows have different lengths");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row[c];
  }
  return m;
}

Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json a = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(vector_to_json(m.row(r).transpose()));
  return a;
}

Json body_to_json(const ConvexBody& k) {
  if (const auto* p = std::get_if<PolytopeV>(&k)) {
    Json vs = Json::array();
    for (const auto& v : p->vertices()) vs.push_back(vector_to_json(v));
    return {{"dim", p->dim()}, {"kind", "polytopeV"}, {"vertices", vs}};
  }
  const auto& s = std::get<StarBody>(k);
  return {{"dim", s.dim()},
          {"kind", "starbody"},
          {"grid_size", s.grid().size()},
          {"radial", std::vector<double>(s.radial().begin(), s.radial().end())}};
}

ConvexBody body_from_json(const Json& j, int grid_size) {
  if (j.is_string()) {
    if (auto b = stock_body(j.get<std::string>(), grid_size)) return *b;
    bad("unknown body '" + j.get<std::string>() + "'");
  }
  const auto kind = need(j, "kind").get<std::string>();
  if (kind == "polytopeV" || kind == "polytope") return polytope_from(j);
  if (kind == "starbody") {
    const int n = need(j, "dim").get<int>();
    const auto radial = numbers(need(j, "radial"), "radial");
    const int size = j.contains("grid_size") ? j.at("grid_size").get<int>() : static_cast<int>(radial.size());
    auto grid = SphereGrid::make(n, size);
    if (grid->size() != radial.size()) {
      bad("starbody has " + std::to_string(radial.size()) + " radial values but its grid has " +
          std::to_string(grid->size()) + " nodes");
    }
    for (double r : radial) {
      if (!(r > 0.0) || !std::isfinite(r)) bad("radial values must be positive and finite");
    }
    return StarBody(grid, radial);
  }
  const int n = j.contains("dim") ? j.at("dim").get<int>() : 2;
  if (kind == "cube") return make_cube(n, number_or(j, "half_side", 1.0));
  if (kind == "cross-polytope") return make_cross_polytope(n, number_or(j, "radius", 1.0));
  if (kind == "simplex") return make_simplex(n);
  if (kind == "regular-polygon") {
    return make_regular_polygon(need(j, "sides").get<int>(), number_or(j, "radius", 1.0), number_or(j, "phase", 0.0));
  }
  if (kind == "ball") return make_ball(n, number_or(j, "radius", 1.0), grid_size);
  if (kind == "shifted-ball") {
    return make_shifted_ball(vector_from_json(need(j, "center")), number(need(j, "radius"), "radius"), grid_size);
  }
  if (kind == "ellipsoid") return make_ellipsoid(matrix_from_json(need(j, "matrix")), grid_size);
  bad("unknown body kind '" + kind + "'");
}

Json gridfn_to_json(const GridFn& f) {
  Json axes = Json::array();
  for (const auto& a : f.axes) axes.push_back(a);
  Json values = Json::array();
  for (double v : f.values) values.push_back(finite_or_tag(v));
  return {{"axes", axes}, {"values", values}};
}

GridFn gridfn_from_json(const Json& j) {
  if (j.contains("values")) {
    GridFn f;
    const auto& axes = need(j, "axes");
    if (!axes.is_array()) bad("field 'axes' must be an array of arrays");
    for (std::size_t i = 0; i < axes.size(); ++i) f.axes.push_back(numbers(axes[i], "axes[" + std::to_string(i) + "]"));
    f.values = numbers(need(j, "values"), "values");
    f.validate();
    return f;
  }
  const auto kind = need(j, "kind").get<std::string>();
  const double lo = number_or(j, "lo", -6.0), hi = number_or(j, "hi", 6.0);
  const auto nodes = static_cast<std::size_t>(number_or(j, "nodes", 129));
  if (kind == "quadratic") {
    const Eigen::MatrixXd t = matrix_from_json(need(j, "matrix"));
    const int n = static_cast<int>(t.cols());
    const Vector shift = j.contains("shift") ? vector_from_json(j.at("shift")) : Vector::Zero(n);
    const double c = number_or(j, "offset", 0.0);
    if (shift.size() != n) bad("field 'shift' has the wrong dimension");
    return GridFn::sample(uniform_axes(n, lo, hi, nodes),
                          [&](const Vector& x) { return 0.5 * (t * (x - shift)).squaredNorm() + c; });
  }
  if (kind == "max-affine") {
    // max_i <a_i, x> + b_i plus |M x|^2 / 2 (M defaults to zero)
    const Eigen::MatrixXd a = matrix_from_json(need(j, "slopes"));
    const auto b = numbers(need(j, "offsets"), "offsets");
    if (static_cast<Eigen::Index>(b.size()) != a.rows()) bad("one offset per slope is required");
    const auto n = a.cols();
    const Eigen::MatrixXd m = j.contains("matrix") ? matrix_from_json(j.at("matrix")) : Eigen::MatrixXd::Zero(n, n);
    if (m.cols() != n) bad("field 'matrix' has the wrong number of columns");
    return GridFn::sample(uniform_axes(static_cast<int>(n), lo, hi, nodes), [&](const Vector& x) {
      double top = -kInf;
      for (Eigen::Index i = 0; i < a.rows(); ++i) top = std::max(top, a.row(i).dot(x) + b[i]);
      return top + 0.5 * (m * x).squaredNorm();
    });
  }
  bad("unknown grid function kind '" + kind + "'");
}

Json rho_to_json(const RhoKernel& rho) {
  switch (rho.family()) {
    case RhoKernel::Family::Exp: return "exp";
    case RhoKernel::Family::Indicator: return "indicator";
    case RhoKernel::Family::Power: return {{"family", "power"}, {"m", rho.exponent()}};
    case RhoKernel::Family::Piecewise:
      return {{"family", "piecewise"}, {"knots", rho.knots()}, {"log_values", rho.log_values()}, {"cutoff", rho.cutoff()}};
  }
  return nullptr;
}

RhoKernel rho_from_json(const Json& j) {
  const std::string family = j.is_string() ? j.get<std::string>() : need(j, "family").get<std::string>();
  if (family == "exp") return RhoKernel::exp();
  if (family == "indicator") return RhoKernel::indicator();
  if (family == "power") return RhoKernel::power(number(need(j, "m"), "m"));
  if (family == "piecewise") {
    return RhoKernel::piecewise(numbers(need(j, "knots"), "knots"), numbers(need(j, "log_values"), "log_values"),
                                j.value("cutoff", false));
  }
  bad("unknown rho family '" + family + "'");
}

namespace {

Factor1D factor_from_json(const Json& j) {
  const auto kind = need(j, "kind").get<std::string>();
  Factor1D f;
  if (kind == "gaussian") f.kind = Factor1D::Kind::Gaussian;
  else if (kind == "laplace") f.kind = Factor1D::Kind::Laplace;
  else if (kind == "one-sided") f.kind = Factor1D::Kind::OneSided;
  else if (kind == "uniform") f.kind = Factor1D::Kind::Uniform;
  else bad("unknown factor kind '" + kind + "'");
  f.p = number(need(j, "p"), "p");
  f.q = number_or(j, "q", 0.0);
  return f;
}

const char* factor_name(Factor1D::Kind k) {
  switch (k) {
    case Factor1D::Kind::Gaussian: return "gaussian";
    case Factor1D::Kind::Laplace: return "laplace";
    case Factor1D::Kind::OneSided: return "one-sided";
    case Factor1D::Kind::Uniform: return "uniform";
  }
  return "";
}

}  // namespace

LogConcaveFn function_from_json(const Json& j) {
  const std::string family = j.is_string() ? j.get<std::string>() : need(j, "family").get<std::string>();
  if (family == "gaussian" && j.is_string()) bad("gaussian needs a matrix; use standard-gaussian with a dim");
  const Vector shift = j.is_object() && j.contains("shift") ? vector_from_json(j.at("shift")) : Vector();
  const double scale = j.is_object() ? number_or(j, "scale", 1.0) : 1.0;
  if (family == "gaussian") return LogConcaveFn::gaussian(matrix_from_json(need(j, "matrix")), shift, scale);
  if (family == "standard-gaussian") {
    const int n = need(j, "dim").get<int>();
    return LogConcaveFn::gaussian(Eigen::MatrixXd::Identity(n, n), shift, scale);
  }
  if (family == "indicator") {
    const auto body = body_from_json(need(j, "body"));
    if (!std::holds_alternative<PolytopeV>(body)) bad("indicator needs a polytope body");
    return LogConcaveFn::indicator(std::get<PolytopeV>(body), scale);
  }
  if (family == "ball-indicator") return LogConcaveFn::ball_indicator(need(j, "dim").get<int>(), number_or(j, "radius", 1.0));
  if (family == "exp-gauge") {
    const auto body = body_from_json(need(j, "body"));
    if (!std::holds_alternative<PolytopeV>(body)) bad("exp-gauge needs a polytope body");
    return LogConcaveFn::exp_gauge(std::get<PolytopeV>(body), shift, scale);
  }
  if (family == "product") {
    std::vector<Factor1D> factors;
    for (const auto& f : need(j, "factors")) factors.push_back(factor_from_json(f));
    return LogConcaveFn::product(std::move(factors), shift, scale);
  }
  bad("unknown function family '" + family + "'");
}

Json function_to_json(const LogConcaveFn& f) {
  Json j;
  std::visit(
      [&](const auto& fam) {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, family::Gaussian>) {
          j = {{"family", "gaussian"}, {"matrix", matrix_to_json(fam.t)}};
        } else if constexpr (std::is_same_v<T, family::PolytopeIndicator>) {
          j = {{"family", "indicator"}, {"body", body_to_json(fam.body)}};
        } else if constexpr (std::is_same_v<T, family::EllipsoidIndicator>) {
          j = {{"family", "ellipsoid-indicator"}, {"matrix", matrix_to_json(fam.t)}};
        } else if constexpr (std::is_same_v<T, family::ExpGauge>) {
          j = {{"family", "exp-gauge"}, {"body", body_to_json(fam.body)}};
        } else if constexpr (std::is_same_v<T, family::Product>) {
          Json fs = Json::array();
          for (const auto& x : fam.factors) fs.push_back({{"kind", factor_name(x.kind)}, {"p", x.p}, {"q", x.q}});
          j = {{"family", "product"}, {"factors", fs}};
        } else {
          j = {{"family", "custom"}, {"label", fam.label}};
        }
      },
      f.family());
  j["shift"] = vector_to_json(f.shift());
  j["scale"] = f.scale();
  return j;
}

DensityMeasure measure_from_json(const Json& j, int dim) {
  const std::string kind = j.is_string() ? j.get<std::string>() : need(j, "kind").get<std::string>();
  if (kind == "gaussian") return DensityMeasure::gaussian(dim);
  if (kind == "gaussian-radial") return DensityMeasure::gaussian_radial(dim);
  if (kind == "truncated-lebesgue") return DensityMeasure::truncated_lebesgue(dim, number(need(j, "radius"), "radius"));
  bad("unknown measure '" + kind + "'");
}

Json parse_json(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    // nlohmann reports a byte offset; translate it to line and column
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string msg = e.what();
    if (const auto p = msg.find("syntax error"); p != std::string::npos) msg = msg.substr(p);
    throw Error(ErrorCode::InvalidInput,
                source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str(), path);
}

}  // namespace santalo
