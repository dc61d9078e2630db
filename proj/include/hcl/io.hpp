#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "hcl/cones.hpp"
#include "hcl/dirichlet.hpp"
#include "hcl/fields.hpp"
#include "hcl/garding.hpp"
#include "hcl/geometry.hpp"

namespace hcl::io {

using Json = nlohmann::ordered_json;

/// Command-line overrides applied on top of a document.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> tau;  // membership band
  std::optional<double> tol;
  std::optional<int> density;
  std::optional<int> stencil;
  std::optional<int> max_iters;
  std::optional<SweepMode> mode;
};

Json load_json(const std::string& path);
Json parse_json(const std::string& text, const std::string& origin);
/// Requires "schema_version" equal to kSchemaVersion.
void check_schema(const Json& doc, const std::string& origin);

/// Two-space indentation, scalar arrays on one line, every double as %.17g,
/// non-finite numbers as null. Ends with a newline.
std::string dump(const Json& j);
void write_text(const std::string& path, const std::string& text);

/// Validating field access; failures throw InputError naming `ctx` and the key.
const Json& require(const Json& j, const char* key, const std::string& ctx);
double number_or(const Json& j, const char* key, double fallback);
int integer_or(const Json& j, const char* key, int fallback);
std::string string_or(const Json& j, const char* key, const std::string& fallback);
/// Override seed, else the document's "seed", else 0.
std::uint64_t seed_of(const Json& doc, const Overrides& o);

Json to_json(const Vec& v);
Json to_json(const SymMatrix& a);
Json to_json(const MembershipVerdict& v);
Json to_json(const Plane& p);

Vec vec_from_json(const Json& j, const std::string& what);
/// {"upper": [...]} (packed upper triangle) or a dense array of rows.
SymMatrix matrix_from_json(const Json& j, int n);

MAPolynomial polynomial_from_json(const Json& j, int n);
Json to_json(const MAPolynomial& m);

/// {"n", "kind": "family" | "generated" | "garding", ...}.
ConeSpec cone_from_json(const Json& j, const Overrides& o = {});
Json to_json(const ConeSpec& c);

/// {"box": {"lo": [...], "hi": [...]}, "h": h} or {"grid": {"lo", "h", "counts"}}.
GridShape grid_from_json(const Json& doc);
Json to_json(const GridShape& g);

/// {"kind": "expression", "text": ...}.
ScalarFn scalar_from_json(const Json& j, int n);

DomainSpec domain_from_json(const Json& j);
SubmanifoldSpec submanifold_from_json(const Json& j);

SolverConfig solver_from_json(const Json& j, const Overrides& o);

/// A solve-dirichlet or solve-ma2d document.
struct DirichletDoc {
  GridShape grid;
  std::optional<ConeSpec> cone;  // absent for solve-ma2d
  int stencil = 2;
  ScalarFn phi;
  ScalarFn rho;                  // the box itself when no "domain" is given
  bool box_domain = true;
  double c = 0.0;                // right-hand side for solve-ma2d
  SolverConfig solver;
  std::optional<ScalarFn> reference;
  double reference_tol = 0.0;

  DirichletProblem problem() const;
  DirichletProblem problem(const ConeSpec& other) const;
};

DirichletDoc dirichlet_from_json(const Json& doc, const Overrides& o, bool monge_ampere = false);

/// First line "n,h,lo...,hi..." with values, then one value per line, row-major.
std::string grid_csv(const GridField& f);
GridField grid_from_csv(const std::string& text, const std::string& source = {});
Json grid_sidecar(const GridField& f);

}  // namespace hcl::io
