#include "hcl/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace hcl::io {

namespace {

[[noreturn]] void bad(const std::string& what) { throw InputError(what); }

const Json& need(const Json& j, const char* key, const std::string& ctx) {
  if (!j.is_object() || !j.contains(key)) bad(ctx + ": missing \"" + key + "\"");
  return j.at(key);
}

double num(const Json& j, const std::string& what) {
  if (!j.is_number()) bad(what + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) bad(what + ": not finite");
  return v;
}

int integer(const Json& j, const std::string& what) {
  if (!j.is_number_integer()) bad(what + ": expected an integer");
  return j.get<int>();
}

std::string str(const Json& j, const std::string& what) {
  if (!j.is_string()) bad(what + ": expected a string");
  return j.get<std::string>();
}

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  if constexpr (std::is_same_v<T, double>) return num(j.at(key), key);
  else if constexpr (std::is_same_v<T, int>) return integer(j.at(key), key);
  else if constexpr (std::is_same_v<T, std::uint64_t>) {
    if (!j.at(key).is_number_unsigned() && !j.at(key).is_number_integer()) bad(std::string(key) + ": expected an integer");
    return j.at(key).get<std::uint64_t>();
  } else return str(j.at(key), key);
}

std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool scalar_array(const Json& j) {
  for (const auto& e : j)
    if (e.is_structured()) return false;
  return true;
}

void emit(const Json& j, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(k).dump() + ": ";
        emit(v, out, indent + 2);
      }
      out += "\n" + std::string(static_cast<std::size_t>(indent), ' ') + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      if (scalar_array(j)) {
        out += "[";
        bool first = true;
        for (const auto& e : j) {
          if (!first) out += ", ";
          first = false;
          emit(e, out, indent);
        }
        out += "]";
        return;
      }
      out += "[\n";
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += ",\n";
        first = false;
        out += pad;
        emit(e, out, indent + 2);
      }
      out += "\n" + std::string(static_cast<std::size_t>(indent), ' ') + "]";
      return;
    }
    case Json::value_t::number_float: out += format_double(j.get<double>()); return;
    default: out += j.dump(); return;
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) bad("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

const Json& require(const Json& j, const char* key, const std::string& ctx) { return need(j, key, ctx); }
double number_or(const Json& j, const char* key, double fallback) { return get_or(j, key, fallback); }
int integer_or(const Json& j, const char* key, int fallback) { return get_or(j, key, fallback); }
std::string string_or(const Json& j, const char* key, const std::string& fallback) {
  return get_or<std::string>(j, key, fallback);
}
std::uint64_t seed_of(const Json& doc, const Overrides& o) {
  return o.seed.value_or(get_or<std::uint64_t>(doc, "seed", 0));
}

Json parse_json(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    bad(origin + ": " + e.what());
  }
}

Json load_json(const std::string& path) { return parse_json(read_file(path), path); }

void check_schema(const Json& doc, const std::string& origin) {
  if (!doc.is_object()) bad(origin + ": document must be an object");
  const int v = integer(need(doc, "schema_version", origin), origin + ": schema_version");
  if (v != kSchemaVersion)
    bad(origin + ": schema_version " + std::to_string(v) + " is not supported (expected " +
        std::to_string(kSchemaVersion) + ")");
}

std::string dump(const Json& j) {
  std::string out;
  emit(j, out, 0);
  out += "\n";
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) bad("cannot write " + path);
  out << text;
}

Json to_json(const Vec& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(x);
  return a;
}

Json to_json(const SymMatrix& a) {
  Json j;
  j["n"] = a.dim();
  j["upper"] = to_json(a.upper());
  return j;
}

Json to_json(const MembershipVerdict& v) {
  Json j;
  j["class"] = std::string(to_string(v.cls));
  j["margin"] = v.margin;
  j["witness"] = v.witness.dim() > 0 ? to_json(v.witness) : Json();
  return j;
}

Json to_json(const Plane& p) {
  Json b = Json::array();
  for (const auto& v : p.basis()) b.push_back(to_json(v));
  Json j;
  j["dim"] = p.dim();
  j["basis"] = std::move(b);
  return j;
}

Vec vec_from_json(const Json& j, const std::string& what) {
  if (!j.is_array()) bad(what + ": expected an array");
  Vec v;
  for (const auto& e : j) v.push_back(num(e, what));
  return v;
}

SymMatrix matrix_from_json(const Json& j, int n) {
  if (j.is_object()) {
    const Vec up = vec_from_json(need(j, "upper", "matrix"), "matrix.upper");
    return SymMatrix::from_upper(n, up);
  }
  if (!j.is_array() || static_cast<int>(j.size()) != n) bad("matrix: expected " + std::to_string(n) + " rows");
  Vec dense;
  for (const auto& row : j) {
    const Vec r = vec_from_json(row, "matrix row");
    if (static_cast<int>(r.size()) != n) bad("matrix: row length must be " + std::to_string(n));
    dense.insert(dense.end(), r.begin(), r.end());
  }
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < i; ++k)
      if (std::abs(dense[static_cast<std::size_t>(i * n + k)] - dense[static_cast<std::size_t>(k * n + i)]) >
          1e-12 * (1.0 + std::abs(dense[static_cast<std::size_t>(k * n + i)])))
        bad("matrix: not symmetric");
  return SymMatrix::from_dense(n, dense);
}

MAPolynomial polynomial_from_json(const Json& j, int n) {
  const std::string kind = str(need(j, "kind", "polynomial"), "polynomial.kind");
  if (kind == "det") return MAPolynomial::det_real(n);
  if (kind == "det-complex") {
    if (n % 2 != 0) bad("polynomial: det-complex needs even n");
    return MAPolynomial::det_complex(get_or(j, "m", n / 2));
  }
  if (kind == "sigma") return MAPolynomial::sigma(n, integer(need(j, "k", "polynomial"), "polynomial.k"));
  if (kind == "slag-im") return MAPolynomial::slag_im(n);
  if (kind == "leading-minor")
    return MAPolynomial::leading_minor(n, integer(need(j, "k", "polynomial"), "polynomial.k"));
  if (kind == "derived")
    return derived_poly(polynomial_from_json(need(j, "base", "polynomial"), n),
                        integer(need(j, "k", "polynomial"), "polynomial.k"));
  bad("polynomial: unknown kind \"" + kind + "\"");
}

Json to_json(const MAPolynomial& m) {
  Json j;
  switch (m.kind()) {
    case PolyKind::DetReal: j["kind"] = "det"; break;
    case PolyKind::DetComplex:
      j["kind"] = "det-complex";
      j["m"] = m.dim() / 2;
      break;
    case PolyKind::Sigma:
      j["kind"] = "sigma";
      j["k"] = m.k();
      break;
    case PolyKind::SLagIm: j["kind"] = "slag-im"; break;
    case PolyKind::LeadingMinor:
      j["kind"] = "leading-minor";
      j["k"] = m.k();
      break;
    case PolyKind::Derived:
      j["kind"] = "derived";
      j["k"] = m.k();
      j["base"] = to_json(*m.base());
      break;
    case PolyKind::Custom: j["kind"] = "custom"; break;
  }
  j["degree"] = m.degree();
  return j;
}

ConeSpec cone_from_json(const Json& j, const Overrides& o) {
  const int n = integer(need(j, "n", "cone"), "cone.n");
  if (n < 1 || n > 32) bad("cone: n must be in 1..32");
  const std::string kind = get_or<std::string>(j, "kind", "family");
  if (kind == "generated") {
    std::vector<SymMatrix> gens;
    const auto& g = need(j, "generators", "cone");
    if (!g.is_array()) bad("cone.generators: expected an array");
    for (const auto& e : g) {
      if (e.is_array() && !e.empty() && e[0].is_number()) gens.push_back(SymMatrix::from_upper(n, vec_from_json(e, "generator")));
      else gens.push_back(matrix_from_json(e, n));
    }
    return ConeSpec::generated(n, std::move(gens));
  }
  if (kind == "garding") return ConeSpec::garding(polynomial_from_json(need(j, "polynomial", "cone"), n));
  if (kind != "family") bad("cone: unknown kind \"" + kind + "\"");
  const std::string fam = str(need(j, "family", "cone"), "cone.family");
  const Family all[] = {Family::RealLines,    Family::RealPlanes, Family::FullTrace,
                        Family::ComplexLines, Family::Lagrangian, Family::FixedAxis};
  for (Family f : all) {
    if (to_string(f) != fam) continue;
    const int p = get_or(j, "p", 1);
    const int density = o.density.value_or(get_or(j, "density", 64));
    const std::uint64_t seed = o.seed.value_or(get_or<std::uint64_t>(j, "seed", 0));
    return ConeSpec::family(f, n, p, density, seed);
  }
  bad("cone: unknown family \"" + fam + "\"");
}

Json to_json(const ConeSpec& c) {
  Json j;
  j["n"] = c.dim();
  switch (c.kind()) {
    case ConeKind::GrassmannFamily:
      j["kind"] = "family";
      j["family"] = std::string(to_string(c.family()));
      j["p"] = c.plane_dim();
      j["density"] = c.density();
      j["seed"] = c.seed();
      break;
    case ConeKind::Generated: {
      j["kind"] = "generated";
      Json g = Json::array();
      for (const auto& m : c.generators()) g.push_back(to_json(m.upper()));
      j["generators"] = std::move(g);
      break;
    }
    case ConeKind::GardingCone:
      j["kind"] = "garding";
      j["polynomial"] = to_json(c.polynomial());
      break;
  }
  return j;
}

GridShape grid_from_json(const Json& doc) {
  if (doc.contains("grid")) {
    const auto& g = doc.at("grid");
    const Vec lo = vec_from_json(need(g, "lo", "grid"), "grid.lo");
    const double h = num(need(g, "h", "grid"), "grid.h");
    std::vector<int> counts;
    for (const auto& c : need(g, "counts", "grid")) counts.push_back(integer(c, "grid.counts"));
    return GridShape(lo, h, counts);
  }
  const auto& box = need(doc, "box", "problem");
  const Vec lo = vec_from_json(need(box, "lo", "box"), "box.lo");
  const Vec hi = vec_from_json(need(box, "hi", "box"), "box.hi");
  const double h = num(need(doc, "h", "problem"), "h");
  if (lo.size() != hi.size()) bad("box: lo and hi differ in length");
  if (!(h > 0)) bad("h must be positive");
  std::vector<int> counts;
  for (std::size_t i = 0; i < lo.size(); ++i) {
    const double cells = (hi[i] - lo[i]) / h;
    const double r = std::round(cells);
    if (!(r >= 1) || std::abs(cells - r) > 1e-9 * std::max(1.0, r)) bad("box: extent must be a multiple of h");
    counts.push_back(static_cast<int>(r) + 1);
  }
  return GridShape(lo, h, counts);
}

Json to_json(const GridShape& g) {
  Json j;
  j["lo"] = to_json(g.lo());
  j["h"] = g.h();
  Json c = Json::array();
  for (int v : g.counts()) c.push_back(v);
  j["counts"] = std::move(c);
  return j;
}

ScalarFn scalar_from_json(const Json& j, int n) {
  const std::string kind = get_or<std::string>(j, "kind", "expression");
  if (kind != "expression") bad("function: unknown kind \"" + kind + "\"");
  const Expr e = Expr::parse(str(need(j, "text", "function"), "function.text"), n);
  return [e](std::span<const double> x) { return e.value(x); };
}

DomainSpec domain_from_json(const Json& j) {
  const int n = integer(need(j, "n", "domain"), "domain.n");
  Vec center;
  if (j.contains("center")) center = vec_from_json(j.at("center"), "domain.center");
  return DomainSpec::from_expression(n, str(need(j, "rho", "domain"), "domain.rho"), get_or(j, "collar", 0.25),
                                     center, get_or(j, "radius", 4.0));
}

SubmanifoldSpec submanifold_from_json(const Json& j) {
  const std::string kind = str(need(j, "kind", "submanifold"), "submanifold.kind");
  if (kind == "point") return SubmanifoldSpec::point(vec_from_json(need(j, "point", "submanifold"), "point"));
  if (kind == "line")
    return SubmanifoldSpec::line(vec_from_json(need(j, "point", "submanifold"), "point"),
                                 vec_from_json(need(j, "direction", "submanifold"), "direction"));
  if (kind == "segment")
    return SubmanifoldSpec::segment(vec_from_json(need(j, "a", "submanifold"), "a"),
                                    vec_from_json(need(j, "b", "submanifold"), "b"));
  if (kind == "circle")
    return SubmanifoldSpec::circle(integer(need(j, "n", "submanifold"), "n"),
                                   vec_from_json(need(j, "center", "submanifold"), "center"),
                                   num(need(j, "radius", "submanifold"), "radius"));
  if (kind == "curve") {
    std::vector<Expr> coords;
    for (const auto& c : need(j, "coords", "submanifold")) coords.push_back(Expr::parse(str(c, "coords"), {"t"}));
    const Vec range = vec_from_json(need(j, "t", "submanifold"), "t");
    if (range.size() != 2) bad("submanifold.t: expected [t0, t1]");
    return SubmanifoldSpec::curve(std::move(coords), range[0], range[1]);
  }
  bad("submanifold: unknown kind \"" + kind + "\"");
}

SolverConfig solver_from_json(const Json& j, const Overrides& o) {
  SolverConfig c;
  const Json s = j.is_object() && j.contains("solver") ? j.at("solver") : Json::object();
  c.tol = o.tol.value_or(get_or(s, "tol", c.tol));
  c.max_iters = o.max_iters.value_or(get_or(s, "max_iters", c.max_iters));
  if (!(c.tol > 0) || c.max_iters < 1) bad("solver: tol and max_iters must be positive");
  const std::string mode = get_or<std::string>(s, "mode", "gauss-seidel");
  if (mode == "gauss-seidel") c.mode = SweepMode::GaussSeidel;
  else if (mode == "jacobi") c.mode = SweepMode::Jacobi;
  else bad("solver: unknown mode \"" + mode + "\"");
  if (o.mode) c.mode = *o.mode;
  const std::string init = get_or<std::string>(s, "init", "harmonic");
  if (init == "harmonic") c.init = Initializer::Harmonic;
  else if (init == "min-phi") c.init = Initializer::MinPhi;
  else bad("solver: unknown init \"" + init + "\"");
  return c;
}

DirichletDoc dirichlet_from_json(const Json& doc, const Overrides& o, bool monge_ampere) {
  DirichletDoc d;
  d.grid = grid_from_json(doc);
  const int n = d.grid.dim();
  if (!monge_ampere) {
    d.cone = cone_from_json(need(doc, "cone", "problem"), o);
    if (d.cone->dim() != n) bad("problem: cone dimension differs from the grid");
  } else {
    if (n != 2) bad("problem: solve-ma2d needs a 2-D grid");
    d.c = num(need(doc, "c", "problem"), "c");
  }
  const Json s = doc.contains("solver") ? doc.at("solver") : Json::object();
  d.stencil = o.stencil.value_or(get_or(s, "stencil", 2));
  if (d.stencil < 1 || d.stencil > 4) bad("solver.stencil must be in 1..4");
  d.solver = solver_from_json(doc, o);
  d.phi = scalar_from_json(need(doc, "boundary", "problem"), n);
  if (doc.contains("domain")) {
    const auto& dom = doc.at("domain");
    d.rho = scalar_from_json(Json{{"kind", "expression"}, {"text", str(need(dom, "rho", "domain"), "domain.rho")}}, n);
    d.box_domain = false;
  } else {
    const Vec lo = d.grid.lo(), hi = d.grid.hi();
    d.rho = [lo, hi](std::span<const double> x) {
      double r = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < lo.size(); ++i) r = std::max(r, std::max(lo[i] - x[i], x[i] - hi[i]));
      return r;
    };
  }
  if (doc.contains("reference")) {
    const auto& ref = doc.at("reference");
    d.reference = scalar_from_json(ref, n);
    d.reference_tol = num(need(ref, "tol", "reference"), "reference.tol");
  }
  return d;
}

DirichletProblem DirichletDoc::problem() const {
  if (!cone) throw InputError("problem: no cone");
  return problem(*cone);
}

DirichletProblem DirichletDoc::problem(const ConeSpec& other) const {
  const StencilSet st(grid.dim(), stencil);
  if (box_domain) return DirichletProblem::on_box(grid, phi, other, st);
  return DirichletProblem::build(grid, rho, phi, other, st);
}

std::string grid_csv(const GridField& f) {
  const auto& g = f.shape();
  std::string out = std::to_string(g.dim()) + "," + format_double(g.h());
  for (double v : g.lo()) out += "," + format_double(v);
  for (double v : g.hi()) out += "," + format_double(v);
  out += "\n";
  for (double v : f.values()) out += format_double(v) + "\n";
  return out;
}

GridField grid_from_csv(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) bad("grid csv: empty");
  std::vector<double> head;
  {
    std::istringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) {
      try {
        head.push_back(std::stod(cell));
      } catch (const std::logic_error&) {
        bad("grid csv: bad header cell \"" + cell + "\"");
      }
    }
  }
  if (head.empty()) bad("grid csv: empty header");
  const int n = static_cast<int>(head[0]);
  if (n < 1 || n > 3 || static_cast<int>(head.size()) != 2 + 2 * n) bad("grid csv: header must be n,h,lo...,hi...");
  const double h = head[1];
  Vec lo(head.begin() + 2, head.begin() + 2 + n);
  std::vector<int> counts;
  for (int i = 0; i < n; ++i) {
    const double cells = (head[static_cast<std::size_t>(2 + n + i)] - lo[static_cast<std::size_t>(i)]) / h;
    counts.push_back(static_cast<int>(std::lround(cells)) + 1);
  }
  GridShape g(lo, h, counts);
  std::vector<double> values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      values.push_back(line == "null" ? NAN : std::stod(line));
    } catch (const std::logic_error&) {
      bad("grid csv: bad value \"" + line + "\"");
    }
  }
  if (values.size() != g.size()) bad("grid csv: expected " + std::to_string(g.size()) + " values");
  return GridField(g, std::move(values), source);
}

Json grid_sidecar(const GridField& f) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["grid"] = to_json(f.shape());
  j["hi"] = to_json(f.shape().hi());
  j["source"] = f.source();
  j["layout"] = "row-major, axis 0 slowest";
  return j;
}

}  // namespace hcl::io
