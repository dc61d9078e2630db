#include "hcl/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <ostream>

#include "acceptance.hpp"
#include "hcl/parallel.hpp"

namespace hcl::cli {

namespace {

using io::Json;

constexpr std::pair<Verb, std::string_view> kVerbs[] = {
    {Verb::ConeCheck, "cone-check"},         {Verb::ConeFreedim, "cone-freedim"},
    {Verb::GardingTest, "garding-test"},     {Verb::FieldClassify, "field-classify"},
    {Verb::SubaffineCheck, "subaffine-check"}, {Verb::HullEstimate, "hull-estimate"},
    {Verb::SolveDirichlet, "solve-dirichlet"}, {Verb::SolveMa2d, "solve-ma2d"},
    {Verb::DomainCheck, "domain-check"},     {Verb::TubeCheck, "tube-check"},
    {Verb::Selftest, "selftest"},
};

struct Result {
  Json body = Json::object();
  int code = kOk;
  std::vector<std::pair<std::string, std::string>> files;  // name, contents
};

double tau_of(const io::Overrides& o) { return o.tau.value_or(kTol.membership); }

Json verdict_json(const MembershipVerdict& v) { return io::to_json(v); }

GridField field_from_doc(const Json& doc, const GridShape& g) {
  const ScalarFn f = io::scalar_from_json(io::require(doc, "field", "document"), g.dim());
  return GridField::sample(g, f, "expression");
}

Json plane_or_null(const std::optional<Plane>& p) { return p ? io::to_json(*p) : Json(); }

// Unit vector of the witness' largest eigenvalue; for rank-one witnesses this
// is the offending direction.
Vec witness_direction(const SymMatrix& w) {
  const EigenSystem es = eig_sym(w);
  return es.vectors.back();
}

// ---------------------------------------------------------------- verbs

Result cone_check(const Json& doc, const io::Overrides& o) {
  Result r;
  const ConeSpec cone = io::cone_from_json(io::require(doc, "cone", "document"), o);
  const double tau = tau_of(o);
  r.body["cone"] = io::to_json(cone);
  bool ok = true;
  if (cone.kind() != ConeKind::GardingCone) {
    const EllipticityReport e = ellipticity_check(cone, tau);
    r.body["ellipticity"] = {{"positivity", e.positivity},
                             {"completeness", e.completeness},
                             {"span_dim", e.span_dim},
                             {"generators", e.generators},
                             {"min_generator_eigenvalue", e.min_generator_eigenvalue},
                             {"sum_min_eigenvalue", e.sum_min_eigenvalue}};
    ok = e.elliptic();
  }
  Json list = Json::array();
  const Json& ms = doc.contains("matrices") ? doc.at("matrices") : Json::array();
  const Json expect = doc.contains("expect") ? doc.at("expect") : Json();
  if (!expect.is_null() && (!expect.is_array() || expect.size() != ms.size()))
    throw InputError("expect: one class per matrix");
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const SymMatrix a = io::matrix_from_json(ms[i], cone.dim());
    const MembershipVerdict v = psplus_membership(a, cone, tau);
    Json e = {{"matrix", io::to_json(a)}, {"verdict", verdict_json(v)}};
    if (cone.kind() != ConeKind::GardingCone) e["dual"] = verdict_json(dual_membership(a, cone, tau));
    if (!expect.is_null()) {
      const std::string want = expect[i].get<std::string>();
      e["expected"] = want;
      ok = ok && want == to_string(v.cls);
    }
    list.push_back(std::move(e));
  }
  r.body["matrices"] = std::move(list);
  r.code = ok ? kOk : kPropertyFailed;
  return r;
}

Result cone_freedim(const Json& doc, const io::Overrides& o) {
  Result r;
  const ConeSpec cone = io::cone_from_json(io::require(doc, "cone", "document"), o);
  const int claimed = io::integer_or(doc, "claimed", -1);
  if (claimed < 0 || claimed > cone.dim()) throw InputError("claimed: expected an integer in 0..n");
  const int trials = io::integer_or(doc, "trials", 200);
  CounterRng rng(io::seed_of(doc, o), 1);
  const FreeDimReport f = free_dim_verify(cone, claimed, trials, rng, tau_of(o));
  r.body["cone"] = io::to_json(cone);
  r.body["claimed"] = claimed;
  r.body["lower"] = {{"ok", f.lower_ok},
                     {"candidates_tried", f.lower_candidates_tried},
                     {"witness", plane_or_null(f.lower_witness)}};
  r.body["upper"] = {{"ok", f.upper_ok},
                     {"trials", f.upper_trials},
                     {"counterexamples", f.upper_counterexamples},
                     {"counterexample", plane_or_null(f.upper_counterexample)}};
  r.body["certified"] = f.lower_ok && f.upper_ok;
  r.code = f.lower_ok && f.upper_ok ? kOk : kPropertyFailed;
  return r;
}

Result garding_test(const Json& doc, const io::Overrides& o) {
  Result r;
  const int n = io::integer_or(doc, "n", 0);
  if (n < 1 || n > 16) throw InputError("n: expected an integer in 1..16");
  const MAPolynomial m = io::polynomial_from_json(io::require(doc, "polynomial", "document"), n);
  const int trials = io::integer_or(doc, "trials", 100);
  const double tau = tau_of(o);
  CounterRng rng(io::seed_of(doc, o), 2);
  r.body["polynomial"] = io::to_json(m);
  const HyperbolicityReport h = hyperbolicity_test(m, trials, tau, rng);
  r.body["hyperbolicity"] = {{"hyperbolic", h.hyperbolic}, {"worst_imag", h.worst_imag}, {"trials", h.trials}};
  bool ok = h.hyperbolic;
  const E2Report e2 = cone_ellipticity_E2(m, 32, rng);
  r.body["ellipticity"] = {{"elliptic", e2.elliptic},
                           {"nonconstant", e2.nonconstant},
                           {"positive", e2.positive},
                           {"directions_tested", e2.directions_tested},
                           {"failing_direction", e2.failing_direction.empty() ? Json() : io::to_json(e2.failing_direction)}};
  ok = ok && e2.elliptic;
  if (h.hyperbolic && m.homogeneous()) {
    const E3Report e3 = theorem_E3_check(m, trials, rng);
    r.body["linearization"] = {{"ok", e3.ok},
                               {"min_eigenvalue", e3.min_eigenvalue},
                               {"min_relative_eigenvalue", e3.min_relative_eigenvalue},
                               {"trials", e3.trials}};
    ok = ok && e3.ok;
  }
  Json list = Json::array();
  if (doc.contains("matrices")) {
    for (const auto& mj : doc.at("matrices")) {
      const SymMatrix a = io::matrix_from_json(mj, n);
      Json roots = Json::array();
      for (const auto& z : roots_of_pA(m, a)) roots.push_back(Json::array({z.real(), z.imag()}));
      list.push_back({{"matrix", io::to_json(a)},
                      {"value", m(a)},
                      {"roots", std::move(roots)},
                      {"verdict", h.hyperbolic ? verdict_json(garding_membership(a, m, tau)) : Json()}});
    }
  }
  r.body["matrices"] = std::move(list);
  r.code = ok ? kOk : kPropertyFailed;
  return r;
}

Result field_classify(const Json& doc, const io::Overrides& o) {
  Result r;
  const GridShape g = io::grid_from_json(doc);
  const GridField f = field_from_doc(doc, g);
  const ConeSpec cone = io::cone_from_json(io::require(doc, "cone", "document"), o);
  if (cone.dim() != g.dim()) throw InputError("cone dimension differs from the grid");
  const double eps = io::number_or(doc, "eps", 0.0);
  const PointClassification c = psh_classify(f, cone, eps, tau_of(o));
  r.body["grid"] = io::to_json(g);
  r.body["cone"] = io::to_json(cone);
  r.body["eps"] = eps;
  r.body["points"] = c.points.size();
  Json counts;
  for (int k = 0; k < 4; ++k) counts[std::string(to_string(static_cast<PointClass>(k)))] = c.counts[static_cast<std::size_t>(k)];
  r.body["counts"] = std::move(counts);
  r.body["summary"] = std::string(to_string(c.summary));
  r.body["min_margin"] = c.min_margin;
  r.body["worst_point"] = c.points.empty() ? Json() : io::to_json(g.point(c.worst_point));
  std::vector<double> cls(g.size(), -1.0);
  for (std::size_t i = 0; i < c.points.size(); ++i) cls[c.points[i]] = static_cast<double>(c.classes[i]);
  r.files.emplace_back("classes.csv", io::grid_csv(GridField(g, std::move(cls), "classes")));
  if (doc.contains("expect")) {
    const std::string want = doc.at("expect").get<std::string>();
    r.body["expected"] = want;
    r.code = want == to_string(c.summary) ? kOk : kPropertyFailed;
  }
  return r;
}

Result subaffine(const Json& doc, const io::Overrides& o) {
  Result r;
  const GridShape g = io::grid_from_json(doc);
  const GridField f = field_from_doc(doc, g);
  const SubaffineReport s = subaffine_check(f, tau_of(o));
  r.body["grid"] = io::to_json(g);
  r.body["points"] = s.points.size();
  r.body["failing"] = std::count(s.pass.begin(), s.pass.end(), std::uint8_t{0});
  r.body["min_ratio"] = s.min_ratio;
  r.body["subaffine"] = s.subaffine;
  r.code = s.subaffine ? kOk : kPropertyFailed;
  return r;
}

Result hull(const Json& doc, const io::Overrides& o) {
  Result r;
  const GridShape g = io::grid_from_json(doc);
  const ConeSpec cone = io::cone_from_json(io::require(doc, "cone", "document"), o);
  if (cone.dim() != g.dim()) throw InputError("cone dimension differs from the grid");
  std::vector<Vec> k;
  for (const auto& p : io::require(doc, "points", "document")) {
    k.push_back(io::vec_from_json(p, "points"));
    if (static_cast<int>(k.back().size()) != g.dim()) throw InputError("points: wrong dimension");
  }
  if (k.empty()) throw InputError("points: empty");
  const int budget = io::integer_or(doc, "budget", 50);
  const HullReport h = hull_estimate(k, cone, g, budget, Exec::Parallel, io::seed_of(doc, o));
  r.body["grid"] = io::to_json(g);
  r.body["cone"] = io::to_json(cone);
  r.body["test_functions"] = h.test_functions;
  r.body["kept"] = h.kept;
  std::vector<double> mask(h.mask.begin(), h.mask.end());
  r.files.emplace_back("hull.csv", io::grid_csv(GridField(g, std::move(mask), "hull")));
  return r;
}

Json solve_summary(const Solution& s) {
  return {{"iterations", s.report.iterations}, {"residual", s.report.residual}, {"converged", s.report.converged}};
}

void attach_solution(Result& r, const io::DirichletDoc& d, const Solution& s) {
  r.body["solver"] = solve_summary(s);
  r.files.emplace_back("solution.csv", io::grid_csv(s.u));
  r.files.emplace_back("solution.json", io::dump(io::grid_sidecar(s.u)));
  if (!s.report.converged) {
    r.code = kNumericalError;
    return;
  }
  if (d.reference) {
    double err = 0.0;
    for (std::size_t i = 0; i < s.u.shape().size(); ++i) {
      const Vec x = s.u.shape().point(i);
      err = std::max(err, std::abs(s.u[i] - (*d.reference)(x)));
    }
    r.body["reference"] = {{"max_error", err}, {"tol", d.reference_tol}, {"pass", err < d.reference_tol}};
    if (!(err < d.reference_tol)) r.code = kPropertyFailed;
  }
}

Result solve_dirichlet(const Json& doc, const io::Overrides& o) {
  Result r;
  const io::DirichletDoc d = io::dirichlet_from_json(doc, o);
  const DirichletProblem p = d.problem();
  r.body["grid"] = io::to_json(d.grid);
  r.body["cone"] = io::to_json(*d.cone);
  r.body["stencil"] = {{"width", d.stencil}, {"directions", p.stencil().size()}, {"max_angle_error", p.max_angle_error()}};
  r.body["unknowns"] = p.unknowns().size();
  attach_solution(r, d, perron_solve(p, d.solver));
  return r;
}

Result solve_ma2d(const Json& doc, const io::Overrides& o) {
  Result r;
  const io::DirichletDoc d = io::dirichlet_from_json(doc, o, true);
  r.body["grid"] = io::to_json(d.grid);
  r.body["c"] = d.c;
  r.body["stencil"] = {{"width", d.stencil}};
  attach_solution(r, d, ma_solve_2d(d.grid, d.rho, d.phi, d.c, d.stencil, d.solver));
  return r;
}

Json constants_json(const DefiningConstants& k) {
  return {{"eps", k.eps}, {"delta", k.delta}, {"M", k.m},          {"C", k.c},
          {"a", k.a},     {"t", k.t},         {"eps_max", k.eps_max}, {"eps_used", k.eps_used},
          {"sampled", k.sampled}};
}

Result domain_check(const Json& doc, const io::Overrides& o) {
  Result r;
  const DomainSpec d = io::domain_from_json(io::require(doc, "domain", "document"));
  const ConeSpec cone = io::cone_from_json(io::require(doc, "cone", "document"), o);
  if (cone.dim() != d.dim()) throw InputError("cone dimension differs from the domain");
  const int count = io::integer_or(doc, "samples", 64);
  const int grid_points = io::integer_or(doc, "grid_points", 61);
  const std::uint64_t seed = io::seed_of(doc, o);
  const double tau = tau_of(o);
  const auto pts = d.boundary_samples(count, seed);
  if (pts.empty()) throw InputError("domain: no boundary found along the sample rays");

  int strict = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  Json failure;
  for (const auto& x : pts) {
    const BoundaryVerdict v = boundary_convexity_check(d, cone, x, tau);
    strict += v.strict;
    min_margin = std::min(min_margin, v.margin);
    if (!v.strict && failure.is_null()) {
      const ConstantSearch cs = strict_constant_C(d, cone, x, 1e6, tau);
      failure = {{"point", io::to_json(x)},
                 {"margin", v.margin},
                 {"weak", v.weak},
                 {"witness", io::to_json(v.witness)},
                 {"direction", io::to_json(witness_direction(v.witness))},
                 {"constant_search", {{"found", cs.found}, {"c_max", 1e6}, {"margin", cs.verdict.margin}}}};
    }
  }
  const bool all_strict = strict == static_cast<int>(pts.size());
  r.body["domain"] = {{"n", d.dim()}, {"rho", d.label()}};
  r.body["cone"] = io::to_json(cone);
  r.body["boundary"] = {{"samples", pts.size()},
                        {"strict", strict},
                        {"min_margin", min_margin},
                        {"strictly_convex", all_strict},
                        {"failure", failure}};
  bool ok = all_strict;
  const DefiningFunction* rho_hat = nullptr;
  DefiningReport def;
  if (all_strict) {
    DefiningBudget b;
    b.boundary_samples = count;
    b.grid_points = grid_points;
    b.seed = seed;
    def = global_defining_function(d, cone, b);
    r.body["defining_function"] = {{"ok", def.ok},
                                   {"constants", constants_json(def.constants)},
                                   {"pairings_sampled", def.pairings_sampled},
                                   {"closure_points", def.closure_points},
                                   {"min_margin", def.min_margin},
                                   {"worst_point", def.worst_point.empty() ? Json() : io::to_json(def.worst_point)},
                                   {"sign_agrees", def.sign_agrees}};
    ok = ok && def.ok;
    if (def.rho_hat) rho_hat = &*def.rho_hat;
  }
  if (d.dim() <= 3) {
    Vec lo(static_cast<std::size_t>(d.dim()), std::numeric_limits<double>::infinity());
    Vec hi(lo.size(), -std::numeric_limits<double>::infinity());
    for (const auto& x : pts)
      for (std::size_t i = 0; i < lo.size(); ++i) {
        lo[i] = std::min(lo[i], x[i]);
        hi[i] = std::max(hi[i], x[i]);
      }
    double span = 0.0;
    for (std::size_t i = 0; i < lo.size(); ++i) span = std::max(span, hi[i] - lo[i]);
    const double h = 1.1 * span / (grid_points - 1);
    std::vector<int> counts;
    for (std::size_t i = 0; i < lo.size(); ++i) {
      lo[i] -= 0.05 * span;
      counts.push_back(static_cast<int>(std::ceil((hi[i] + 0.05 * span - lo[i]) / h)) + 1);
    }
    const ExhaustionReport e = exhaustion_check(d, cone, GridShape(lo, h, counts), rho_hat, tau);
    r.body["exhaustion"] = {{"pass", e.pass},
                            {"uses_defining_function", rho_hat != nullptr},
                            {"points", e.points},
                            {"excluded", e.excluded},
                            {"min_margin", e.min_margin},
                            {"worst_point", e.worst_point.empty() ? Json() : io::to_json(e.worst_point)}};
    ok = ok && e.pass;
  }
  r.code = ok ? kOk : kPropertyFailed;
  return r;
}

Result tube_check(const Json& doc, const io::Overrides& o) {
  Result r;
  const SubmanifoldSpec m = io::submanifold_from_json(io::require(doc, "submanifold", "document"));
  const ConeSpec cone = io::cone_from_json(io::require(doc, "cone", "document"), o);
  if (cone.dim() != m.dim()) throw InputError("cone dimension differs from the submanifold");
  const GridShape g = io::grid_from_json(doc);
  if (g.dim() != m.dim()) throw InputError("grid dimension differs from the submanifold");
  const double radius = io::number_or(doc, "radius", 0.25);
  if (!(radius > 0)) throw InputError("radius must be positive");
  const Vec x0 = m.samples(1).front();
  const DistSqReport ds = dist_sq_hessian_check(m, cone, x0);
  const TubeReport t = tube_report(m, cone, radius, g, tau_of(o));
  r.body["submanifold"] = m.name();
  r.body["cone"] = io::to_json(cone);
  r.body["dist_sq"] = {{"point", io::to_json(x0)},
                       {"max_error", ds.max_error},
                       {"matches", ds.matches},
                       {"free", ds.free},
                       {"normal_projection", verdict_json(ds.verdict)}};
  r.body["tube"] = {{"radius", radius},
                    {"refused", t.refused},
                    {"failing_sample", t.failing_sample ? io::to_json(*t.failing_sample) : Json()},
                    {"free_samples", t.free_samples},
                    {"strict", t.strict},
                    {"points", t.points},
                    {"excluded", t.excluded},
                    {"min_margin", t.min_margin},
                    {"admissible_eps", t.admissible_eps},
                    {"perturbed_strict", t.perturbed_strict},
                    {"zero_point", t.zero_point.empty() ? Json() : io::to_json(t.zero_point)}};
  r.code = !t.refused && t.strict && t.perturbed_strict && ds.matches ? kOk : kPropertyFailed;
  return r;
}

Result selftest(const Command& cmd, std::ostream& out) {
  Result r;
  acceptance::Config cfg;
  cfg.fixture_dir = cmd.input.empty() ? std::string(HCL_FIXTURE_DIR) : cmd.input;
  cfg.overrides = cmd.overrides;
  const auto results = acceptance::run_all(cfg, [&](const acceptance::Criterion& c) {
    out << acceptance::format_line(c) << '\n' << std::flush;
  });
  r.body["criteria"] = acceptance::to_json(results);
  r.code = acceptance::exit_code(results);
  return r;
}

Json overrides_json(const io::Overrides& o) {
  Json j = Json::object();
  if (o.seed) j["seed"] = *o.seed;
  if (o.tau) j["tau"] = *o.tau;
  if (o.tol) j["tol"] = *o.tol;
  if (o.density) j["density"] = *o.density;
  if (o.stencil) j["stencil"] = *o.stencil;
  if (o.max_iters) j["max_iters"] = *o.max_iters;
  if (o.mode) j["mode"] = *o.mode == SweepMode::Jacobi ? "jacobi" : "gauss-seidel";
  return j;
}

std::string_view status_name(int code) {
  switch (code) {
    case kOk: return "ok";
    case kPropertyFailed: return "property-failed";
    case kInputError: return "input-error";
    default: return "numerical-error";
  }
}

}  // namespace

std::optional<Verb> parse_verb(std::string_view name) {
  for (const auto& [v, s] : kVerbs)
    if (s == name) return v;
  return std::nullopt;
}

std::string_view to_string(Verb v) {
  for (const auto& [k, s] : kVerbs)
    if (k == v) return s;
  return "?";
}

int run(const Command& cmd, std::ostream& out, std::ostream& err) {
  const auto verb = parse_verb(cmd.verb);
  if (!verb) {
    err << "hcl: unknown verb \"" << cmd.verb << "\"\n";
    return kInputError;
  }
  configure_threads();
  Result r;
  try {
    if (*verb == Verb::Selftest) {
      r = selftest(cmd, out);
    } else {
      if (cmd.input.empty()) throw InputError("--input is required");
      const Json doc = io::load_json(cmd.input);
      io::check_schema(doc, cmd.input);
      switch (*verb) {
        case Verb::ConeCheck: r = cone_check(doc, cmd.overrides); break;
        case Verb::ConeFreedim: r = cone_freedim(doc, cmd.overrides); break;
        case Verb::GardingTest: r = garding_test(doc, cmd.overrides); break;
        case Verb::FieldClassify: r = field_classify(doc, cmd.overrides); break;
        case Verb::SubaffineCheck: r = subaffine(doc, cmd.overrides); break;
        case Verb::HullEstimate: r = hull(doc, cmd.overrides); break;
        case Verb::SolveDirichlet: r = solve_dirichlet(doc, cmd.overrides); break;
        case Verb::SolveMa2d: r = solve_ma2d(doc, cmd.overrides); break;
        case Verb::DomainCheck: r = domain_check(doc, cmd.overrides); break;
        case Verb::TubeCheck: r = tube_check(doc, cmd.overrides); break;
        case Verb::Selftest: break;
      }
    }
  } catch (const NumericalError& e) {
    err << "hcl: numerical error: " << e.what() << '\n';
    return kNumericalError;
  } catch (const Error& e) {
    err << "hcl: " << e.what() << '\n';
    return kInputError;
  } catch (const nlohmann::json::exception& e) {
    err << "hcl: " << e.what() << '\n';
    return kInputError;
  }

  Json report;
  report["schema_version"] = kSchemaVersion;
  report["verb"] = std::string(to_string(*verb));
  report["overrides"] = overrides_json(cmd.overrides);
  report["status"] = std::string(status_name(r.code));
  report["exit_code"] = r.code;
  report["result"] = std::move(r.body);
  const std::string text = io::dump(report);
  try {
    if (cmd.out_dir.empty()) {
      if (*verb != Verb::Selftest) out << text;
    } else {
      const std::filesystem::path dir(cmd.out_dir);
      io::write_text((dir / "report.json").string(), text);
      for (const auto& [name, body] : r.files) io::write_text((dir / name).string(), body);
    }
  } catch (const Error& e) {
    err << "hcl: " << e.what() << '\n';
    return kInputError;
  }
  if (r.code == kPropertyFailed) err << "hcl: " << to_string(*verb) << ": checked property failed\n";
  if (r.code == kNumericalError) err << "hcl: " << to_string(*verb) << ": solver did not converge\n";
  return r.code;
}

}  // namespace hcl::cli
