#include "dnlab_cli/config.hpp"

#include "dnlab/yamabe.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace dnlab::cli {

using std::numbers::pi;

const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::SpectralSweep: return "spectral-sweep";
    case Scenario::Isospectral: return "isospectral";
    case Scenario::DnCompare: return "dn-compare";
    case Scenario::UniquenessProbe: return "uniqueness-probe";
    case Scenario::Gauge: return "gauge";
    case Scenario::LinkCheck: return "link-check";
    case Scenario::Lemma31: return "lemma31";
  }
  return "?";
}

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError(where + ": " + what);
}

double number(const Json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number, got " + j.dump());
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(where, "must be finite");
  return v;
}

long long integer(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected an integer, got " + j.dump());
  return j.get<long long>();
}

std::vector<double> numbers(const Json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

/// Reads keys from one JSON object and rejects any it did not read.
class Fields {
 public:
  Fields(const Json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j.is_object()) fail(where_, "expected an object");
  }

  const Json* find(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }
  const Json& need(const std::string& key) {
    const Json* v = find(key);
    if (!v) fail(where_, "missing required key \"" + key + "\"");
    return *v;
  }
  double num(const std::string& key, double def) {
    const Json* v = find(key);
    return v ? number(*v, path(key)) : def;
  }
  long long integer_or(const std::string& key, long long def) {
    const Json* v = find(key);
    return v ? integer(*v, path(key)) : def;
  }
  std::string path(const std::string& key) const { return where_ + "." + key; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) fail(where_, "unknown key \"" + it.key() + "\"");
  }

 private:
  const Json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

AnalyticTerm parse_term(const Json& j, const std::string& where) {
  if (j.is_number()) return ConstantTerm{number(j, where)};
  Fields o(j, where);
  const Json& type = o.need("type");
  if (!type.is_string()) fail(o.path("type"), "expected a string");
  const std::string t = type.get<std::string>();
  AnalyticTerm term;
  if (t == "constant") {
    term = ConstantTerm{number(o.need("value"), o.path("value"))};
  } else if (t == "polynomial") {
    term = PolynomialTerm{numbers(o.need("coeffs"), o.path("coeffs"))};
  } else if (t == "gaussian") {
    term = GaussianTerm{number(o.need("amp"), o.path("amp")), o.num("width", 1.0), o.num("center", 0.5)};
  } else if (t == "fourier") {
    FourierTerm ft;
    ft.a0 = o.num("a0", 0.0);
    if (const Json* c = o.find("cos")) ft.cos_coeffs = numbers(*c, o.path("cos"));
    if (const Json* s = o.find("sin")) ft.sin_coeffs = numbers(*s, o.path("sin"));
    term = ft;
  } else if (t == "exponential") {
    term = ExponentialTerm{o.num("amp", 1.0), o.num("rate", 0.0)};
  } else {
    fail(o.path("type"), "unknown function family \"" + t +
                             "\" (constant, polynomial, gaussian, fourier, exponential)");
  }
  o.finish();
  return term;
}

cyl::TransverseModel parse_transverse_one(const Json& j, const std::string& where) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "circle") return cyl::Circle{};
    if (s == "dirichlet-interval") return cyl::DirichletInterval{};
    if (s == "torus") return cyl::FlatTorus{2};
    fail(where, "unknown transverse model \"" + s + "\"");
  }
  Fields o(j, where);
  const Json& type = o.need("type");
  if (!type.is_string()) fail(o.path("type"), "expected a string");
  const auto s = type.get<std::string>();
  cyl::TransverseModel m;
  if (s == "circle") {
    m = cyl::Circle{};
  } else if (s == "dirichlet-interval") {
    m = cyl::DirichletInterval{};
  } else if (s == "torus") {
    const long long d = o.integer_or("d", 2);
    if (d < 1 || d > 4) fail(o.path("d"), "torus dimension must be in [1, 4]");
    m = cyl::FlatTorus{int(d)};
  } else if (s == "explicit") {
    auto mu = numbers(o.need("mu"), o.path("mu"));
    for (std::size_t i = 0; i < mu.size(); ++i)
      if (mu[i] < 0.0 || (i > 0 && mu[i] < mu[i - 1])) fail(o.path("mu"), "must be sorted and >= 0");
    m = cyl::Explicit{std::move(mu)};
  } else {
    fail(o.path("type"), "unknown transverse model \"" + s + "\"");
  }
  o.finish();
  return m;
}

iso::FlowChain parse_chain(const Json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of [k, t] pairs");
  iso::FlowChain chain;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string w = where + "[" + std::to_string(i) + "]";
    iso::FlowParam p;
    if (j[i].is_array()) {
      if (j[i].size() != 2) fail(w, "expected [k, t]");
      p.k = int(integer(j[i][0], w + "[0]"));
      p.t = number(j[i][1], w + "[1]");
    } else {
      Fields o(j[i], w);
      p.k = int(integer(o.need("k"), o.path("k")));
      p.t = number(o.need("t"), o.path("t"));
      o.finish();
    }
    if (p.k < 1) fail(w, "eigenfunction index k must be >= 1");
    chain.push_back(p);
  }
  return chain;
}

std::vector<double> parse_mu(const Json& j, const std::string& where) {
  if (j.is_array()) return numbers(j, where);
  Fields o(j, where);
  const double a = number(o.need("from"), o.path("from"));
  const double b = number(o.need("to"), o.path("to"));
  const long long count = integer(o.need("count"), o.path("count"));
  o.finish();
  if (count < 2 || count > 100000) fail(o.path("count"), "must be in [2, 100000]");
  std::vector<double> mu(static_cast<std::size_t>(count));
  for (long long i = 0; i < count; ++i) mu[std::size_t(i)] = a + (b - a) * double(i) / double(count - 1);
  return mu;
}

/// Angle pair from either radians ("from", "to") or multiples of pi ("from_pi", "to_pi").
std::pair<double, double> parse_range(Fields& o, const std::string& prefix, std::pair<double, double> def) {
  const Json* a = o.find(prefix + "from");
  const Json* b = o.find(prefix + "to");
  const Json* ap = o.find(prefix + "from_pi");
  const Json* bp = o.find(prefix + "to_pi");
  if ((a || b) && (ap || bp)) fail(o.path(prefix + "from"), "give the range in radians or in multiples of pi, not both");
  std::pair<double, double> r = def;
  if (a) r.first = number(*a, o.path(prefix + "from"));
  if (b) r.second = number(*b, o.path(prefix + "to"));
  if (ap) r.first = pi * number(*ap, o.path(prefix + "from_pi"));
  if (bp) r.second = pi * number(*bp, o.path(prefix + "to_pi"));
  return r;
}

e2d::BoundaryArc parse_arc(const Json& j, const std::string& where) {
  Fields o(j, where);
  e2d::BoundaryArc arc;
  const Json& comp = o.need("component");
  if (comp.is_number_integer() && (comp.get<int>() == 0 || comp.get<int>() == 1)) {
    arc.component = comp.get<int>() == 0 ? cyl::Component::Gamma0 : cyl::Component::Gamma1;
  } else if (comp.is_string() && (comp == "gamma0" || comp == "Gamma0")) {
    arc.component = cyl::Component::Gamma0;
  } else if (comp.is_string() && (comp == "gamma1" || comp == "Gamma1")) {
    arc.component = cyl::Component::Gamma1;
  } else {
    fail(o.path("component"), "expected 0, 1, \"gamma0\" or \"gamma1\"");
  }
  const Json* full = o.find("full");
  if (full && !full->is_boolean()) fail(o.path("full"), "expected a boolean");
  const auto [a, b] = parse_range(o, "", {0.0, 2.0 * pi});
  if (full && full->get<bool>()) {
    arc.y_a = 0.0;
    arc.y_b = 2.0 * pi;
  } else {
    if (!(b > a)) fail(where, "arc needs to > from");
    arc.y_a = a;
    arc.y_b = b;
  }
  o.finish();
  return arc;
}

FactorSpec parse_factor(const Json& j, const std::string& where) {
  FactorSpec c;
  if (j.is_number()) {
    c.value = number(j, where);
    return c;
  }
  Fields o(j, where);
  const Json& type = o.need("type");
  if (!type.is_string()) fail(o.path("type"), "expected a string");
  const auto t = type.get<std::string>();
  if (t == "constant") {
    c.kind = FactorSpec::Kind::Constant;
    c.value = number(o.need("value"), o.path("value"));
  } else if (t == "interior-bump") {
    c.kind = FactorSpec::Kind::InteriorBump;
    c.amplitude = number(o.need("amplitude"), o.path("amplitude"));
    c.center = o.num("center", 0.5);
    c.radius = o.num("radius", 0.3);
    if (!(c.radius > 0.0)) fail(o.path("radius"), "must be > 0");
  } else if (t == "normal-slope") {
    c.kind = FactorSpec::Kind::NormalSlope;
    c.epsilon = number(o.need("epsilon"), o.path("epsilon"));
  } else {
    fail(o.path("type"), "unknown factor family \"" + t + "\" (constant, interior-bump, normal-slope)");
  }
  o.finish();
  return c;
}

Tolerances parse_tolerances(const Json& j, const std::string& where) {
  Tolerances t;
  Fields o(j, where);
  const std::pair<const char*, double*> keys[] = {
      {"eigenvalue", &t.eigenvalue},
      {"characteristic", &t.characteristic},
      {"dn", &t.dn},
      {"wronskian", &t.wronskian},
      {"guard", &t.guard},
      {"mismatch", &t.mismatch},
      {"hypothesis", &t.hypothesis},
      {"potential", &t.potential},
      {"dn_diag_min", &t.dn_diag_min},
      {"potential_change_min", &t.potential_change_min},
      {"sup_c_min", &t.sup_c_min},
      {"convergence_ratio", &t.convergence_ratio},
      {"solver_floor", &t.solver_floor},
  };
  for (auto [key, dst] : keys) {
    *dst = o.num(key, *dst);
    if (!(*dst >= 0.0)) fail(o.path(key), "must be >= 0");
  }
  o.finish();
  return t;
}

}  // namespace

void Tolerances::scale(double k) {
  for (double* v : {&eigenvalue, &characteristic, &dn, &wronskian, &mismatch, &hypothesis, &potential}) *v *= k;
}

e2d::SampledFn2D FactorSpec::sample(const e2d::Grid2D& grid) const {
  switch (kind) {
    case Kind::Constant:
      return e2d::SampledFn2D::constant(grid, value);
    case Kind::InteriorBump:
      return e2d::SampledFn2D::from(grid, [this](double x, double y) {
        const double s = (x - center) / radius;
        const double phi = std::fabs(s) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s * s)) : 0.0;
        return 1.0 + amplitude * phi * 0.5 * (1.0 + std::cos(y));
      });
    case Kind::NormalSlope:
      return e2d::SampledFn2D::from(
          grid, [this](double x, double y) { return 1.0 + epsilon * x * (1.0 - x) * (1.0 + std::sin(y)); });
  }
  return e2d::SampledFn2D::constant(grid, 1.0);
}

e2d::SampledFn2D EtaSpec::sample(const e2d::Grid2D& grid) const {
  return yamabe::eta_profile(grid, keep_a, keep_b, amplitude, ramp);
}

std::string FactorSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case Kind::Constant: os << "constant(" << value << ")"; break;
    case Kind::InteriorBump:
      os << "interior-bump(amplitude=" << amplitude << ", center=" << center << ", radius=" << radius << ")";
      break;
    case Kind::NormalSlope: os << "normal-slope(epsilon=" << epsilon << ")"; break;
  }
  return os.str();
}

AnalyticFn parse_function(const Json& j, const std::string& where) {
  if (j.is_array()) {
    std::vector<AnalyticTerm> terms;
    for (std::size_t i = 0; i < j.size(); ++i) terms.push_back(parse_term(j[i], where + "[" + std::to_string(i) + "]"));
    return AnalyticFn(std::move(terms));
  }
  return AnalyticFn(parse_term(j, where));
}

ScenarioConfig parse_config(const Json& doc) {
  ScenarioConfig cfg;
  cfg.source = doc;
  Fields o(doc, "config");

  const Json& version = o.need("schema_version");
  if (!version.is_number_integer() || version.get<long long>() != kSchemaVersion)
    fail("config.schema_version", "unsupported schema version " + version.dump() + " (expected " +
                                      std::to_string(kSchemaVersion) + ")");

  const Json& sc = o.need("scenario");
  if (!sc.is_string()) fail("config.scenario", "expected a string");
  const auto name = sc.get<std::string>();
  bool known = false;
  for (Scenario s : {Scenario::SpectralSweep, Scenario::Isospectral, Scenario::DnCompare, Scenario::UniquenessProbe,
                     Scenario::Gauge, Scenario::LinkCheck, Scenario::Lemma31})
    if (name == to_string(s)) {
      cfg.scenario = s;
      known = true;
    }
  if (!known) fail("config.scenario", "unknown scenario \"" + name + "\"");

  cfg.n = int(o.integer_or("n", cfg.n));
  if (cfg.n < 3) fail("config.n", "dimension must be >= 3");
  cfg.lambda = o.num("lambda", cfg.lambda);
  if (const Json* v = o.find("f")) cfg.f = parse_function(*v, "config.f");
  if (const Json* v = o.find("V")) cfg.V = parse_function(*v, "config.V");
  if (const Json* v = o.find("V_compare")) cfg.V_compare = parse_function(*v, "config.V_compare");
  if (const Json* v = o.find("Q")) cfg.Q = parse_function(*v, "config.Q");

  if (const Json* v = o.find("transverse")) {
    cfg.transverse.clear();
    if (v->is_array()) {
      for (std::size_t i = 0; i < v->size(); ++i)
        cfg.transverse.push_back(parse_transverse_one((*v)[i], "config.transverse[" + std::to_string(i) + "]"));
    } else {
      cfg.transverse.push_back(parse_transverse_one(*v, "config.transverse"));
    }
    if (cfg.transverse.empty()) fail("config.transverse", "needs at least one model");
  }
  if (const Json* v = o.find("chain")) cfg.chain = parse_chain(*v, "config.chain");
  cfg.k_max = int(o.integer_or("k_max", cfg.k_max));
  if (cfg.k_max < 0 || cfg.k_max > 10000) fail("config.k_max", "must be in [0, 10000]");
  cfg.eigen_count = int(o.integer_or("eigen_count", cfg.eigen_count));
  if (cfg.eigen_count < 1 || cfg.eigen_count > 1000) fail("config.eigen_count", "must be in [1, 1000]");
  if (const Json* v = o.find("mu")) cfg.mu = parse_mu(*v, "config.mu");
  else
    for (int i = 0; i <= 10; ++i) cfg.mu.push_back(10.0 * i);

  if (const Json* v = o.find("grid")) {
    Fields g(*v, "config.grid");
    cfg.points = std::size_t(g.integer_or("points", static_cast<long long>(cfg.points)));
    cfg.nx = std::size_t(g.integer_or("nx", static_cast<long long>(cfg.nx)));
    cfg.ny = std::size_t(g.integer_or("ny", static_cast<long long>(cfg.ny)));
    g.finish();
  }
  if (cfg.points < 5 || cfg.points > 10'000'001) fail("config.grid.points", "must be in [5, 10000001]");
  if (cfg.nx < 5 || cfg.ny < 8) fail("config.grid", "2D grid needs nx >= 5 and ny >= 8");

  if (const Json* v = o.find("arcs")) {
    Fields a(*v, "config.arcs");
    cfg.gamma_d = parse_arc(a.need("dirichlet"), "config.arcs.dirichlet");
    cfg.gamma_n = parse_arc(a.need("neumann"), "config.arcs.neumann");
    a.finish();
  }
  if (const Json* v = o.find("basis")) {
    Fields b(*v, "config.basis");
    cfg.basis.bumps = int(b.integer_or("bumps", cfg.basis.bumps));
    cfg.basis.fourier = int(b.integer_or("fourier", cfg.basis.fourier));
    b.finish();
    if (cfg.basis.bumps < 0 || cfg.basis.fourier < -1 || (cfg.basis.bumps == 0 && cfg.basis.fourier < 0))
      fail("config.basis", "needs bumps >= 0, fourier >= -1 and a non-empty basis");
  }
  if (const Json* v = o.find("c")) cfg.c = parse_factor(*v, "config.c");

  cfg.eta.keep_a = cfg.gamma_d.y_a;
  cfg.eta.keep_b = cfg.gamma_d.y_b;
  if (const Json* v = o.find("eta")) {
    Fields e(*v, "config.eta");
    std::tie(cfg.eta.keep_a, cfg.eta.keep_b) = parse_range(e, "keep_", {cfg.eta.keep_a, cfg.eta.keep_b});
    cfg.eta.amplitude = e.num("amplitude", cfg.eta.amplitude);
    cfg.eta.ramp = e.num("ramp", cfg.eta.ramp);
    e.finish();
    if (!(cfg.eta.ramp > 0.0)) fail("config.eta.ramp", "must be > 0");
  }
  if (const Json* v = o.find("negative_control")) {
    if (!v->is_boolean()) fail("config.negative_control", "expected a boolean");
    cfg.expect_link = !v->get<bool>();
  }
  if (const Json* v = o.find("tolerances")) cfg.tol = parse_tolerances(*v, "config.tolerances");
  if (const Json* v = o.find("output_dir")) {
    if (!v->is_string() || v->get<std::string>().empty()) fail("config.output_dir", "expected a non-empty string");
    cfg.output_dir = v->get<std::string>();
  }
  o.finish();

  if ((cfg.scenario == Scenario::Isospectral || cfg.scenario == Scenario::UniquenessProbe) && cfg.chain.empty())
    fail("config.chain", "scenario \"" + name + "\" needs a non-empty flow chain");
  if (cfg.scenario == Scenario::UniquenessProbe && cfg.Q)
    fail("config.Q", "uniqueness-probe deforms V; give f, V and lambda instead of Q");
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_config(doc);
}

void apply_resolution_scale(ScenarioConfig& cfg, int k) {
  if (k < 1) throw ConfigError("--resolution-scale must be >= 1");
  cfg.points = (cfg.points - 1) * std::size_t(k) + 1;
  cfg.nx = (cfg.nx - 1) * std::size_t(k) + 1;
  cfg.ny *= std::size_t(k);
}

void check_preconditions(const ScenarioConfig& cfg) {
  const Grid1D grid(cfg.points);
  const Function1D f = cfg.f;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (!(f(grid.x(i)) > 0.0))
      throw PreconditionViolation("warping function must satisfy f > 0 on [0,1] (fails at x = " +
                                  std::to_string(grid.x(i)) + ")");

  const e2d::Grid2D g(cfg.nx, cfg.ny);
  const auto on_arcs = [&](const e2d::SampledFn2D& u, auto&& pred) {
    for (const e2d::BoundaryArc* arc : {&cfg.gamma_d, &cfg.gamma_n}) {
      const std::size_t i0 = arc->x_index(g);
      for (std::size_t j : arc->nodes(g))
        if (!pred(u(i0, j))) return false;
    }
    return true;
  };
  const auto is_one = [](double v) { return std::fabs(v - 1.0) <= 1e-12; };

  switch (cfg.scenario) {
    case Scenario::Gauge: {
      if (!e2d::arcs_disjoint(cfg.gamma_d, cfg.gamma_n, g))
        throw PreconditionViolation("gauge scenario requires Γ_D ∩ Γ_N = ∅ (arcs " + cfg.gamma_d.describe() +
                                    " and " + cfg.gamma_n.describe() + " overlap)");
      if (!e2d::arcs_leave_gap(cfg.gamma_d, cfg.gamma_n, g))
        throw PreconditionViolation("gauge scenario requires closure(Γ_D ∪ Γ_N) ≠ ∂M");
      const auto eta = cfg.eta.sample(g);
      if (!on_arcs(eta, is_one)) throw PreconditionViolation("gauge scenario requires η = 1 on Γ_D ∪ Γ_N");
      if (!(eta.min() > 0.0)) throw PreconditionViolation("gauge scenario requires η > 0");
      break;
    }
    case Scenario::LinkCheck: {
      const auto c = cfg.c.sample(g);
      if (!(c.min() > 0.0)) throw PreconditionViolation("link-check requires c > 0");
      if (cfg.expect_link && !on_arcs(c, is_one))
        throw PreconditionViolation("link-check requires c = 1 on Γ_D ∪ Γ_N");
      break;
    }
    case Scenario::Lemma31: {
      if (!(cfg.c.sample(g).min() > 0.0)) throw PreconditionViolation("lemma31 requires c1 > 0");
      if (!(cfg.eta.sample(g).min() > 0.0)) throw PreconditionViolation("lemma31 requires η > 0");
      break;
    }
    default:
      break;
  }
}

}  // namespace dnlab::cli
