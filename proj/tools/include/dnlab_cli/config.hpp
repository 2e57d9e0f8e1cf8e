#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dnlab/cylinder_dn.hpp"
#include "dnlab/elliptic2d.hpp"
#include "dnlab/errors.hpp"
#include "dnlab/isospectral.hpp"
#include "dnlab/numerics.hpp"

namespace dnlab::cli {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// Malformed or unparseable configuration (exit code 2).
class ConfigError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

enum class Scenario { SpectralSweep, Isospectral, DnCompare, UniquenessProbe, Gauge, LinkCheck, Lemma31 };

const char* to_string(Scenario s);

/// Conformal factor on the cylinder grid, as a small closed family.
struct FactorSpec {
  enum class Kind { Constant, InteriorBump, NormalSlope };
  Kind kind = Kind::Constant;
  double value = 1.0;      // Constant
  double amplitude = 0.0;  // InteriorBump: 1 + amplitude * phi((x - center)/radius) * (1 + cos y)/2
  double center = 0.5;
  double radius = 0.3;
  double epsilon = 0.0;    // NormalSlope: 1 + epsilon * x (1 - x) (1 + sin y)

  e2d::SampledFn2D sample(const e2d::Grid2D& grid) const;
  std::string describe() const;
};

/// eta = 1 on [keep_a, keep_b) of both components, 1 + amplitude elsewhere.
struct EtaSpec {
  double keep_a = 0.0;
  double keep_b = 0.0;
  double amplitude = 0.0;
  double ramp = 0.5;

  e2d::SampledFn2D sample(const e2d::Grid2D& grid) const;
};

/// Upper bounds are multiplied by --tol-scale; lower bounds (the *_min fields
/// and convergence_ratio) and solver_floor are not.
struct Tolerances {
  double eigenvalue = 1e-7;
  double characteristic = 1e-6;
  double dn = 1e-6;
  double wronskian = 1e-8;
  double guard = 1e-8;
  double mismatch = 5e-3;
  double hypothesis = 1e-6;
  double potential = 1e-5;
  double dn_diag_min = 1e-3;
  double potential_change_min = 0.1;
  double sup_c_min = 0.05;
  double convergence_ratio = 3.0;
  double solver_floor = 1e-10;

  void scale(double k);
};

struct ScenarioConfig {
  Json source;  // the parsed document, echoed into the report
  Scenario scenario = Scenario::SpectralSweep;

  int n = 3;
  double lambda = 0.0;
  AnalyticFn f = AnalyticFn::constant(1.0);
  AnalyticFn V = AnalyticFn::constant(0.0);
  std::optional<AnalyticFn> V_compare;  // dn-compare
  std::optional<AnalyticFn> Q;          // direct 1D potential (spectral-sweep, isospectral)
  std::vector<cyl::TransverseModel> transverse{cyl::Circle{}};
  iso::FlowChain chain;
  int k_max = 12;
  int eigen_count = 10;
  std::vector<double> mu;

  std::size_t points = 2001;
  std::size_t nx = 201;
  std::size_t ny = 128;

  e2d::BoundaryArc gamma_d{cyl::Component::Gamma0, 0.0, 2.0 * std::numbers::pi};
  e2d::BoundaryArc gamma_n{cyl::Component::Gamma1, 0.0, 2.0 * std::numbers::pi};
  e2d::BasisSpec basis;
  FactorSpec c;
  EtaSpec eta;
  bool expect_link = true;  // link-check: false runs the unchecked negative control

  Tolerances tol;
  std::string output_dir = "dnlab-out";
};

/// Tagged analytic expression: a number, one term object, or an array of terms.
AnalyticFn parse_function(const Json& j, const std::string& where);

ScenarioConfig parse_config(const Json& doc);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Grid sizes scaled for a refinement factor k >= 1.
void apply_resolution_scale(ScenarioConfig& cfg, int k);

/// Scenario preconditions that need no numerics; throws PreconditionViolation.
void check_preconditions(const ScenarioConfig& cfg);

}  // namespace dnlab::cli
