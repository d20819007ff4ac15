#include "subspec/report.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

#include "subspec/errors.hpp"

namespace subspec {

using nlohmann::json;

SuspensionParams AnalysisConfig::suspension(const Substitution& z) const {
  switch (mode) {
    case SuspensionMode::SelfSimilar:
      return SuspensionParams::self_similar(z);
    case SuspensionMode::Explicit:
      if (static_cast<int>(heights.size()) != z.size())
        throw InputError("--heights needs " + std::to_string(z.size()) + " values, got " +
                         std::to_string(heights.size()));
      return SuspensionParams::explicit_heights(heights);
    default:
      return SuspensionParams::unit(z.size());
  }
}

json number(long double x) {
  if (std::isnan(x)) return "unconfirmed";
  if (std::isinf(x)) return x < 0 ? "-inf" : "inf";
  return static_cast<double>(x);
}

namespace {
json vec_json(const RealVector& v) {
  auto a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number(v(i)));
  return a;
}
json cplx(std::complex<double> z) { return json::array({z.real(), z.imag()}); }
}  // namespace

json substitution_json(const Substitution& z) {
  json j;
  j["alphabet"] = z.tokens();
  json rules = json::object();
  for (int b = 0; b < z.size(); ++b) rules[z.token(b)] = z.format(z.rule(b));
  j["rules"] = rules;
  j["dsl"] = z.to_dsl();
  return j;
}

json matrix_json(const IntMatrix& m) {
  auto rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    auto row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

json perron_json(const PerronData& p) {
  return {{"theta", number(p.theta)},
          {"right", vec_json(p.right)},
          {"left", vec_json(p.left)},
          {"frequency", vec_json(p.frequency)},
          {"right_residual", number(p.right_residual)},
          {"left_residual", number(p.left_residual)}};
}

json pisot_json(const PisotReport& r) {
  json j;
  j["charpoly"] = r.charpoly.to_string();
  j["irreducible"] = r.irreducible ? json(*r.irreducible) : json("unconfirmed");
  auto f = json::array();
  for (const auto& p : r.factors) f.push_back(p.to_string());
  j["factors"] = f;
  j["pf_minimal_polynomial"] = r.pf_minimal_polynomial.to_string();
  j["theta"] = number(r.theta);
  auto ev = json::array();
  for (auto e : r.eigenvalues) ev.push_back(cplx(e));
  j["eigenvalues"] = ev;
  j["pf_is_pisot"] = r.pf_is_pisot;
  j["irreducible_pisot"] = r.irreducible_pisot;
  j["trace"] = r.trace;
  j["det"] = r.det;
  j["flags"] = r.flags;
  return j;
}

json exponent_json(const ExponentEstimate& e) {
  json j;
  j["estimate"] = e.estimate;
  j["stderr"] = e.std_error;
  j["running_min"] = e.running_min;
  j["samples"] = e.samples;
  j["used"] = e.used;
  j["degenerate"] = e.degenerate;
  j["seed"] = e.seed;
  j["value"] = e.value;
  j["value_stderr"] = e.value_se;
  j["argmin_k"] = e.argmin;
  j["log_theta"] = e.log_theta;
  return j;
}

json dimension_json(const DimensionReport& d) {
  json j;
  j["omega"] = d.omega;
  j["exponent"] = d.exponent ? number(*d.exponent) : json(nullptr);
  j["dimension"] = d.dimension ? json(*d.dimension) : json(nullptr);
  j["at_least_two"] = d.at_least_two;
  j["branch"] = d.branch;
  if (d.k > 0) j["k"] = d.k;
  j["note"] = d.note;
  return j;
}

json density_json(const DensityGrid& g) {
  json j;
  j["grid"] = {{"lo", g.grid.lo}, {"hi", g.grid.hi}, {"points", g.grid.points}};
  j["level"] = g.level;
  j["label"] = g.label;
  auto om = json::array();
  for (std::size_t i = 0; i < g.grid.points; ++i) om.push_back(g.grid.omega(i));
  j["omega"] = om;
  if (g.is_scalar()) {
    j["density"] = g.scalar;
  } else {
    auto ms = json::array();
    for (const auto& m : g.matrices) {
      auto rows = json::array();
      for (Eigen::Index a = 0; a < m.rows(); ++a) {
        auto row = json::array();
        for (Eigen::Index b = 0; b < m.cols(); ++b) row.push_back(cplx(m(a, b)));
        rows.push_back(row);
      }
      ms.push_back(rows);
    }
    j["matrices"] = ms;
  }
  return j;
}

json analysis_report(const Substitution& z, const AnalysisConfig& cfg) {
  json j;
  j["schema"] = kReportSchema;
  j["substitution"] = substitution_json(z);
  const IntMatrix s = substitution_matrix(z);
  j["matrix"] = matrix_json(s);
  const auto prim = is_primitive(z);
  j["primitive"] = prim.primitive;
  if (!prim.primitive) throw PreconditionError("substitution is not primitive");
  j["primitivity_exponent"] = prim.exponent;
  j["perron"] = perron_json(perron_data(z));
  const auto ap = aperiodicity_verdict(z);
  j["aperiodicity"] = {{"verdict", to_string(ap.verdict)}, {"reason", ap.reason}, {"tests_run", ap.tests_run}};
  if (ap.period) j["aperiodicity"]["period"] = *ap.period;
  const auto seed = default_fixed_point(z);
  j["fixed_point"] = {{"letter", z.token(seed.letter)}, {"power", seed.power}};
  if (ap.verdict == Aperiodicity::Periodic) j["flags"] = json::array({"periodic input"});
  j["pisot"] = pisot_json(pisot_report(z));
  const auto sv = spectrum_summary(z);
  json cl;
  cl["headline"] = sv.headline;
  if (sv.eigenvalue_group) cl["eigenvalue_group"] = *sv.eigenvalue_group;
  auto crit = json::array();
  for (const auto& c : sv.criteria) crit.push_back(to_json(c));
  cl["criteria"] = crit;
  j["classification"] = cl;
  const auto susp = cfg.suspension(z);
  j["suspension"] = {{"mode", susp.mode == SuspensionMode::Unit         ? "unit"
                              : susp.mode == SuspensionMode::SelfSimilar ? "self-similar"
                                                                          : "explicit"},
                     {"heights", vec_json(susp.heights)}};
  j["grids"] = json::array();
  return j;
}

LyapunovOutcome lyapunov_analysis(const Substitution& z, const AnalysisConfig& cfg) {
  const auto rep = pisot_report(z);
  LyapunovOutcome o;
  if (rep.irreducible && !*rep.irreducible) {
    CriterionResult c;
    c.id = "lyapunov-singularity";
    c.theorem = Theorem::LyapunovHalfLogTheta;
    c.verdict = Verdict::NotApplicable;
    c.statement = "characteristic polynomial is reducible";
    c.evidence["charpoly"] = rep.charpoly.to_string();
    auto f = json::array();
    for (const auto& p : rep.factors) f.push_back(p.to_string());
    c.evidence["factors"] = f;
    o.verdict = c;
    return o;
  }
  o.estimate = global_exponent(z, cfg.depth, cfg.samples, cfg.seed, cfg.threads);
  o.verdict = singularity_verdict_irreducible(z, *o.estimate);
  return o;
}

json lyapunov_report(const Substitution& z, const LyapunovOutcome& o, const AnalysisConfig& cfg) {
  json j;
  j["schema"] = kReportSchema;
  j["substitution"] = substitution_json(z);
  j["config"] = {{"depth", cfg.depth}, {"samples", cfg.samples}, {"seed", cfg.seed}};
  if (o.estimate) j["exponent"] = exponent_json(*o.estimate);
  j["verdict"] = to_json(o.verdict);
  j["grids"] = json::array();
  return j;
}

void write_exponent_csv(std::ostream& out, const ExponentEstimate& e) {
  out << std::setprecision(17) << "k,estimate,stderr,samples,seed\n";
  for (std::size_t k = 0; k < e.estimate.size(); ++k)
    out << k + 1 << "," << e.estimate[k] << "," << e.std_error[k] << "," << e.used << "," << e.seed << "\n";
}

}  // namespace subspec
