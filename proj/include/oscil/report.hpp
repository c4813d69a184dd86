#pragma once

// Runs the configured analyses and assembles the JSON report with its
// ledger of checked claims. A failed check is data; only computation
// errors propagate.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "oscil/config.hpp"
#include "oscil/eigen.hpp"
#include "oscil/functional.hpp"
#include "oscil/oscillation.hpp"
#include "oscil/transform.hpp"

namespace oscil::report {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

struct ReportOutput {
  Json document;
  /// CSV texts; empty when the corresponding output path is not set.
  std::string trace_csv;
  std::string transform_csv;
  std::string scan_csv;
};

namespace detail {

/// Rounded to 12 significant digits; non-finite values become null.
inline Json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

inline Json num(const std::optional<double>& v) { return v ? num(*v) : Json(nullptr); }

inline Json nums(const std::vector<double>& v) {
  Json out = Json::array();
  for (double x : v) out.push_back(num(x));
  return out;
}

inline std::string g12(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string g12(const std::optional<double>& v) { return v ? g12(*v) : "absent"; }

inline Json entry(const Check& c) {
  return {{"check", c.name}, {"claim", c.claim}, {"outcome", to_string(c.outcome)}, {"evidence", c.evidence}};
}

inline Json coefficient_json(const CoefficientText& t) { return {{"r", t.r}, {"p", t.p}, {"q", t.q}}; }

inline Json flags_json(const functional::DivergenceFlags& f) {
  return {{"int_q_diverges_to_minus_inf", f.int_q_diverges_to_minus_inf},
          {"int_p_diverges", f.int_p_diverges},
          {"int_inv_r_diverges", f.int_inv_r_diverges}};
}

inline Json eigenvalue_json(const eigen::EigenvalueResult& e) {
  return {{"k", e.k},
          {"value", num(e.value)},
          {"shoot_residual", num(e.shoot_residual)},
          {"scale", num(e.scale)},
          {"bracket", {num(e.bracket_lo), num(e.bracket_hi)}},
          {"sign_change", e.sign_change}};
}

/// Settings with every default resolved, echoed in the report.
struct Resolved {
  std::vector<double> eigen_b;
  double lower_bound_b0 = 0;
  std::vector<double> lower_bound_grid;
  std::vector<double> wirtinger_b;
  std::vector<double> scan_grid;
  double condition_end = 0;
};

inline Resolved resolve(const RunConfig& cfg, const oscillation::OscillationReport& osc) {
  Resolved r;
  const double a = cfg.a, span = cfg.x_max - cfg.a;
  r.eigen_b = cfg.eigen.b.empty() ? std::vector<double>{a + 0.25 * span} : cfg.eigen.b;
  r.lower_bound_b0 = cfg.eigen.lower_bound_b0.value_or(a + std::min(1.0, 0.25 * span));
  for (int i = 0; i < 10; ++i) r.lower_bound_grid.push_back(a + (r.lower_bound_b0 - a) * (1.0 - 0.09 * i));
  if (!cfg.eigen.wirtinger_b.empty()) {
    r.wirtinger_b = cfg.eigen.wirtinger_b;
  } else if (osc.mu1) {
    r.wirtinger_b.push_back(a + 0.5 * (*osc.mu1 - a));
    if (a + 1.5 * (*osc.mu1 - a) <= cfg.x_max) r.wirtinger_b.push_back(a + 1.5 * (*osc.mu1 - a));
  } else {
    r.wirtinger_b.push_back(cfg.x_max);
  }
  if (cfg.scan.b_grid.empty()) {
    for (int i = 1; i <= 8; ++i) r.scan_grid.push_back(a + span * i / 8.0);
  } else {
    r.scan_grid = cfg.scan.b_grid;
  }
  r.condition_end = osc.eta1.value_or(cfg.x_max);
  return r;
}

inline Json problem_json(const RunConfig& cfg, const Resolved& res) {
  Json analyses = Json::array();
  for (Analysis x : cfg.analyses) analyses.push_back(to_string(x));
  Json p;
  p["a"] = num(cfg.a);
  p["r"] = cfg.problem.r;
  p["p"] = cfg.problem.p;
  p["q"] = cfg.problem.q;
  p["x_max"] = num(cfg.x_max);
  p["comparison"] = cfg.comparison ? coefficient_json(*cfg.comparison) : Json(nullptr);
  p["divergence_flags"] = cfg.divergence_flags ? flags_json(*cfg.divergence_flags) : Json(nullptr);
  p["analyses"] = analyses;
  p["tolerances"] = {{"rtol", num(cfg.tol.rtol)},
                     {"atol", num(cfg.tol.atol)},
                     {"max_step", num(cfg.tol.max_step)},
                     {"max_steps", cfg.tol.max_steps}};
  p["eigen"] = {{"b", nums(res.eigen_b)},
                {"k", cfg.eigen.k},
                {"lambda_cap", num(cfg.eigen.lambda_cap)},
                {"lower_bound_b0", num(res.lower_bound_b0)},
                {"wirtinger_b", nums(res.wirtinger_b)},
                {"wirtinger_n", cfg.eigen.wirtinger_n}};
  p["scan"] = {{"b_grid", nums(res.scan_grid)}};
  p["numerics"] = {{"integrator", "dopri5 with dense output"},
                   {"lambda", 1},
                   {"scan_offset", num(oscillation::scan_offset(cfg.a, cfg.x_max))},
                   {"locate_tolerance", num(oscillation::locate_tolerance(cfg.a, cfg.x_max))},
                   {"identity_grid_points", 100},
                   {"identity_fd_step", num(1e-4)},
                   {"quadrature", "composite gauss-legendre, 64 panels of 8 points"},
                   {"eigen_min_samples", 32},
                   {"root_refinement", "toms748"}};
  return p;
}

/// u'' > 0 and v'' > 0 at `points` samples of (a, mu1], read off the
/// signs of u1 = r u'' and v1 = r v''.
inline bool fundamental_second_derivatives_positive(const Trajectory<8>& traj, double a, double mu1,
                                                    std::size_t points = 200) {
  for (std::size_t i = 1; i <= points; ++i) {
    const double x = a + (mu1 - a) * static_cast<double>(i) / static_cast<double>(points);
    const oscillation::PairState s = traj(x);
    if (!(s[2] > 0 && s[6] > 0)) return false;
  }
  return true;
}

inline std::string bool_text(bool b) { return b ? "true" : "false"; }

}  // namespace detail

inline ReportOutput run_report(const RunConfig& cfg) {
  using namespace detail;
  using oscillation::OscillationReport;
  const expr::CoefficientSet coeffs = cfg.coefficients();
  const Problem<expr::CoefficientSet> pb{cfg.a, coeffs, cfg.x_max, cfg.tol};
  const eigen::ShootingOptions shoot{cfg.eigen.lambda_cap, cfg.tol, 32};
  const bool want_points = cfg.wants(Analysis::points) || cfg.wants(Analysis::verify);
  const bool want_eigen = cfg.wants(Analysis::eigen);
  const bool want_scan = cfg.wants(Analysis::scan);
  const bool want_verify = cfg.wants(Analysis::verify);

  ReportOutput out;
  Json& doc = out.document;
  doc["schema_version"] = kSchemaVersion;
  doc["problem"] = nullptr;
  doc["points"] = nullptr;
  doc["eigenvalues"] = nullptr;
  doc["functionals"] = nullptr;
  doc["transform"] = nullptr;
  std::vector<Check> ledger;

  const Trajectory<8> traj = oscillation::fundamental_solutions(coeffs, 1.0, cfg.a, cfg.x_max, cfg.tol);
  const OscillationReport osc = oscillation::analyze_from(traj, pb);
  const Resolved res = resolve(cfg, osc);
  doc["problem"] = problem_json(cfg, res);

  Json functionals = Json::object();

  // Sign of the second-order form on [a, eta1], or on the window when
  // there is no conjugate point.
  std::optional<functional::PositivityResult> condition;
  if (want_points || want_eigen) {
    Json cj;
    cj["interval_end"] = num(res.condition_end);
    try {
      condition = functional::condition_quadform_positive(coeffs, cfg.a, res.condition_end, shoot);
      cj["rho1"] = num(condition->witness.value);
      cj["verdict"] = functional::to_string(condition->verdict);
    } catch (const BracketError& e) {
      cj["rho1"] = nullptr;
      cj["verdict"] = nullptr;
      cj["error"] = e.what();
    }
    functionals["quadform_condition"] = cj;
  }

  if (want_points) {
    Json pts;
    pts["eta1"] = num(osc.eta1);
    pts["mu1"] = num(osc.mu1);
    pts["mu2"] = num(osc.mu2);
    pts["eta_bar1"] = num(osc.eta_bar1);
    pts["rho_zeros"] = nums(osc.rho_zeros);
    pts["first_rho_zero_beyond_mu1"] = num(osc.first_rho_zero_beyond_mu1);
    pts["rho_at_mu1"] = num(osc.rho_at_mu1);
    pts["sigma_at_mu1"] = num(osc.sigma_at_mu1);
    pts["suspected_tangential"] = nums(osc.suspected_tangential);
    pts["identity_residual_max"] = num(osc.residual_max);

    for (Check c : osc.orderings) {
      if (c.name == "focal_precedes_conjugate") {
        if (!condition) {
          c.outcome = Outcome::not_applicable;
          c.evidence += "; quadform condition undetermined";
        } else if (condition->verdict == functional::Positivity::fails) {
          c.outcome = Outcome::not_applicable;
          c.evidence += "; quadform condition fails (rho1=" + g12(condition->witness.value) + ")";
        } else {
          c.evidence += std::string("; quadform condition ") + functional::to_string(condition->verdict);
        }
      }
      ledger.push_back(c);
    }

    Check signs{"focal_eigenfunction_signs", "y > 0, y' > 0, Ty < 0 on (a, mu1)", Outcome::not_applicable,
                "mu1 absent"};
    Check concave{"focal_eigenfunction_concave", "y'' < 0 on [a, mu1) when q <= 0 there", Outcome::not_applicable,
                  "mu1 absent"};
    Check fund{"fundamental_solutions_positive", "u, u', Tu, v, v', Tv > 0 on (a, mu1]", Outcome::not_applicable,
               "mu1 absent"};
    Check fund2{"fundamental_second_derivatives_positive",
                "u'' > 0 and v'' > 0 on (a, mu1] when the second-order form is positive on [a, mu1]",
                Outcome::not_applicable, "mu1 absent"};
    if (osc.mu1) {
      const double mu1 = *osc.mu1;
      try {
        const auto ef = oscillation::focal_eigenfunction(traj, coeffs, cfg.a, mu1);
        pts["eigenfunction"] = {{"mu1", num(ef.mu1)},
                                {"delta1", num(ef.delta1)},
                                {"boundary_yp", num(ef.boundary_yp)},
                                {"boundary_Ty", num(ef.boundary_Ty)},
                                {"y_positive", ef.y_positive},
                                {"yp_positive", ef.yp_positive},
                                {"Ty_negative", ef.Ty_negative},
                                {"q_nonpositive", ef.q_nonpositive},
                                {"ypp_negative", ef.ypp_negative}};
        signs.outcome = outcome_of(ef.y_positive && ef.yp_positive && ef.Ty_negative);
        signs.evidence = "y>0 " + bool_text(ef.y_positive) + ", y'>0 " + bool_text(ef.yp_positive) + ", Ty<0 " +
                         bool_text(ef.Ty_negative) + " at 200 samples";
        if (ef.q_nonpositive) {
          concave.outcome = outcome_of(ef.ypp_negative);
          concave.evidence = "y''<0 " + bool_text(ef.ypp_negative) + " at 200 samples";
        } else {
          concave.evidence = "q > 0 somewhere on [a, mu1)";
        }
      } catch (const Error& e) {
        pts["eigenfunction"] = {{"error", e.what()}};
        signs.evidence = concave.evidence = e.what();
      }
      const bool positive = oscillation::fundamental_solutions_positive(traj, cfg.a, mu1);
      pts["fundamental_positive"] = positive;
      fund.outcome = outcome_of(positive);
      fund.evidence = "all six positive " + bool_text(positive) + " at 200 samples";
      try {
        const auto cond = functional::condition_quadform_positive(coeffs, cfg.a, mu1, shoot);
        if (cond.verdict == functional::Positivity::strict) {
          const bool pos2 = fundamental_second_derivatives_positive(traj, cfg.a, mu1);
          fund2.outcome = outcome_of(pos2);
          fund2.evidence = "rho1 on [a, mu1]=" + g12(cond.witness.value) + "; u''>0 and v''>0 " + bool_text(pos2);
        } else {
          fund2.evidence = "rho1 on [a, mu1]=" + g12(cond.witness.value) + " not positive";
        }
      } catch (const BracketError& e) {
        fund2.evidence = e.what();
      }
    } else {
      pts["eigenfunction"] = nullptr;
      pts["fundamental_positive"] = nullptr;
    }
    for (const Check& c : {signs, concave, fund, fund2}) ledger.push_back(c);

    if (want_verify) {
      const auto grid = oscillation::uniform_grid(cfg.a, cfg.x_max, 100);
      const auto ir = oscillation::identity_residuals(traj, coeffs, grid);
      pts["identity_residuals"] = {{"product_identity", num(ir.product_identity)},
                                   {"tau_second", num(ir.tau_second)},
                                   {"r_sigma_prime", num(ir.r_sigma_prime)},
                                   {"worst_x", num(ir.worst_x)}};
      ledger.push_back({"product_identity", "r sigma' tau' = tau^2 + rho sigma",
                        outcome_of(ir.product_identity <= 1e-8),
                        "max relative residual " + g12(ir.product_identity) + " at 100 points, bound 1e-8"});
      ledger.push_back({"tau_second_identity", "tau'' = rho / r - lambda p sigma", outcome_of(ir.tau_second <= 1e-5),
                        "max relative finite-difference residual " + g12(ir.tau_second) + ", bound 1e-5"});
      ledger.push_back({"r_sigma_prime_identity", "(r sigma')' = 2 tau + q sigma",
                        outcome_of(ir.r_sigma_prime <= 1e-5),
                        "max relative finite-difference residual " + g12(ir.r_sigma_prime) + ", bound 1e-5"});
    }
    doc["points"] = pts;
  }

  Json eigenvalues = Json::object();
  if (want_eigen) {
    Json focal = Json::array();
    bool all_sign_changes = true;
    std::size_t computed = 0;
    for (double b : res.eigen_b) {
      Json list = Json::array();
      for (int k = 1; k <= cfg.eigen.k; ++k) {
        try {
          const auto e = eigen::focal_eigenvalue(coeffs, cfg.a, b, k, shoot);
          list.push_back(eigenvalue_json(e));
          all_sign_changes = all_sign_changes && e.sign_change;
          ++computed;
        } catch (const BracketError& e) {
          list.push_back({{"k", k}, {"error", e.what()}});
        }
      }
      focal.push_back({{"b", num(b)}, {"eigenvalues", list}});
    }
    eigenvalues["focal"] = focal;
    ledger.push_back({"focal_eigenvalues_are_sign_changes", "each eigenvalue is a sign change of tau'(lambda, b)",
                      computed ? outcome_of(all_sign_changes) : Outcome::not_applicable,
                      std::to_string(computed) + " eigenvalues computed"});

    Check at_mu1{"eigenvalue_one_at_focal_point", "lambda1 on [a, mu1] equals 1", Outcome::not_applicable,
                 "mu1 absent"};
    if (osc.mu1) {
      try {
        const auto e = eigen::focal_eigenvalue(coeffs, cfg.a, *osc.mu1, 1, shoot);
        eigenvalues["at_focal_point"] = {{"b", num(*osc.mu1)}, {"eigenvalue", eigenvalue_json(e)}};
        at_mu1.outcome = outcome_of(std::abs(e.value - 1.0) <= 1e-6);
        at_mu1.evidence = "lambda1=" + g12(e.value) + ", bound 1e-6";
      } catch (const BracketError& e) {
        eigenvalues["at_focal_point"] = {{"b", num(*osc.mu1)}, {"error", e.what()}};
        at_mu1.outcome = Outcome::fail;
        at_mu1.evidence = e.what();
      }
    } else {
      eigenvalues["at_focal_point"] = nullptr;
    }
    ledger.push_back(at_mu1);

    Json lb = Json::array();
    bool bound_holds = true;
    double worst_margin = INFINITY;
    std::string lb_error;
    for (double b : res.lower_bound_grid) {
      const double bound = eigen::lambda_lower_bound(coeffs, cfg.a, b, res.lower_bound_b0);
      try {
        const double l1 = eigen::focal_eigenvalue(coeffs, cfg.a, b, 1, shoot).value;
        lb.push_back({{"b", num(b)}, {"lambda1", num(l1)}, {"bound", num(bound)}});
        bound_holds = bound_holds && l1 >= bound;
        worst_margin = std::min(worst_margin, l1 - bound);
      } catch (const BracketError& e) {
        lb.push_back({{"b", num(b)}, {"lambda1", nullptr}, {"bound", num(bound)}, {"error", e.what()}});
        lb_error = e.what();
      }
    }
    eigenvalues["lower_bound"] = {{"b0", num(res.lower_bound_b0)}, {"points", lb}};
    ledger.push_back({"lambda_lower_bound", "lambda1(b) >= (r_min / (b-a)^2 + q_min / (b-a)) / p_max for b <= b0",
                      lb_error.empty() ? outcome_of(bound_holds) : Outcome::fail,
                      lb_error.empty() ? "smallest margin " + g12(worst_margin) + " on 10 points" : lb_error});

    Json wj = Json::array();
    for (double b : res.wirtinger_b) {
      const auto w = functional::wirtinger_check(coeffs, cfg.a, b, cfg.eigen.wirtinger_n);
      const bool expected = osc.mu1 ? b < *osc.mu1 : b <= cfg.x_max;
      Json item{{"b", num(b)}, {"n", w.n}, {"min_quotient", num(w.min_quotient)}, {"holds", w.holds}};
      Check verdict{"wirtinger_verdict_matches_focal_point",
                    "I4 is positive on the focal class over [a, b] iff b < mu1",
                    Outcome::not_applicable, ""};
      if (osc.mu1 || b <= cfg.x_max) {
        verdict.outcome = outcome_of(w.holds == expected);
        verdict.evidence = "b=" + g12(b) + " mu1=" + g12(osc.mu1) + " min quotient " + g12(w.min_quotient);
      } else {
        verdict.evidence = "b beyond the scan window and mu1 absent";
      }
      Check approx{"wirtinger_quotient_approximates_first_eigenvalue",
                   "min quotient lies in [lambda1(b) - 1e-8, 1.01 lambda1(b)]", Outcome::not_applicable, ""};
      try {
        const double l1 = eigen::focal_eigenvalue(coeffs, cfg.a, b, 1, shoot).value;
        item["lambda1"] = num(l1);
        approx.outcome = outcome_of(w.min_quotient >= l1 - 1e-8 && w.min_quotient <= l1 + 1e-2 * std::abs(l1));
        approx.evidence = "b=" + g12(b) + " lambda1=" + g12(l1) + " min quotient " + g12(w.min_quotient);
      } catch (const BracketError& e) {
        item["lambda1"] = nullptr;
        approx.evidence = e.what();
      }
      wj.push_back(item);
      ledger.push_back(verdict);
      ledger.push_back(approx);
    }
    functionals["wirtinger"] = wj;
  }

  if (want_scan) {
    Check mono{"dirichlet_eigenvalue_decreasing", "rho1(b) decreases as b increases", Outcome::not_applicable, ""};
    try {
      const auto scan = eigen::monotonicity_scan(coeffs, cfg.a, res.scan_grid, shoot);
      std::vector<double> bs, rhos;
      for (const auto& p : scan.points) {
        bs.push_back(p.b);
        rhos.push_back(p.rho1);
      }
      eigenvalues["monotonicity"] = {{"b", nums(bs)},
                                     {"rho1", nums(rhos)},
                                     {"strictly_decreasing", scan.strictly_decreasing},
                                     {"violations", nums(scan.violations)},
                                     {"slopes", nums(scan.slopes)}};
      mono.outcome = outcome_of(scan.strictly_decreasing);
      mono.evidence = std::to_string(scan.points.size()) + " grid points, " + std::to_string(scan.violations.size()) +
                      " violations";
      if (!cfg.outputs.scan_csv.empty()) {
        std::ostringstream os;
        eigen::write_scan_csv(os, scan);
        out.scan_csv = os.str();
      }
    } catch (const BracketError& e) {
      eigenvalues["monotonicity"] = {{"error", e.what()}};
      mono.outcome = Outcome::fail;
      mono.evidence = e.what();
    }
    ledger.push_back(mono);
  }

  if (want_verify) {
    Json tj;
    Check rel{"transform_relations", "subwronskians map through the change of variables t = integral of h",
              Outcome::not_applicable, ""};
    Check transport{"focal_point_transport", "the transformed focal point is t(mu1)", Outcome::not_applicable,
                    "mu1 absent"};
    auto aux = std::make_shared<const transform::AuxiliarySolution>(
        transform::auxiliary_solution(coeffs, cfg.a, cfg.x_max, cfg.tol));
    tj["h_first_zero"] = num(aux->first_zero());
    tj["positivity_end"] = num(aux->positivity_end());
    try {
      const auto tp = transform::change_of_variables(coeffs, aux);
      const double window_end = aux->first_zero() ? cfg.a + 0.9 * (*aux->first_zero() - cfg.a) : cfg.x_max;
      tj["t_end"] = num(tp.t_end());
      tj["window_end"] = num(window_end);
      const auto r = transform::verify_transform_relations(tp, traj, window_end, 50, 1.0, cfg.tol);
      const double scale = std::max(1.0, r.scale);
      tj["residuals"] = {{"derivative", num(r.derivative)}, {"third_quasi", num(r.third_quasi)},
                         {"sigma", num(r.sigma)},           {"tau", num(r.tau)},
                         {"tau_p", num(r.tau_p)},           {"sigma_p", num(r.sigma_p)},
                         {"consistency", num(r.consistency)}, {"scale", num(scale)},
                         {"worst", num(r.worst())}};
      rel.outcome = outcome_of(r.worst() <= 1e-6 * scale);
      rel.evidence = "worst residual " + g12(r.worst()) + " at 50 points, bound 1e-6 x scale " + g12(scale);
      if (osc.mu1) {
        const auto pt = transform::transport_focal_point(tp, *osc.mu1, cfg.tol);
        if (pt) {
          const double bound = 1e-6 * std::max(1.0, pt->t_of_mu1);
          tj["transport"] = {{"mu1", num(pt->mu1)},
                             {"t_of_mu1", num(pt->t_of_mu1)},
                             {"tilde_mu1", num(pt->tilde_mu1)},
                             {"mismatch", num(pt->mismatch())}};
          transport.outcome = outcome_of(pt->mismatch() <= bound);
          transport.evidence = "t(mu1)=" + g12(pt->t_of_mu1) + " transformed mu1=" + g12(pt->tilde_mu1);
        } else {
          tj["transport"] = nullptr;
          transport.evidence = "h vanishes before mu1";
        }
      } else {
        tj["transport"] = nullptr;
      }
      if (!cfg.outputs.transform_csv.empty()) {
        std::ostringstream os;
        transform::write_transform_csv(os, tp, oscillation::uniform_grid(cfg.a, tp.x_end(), 201));
        out.transform_csv = os.str();
      }
    } catch (const Error& e) {
      // Degenerate transforms (h vanishing early, stiff p / h) are data.
      tj["error"] = e.what();
      rel.evidence = transport.evidence = e.what();
    }
    ledger.push_back(rel);
    ledger.push_back(transport);
    doc["transform"] = tj;

    if (cfg.comparison) {
      Json cj;
      cj["problem0"] = coefficient_json(*cfg.comparison);
      Check cf{"comparison_focal_ordering", "r <= r0, p >= p0, q <= q0 imply mu1 <= mu1 of the comparison problem",
               Outcome::not_applicable, ""};
      Check cc{"comparison_conjugate_ordering",
               "r <= r0, p >= p0, q <= q0 imply eta1 <= eta1 of the comparison problem", Outcome::not_applicable, ""};
      try {
        const Problem<expr::CoefficientSet> pb0{cfg.a, cfg.comparison->parse(), cfg.x_max, cfg.tol};
        const auto rep = functional::comparison_check(pb, pb0);
        auto pj = [](const functional::PointComparison& c) {
          return Json{{"point", num(c.point)}, {"point0", num(c.point0)}, {"relation", to_string(c.relation)},
                      {"outcome", to_string(c.outcome)}};
        };
        cj["focal"] = pj(rep.focal);
        cj["conjugate"] = pj(rep.conjugate);
        cf.outcome = rep.focal.outcome;
        cf.evidence = "mu1=" + g12(rep.focal.point) + " mu1_0=" + g12(rep.focal.point0) + " relation " +
                      to_string(rep.focal.relation);
        cc.outcome = rep.conjugate.outcome;
        cc.evidence = "eta1=" + g12(rep.conjugate.point) + " eta1_0=" + g12(rep.conjugate.point0) + " relation " +
                      to_string(rep.conjugate.relation);
      } catch (const InvalidArgument& e) {
        cj["error"] = e.what();
        cf.evidence = cc.evidence = e.what();
      }
      functionals["comparison"] = cj;
      ledger.push_back(cf);
      ledger.push_back(cc);
    } else {
      functionals["comparison"] = nullptr;
    }

    if (cfg.divergence_flags) {
      const auto v = functional::divergence_criteria(coeffs, cfg.a, *cfg.divergence_flags);
      Json criteria = Json::array();
      for (const auto& c : v.criteria) criteria.push_back(c);
      functionals["divergence"] = {{"flags", flags_json(*cfg.divergence_flags)},
                                   {"verdict", v.verdict},
                                   {"criteria", criteria},
                                   {"apparent", flags_json(v.apparent)},
                                   {"partial_integrals",
                                    {{"x", nums(v.heuristic.x)},
                                     {"q", nums(v.heuristic.q)},
                                     {"p", nums(v.heuristic.p)},
                                     {"inv_r", nums(v.heuristic.inv_r)}}}};
      Check realized{"divergence_verdict_realized", "a systems-conjugate verdict means eta1 exists",
                     Outcome::not_applicable, "verdict " + v.verdict};
      if (v.verdict == "systems-conjugate") {
        if (osc.eta1) {
          realized.outcome = Outcome::pass;
          realized.evidence = "eta1=" + g12(osc.eta1) + " on [a, x_max]";
        } else {
          realized.evidence = "no conjugate point on [a, x_max]; it may lie beyond the window";
        }
      }
      const auto& f = *cfg.divergence_flags;
      const bool consistent = (!f.int_q_diverges_to_minus_inf || v.apparent.int_q_diverges_to_minus_inf) &&
                              (!f.int_p_diverges || v.apparent.int_p_diverges) &&
                              (!f.int_inv_r_diverges || v.apparent.int_inv_r_diverges);
      ledger.push_back(realized);
      ledger.push_back({"divergence_flags_match_partial_integrals",
                        "each flagged integral grows on the partial-integral grid up to a + 1e3",
                        outcome_of(consistent), std::string("consistent ") + bool_text(consistent)});
    } else {
      functionals["divergence"] = nullptr;
    }
  }

  if (!eigenvalues.empty()) doc["eigenvalues"] = eigenvalues;
  if (!functionals.empty()) doc["functionals"] = functionals;
  Json lj = Json::array();
  for (const Check& c : ledger) lj.push_back(entry(c));
  doc["ledger"] = lj;

  if (!cfg.outputs.csv.empty()) {
    std::ostringstream os;
    oscillation::write_trace_csv(os, traj, coeffs, oscillation::uniform_grid(cfg.a, cfg.x_max, 201));
    out.trace_csv = os.str();
  }
  return out;
}

/// Two-space indented JSON with a trailing newline.
inline std::string serialize(const Json& doc) { return doc.dump(2) + "\n"; }

}  // namespace oscil::report
