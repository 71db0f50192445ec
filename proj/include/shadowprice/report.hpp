#ifndef SHADOWPRICE_REPORT_HPP
#define SHADOWPRICE_REPORT_HPP

// Machine-readable reports. Key order is fixed; floating values are printed
// with 17 significant digits so identical runs give byte-identical output.

#include "shadowprice/audit.hpp"
#include "shadowprice/sensitivity.hpp"
#include "shadowprice/solver.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

namespace shadowprice::report {

using Json = nlohmann::ordered_json;

inline std::string format_g17(double v) {
  if (std::isnan(v))
    return "nan";
  if (std::isinf(v))
    return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string format_fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

namespace detail {

inline void dump(std::ostream &os, const Json &j, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
  switch (j.type()) {
  case Json::value_t::object: {
    if (j.empty()) {
      os << "{}";
      return;
    }
    os << "{\n";
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!first)
        os << ",\n";
      first = false;
      os << pad << Json(it.key()).dump() << ": ";
      dump(os, it.value(), indent, depth + 1);
    }
    os << "\n" << close_pad << "}";
    return;
  }
  case Json::value_t::array: {
    if (j.empty()) {
      os << "[]";
      return;
    }
    // Arrays of scalars stay on one line (surface rows).
    const bool flat = std::all_of(j.begin(), j.end(), [](const Json &e) {
      return !e.is_structured();
    });
    os << "[";
    bool first = true;
    for (const auto &e : j) {
      if (!first)
        os << (flat ? ", " : ",");
      first = false;
      if (!flat)
        os << "\n" << pad;
      dump(os, e, indent, depth + 1);
    }
    if (!flat)
      os << "\n" << close_pad;
    os << "]";
    return;
  }
  case Json::value_t::number_float: {
    const double v = j.get<double>();
    os << (std::isfinite(v) ? format_g17(v) : "null");
    return;
  }
  default:
    os << j.dump();
  }
}

} // namespace detail

/// Indented JSON with %.17g numbers; non-finite numbers become null.
inline void write_json(std::ostream &os, const Json &j) {
  detail::dump(os, j, 2, 0);
  os << "\n";
}

inline Json to_json(const MultiplierSet &m) {
  Json j;
  j["lambda1"] = m.lambda1;
  j["xi1"] = m.xi1;
  j["lambda2"] = m.lambda2;
  j["xi2"] = m.xi2;
  return j;
}

/// Solve report: variant, mu, s, c1, c2, e1, e2, objective, multipliers,
/// foc_residual_inf, constraint_residual_inf, cost_estimate_x,
/// true_marginal_cost, iterations.
inline Json solution_json(const KktSolution &sol) {
  Json j;
  j["variant"] = std::string(variant_id(sol.variant));
  j["mu"] = sol.decision.mu;
  j["s"] = sol.decision.s;
  j["c1"] = sol.state.c1;
  j["c2"] = sol.state.c2;
  j["e1"] = sol.state.e1;
  j["e2"] = sol.state.e2;
  j["objective"] = sol.objective;
  j["multipliers"] = to_json(sol.multipliers);
  j["foc_residual_inf"] = foc_report(sol).max_abs();
  j["constraint_residual_inf"] = sol.constraint_residual_inf;
  j["cost_estimate_x"] = sol.multipliers.lambda1 > kDegenerateLambda
                             ? cost_estimate_x(sol)
                             : std::numeric_limits<double>::quiet_NaN();
  j["true_marginal_cost"] = true_marginal_cost(sol.decision.mu);
  j["iterations"] = sol.iterations;
  return j;
}

inline void write_solution_csv(std::ostream &os, const KktSolution &sol) {
  const Json j = solution_json(sol);
  os << "variant,mu,s,c1,c2,e1,e2,objective,lambda1,xi1,lambda2,xi2,"
        "foc_residual_inf,constraint_residual_inf,cost_estimate_x,"
        "true_marginal_cost,iterations\n";
  os << j["variant"].get<std::string>();
  for (const char *k : {"mu", "s", "c1", "c2", "e1", "e2", "objective"})
    os << ',' << format_g17(j[k].get<double>());
  for (const char *k : {"lambda1", "xi1", "lambda2", "xi2"})
    os << ',' << format_g17(j["multipliers"][k].get<double>());
  for (const char *k : {"foc_residual_inf", "constraint_residual_inf",
                        "cost_estimate_x", "true_marginal_cost"})
    os << ',' << format_g17(j[k].get<double>());
  os << ',' << sol.iterations << '\n';
}

inline Json table1_json(const AuditReport &r) {
  Json j;
  j["true_marginal_cost"] = r.true_marginal_cost;
  j["units"] = "$/ton";
  Json rows = Json::array();
  for (std::size_t k = 0; k < r.rows.size(); ++k) {
    const auto &row = r.rows[k];
    const auto &sol = r.solutions[k];
    Json e;
    e["variant"] = std::string(variant_id(row.variant));
    e["formulation"] = std::string(variant_label(row.variant));
    e["cost_estimate_x"] = row.cost_estimate_x;
    e["fd_cross_check"] = row.fd_cross_check;
    e["deviation"] = row.deviation;
    e["mu"] = sol.decision.mu;
    e["s"] = sol.decision.s;
    e["multipliers"] = to_json(sol.multipliers);
    e["foc_residual_inf"] = sol.stationarity_residual_inf;
    e["constraint_residual_inf"] = sol.constraint_residual_inf;
    rows.push_back(std::move(e));
  }
  j["rows"] = std::move(rows);
  j["tol_grad"] = r.tol_grad;
  j["fd_eps"] = r.fd_eps;
  return j;
}

inline void write_table1_csv(std::ostream &os, const AuditReport &r) {
  os << "formulation,variant,estimate,fd_estimate,true_marginal_cost,"
        "deviation\n";
  for (const auto &row : r.rows) {
    os << '"' << variant_label(row.variant) << "\"," << variant_id(row.variant)
       << ',' << format_fixed3(row.cost_estimate_x) << ','
       << format_g17(row.fd_cross_check) << ','
       << format_g17(r.true_marginal_cost) << ',' << format_g17(row.deviation)
       << '\n';
  }
}

inline Json foc_json(const KktSolution &sol, const FocReport &foc) {
  Json j;
  j["variant"] = std::string(variant_id(sol.variant));
  Json res;
  for (const auto &[name, value] : foc.entries)
    res[name] = value;
  j["residuals"] = std::move(res);
  j["max_abs"] = foc.max_abs();
  return j;
}

inline void write_foc_csv(std::ostream &os, const FocReport &foc) {
  os << "equation,residual\n";
  for (const auto &[name, value] : foc.entries)
    os << name << ',' << format_g17(value) << '\n';
}

struct SensitivityRow {
  ConstraintName name;
  double multiplier;
  FdEstimate fd;
};

inline Json sensitivity_json(FormulationVariant v, double eps,
                             const std::vector<SensitivityRow> &rows) {
  Json j;
  j["variant"] = std::string(variant_id(v));
  j["eps"] = eps;
  Json arr = Json::array();
  for (const auto &r : rows) {
    Json e;
    e["constraint"] = std::string(to_string(r.name));
    e["multiplier"] = r.multiplier;
    e["fd"] = r.fd.value;
    e["v_plus"] = r.fd.v_plus;
    e["v_minus"] = r.fd.v_minus;
    e["abs_diff"] = std::abs(r.fd.value - r.multiplier);
    arr.push_back(std::move(e));
  }
  j["rows"] = std::move(arr);
  return j;
}

inline void write_sensitivity_csv(std::ostream &os,
                                  const std::vector<SensitivityRow> &rows) {
  os << "constraint,multiplier,fd,v_plus,v_minus,abs_diff\n";
  for (const auto &r : rows)
    os << to_string(r.name) << ',' << format_g17(r.multiplier) << ','
       << format_g17(r.fd.value) << ',' << format_g17(r.fd.v_plus) << ','
       << format_g17(r.fd.v_minus) << ','
       << format_g17(std::abs(r.fd.value - r.multiplier)) << '\n';
}

struct CompensationResult {
  FormulationVariant variant;
  MultiplierSet multipliers;
  double x;
  double delta;
  double delta_v;               // compensated, x = -xi1/lambda1
  double delta_v_uncompensated; // x = 0
};

inline Json compensation_json(const CompensationResult &c) {
  Json j;
  j["variant"] = std::string(variant_id(c.variant));
  j["lambda1"] = c.multipliers.lambda1;
  j["xi1"] = c.multipliers.xi1;
  j["x"] = c.x;
  j["delta"] = c.delta;
  j["delta_v"] = c.delta_v;
  j["delta_v_uncompensated"] = c.delta_v_uncompensated;
  j["xi1_times_delta"] = c.multipliers.xi1 * c.delta;
  return j;
}

inline void write_compensation_csv(std::ostream &os,
                                   const CompensationResult &c) {
  os << "variant,lambda1,xi1,x,delta,delta_v,delta_v_uncompensated,"
        "xi1_times_delta\n";
  os << variant_id(c.variant) << ',' << format_g17(c.multipliers.lambda1)
     << ',' << format_g17(c.multipliers.xi1) << ',' << format_g17(c.x) << ','
     << format_g17(c.delta) << ',' << format_g17(c.delta_v) << ','
     << format_g17(c.delta_v_uncompensated) << ','
     << format_g17(c.multipliers.xi1 * c.delta) << '\n';
}

/// Header `mu,s,f`; infeasible cells carry the token `nan`.
inline void write_surface_csv(std::ostream &os,
                              const std::vector<SurfaceRow> &rows) {
  os << "mu,s,f\n";
  for (const auto &r : rows)
    os << format_g17(r.mu) << ',' << format_g17(r.s) << ','
       << format_g17(r.f) << '\n';
}

inline Json surface_json(int n, const std::vector<SurfaceRow> &rows) {
  Json j;
  j["n"] = n;
  j["columns"] = Json::array({"mu", "s", "f"});
  Json arr = Json::array();
  for (const auto &r : rows)
    arr.push_back(Json::array({r.mu, r.s, r.f}));
  j["rows"] = std::move(arr);
  return j;
}

} // namespace shadowprice::report

#endif // SHADOWPRICE_REPORT_HPP
