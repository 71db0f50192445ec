#ifndef SHADOWPRICE_CLI_HPP
#define SHADOWPRICE_CLI_HPP

// shadowprice <solve|table1|foc|sensitivity|compensate|surface> [flags]
//
// Exit status: 0 on success, 2 on usage errors (message on the error stream),
// 1 on solver failure (diagnostic JSON on the report stream).

#include "shadowprice/audit.hpp"
#include "shadowprice/report.hpp"
#include "shadowprice/sensitivity.hpp"
#include "shadowprice/solver.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace shadowprice::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitSolverFailure = 1;
inline constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string command;
  std::string variant = "a";
  double tol = 1e-12;
  int grid = 256;
  double eps = 1e-3;
  double delta = 1e-3;
  int n = 200;
  std::string format = "json";
  std::string out;
  std::vector<std::string> offsets;
};

inline double parse_strict_double(const std::string &text) {
  double v = 0.0;
  const char *first = text.data();
  const char *last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v))
    throw UsageError("not a finite number: '" + text + "'");
  return v;
}

/// NAME=VALUE pairs, NAME in {C1, E1, C2, E2}. Repeated names accumulate.
inline RhsOffsets parse_offsets(const std::vector<std::string> &specs) {
  RhsOffsets out;
  for (const auto &spec : specs) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos)
      throw UsageError("--offset expects NAME=VALUE, got '" + spec + "'");
    ConstraintName name;
    try {
      name = parse_constraint_name(spec.substr(0, eq));
    } catch (const std::invalid_argument &e) {
      throw UsageError(e.what());
    }
    out[name] += parse_strict_double(spec.substr(eq + 1));
  }
  return out;
}

namespace detail {

inline void emit_failure(std::ostream &out, const std::string &kind,
                         const std::string &message,
                         const KktSolution *best = nullptr) {
  report::Json j;
  j["error"] = kind;
  j["message"] = message;
  if (best != nullptr) {
    report::Json b;
    b["variant"] = std::string(variant_id(best->variant));
    b["mu"] = best->decision.mu;
    b["s"] = best->decision.s;
    b["objective"] = best->objective;
    b["gradient_inf"] = best->gradient_inf;
    b["foc_residual_inf"] = best->stationarity_residual_inf;
    b["constraint_residual_inf"] = best->constraint_residual_inf;
    b["iterations"] = best->iterations;
    j["best_iterate"] = std::move(b);
  }
  report::write_json(out, j);
}

inline void dispatch(const Options &o, std::ostream &out) {
  const FormulationVariant variant = *variant_from_letter(o.variant.at(0));
  SolveOptions solve_opts;
  solve_opts.tol_grad = o.tol;
  solve_opts.grid_n = o.grid;
  try {
    solve_opts.validate();
  } catch (const std::invalid_argument &e) {
    throw UsageError(e.what());
  }
  const RhsOffsets offsets = parse_offsets(o.offsets);
  const bool csv = o.format == "csv";

  if (o.command == "solve") {
    const auto sol = solve(variant, offsets, solve_opts);
    csv ? report::write_solution_csv(out, sol)
        : report::write_json(out, report::solution_json(sol));
  } else if (o.command == "foc") {
    const auto sol = solve(variant, offsets, solve_opts);
    const auto foc = foc_report(sol);
    csv ? report::write_foc_csv(out, foc)
        : report::write_json(out, report::foc_json(sol, foc));
  } else if (o.command == "table1") {
    if (!(o.eps >= 1e-6 && o.eps <= 1e-2))
      throw UsageError("--eps must lie in [1e-6, 1e-2]");
    const auto audit = table1(solve_opts, o.eps);
    csv ? report::write_table1_csv(out, audit)
        : report::write_json(out, report::table1_json(audit));
  } else if (o.command == "sensitivity") {
    if (!(o.eps >= 1e-6 && o.eps <= 1e-2))
      throw UsageError("--eps must lie in [1e-6, 1e-2]");
    const auto sol = solve(variant, RhsOffsets::zero(), solve_opts);
    std::vector<report::SensitivityRow> rows;
    for (auto name : kConstraintOrder)
      rows.push_back({name, sol.multipliers[name],
                      fd_shadow_price(variant, name, o.eps, solve_opts)});
    csv ? report::write_sensitivity_csv(out, rows)
        : report::write_json(out, report::sensitivity_json(variant, o.eps, rows));
  } else if (o.command == "compensate") {
    const auto sol = solve(variant, RhsOffsets::zero(), solve_opts);
    report::CompensationResult c{variant, sol.multipliers, cost_estimate_x(sol),
                                 o.delta, 0.0, 0.0};
    c.delta_v = compensation_delta(variant, c.x, o.delta, solve_opts);
    c.delta_v_uncompensated = compensation_delta(variant, 0.0, o.delta, solve_opts);
    csv ? report::write_compensation_csv(out, c)
        : report::write_json(out, report::compensation_json(c));
  } else if (o.command == "surface") {
    if (o.n < 2)
      throw UsageError("--n must be >= 2");
    const auto rows = surface_grid(o.n);
    csv ? report::write_surface_csv(out, rows)
        : report::write_json(out, report::surface_json(o.n, rows));
  }
}

} // namespace detail

/// Runs one command. `args` excludes the program name.
inline int run(const std::vector<std::string> &args, std::ostream &out,
               std::ostream &err) {
  Options o;
  CLI::App app{"Shadow-price cost estimates for the two-period orchard model",
               "shadowprice"};
  app.require_subcommand(1);

  const std::vector<std::pair<std::string, std::string>> commands{
      {"solve", "Solve one formulation and report the KKT point"},
      {"table1", "Cost estimate -xi1/lambda1 for all four formulations"},
      {"foc", "First-order condition and constraint residuals"},
      {"sensitivity", "Multipliers against perturbed re-solve differences"},
      {"compensate", "Optimal-value change under compensated perturbation"},
      {"surface", "Reduced objective f(mu, s) on a lattice"},
  };
  for (const auto &[name, help] : commands) {
    auto *sub = app.add_subcommand(name, help);
    sub->callback([&o, name = name] { o.command = name; });
    sub->add_option("--variant", o.variant,
                    "Formulation: a=(17),(18) b=(17),(18.a) c=(17.a),(18) "
                    "d=(17.a),(18.a)")
        ->check(CLI::IsMember({"a", "b", "c", "d"}));
    sub->add_option("--tol", o.tol, "Newton gradient tolerance");
    sub->add_option("--grid", o.grid, "Seed grid resolution");
    sub->add_option("--eps", o.eps, "Finite-difference step");
    sub->add_option("--delta", o.delta, "Compensation perturbation size");
    sub->add_option("--n", o.n, "Surface lattice resolution");
    sub->add_option("--format", o.format, "Output format")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--out", o.out, "Output path (default: standard output)");
    sub->add_option("--offset", o.offsets,
                    "Right-hand-side offset NAME=VALUE, NAME in C1,E1,C2,E2")
        ->allow_extra_args(false);
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError &e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  std::ofstream file;
  std::ostream *sink = &out;
  if (!o.out.empty()) {
    file.open(o.out, std::ios::binary);
    if (!file) {
      err << "usage error: cannot open --out path '" << o.out << "'\n";
      return kExitUsage;
    }
    sink = &file;
  }

  try {
    std::ostringstream buffer;
    detail::dispatch(o, buffer);
    *sink << buffer.str();
  } catch (const UsageError &e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NonConvergenceError &e) {
    detail::emit_failure(*sink, "non_convergence", e.what(), &e.best());
    return kExitSolverFailure;
  } catch (const InfeasibleProblemError &e) {
    detail::emit_failure(*sink, "infeasible", e.what());
    return kExitSolverFailure;
  } catch (const RankDeficiencyError &e) {
    detail::emit_failure(*sink, "rank_deficient", e.what());
    return kExitSolverFailure;
  } catch (const DomainError &e) {
    detail::emit_failure(*sink, "domain", e.what());
    return kExitSolverFailure;
  } catch (const std::exception &e) {
    detail::emit_failure(*sink, "solver_failure", e.what());
    return kExitSolverFailure;
  }
  return kExitOk;
}

} // namespace shadowprice::cli

#endif // SHADOWPRICE_CLI_HPP
