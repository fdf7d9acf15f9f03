#include "robust/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <limits>

#include "robust/io.hpp"

namespace robust::cli {

namespace {

using io::Json;

struct Outcome {
  Json report;
  bool finding = false;
  std::vector<std::pair<std::string, std::string>> files;  // name, content
};

template <class S>
S run_tol(const RunConfig& c) {
  if constexpr (ScalarTraits<S>::exact) {
    return S(0);
  } else {
    return c.tol;
  }
}

void need_inputs(const RunConfig& c, std::size_t n, const char* usage) {
  if (c.inputs.size() != n) {
    throw ValidationError(c.command + (c.subcommand.empty() ? "" : " " + c.subcommand) + ": expected " + usage);
  }
}

template <class S>
Outcome cmd_bounds(const RunConfig& c) {
  need_inputs(c, 1, "one problem file");
  auto pf = io::problem_from_json<S>(io::load_json(c.inputs[0]));
  Outcome o;
  if (pf.directions.size() == 2) {
    auto r = compute_bounds(pf.problem, pf.secondary);
    o.report = io::bounds_to_json(r, pf.problem);
    o.files.emplace_back("minimizer.csv", io::coupling_to_csv(r.minimizer.coupling));
    o.files.emplace_back("maximizer.csv", io::coupling_to_csv(r.maximizer.coupling));
  } else {
    const Direction d = pf.directions[0];
    const auto secondary = pf.secondary ? std::optional<Direction>(d == Direction::Max ? Direction::Min : Direction::Max)
                                        : std::nullopt;
    auto r = solve_problem(pf.problem, d, secondary);
    auto cert = dual_certificate(pf.problem, r);
    o.report = {{"mode", ScalarTraits<S>::name},
                {"direction", to_string(d)},
                {"value", io::scalar_to_json(r.value)},
                {"coupling", io::coupling_to_json(r.coupling)},
                {"certificate", io::certificate_to_json(cert)}};
    if (r.secondary_value) o.report["secondary_value"] = io::scalar_to_json(*r.secondary_value);
    o.files.emplace_back(d == Direction::Max ? "maximizer.csv" : "minimizer.csv", io::coupling_to_csv(r.coupling));
  }
  const auto& cost = pf.problem.cost;
  if (cost.kind == CostSpec<S>::Kind::ConvexOfWeightedAvg && !pf.problem.periods[0].is_free()) {
    const auto& p0 = pf.problem.periods[0];
    o.report["jensen_lower_bound"] =
        io::scalar_to_json(jensen_lower_bound(DiscreteMeasure<S>(p0.grid, *p0.weights), cost.phi));
  }
  o.files.emplace_back("report.json", o.report.dump(2) + "\n");
  return o;
}

template <class S>
Outcome cmd_structure(const RunConfig& c) {
  DiscreteMeasure<S> mu, nu;
  CostSpec<S> cost = CostSpec<S>::abs_sum();
  if (c.figure) {
    if (!c.inputs.empty()) throw ValidationError("structure --figure takes no input file");
    mu = discretize_uniform<S>({{S(0), S(1), S(1)}}, c.grid);
    nu = discretize_uniform<S>({{S(-2), S(0), S(S(1) / S(2))}, {S(1), S(3), S(S(1) / S(2))}}, c.grid);
  } else {
    need_inputs(c, 1, "one two-marginal problem file (or --figure)");
    auto pf = io::problem_from_json<S>(io::load_json(c.inputs[0]));
    if (pf.problem.dims() != 2 || pf.problem.periods[0].is_free() || pf.problem.periods[1].is_free()) {
      throw ValidationError("problem.marginals: structure needs exactly two prescribed marginals");
    }
    mu = DiscreteMeasure<S>(pf.problem.periods[0].grid, *pf.problem.periods[0].weights);
    nu = DiscreteMeasure<S>(pf.problem.periods[1].grid, *pf.problem.periods[1].weights);
    cost = pf.problem.cost;
  }
  S diag(0);
  if (c.diag_tol > 0) {
    diag = ScalarTraits<S>::from_double(c.diag_tol);
  } else {
    std::optional<S> gap;
    for (std::size_t i = 1; i < nu.size(); ++i) {
      S g = nu.atom(i) - nu.atom(i - 1);
      if (!gap || g < *gap) gap = g;
    }
    diag = gap ? S(*gap * 2) : S(0);
  }
  const S noise = ScalarTraits<S>::exact ? S(0) : S(1e-9);
  ConstellationOptions copt;
  copt.min_mass = to_double(noise);
  copt.max_reports = 50;

  Outcome o;
  o.report = {{"mode", ScalarTraits<S>::name}, {"tolerance", io::scalar_to_json(diag)}};
  for (Direction d : {Direction::Min, Direction::Max}) {
    const Direction other = d == Direction::Min ? Direction::Max : Direction::Min;
    const StructureMode sm = d == Direction::Min ? StructureMode::Min : StructureMode::Max;
    auto res = solve_mot(mu, nu, cost, d, other);
    auto s = extract_support(res.coupling, diag, noise);
    auto breaches = check_structure(s, sm, diag);
    auto cons = forbidden_constellations(res.coupling, sm, diag, copt);
    S branch[4] = {S(0), S(0), S(0), S(0)};
    for (const auto& r : s.rows) {
      branch[0] += r.upper_mass;
      branch[1] += r.lower_mass;
      branch[2] += r.diagonal_mass;
      branch[3] += r.residual_mass;
    }
    Json jb = Json::array();
    for (const auto& b : breaches) {
      if (jb.size() == 20) break;
      jb.push_back({{"x", io::scalar_to_json(b.x)},
                    {"x_prime", io::scalar_to_json(b.x_prime)},
                    {"target", io::scalar_to_json(b.target)},
                    {"target_prime", io::scalar_to_json(b.target_prime)}});
    }
    Json jc = Json::array();
    for (const auto& v : cons) {
      if (jc.size() == 20) break;
      jc.push_back({{"rule", to_string(v.rule)},
                    {"x", io::scalar_to_json(v.x)},
                    {"y_minus", io::scalar_to_json(v.y_minus)},
                    {"y_plus", io::scalar_to_json(v.y_plus)},
                    {"x_prime", io::scalar_to_json(v.x_prime)},
                    {"y_prime", io::scalar_to_json(v.y_prime)},
                    {"slack", io::scalar_to_json(v.slack)}});
    }
    const std::string name = to_string(d);
    o.report[name] = {{"value", io::scalar_to_json(res.value)},
                      {"branch_mass",
                       {{"upper", io::scalar_to_json(branch[0])},
                        {"lower", io::scalar_to_json(branch[1])},
                        {"diagonal", io::scalar_to_json(branch[2])},
                        {"residual", io::scalar_to_json(branch[3])}}},
                      {"monotonicity_breaches", breaches.size()},
                      {"breach_examples", jb},
                      {"forbidden_constellations", cons.size()},
                      {"constellation_examples", jc}};
    // Upper-graph monotonicity is asserted for both directions; forbidden
    // constellations are asserted for the minimizer.
    if (!breaches.empty() || (d == Direction::Min && !cons.empty())) o.finding = true;
    o.files.emplace_back("structure_" + name + ".csv", io::structure_to_csv(s));
    o.files.emplace_back("support_" + name + ".svg",
                         io::emit_support_svg(s, io::plot_box(s), "support of the " + name + "imizer"));
  }
  o.report["falsification"] = o.finding;
  o.files.emplace_back("structure.json", o.report.dump(2) + "\n");
  return o;
}

template <class S>
Outcome cmd_hedge(const RunConfig& c) {
  need_inputs(c, 1, "one problem file");
  auto pf = io::problem_from_json<S>(io::load_json(c.inputs[0]));
  Outcome o;
  o.report = {{"mode", ScalarTraits<S>::name}};
  for (Direction d : pf.directions) {
    auto r = solve_problem(pf.problem, d);
    auto cert = dual_certificate(pf.problem, r);
    Json j = io::certificate_to_json(cert);
    j["primal_value"] = io::scalar_to_json(r.value);
    o.report[d == Direction::Max ? "superhedge" : "subhedge"] = j;
  }
  o.files.emplace_back("hedge.json", o.report.dump(2) + "\n");
  return o;
}

template <class S>
Outcome cmd_btp_check(const RunConfig& c) {
  need_inputs(c, 1, "one JSON file with an array of BTP records");
  auto records = io::btp_nodes_from_json<S>(io::load_json(c.inputs[0]));
  Outcome o;
  Json results = Json::array();
  std::size_t left = 0, right = 0, both = 0, fals = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    Btp<S> b;
    try {
      b = make_btp(records[i]);
    } catch (const ValidationError& e) {
      throw ValidationError("btps[" + std::to_string(i) + "]: " + e.what());
    }
    Json r{{"index", i}};
    try {
      auto d = dominance_check(b, run_tol<S>(c));
      Json cases = Json::array();
      for (auto lc : d.matched_cases) cases.push_back(to_string(lc));
      r["verdict"] = to_string(d.verdict);
      r["matched_cases"] = cases;
      r["cost_left"] = io::scalar_to_json(d.cost_left);
      r["cost_right"] = io::scalar_to_json(d.cost_right);
      if (d.verdict != Verdict::RightSuboptimal) ++left;
      if (d.verdict != Verdict::LeftDominated) ++right;
      if (d.verdict == Verdict::Both) ++both;
    } catch (const FalsificationError& e) {
      ++fals;
      r["verdict"] = "falsification";
      r["message"] = e.what();
    }
    results.push_back(r);
  }
  o.report = {{"mode", ScalarTraits<S>::name},
              {"results", results},
              {"summary",
               {{"checked", records.size()},
                {"left_dominated", left},
                {"right_suboptimal", right},
                {"both", both},
                {"falsifications", fals}}}};
  o.finding = fals > 0;
  o.files.emplace_back("btp_check.json", o.report.dump(2) + "\n");
  return o;
}

template <class S>
PiecewiseLinear<S> load_phi(const RunConfig& c) {
  if (c.phi_path.empty()) throw ValidationError(c.subcommand + ": --phi <file> is required");
  auto phi = io::piecewise_from_json<S>(io::load_json(c.phi_path), "phi");
  if (!phi.is_convex()) throw ValidationError("phi: payoff function is not convex");
  return phi;
}

template <class S>
Outcome cmd_asian(const RunConfig& c) {
  Outcome o;
  o.report = {{"mode", ScalarTraits<S>::name}, {"subcommand", c.subcommand}};
  if (c.subcommand == "one-marginal") {
    need_inputs(c, 1, "one measure file");
    auto nu = io::measure_from_json<S>(io::load_json(c.inputs[0]), "measure");
    auto phi = load_phi<S>(c);
    auto b = one_marginal_bounds(nu, phi);
    o.report["lower"] = io::scalar_to_json(b.lower);
    o.report["upper"] = io::scalar_to_json(b.upper);
    if (c.lp) {
      auto p = one_marginal_problem(nu, phi);
      const S lo = solve_problem(p, Direction::Min).value;
      const S hi = solve_problem(p, Direction::Max).value;
      o.report["lp_lower"] = io::scalar_to_json(lo);
      o.report["lp_upper"] = io::scalar_to_json(hi);
      const S tol = run_tol<S>(c);
      o.finding = !near(lo, b.lower, tol) || !near(hi, b.upper, tol);
    }
  } else if (c.subcommand == "hedge-audit") {
    need_inputs(c, 1, "one path CSV (t,value)");
    auto path = io::path_from_csv<S>(io::read_file(c.inputs[0]), c.inputs[0]);
    auto a = superhedge_plan(load_phi<S>(c), path);
    Json h = Json::array();
    for (const auto& v : a.plan.trading_integrand) h.push_back(io::scalar_to_json(v));
    o.report["average"] = io::scalar_to_json(a.average);
    o.report["trading_integrand"] = h;
    o.report["gains"] = io::scalar_to_json(a.gains);
    o.report["slack"] = io::scalar_to_json(a.slack);
    o.finding = a.slack < -run_tol<S>(c);
  } else if (c.subcommand == "counterexample") {
    need_inputs(c, 0, "no input");
    auto r = counterexample_4128<S>();
    o.report["law_yz"] = io::coupling_to_json(r.law_yz);
    o.report["mu"] = io::measure_to_json(r.mu1);
    o.report["price_candidate"] = io::scalar_to_json(r.price_candidate);
    o.report["price_constancy"] = io::scalar_to_json(r.price_constancy);
    o.report["normalized_candidate"] = io::scalar_to_json(r.normalized_candidate);
    o.report["normalized_constancy"] = io::scalar_to_json(r.normalized_constancy);
    o.report["verification"] = {{"strict", r.strict},
                                {"martingale", r.martingale},
                                {"z_law_is_mu", r.z_law_is_mu2},
                                {"y_law_is_mu", r.y_law_is_mu1}};
    o.finding = !(r.strict && r.martingale && r.z_law_is_mu2);
  } else if (c.subcommand == "conjecture") {
    need_inputs(c, 2, "two measure files (mu, nu)");
    auto mu = io::measure_from_json<S>(io::load_json(c.inputs[0]), "mu");
    auto nu = io::measure_from_json<S>(io::load_json(c.inputs[1]), "nu");
    const S K = io::scalar_from_json<S>(Json(c.strike), "--strike");
    auto r = conjecture_harness(mu, nu, K, c.trials, c.seed, run_tol<S>(c));
    Json v = Json::array();
    for (const auto& x : r.violations) {
      v.push_back({{"trial", x.trial}, {"lhs", io::scalar_to_json(x.lhs)}, {"slack", io::scalar_to_json(x.slack)}});
    }
    o.report["pi_value"] = io::scalar_to_json(r.pi_value);
    o.report["trials"] = r.trials;
    o.report["min_slack"] = io::scalar_to_json(r.min_slack);
    o.report["violations"] = v;
    o.finding = !r.violations.empty();
  } else {
    throw ValidationError("asian-ct: unknown subcommand \"" + c.subcommand + "\"");
  }
  o.report["finding"] = o.finding;
  o.files.emplace_back("asian_" + c.subcommand + ".json", o.report.dump(2) + "\n");
  return o;
}

template <class S>
Outcome cmd_verify(const RunConfig& c) {
  need_inputs(c, 2, "a problem file and a coupling CSV");
  auto pf = io::problem_from_json<S>(io::load_json(c.inputs[0]));
  auto coupling = io::coupling_from_csv<S>(io::read_file(c.inputs[1]), c.inputs[1]);
  if (coupling.dims != pf.problem.dims()) {
    throw ValidationError(c.inputs[1] + ": coupling has " + std::to_string(coupling.dims) + " columns, problem has " +
                          std::to_string(pf.problem.dims()) + " periods");
  }
  auto res = coupling_residuals(coupling, pf.problem);
  const S value = coupling.integrate([&](const std::vector<S>& x) { return pf.problem.cost(x); });
  const bool ok = ScalarTraits<S>::exact ? res.exact_ok
                                         : res.mass <= c.tol && res.marginal <= c.tol && res.martingale <= c.tol;
  Outcome o;
  o.report = {{"mode", ScalarTraits<S>::name},
              {"value", io::scalar_to_json(value)},
              {"residuals", {{"mass", res.mass}, {"marginal", res.marginal}, {"martingale", res.martingale}}},
              {"feasible", ok}};
  o.finding = !ok;
  o.files.emplace_back("verify.json", o.report.dump(2) + "\n");
  return o;
}

template <class S>
Outcome dispatch(const RunConfig& c) {
  if (c.command == "bounds") return cmd_bounds<S>(c);
  if (c.command == "structure") return cmd_structure<S>(c);
  if (c.command == "hedge") return cmd_hedge<S>(c);
  if (c.command == "btp-check") return cmd_btp_check<S>(c);
  if (c.command == "asian-ct") return cmd_asian<S>(c);
  if (c.command == "verify") return cmd_verify<S>(c);
  throw ValidationError("unknown command \"" + c.command + "\"");
}

}  // namespace

int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
  try {
    if (!(c.tol > 0)) throw ValidationError("--tol must be positive");
    if (c.grid < 2) throw ValidationError("--grid must be at least 2");
    if (c.mode != "rational" && c.mode != "double") throw ValidationError("--mode must be rational or double");
    Outcome o = c.mode == "rational" ? dispatch<Rational>(c) : dispatch<double>(c);
    out << o.report.dump(2) << "\n";
    if (!c.out_dir.empty()) {
      std::filesystem::create_directories(c.out_dir);
      for (const auto& [name, content] : o.files) io::write_file((std::filesystem::path(c.out_dir) / name).string(), content);
    }
    if (o.finding) {
      err << "finding: the run reported a falsification (see report)\n";
      return Finding;
    }
    return Ok;
  } catch (const ConvexOrderError& e) {
    err << "error: " << e.what() << " (witness " << e.witness() << ")\n";
    return Invalid;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return Invalid;
  } catch (const RefusalError& e) {
    err << "error: " << e.what() << "\n";
    return Invalid;
  } catch (const FalsificationError& e) {
    err << "falsification: " << e.what() << "\n";
    return Finding;
  } catch (const InternalConsistencyError& e) {
    err << "self-check failed: " << e.what() << "\n";
    return Finding;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return Invalid;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return Internal;
  }
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Robust bounds for Asian options via martingale optimal transport"};
  app.fallthrough();
  app.require_subcommand(1);
  RunConfig c;
  app.add_option("--mode", c.mode, "Arithmetic: rational or double")
      ->check(CLI::IsMember({"rational", "double"}))
      ->capture_default_str();
  app.add_option("--tol", c.tol, "Tolerance for double-mode checks")->capture_default_str();
  app.add_option("--grid", c.grid, "Grid size for discretized continuous laws")->capture_default_str();
  app.add_option("--seed", c.seed, "Seed for randomized harnesses")->capture_default_str();
  app.add_option("--out", c.out_dir, "Directory for report files");

  auto* bounds = app.add_subcommand("bounds", "Lower and upper model-independent bounds with hedges");
  bounds->add_option("problem", c.inputs, "Problem JSON")->required();

  auto* structure = app.add_subcommand("structure", "Support structure of |x+y| optimizers");
  structure->add_option("problem", c.inputs, "Two-marginal problem JSON");
  structure->add_flag("--figure", c.figure, "Use the uniform[0,1] / split quarter-density marginals");
  structure->add_option("--diag-tol", c.diag_tol, "Cluster and comparison tolerance (default: 2 grid spacings)");

  auto* hedge = app.add_subcommand("hedge", "Dual super/sub-hedging certificates");
  hedge->add_option("problem", c.inputs, "Problem JSON")->required();

  auto* btp = app.add_subcommand("btp-check", "Dominance check on binomial transport plans");
  btp->add_option("btps", c.inputs, "JSON array of 7-node records")->required();

  auto* asian = app.add_subcommand("asian-ct", "Continuous-time Asian option tools");
  asian->require_subcommand(1);
  auto* one = asian->add_subcommand("one-marginal", "Bounds with only the terminal law known");
  one->add_option("measure", c.inputs, "Measure JSON")->required();
  one->add_option("--phi", c.phi_path, "Convex payoff JSON")->required();
  one->add_flag("--lp", c.lp, "Also solve the 5-step LP and compare");
  auto* audit = asian->add_subcommand("hedge-audit", "Pathwise superhedge slack on a piecewise-constant path");
  audit->add_option("path", c.inputs, "Path CSV with header t,value")->required();
  audit->add_option("--phi", c.phi_path, "Convex payoff JSON")->required();
  asian->add_subcommand("counterexample", "Two-marginal fixture beating the constancy heuristic");
  auto* conj = asian->add_subcommand("conjecture", "Three-step call-payoff harness");
  conj->add_option("mu", c.inputs, "Measures mu and nu")->expected(2)->required();
  conj->add_option("--strike", c.strike, "Strike K (number or num/den)")->required();
  conj->add_option("--trials", c.trials, "Number of sampled models")->capture_default_str();

  auto* verify = app.add_subcommand("verify", "Check a coupling CSV against a problem");
  verify->add_option("files", c.inputs, "Problem JSON and coupling CSV")->expected(2)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return Ok;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return Ok;
  } catch (const CLI::ParseError& e) {
    std::ostringstream os;
    app.exit(e, os, os);
    err << os.str();
    return Invalid;
  }
  for (auto* sub : app.get_subcommands()) {
    c.command = sub->get_name();
    for (auto* s2 : sub->get_subcommands()) c.subcommand = s2->get_name();
  }
  return run(c, out, err);
}

}  // namespace robust::cli
