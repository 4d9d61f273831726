// Command-line front end: scenario ingestion, solving, welfare reports,
// signal comparison, simulation, invariant sweeps, and the built-in
// reference examples.

#include <cstdio>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "exante/exante.hpp"

namespace {

using namespace exante;

enum ExitCode {
  kOk = 0,
  kFailure = 1,
  kValidation = 2,
  kNonConvergence = 3,
  kTie = 4,
};

struct CommonOptions {
  std::string scenario_path;
  std::string signal = "full";
  std::string cutoff_csv;
  std::string coupling = "independent";
  std::string format = "table";
  std::string tie_break = "error";
  double tol = 1e-6;
};

Coupling parse_coupling(const std::string& name) {
  if (name == "independent") return Coupling::Independent;
  if (name == "continuum") return Coupling::Continuum;
  throw ScenarioError("unknown coupling '" + name + "'");
}

TieBreak parse_tie_break(const std::string& name) {
  if (name == "error") return TieBreak::Error;
  if (name == "index") return TieBreak::Index;
  throw ScenarioError("unknown tie-break mode '" + name + "'");
}

ExAnteCutoff parse_cutoff(const std::string& csv, std::size_t n) {
  ExAnteCutoff b;
  std::stringstream in(csv);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      b.values.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ScenarioError("bad cutoff entry '" + item + "'");
    }
  }
  if (b.values.size() != n) {
    throw ScenarioError("cutoff needs one entry per program");
  }
  return b;
}

const SignalProfile& pick_profile(const Scenario& scenario,
                                  const std::string& name) {
  auto it = scenario.signal_profiles.find(name);
  if (it == scenario.signal_profiles.end()) {
    throw ScenarioError("scenario has no signal profile named '" + name + "'");
  }
  return it->second;
}

std::string fmt(double v, const std::string& format) {
  std::ostringstream out;
  if (format == "csv") {
    out << std::setprecision(17) << v;
  } else {
    out << std::setprecision(6) << v;
  }
  return out.str();
}

void print_program_table(const MarketInstance& inst, const ExAnteCutoff& b,
                         const DemandVector& d, const std::string& format) {
  if (format == "json") {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t p = 0; p < inst.num_programs(); ++p) {
      rows.push_back({{"program", inst.programs[p]},
                      {"demand", d.by_program[p]},
                      {"capacity", inst.capacities[p]},
                      {"cutoff", b.values[p]}});
    }
    nlohmann::json doc{{"programs", rows}, {"unmatched", d.unmatched}};
    std::cout << doc.dump(2) << "\n";
    return;
  }
  const char* sep = format == "csv" ? "," : "  ";
  std::cout << "program" << sep << "demand" << sep << "capacity" << sep
            << "cutoff\n";
  for (std::size_t p = 0; p < inst.num_programs(); ++p) {
    std::cout << inst.programs[p] << sep << fmt(d.by_program[p], format) << sep
              << fmt(inst.capacities[p], format) << sep
              << fmt(b.values[p], format) << "\n";
  }
  if (format != "csv") {
    std::cout << "unmatched mass: " << fmt(d.unmatched, format) << "\n";
  }
}

void print_student_table(const MarketInstance& inst,
                         const WelfareReport& report,
                         const std::string& format) {
  const std::size_t n = inst.num_programs();
  if (format == "json") {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t k = 0; k < inst.num_students(); ++k) {
      nlohmann::json row{{"student", inst.students[k]},
                         {"eu", report.student_utility[k]},
                         {"unmatched", report.rank_distributions[k][n]}};
      row["rank_distribution"] = std::vector<double>(
          report.rank_distributions[k].begin(),
          report.rank_distributions[k].begin() + n);
      rows.push_back(row);
    }
    nlohmann::json doc{{"students", rows}};
    if (report.program_utility) {
      doc["program_utility"] = *report.program_utility;
    }
    std::cout << doc.dump(2) << "\n";
    return;
  }
  const char* sep = format == "csv" ? "," : "  ";
  std::cout << "student";
  for (std::size_t r = 1; r <= n; ++r) std::cout << sep << "rank_" << r;
  std::cout << sep << "unmatched" << sep << "eu\n";
  for (std::size_t k = 0; k < inst.num_students(); ++k) {
    std::cout << inst.students[k];
    for (std::size_t r = 0; r <= n; ++r) {
      std::cout << sep << fmt(report.rank_distributions[k][r], format);
    }
    std::cout << sep << fmt(report.student_utility[k], format) << "\n";
  }
  if (report.program_utility && format != "csv") {
    std::cout << "program utilities:";
    for (std::size_t p = 0; p < n; ++p) {
      std::cout << " " << inst.programs[p] << "="
                << fmt((*report.program_utility)[p], format);
    }
    std::cout << "\n";
  }
}

int cmd_solve(const CommonOptions& opt, bool least, const std::string& scheme) {
  Scenario scenario = load_scenario(opt.scenario_path);
  const SignalProfile& profile = pick_profile(scenario, opt.signal);
  NaiveRule rule(scenario.instance, profile, parse_tie_break(opt.tie_break));
  ClearingConfig cfg = scenario.config;
  cfg.coupling = parse_coupling(opt.coupling);
  cfg.clearing_tol = opt.tol;
  cfg.record_trajectory = true;
  if (scheme == "sequential") cfg.scheme = UpdateScheme::Sequential;

  ClearingResult result =
      least ? least_market_clearing(scenario.instance, profile, rule, cfg)
            : greatest_market_clearing(scenario.instance, profile, rule, cfg);
  print_program_table(scenario.instance, result.cutoff, result.demand,
                      opt.format);
  if (opt.format == "table") {
    std::cout << (least ? "least" : "greatest")
              << " market-clearing cutoff after " << result.sweeps
              << " sweeps; converged: " << (result.converged ? "yes" : "no")
              << "\n";
    std::cout << "trajectory:\n";
    for (const auto& b : result.trajectory) {
      std::cout << "  (";
      for (std::size_t p = 0; p < b.values.size(); ++p) {
        std::cout << (p ? ", " : "") << fmt(b.values[p], opt.format);
      }
      std::cout << ")\n";
    }
  }
  if (!result.converged) {
    std::cerr << "error: iteration did not converge\n";
    return kNonConvergence;
  }
  return kOk;
}

int cmd_demand(const CommonOptions& opt) {
  Scenario scenario = load_scenario(opt.scenario_path);
  const SignalProfile& profile = pick_profile(scenario, opt.signal);
  NaiveRule rule(scenario.instance, profile, parse_tie_break(opt.tie_break));
  ExAnteCutoff b =
      parse_cutoff(opt.cutoff_csv, scenario.instance.num_programs());
  DemandVector d = demand(scenario.instance, profile, rule, b,
                          parse_coupling(opt.coupling));
  print_program_table(scenario.instance, b, d, opt.format);
  return kOk;
}

int cmd_welfare(const CommonOptions& opt) {
  Scenario scenario = load_scenario(opt.scenario_path);
  const SignalProfile& profile = pick_profile(scenario, opt.signal);
  NaiveRule rule(scenario.instance, profile, parse_tie_break(opt.tie_break));
  Coupling coupling = parse_coupling(opt.coupling);

  ExAnteCutoff b;
  if (opt.cutoff_csv.empty()) {
    ClearingConfig cfg = scenario.config;
    cfg.coupling = coupling;
    ClearingResult result =
        greatest_market_clearing(scenario.instance, profile, rule, cfg);
    if (!result.converged) {
      std::cerr << "error: iteration did not converge\n";
      return kNonConvergence;
    }
    b = result.cutoff;
  } else {
    b = parse_cutoff(opt.cutoff_csv, scenario.instance.num_programs());
  }
  WelfareReport report =
      welfare_report(scenario.instance, profile, rule, b, coupling);
  if (opt.format == "table") {
    std::cout << "cutoff: (";
    for (std::size_t p = 0; p < b.values.size(); ++p) {
      std::cout << (p ? ", " : "") << fmt(b.values[p], opt.format);
    }
    std::cout << ")\n";
  }
  print_student_table(scenario.instance, report, opt.format);
  return kOk;
}

int cmd_compare(const CommonOptions& opt, const std::string& left,
                const std::string& right) {
  Scenario scenario = load_scenario(opt.scenario_path);
  const SignalProfile& lhs = pick_profile(scenario, left);
  const SignalProfile& rhs = pick_profile(scenario, right);
  ClearingConfig cfg = scenario.config;
  cfg.coupling = parse_coupling(opt.coupling);

  std::vector<bool> per_student;
  bool l_finer = profile_more_informative(lhs, rhs, 1e-9, &per_student);
  bool r_finer = profile_more_informative(rhs, lhs);
  ParetoComparison cmp = pareto_compare(scenario.instance, lhs, rhs, cfg, 1e-9,
                                        parse_tie_break(opt.tie_break));

  auto verdict_text = [&]() -> std::string {
    switch (cmp.verdict) {
      case ParetoOrder::LeftDominates:
        return "right Pareto dominated by left";
      case ParetoOrder::RightDominates:
        return "left Pareto dominated by right";
      case ParetoOrder::Equivalent:
        return "welfare equivalent";
      default:
        return "incomparable";
    }
  };

  if (opt.format == "json") {
    nlohmann::json doc;
    doc["left"] = left;
    doc["right"] = right;
    doc["left_more_informative"] = l_finer;
    doc["right_more_informative"] = r_finer;
    doc["verdict"] = verdict_text();
    doc["left_utility"] = cmp.left_utility;
    doc["right_utility"] = cmp.right_utility;
    doc["left_cutoff"] = cmp.left_cutoff.values;
    doc["right_cutoff"] = cmp.right_cutoff.values;
    std::cout << doc.dump(2) << "\n";
    return kOk;
  }
  std::cout << "left more informative: " << (l_finer ? "yes" : "no")
            << "; right more informative: " << (r_finer ? "yes" : "no")
            << "\n";
  std::cout << "left cutoff: (";
  for (std::size_t p = 0; p < cmp.left_cutoff.values.size(); ++p) {
    std::cout << (p ? ", " : "") << fmt(cmp.left_cutoff.values[p], opt.format);
  }
  std::cout << "); right cutoff: (";
  for (std::size_t p = 0; p < cmp.right_cutoff.values.size(); ++p) {
    std::cout << (p ? ", " : "")
              << fmt(cmp.right_cutoff.values[p], opt.format);
  }
  std::cout << ")\n";
  const char* sep = opt.format == "csv" ? "," : "  ";
  std::cout << "student" << sep << "eu_left" << sep << "eu_right\n";
  for (std::size_t k = 0; k < scenario.instance.num_students(); ++k) {
    std::cout << scenario.instance.students[k] << sep
              << fmt(cmp.left_utility[k], opt.format) << sep
              << fmt(cmp.right_utility[k], opt.format) << "\n";
  }
  std::cout << verdict_text() << "\n";
  return kOk;
}

int cmd_simulate(const CommonOptions& opt, std::uint64_t draws,
                 std::uint64_t seed) {
  Scenario scenario = load_scenario(opt.scenario_path);
  const SignalProfile& profile = pick_profile(scenario, opt.signal);
  NaiveRule rule(scenario.instance, profile, parse_tie_break(opt.tie_break));
  Coupling coupling = parse_coupling(opt.coupling);

  ExAnteCutoff b;
  if (opt.cutoff_csv.empty()) {
    ClearingConfig cfg = scenario.config;
    cfg.coupling = coupling;
    ClearingResult result =
        greatest_market_clearing(scenario.instance, profile, rule, cfg);
    if (!result.converged) {
      std::cerr << "error: iteration did not converge\n";
      return kNonConvergence;
    }
    b = result.cutoff;
  } else {
    b = parse_cutoff(opt.cutoff_csv, scenario.instance.num_programs());
  }

  SimulationConfig cfg{draws, seed, coupling};
  SimulationReport report =
      simulate(scenario.instance, profile, rule, b, cfg);
  if (opt.format == "json") {
    nlohmann::json doc;
    doc["draws"] = report.draws;
    doc["demand_mean"] = report.demand_mean;
    doc["demand_se"] = report.demand_se;
    doc["unmatched_mean"] = report.unmatched_mean;
    doc["utility_mean"] = report.utility_mean;
    doc["utility_se"] = report.utility_se;
    std::cout << doc.dump(2) << "\n";
    return kOk;
  }
  const char* sep = opt.format == "csv" ? "," : "  ";
  std::cout << "program" << sep << "demand_mean" << sep << "demand_se\n";
  for (std::size_t p = 0; p < scenario.instance.num_programs(); ++p) {
    std::cout << scenario.instance.programs[p] << sep
              << fmt(report.demand_mean[p], opt.format) << sep
              << fmt(report.demand_se[p], opt.format) << "\n";
  }
  std::cout << "student" << sep << "eu_mean" << sep << "eu_se\n";
  for (std::size_t k = 0; k < scenario.instance.num_students(); ++k) {
    std::cout << scenario.instance.students[k] << sep
              << fmt(report.utility_mean[k], opt.format) << sep
              << fmt(report.utility_se[k], opt.format) << "\n";
  }
  if (opt.format != "csv") {
    std::cout << "draws: " << report.draws
              << "; unmatched mean: " << fmt(report.unmatched_mean, opt.format)
              << "\n";
  }
  return kOk;
}

int cmd_verify(const CommonOptions& opt) {
  Scenario scenario = load_scenario(opt.scenario_path);
  const MarketInstance& inst = scenario.instance;
  const SignalProfile& profile = pick_profile(scenario, opt.signal);
  NaiveRule rule(inst, profile, parse_tie_break(opt.tie_break));
  ClearingConfig cfg = scenario.config;
  cfg.coupling = parse_coupling(opt.coupling);

  int failures = 0;
  auto check = [&](const std::string& name, bool ok) {
    std::cout << (ok ? "ok   " : "FAIL ") << name << "\n";
    if (!ok) ++failures;
  };

  check("instance validation", validate_instance(inst).pass());

  for (std::size_t k = 0; k < inst.num_students(); ++k) {
    BeliefDistribution dist = belief_distribution(inst.prior, profile[k]);
    if (!check_bayes_plausible(dist, inst.prior, 1e-9)) {
      check("bayes plausibility (" + inst.students[k] + ")", false);
    }
  }
  check("bayes plausibility", true);

  GeneralDecisionProfile lifted = lift_naive(rule, inst, profile);
  check("obedience of the naive rule",
        check_obedience(inst, profile, lifted).pass);
  check("gross substitutes of the naive rule",
        check_gross_substitutes(inst, profile, lifted).pass);

  ClearingResult greatest = greatest_market_clearing(inst, profile, rule, cfg);
  ClearingResult least = least_market_clearing(inst, profile, rule, cfg);
  check("greatest fixed point converged", greatest.converged);
  check("least fixed point converged", least.converged);
  check("greatest cutoff clears",
        verify_market_clearing(inst, profile, rule, greatest.cutoff,
                               cfg.clearing_tol, cfg.coupling)
            .pass);
  check("least cutoff clears",
        verify_market_clearing(inst, profile, rule, least.cutoff,
                               cfg.clearing_tol, cfg.coupling)
            .pass);

  if (greatest.converged && least.converged) {
    RuralHospitalReport rural =
        rural_hospital_check(inst, profile, rule, least.cutoff,
                             greatest.cutoff, 1e-6, cfg.coupling);
    check("rural hospital: equal demand", rural.demands_equal);
    check("rural hospital: equal lotteries", rural.lotteries_equal);

    WelfareMonotonicityReport mono = welfare_monotonicity_check(
        inst, profile, rule, greatest.cutoff, least.cutoff, cfg.coupling);
    check("welfare monotone in cutoffs (students)", mono.students_pass);
    if (mono.programs_checked) {
      check("welfare antitone in cutoffs (programs)", mono.programs_pass);
    }
  }

  OutcomeDistribution oracle = enumerate_outcomes(inst, profile, rule,
                                                  greatest.cutoff,
                                                  cfg.coupling);
  bool oracle_match = true;
  DemandVector d = demand(inst, profile, rule, greatest.cutoff, cfg.coupling);
  for (std::size_t p = 0; p < inst.num_programs(); ++p) {
    if (std::abs(d.by_program[p] - oracle.demand[p]) > 1e-9) {
      oracle_match = false;
    }
  }
  check("demand equals enumeration oracle", oracle_match);

  return failures == 0 ? kOk : kFailure;
}

struct GoldenCheck {
  int failures = 0;

  void expect(const std::string& name, bool ok, const std::string& detail) {
    std::printf("%s %s", ok ? "ok  " : "FAIL", name.c_str());
    if (!detail.empty()) std::printf(" — %s", detail.c_str());
    std::printf("\n");
    if (!ok) ++failures;
  }

  void expect_near(const std::string& name, const std::vector<double>& got,
                   const std::vector<double>& want, double tol) {
    bool ok = got.size() == want.size();
    std::ostringstream detail;
    detail << std::setprecision(10) << "(";
    for (std::size_t i = 0; ok && i < got.size(); ++i) {
      if (std::abs(got[i] - want[i]) > tol) ok = false;
    }
    for (std::size_t i = 0; i < got.size(); ++i) {
      detail << (i ? ", " : "") << got[i];
    }
    detail << ")";
    expect(name, ok, detail.str());
  }
};

// Golden checks over the bundled reference markets.
int cmd_paper() {
  GoldenCheck g;

  MarketInstance a = examples::market_a();
  SignalProfile partition = examples::partition_profile_a();
  SignalProfile full = examples::full_profile(a);
  NaiveRule rule_partition(a, partition);
  NaiveRule rule_full(a, full);

  ClearingResult coarse = greatest_market_clearing(a, partition, rule_partition);
  g.expect_near("market A, partition: greatest cutoff",
                coarse.cutoff.values, {4, 4, 4, 4}, 1e-6);
  ClearingResult fine = greatest_market_clearing(a, full, rule_full);
  g.expect_near("market A, full disclosure: greatest cutoff",
                fine.cutoff.values, {2, 4, 1.7, 1}, 1e-6);

  g.expect_near("market A, partition: s1 rank distribution",
                rank_distribution(a, partition, rule_partition, coarse.cutoff, 0),
                {0.7, 0.3, 0, 0, 0}, 1e-9);
  for (std::size_t k = 1; k < 4; ++k) {
    g.expect_near("market A, partition: s" + std::to_string(k + 1) +
                      " rank distribution",
                  rank_distribution(a, partition, rule_partition,
                                    coarse.cutoff, k),
                  {1, 0, 0, 0, 0}, 1e-9);
  }
  g.expect_near("market A, full: s1 rank distribution",
                rank_distribution(a, full, rule_full, fine.cutoff, 0),
                {0.7, 0, 0.3, 0, 0}, 1e-9);
  g.expect_near("market A, full: s2 rank distribution",
                rank_distribution(a, full, rule_full, fine.cutoff, 1),
                {1, 0, 0, 0, 0}, 1e-9);
  g.expect_near("market A, full: s3 rank distribution",
                rank_distribution(a, full, rule_full, fine.cutoff, 2),
                {0.7, 0.3, 0, 0, 0}, 1e-9);
  g.expect_near("market A, full: s4 rank distribution",
                rank_distribution(a, full, rule_full, fine.cutoff, 3),
                {1, 0, 0, 0, 0}, 1e-9);

  ParetoComparison cmp = pareto_compare(a, full, partition);
  g.expect("market A: full disclosure Pareto dominated by the partition",
           cmp.verdict == ParetoOrder::RightDominates, "");

  auto blackwell = is_more_informative(full_disclosure(3),
                                       partition_signal(3, {{0}, {1, 2}}));
  auto reverse = is_more_informative(partition_signal(3, {{0}, {1, 2}}),
                                     full_disclosure(3));
  g.expect("market A: full disclosure Blackwell-dominates the partition",
           blackwell.more_informative && !reverse.more_informative, "");

  MarketInstance b = examples::market_b(0.5);
  SignalProfile full_b = examples::full_profile(b);
  NaiveRule rule_b(b, full_b);
  DeterministicScan scan = no_deterministic_clearing_witness(b, full_b, rule_b);
  g.expect("market B: no deterministic cutoff clears",
           !scan.clearing.has_value(),
           std::to_string(scan.examined) + " integer cutoffs examined");
  ClearingResult fp_b = greatest_market_clearing(b, full_b, rule_b);
  g.expect_near("market B: greatest cutoff", fp_b.cutoff.values, {1.5, 2},
                1e-9);

  MarketInstance c = examples::market_b(0.4);
  SignalProfile full_c = examples::full_profile(c);
  NaiveRule rule_c(c, full_c);
  ExAnteCutoff mixed = examples::market_b_mixed_cutoff(0.25);
  MatchingDistribution md = matching_distribution(c, full_c, rule_c, mixed);
  OutcomeDistribution oracle = enumerate_outcomes(c, full_c, rule_c, mixed);
  bool match = true;
  for (std::size_t k = 0; k < 2; ++k) {
    for (std::size_t p = 0; p <= 2; ++p) {
      if (std::abs(md.match_probability[k][p] -
                   oracle.match_probability[k][p]) > 1e-12) {
        match = false;
      }
    }
  }
  g.expect_near("market C: s1 match probabilities",
                {md.match_probability[0][0], md.match_probability[0][1]},
                {0.4, 0.6}, 1e-12);
  g.expect_near("market C: s2 match probabilities",
                {md.match_probability[1][0], md.match_probability[1][1]},
                {0.75, 0.25}, 1e-12);
  g.expect("market C: matching distribution equals enumeration oracle", match,
           "");

  std::printf("%s\n", g.failures == 0 ? "all reference checks passed"
                                      : "reference checks FAILED");
  return g.failures == 0 ? kOk : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ex-ante market clearing for matching under preference "
               "uncertainty"};
  app.require_subcommand(1);

  CommonOptions opt;
  bool least = false;
  std::string scheme = "simultaneous";
  std::string left, right;
  std::uint64_t draws = 100000, seed = 0;

  auto add_common = [&](CLI::App* cmd, bool needs_scenario = true) {
    if (needs_scenario) {
      cmd->add_option("scenario", opt.scenario_path, "scenario JSON file")
          ->required();
    }
    cmd->add_option("--coupling", opt.coupling,
                    "coupling mode: independent|continuum");
    cmd->add_option("--format", opt.format, "output format: table|csv|json");
    cmd->add_option("--tie-break", opt.tie_break,
                    "expected-utility ties: error|index");
    cmd->add_option("--tol", opt.tol, "clearing tolerance");
  };

  CLI::App* solve = app.add_subcommand(
      "solve", "greatest/least market-clearing cutoff");
  add_common(solve);
  solve->add_option("--signal", opt.signal, "signal profile name");
  solve->add_flag("--least", least, "solve for the least cutoff instead");
  solve->add_option("--scheme", scheme,
                    "update scheme: simultaneous|sequential");

  CLI::App* demand_cmd =
      app.add_subcommand("demand", "expected demand at a cutoff");
  add_common(demand_cmd);
  demand_cmd->add_option("--signal", opt.signal, "signal profile name");
  demand_cmd->add_option("--cutoff", opt.cutoff_csv, "comma-separated cutoff")
      ->required();

  CLI::App* welfare_cmd = app.add_subcommand(
      "welfare", "welfare report at a cutoff (default: greatest clearing)");
  add_common(welfare_cmd);
  welfare_cmd->add_option("--signal", opt.signal, "signal profile name");
  welfare_cmd->add_option("--cutoff", opt.cutoff_csv,
                          "comma-separated cutoff");

  CLI::App* compare_cmd = app.add_subcommand(
      "compare", "Blackwell and Pareto comparison of two signal profiles");
  add_common(compare_cmd);
  compare_cmd->add_option("--left", left, "left signal profile")->required();
  compare_cmd->add_option("--right", right, "right signal profile")
      ->required();

  CLI::App* simulate_cmd =
      app.add_subcommand("simulate", "seeded Monte-Carlo simulation");
  add_common(simulate_cmd);
  simulate_cmd->add_option("--signal", opt.signal, "signal profile name");
  simulate_cmd->add_option("--cutoff", opt.cutoff_csv,
                           "comma-separated cutoff");
  simulate_cmd->add_option("--draws", draws, "number of draws");
  simulate_cmd->add_option("--seed", seed, "RNG seed");

  CLI::App* verify_cmd =
      app.add_subcommand("verify", "full invariant sweep on a scenario");
  add_common(verify_cmd);
  verify_cmd->add_option("--signal", opt.signal, "signal profile name");

  CLI::App* paper_cmd = app.add_subcommand(
      "paper", "run the built-in reference examples and check their outputs");
  (void)paper_cmd;

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return cmd_solve(opt, least, scheme);
    if (demand_cmd->parsed()) return cmd_demand(opt);
    if (welfare_cmd->parsed()) return cmd_welfare(opt);
    if (compare_cmd->parsed()) return cmd_compare(opt, left, right);
    if (simulate_cmd->parsed()) return cmd_simulate(opt, draws, seed);
    if (verify_cmd->parsed()) return cmd_verify(opt);
    if (paper_cmd->parsed()) return cmd_paper();
  } catch (const TieError& e) {
    std::cerr << "tie error: " << e.what() << "\n";
    return kTie;
  } catch (const NonConvergenceError& e) {
    std::cerr << "non-convergence: " << e.what() << "\n";
    return kNonConvergence;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kValidation;
  } catch (const ScenarioError& e) {
    std::cerr << "scenario error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kOk;
}
