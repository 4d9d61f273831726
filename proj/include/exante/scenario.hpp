#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "exante/clearing.hpp"
#include "exante/common.hpp"
#include "exante/information.hpp"
#include "exante/market.hpp"

namespace exante {

inline constexpr const char* kScenarioSchema = "exante-scenario/1";

/// A parsed scenario file: the market instance plus named signal profiles
/// and solver configuration.
struct Scenario {
  MarketInstance instance;
  std::map<std::string, SignalProfile> signal_profiles;
  ClearingConfig config;
};

namespace scenario_detail {

using nlohmann::json;

inline const json& field(const json& node, const std::string& key,
                         const std::string& where) {
  auto it = node.find(key);
  if (it == node.end()) {
    throw ScenarioError("missing field '" + key + "' in " + where);
  }
  return *it;
}

inline std::size_t lookup(const std::vector<std::string>& pool,
                          const std::string& name, const std::string& what,
                          const std::string& where) {
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (pool[i] == name) return i;
  }
  throw ScenarioError("unknown " + what + " '" + name + "' in " + where);
}

inline Signal parse_signal(const json& node, const MarketInstance& inst,
                           const std::string& where) {
  std::string type = field(node, "type", where).get<std::string>();
  if (type == "full") return full_disclosure(inst.num_states());
  if (type == "null") return null_signal(inst.num_states());
  if (type == "partition") {
    std::vector<std::vector<std::size_t>> cells;
    for (const auto& cell : field(node, "cells", where)) {
      std::vector<std::size_t> indices;
      for (const auto& name : cell) {
        indices.push_back(lookup(inst.states, name.get<std::string>(),
                                 "state", where));
      }
      cells.push_back(std::move(indices));
    }
    return partition_signal(inst.num_states(), cells);
  }
  if (type == "explicit") {
    Signal s;
    for (const auto& label : field(node, "realizations", where)) {
      s.labels.push_back(label.get<std::string>());
    }
    s.likelihood.assign(inst.num_states(),
                        std::vector<double>(s.labels.size(), 0.0));
    const json& rows = field(node, "likelihood", where);
    for (std::size_t w = 0; w < inst.num_states(); ++w) {
      auto it = rows.find(inst.states[w]);
      if (it == rows.end()) {
        throw ScenarioError("likelihood row missing for state '" +
                            inst.states[w] + "' in " + where);
      }
      if (it->size() != s.labels.size()) {
        throw ScenarioError("likelihood row length mismatch in " + where);
      }
      double sum = 0.0;
      for (std::size_t i = 0; i < s.labels.size(); ++i) {
        double v = (*it)[i].get<double>();
        if (v < 0.0) {
          throw ScenarioError("negative likelihood in " + where);
        }
        s.likelihood[w][i] = v;
        sum += v;
      }
      if (std::abs(sum - 1.0) > 1e-9) {
        throw ScenarioError("likelihood row does not sum to 1 in " + where);
      }
    }
    return s;
  }
  throw ScenarioError("unknown signal type '" + type + "' in " + where);
}

inline SignalProfile parse_profile(const json& node, const MarketInstance& inst,
                                   const std::string& where) {
  SignalProfile profile;
  std::string type = field(node, "type", where).get<std::string>();
  if (type == "per_student") {
    const json& per = field(node, "students", where);
    for (std::size_t k = 0; k < inst.num_students(); ++k) {
      auto it = per.find(inst.students[k]);
      if (it == per.end()) {
        throw ScenarioError("signal missing for student '" +
                            inst.students[k] + "' in " + where);
      }
      profile.signals.push_back(parse_signal(
          *it, inst, where + "." + inst.students[k]));
    }
    return profile;
  }
  Signal shared = parse_signal(node, inst, where);
  profile.signals.assign(inst.num_students(), shared);
  return profile;
}

inline json signal_to_json(const Signal& signal, const MarketInstance& inst) {
  json node;
  node["type"] = "explicit";
  node["realizations"] = signal.labels;
  json rows = json::object();
  for (std::size_t w = 0; w < inst.num_states(); ++w) {
    rows[inst.states[w]] = signal.likelihood[w];
  }
  node["likelihood"] = rows;
  return node;
}

}  // namespace scenario_detail

/// Parses and validates a scenario JSON document. Partial per-state rankings
/// are completed in program-index order, and each completion is recorded on
/// the instance.
inline Scenario parse_scenario(const nlohmann::json& doc) {
  using scenario_detail::field;
  using scenario_detail::lookup;
  using scenario_detail::parse_profile;

  std::string schema =
      field(doc, "schema", "scenario").get<std::string>();
  if (schema != kScenarioSchema) {
    throw ScenarioError("unsupported schema '" + schema + "'");
  }

  Scenario scenario;
  MarketInstance& inst = scenario.instance;
  for (const auto& s : field(doc, "students", "scenario")) {
    inst.students.push_back(s.get<std::string>());
  }
  for (const auto& p : field(doc, "programs", "scenario")) {
    inst.programs.push_back(p.get<std::string>());
  }
  for (const auto& c : field(doc, "capacities", "scenario")) {
    inst.capacities.push_back(c.get<double>());
  }
  const auto& priorities = field(doc, "priorities", "scenario");
  for (const auto& name : inst.programs) {
    auto it = priorities.find(name);
    if (it == priorities.end()) {
      throw ScenarioError("priorities missing for program '" + name + "'");
    }
    std::vector<std::size_t> order;
    for (const auto& s : *it) {
      order.push_back(lookup(inst.students, s.get<std::string>(), "student",
                             "priorities." + name));
    }
    inst.priorities.push_back(std::move(order));
  }
  for (const auto& w : field(doc, "states", "scenario")) {
    inst.states.push_back(w.get<std::string>());
  }
  for (const auto& v : field(doc, "prior", "scenario")) {
    inst.prior.push_back(v.get<double>());
  }

  const auto& utilities = field(doc, "utilities", "scenario");
  std::string mode =
      scenario_detail::field(utilities, "mode", "utilities").get<std::string>();
  if (mode == "rank") {
    inst.utilities.mode = UtilityMode::RankBased;
    for (const auto& v : field(utilities, "rank_values", "utilities")) {
      inst.utilities.rank_values.push_back(v.get<double>());
    }
    const auto& prefs = field(utilities, "preferences", "utilities");
    for (std::size_t k = 0; k < inst.students.size(); ++k) {
      auto student_it = prefs.find(inst.students[k]);
      if (student_it == prefs.end()) {
        throw ScenarioError("preferences missing for student '" +
                            inst.students[k] + "'");
      }
      std::vector<std::vector<std::size_t>> per_state;
      for (std::size_t w = 0; w < inst.states.size(); ++w) {
        auto state_it = student_it->find(inst.states[w]);
        if (state_it == student_it->end()) {
          throw ScenarioError("preferences of '" + inst.students[k] +
                              "' missing for state '" + inst.states[w] + "'");
        }
        std::vector<std::size_t> prefix;
        for (const auto& p : *state_it) {
          prefix.push_back(lookup(inst.programs, p.get<std::string>(),
                                  "program",
                                  "preferences." + inst.students[k]));
        }
        RankingCompletion record;
        record.student = k;
        record.state = w;
        auto full =
            complete_ranking(prefix, inst.programs.size(), &record.appended);
        if (!record.appended.empty()) inst.completions.push_back(record);
        per_state.push_back(std::move(full));
      }
      inst.utilities.rankings.push_back(std::move(per_state));
    }
  } else if (mode == "matrix") {
    inst.utilities.mode = UtilityMode::Explicit;
    const auto& values = field(utilities, "values", "utilities");
    for (std::size_t k = 0; k < inst.students.size(); ++k) {
      auto student_it = values.find(inst.students[k]);
      if (student_it == values.end()) {
        throw ScenarioError("utility values missing for student '" +
                            inst.students[k] + "'");
      }
      std::vector<std::vector<double>> per_state;
      for (std::size_t w = 0; w < inst.states.size(); ++w) {
        auto state_it = student_it->find(inst.states[w]);
        if (state_it == student_it->end()) {
          throw ScenarioError("utility values of '" + inst.students[k] +
                              "' missing for state '" + inst.states[w] + "'");
        }
        std::vector<double> row(inst.programs.size(), 0.0);
        for (std::size_t p = 0; p < inst.programs.size(); ++p) {
          auto program_it = state_it->find(inst.programs[p]);
          if (program_it == state_it->end()) {
            throw ScenarioError("utility value missing for program '" +
                                inst.programs[p] + "'");
          }
          row[p] = program_it->get<double>();
        }
        per_state.push_back(std::move(row));
      }
      inst.utilities.values.push_back(std::move(per_state));
    }
  } else {
    throw ScenarioError("unknown utility mode '" + mode + "'");
  }

  if (doc.contains("program_utilities")) {
    std::vector<std::vector<double>> table(
        inst.programs.size(), std::vector<double>(inst.students.size(), 0.0));
    const auto& pu = doc["program_utilities"];
    for (std::size_t p = 0; p < inst.programs.size(); ++p) {
      auto it = pu.find(inst.programs[p]);
      if (it == pu.end()) {
        throw ScenarioError("program utilities missing for '" +
                            inst.programs[p] + "'");
      }
      for (std::size_t k = 0; k < inst.students.size(); ++k) {
        auto sit = it->find(inst.students[k]);
        if (sit == it->end()) {
          throw ScenarioError("program utility missing for student '" +
                              inst.students[k] + "'");
        }
        table[p][k] = sit->get<double>();
      }
    }
    inst.program_utilities = std::move(table);
  }

  inst.finalize();
  ValidationReport report = validate_instance(inst);
  if (!report.pass()) {
    std::string msg = "scenario failed validation:";
    for (const auto& issue : report.issues) {
      msg += "\n  [" + issue.code + "] " + issue.message;
    }
    throw ValidationError(msg);
  }

  const auto& signals = field(doc, "signals", "scenario");
  for (auto it = signals.begin(); it != signals.end(); ++it) {
    scenario.signal_profiles[it.key()] =
        parse_profile(it.value(), inst, "signals." + it.key());
  }

  if (doc.contains("solver")) {
    const auto& solver = doc["solver"];
    if (solver.contains("clearing_tol")) {
      scenario.config.clearing_tol = solver["clearing_tol"].get<double>();
    }
    if (solver.contains("fixed_point_tol")) {
      scenario.config.fixed_point_tol =
          solver["fixed_point_tol"].get<double>();
    }
    if (solver.contains("max_sweeps")) {
      scenario.config.max_sweeps = solver["max_sweeps"].get<int>();
    }
    if (solver.contains("scheme")) {
      std::string scheme = solver["scheme"].get<std::string>();
      if (scheme == "simultaneous") {
        scenario.config.scheme = UpdateScheme::Simultaneous;
      } else if (scheme == "sequential") {
        scenario.config.scheme = UpdateScheme::Sequential;
      } else {
        throw ScenarioError("unknown update scheme '" + scheme + "'");
      }
    }
    if (solver.contains("coupling")) {
      std::string coupling = solver["coupling"].get<std::string>();
      if (coupling == "independent") {
        scenario.config.coupling = Coupling::Independent;
      } else if (coupling == "continuum") {
        scenario.config.coupling = Coupling::Continuum;
      } else {
        throw ScenarioError("unknown coupling '" + coupling + "'");
      }
    }
  }
  return scenario;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file: " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ScenarioError("parse error in " + path + ": " + e.what());
  }
  return parse_scenario(doc);
}

/// Emits a scenario document that reloads to an identical instance.
/// Rankings are written out in full (completions already applied); signals
/// are written as explicit likelihood tables.
inline nlohmann::json save_scenario(const Scenario& scenario) {
  using nlohmann::json;
  const MarketInstance& inst = scenario.instance;
  json doc;
  doc["schema"] = kScenarioSchema;
  doc["students"] = inst.students;
  doc["programs"] = inst.programs;
  doc["capacities"] = inst.capacities;
  json priorities = json::object();
  for (std::size_t p = 0; p < inst.num_programs(); ++p) {
    std::vector<std::string> names;
    for (std::size_t k : inst.priorities[p]) names.push_back(inst.students[k]);
    priorities[inst.programs[p]] = names;
  }
  doc["priorities"] = priorities;
  doc["states"] = inst.states;
  doc["prior"] = inst.prior;

  json utilities;
  if (inst.utilities.mode == UtilityMode::RankBased) {
    utilities["mode"] = "rank";
    utilities["rank_values"] = inst.utilities.rank_values;
    json prefs = json::object();
    for (std::size_t k = 0; k < inst.num_students(); ++k) {
      json per_state = json::object();
      for (std::size_t w = 0; w < inst.num_states(); ++w) {
        std::vector<std::string> names;
        for (std::size_t p : inst.utilities.rankings[k][w]) {
          names.push_back(inst.programs[p]);
        }
        per_state[inst.states[w]] = names;
      }
      prefs[inst.students[k]] = per_state;
    }
    utilities["preferences"] = prefs;
  } else {
    utilities["mode"] = "matrix";
    json values = json::object();
    for (std::size_t k = 0; k < inst.num_students(); ++k) {
      json per_state = json::object();
      for (std::size_t w = 0; w < inst.num_states(); ++w) {
        json row = json::object();
        for (std::size_t p = 0; p < inst.num_programs(); ++p) {
          row[inst.programs[p]] = inst.utilities.values[k][w][p];
        }
        per_state[inst.states[w]] = row;
      }
      values[inst.students[k]] = per_state;
    }
    utilities["values"] = values;
  }
  doc["utilities"] = utilities;

  if (inst.program_utilities) {
    json pu = json::object();
    for (std::size_t p = 0; p < inst.num_programs(); ++p) {
      json row = json::object();
      for (std::size_t k = 0; k < inst.num_students(); ++k) {
        row[inst.students[k]] = (*inst.program_utilities)[p][k];
      }
      pu[inst.programs[p]] = row;
    }
    doc["program_utilities"] = pu;
  }

  json signals = json::object();
  for (const auto& [name, profile] : scenario.signal_profiles) {
    // Common profiles collapse back to a single signal entry.
    bool common = true;
    for (std::size_t k = 1; k < profile.size(); ++k) {
      if (profile[k].likelihood != profile[0].likelihood) common = false;
    }
    if (common && profile.size() > 0) {
      signals[name] = scenario_detail::signal_to_json(profile[0], inst);
    } else {
      json node;
      node["type"] = "per_student";
      json per = json::object();
      for (std::size_t k = 0; k < profile.size(); ++k) {
        per[inst.students[k]] =
            scenario_detail::signal_to_json(profile[k], inst);
      }
      node["students"] = per;
      signals[name] = node;
    }
  }
  doc["signals"] = signals;

  json solver;
  solver["clearing_tol"] = scenario.config.clearing_tol;
  solver["fixed_point_tol"] = scenario.config.fixed_point_tol;
  solver["max_sweeps"] = scenario.config.max_sweeps;
  solver["scheme"] = scenario.config.scheme == UpdateScheme::Simultaneous
                         ? "simultaneous"
                         : "sequential";
  solver["coupling"] = scenario.config.coupling == Coupling::Independent
                           ? "independent"
                           : "continuum";
  doc["solver"] = solver;
  return doc;
}

}  // namespace exante
