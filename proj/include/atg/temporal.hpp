#pragma once

// Temporal semantics over the cyclic interval schedule.
//
// Steps 0,1,2,... map onto the schedule cyclically. At each step the active
// facts are the base facts tagged for that interval, the placement facts,
// and every persistent atom carried over from earlier steps. Carried atoms
// grow monotonically; evaluation stops once a full cycle passes without the
// carried set changing, because from then on every cycle replays the same
// per-step states. By default evaluation always runs to that fixpoint (so
// downstream proof enumeration sees every attack path, not just the first);
// `stop_at_goal` cuts the run short at the first step that derives the goal.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "atg/datalog.hpp"
#include "atg/errors.hpp"
#include "atg/scenario.hpp"

namespace atg::temporal {

// Everything recorded about one evaluated step.
struct IntervalState {
  std::size_t step = 0;
  std::size_t interval_index = 0;
  std::string interval;
  // Persistent atoms entering this step.
  std::set<std::string> carried_in;
  // Base facts of this interval plus placement facts (carried atoms are not
  // listed here; they enter the fixpoint separately).
  std::vector<Atom> active_facts;
  std::set<std::string> active_fact_keys;
  // Fixpoint over active_facts + carried_in.
  datalog::DerivationLog log;
  std::set<std::string> carried_out;
};

struct ReachabilityResult {
  // Copies keep the result self-contained for graphing and proof replay.
  NetworkModel model;
  std::map<std::string, std::string> placement;

  bool reached = false;
  std::optional<std::size_t> earliest_step;
  std::size_t steps_evaluated = 0;
  std::vector<IntervalState> steps;
};

struct EvaluateOptions {
  // Hard cap on evaluated steps; defaults to the termination bound.
  std::optional<std::size_t> max_steps;
  // Stop at the first step that derives the goal instead of running to the
  // carried-set fixpoint.
  bool stop_at_goal = false;
};

// Number of distinct ground atoms the persistent predicates can take:
// sum over persistent p of |constants|^arity(p). One plus this, times the
// schedule length, bounds the evaluated steps.
inline std::uint64_t persistent_atom_bound(const NetworkModel& model) {
  constexpr std::uint64_t kCap = 100'000'000;
  std::uint64_t consts = model.constants().size();
  auto arities = model.predicate_arities();
  std::uint64_t total = 0;
  for (const auto& pred : model.persistent_predicates) {
    std::uint64_t combos = 1;
    auto it = arities.find(pred);
    std::size_t arity = it != arities.end() ? it->second : 0;
    for (std::size_t i = 0; i < arity; ++i) {
      if (consts == 0 || combos > kCap / consts) {
        combos = kCap;
        break;
      }
      combos *= consts;
    }
    total = total > kCap - combos ? kCap : total + combos;
  }
  return total;
}

inline std::uint64_t step_bound(const NetworkModel& model) {
  return (persistent_atom_bound(model) + 1) * std::max<std::uint64_t>(1, model.schedule.size());
}

// Placement facts `placed(device, zone)`, one per deployment variable, after
// checking the assignment is complete and every zone is a declared candidate.
inline std::vector<Atom> placement_facts(const NetworkModel& model,
                                         const std::map<std::string, std::string>& placement) {
  for (const auto& [device, zone] : placement) {
    const DeploymentVariable* var = model.deployment_var(device);
    if (!var)
      throw Error(ErrorCode::InvalidZone, "'" + device + "' is not a deployable device");
    bool known = false;
    for (const auto& c : var->candidates) known = known || c == zone;
    if (!known)
      throw Error(ErrorCode::InvalidZone,
                  "'" + zone + "' is not a candidate zone for device '" + device + "'");
  }
  std::vector<Atom> out;
  for (const auto& var : model.deployment_vars) {
    auto it = placement.find(var.device);
    if (it == placement.end())
      throw Error(ErrorCode::IncompletePlacement,
                  "no zone assigned to device '" + var.device + "'");
    out.push_back(make_fact(kPlacementPredicate, {var.device, it->second}));
  }
  return out;
}

inline ReachabilityResult evaluate_schedule(const NetworkModel& model,
                                            const std::map<std::string, std::string>& placement,
                                            const EvaluateOptions& options = {}) {
  ReachabilityResult result;
  result.model = model;
  result.placement = placement;
  if (model.schedule.empty()) return result;

  std::vector<Atom> placed = placement_facts(model, placement);
  const std::size_t cycle = model.schedule.size();
  const std::uint64_t bound = step_bound(model);
  std::uint64_t limit = options.max_steps ? std::min<std::uint64_t>(*options.max_steps, bound)
                                          : bound;

  std::map<std::string, Atom> carried;          // key -> atom
  std::set<std::string> cycle_start_carried;    // carried entering the current cycle
  const std::string goal_key = model.goal.key();

  for (std::size_t step = 0; step < limit; ++step) {
    const Interval& interval = model.schedule[step % cycle];
    if (step % cycle == 0) {
      cycle_start_carried.clear();
      for (const auto& [key, atom] : carried) cycle_start_carried.insert(key);
    }

    IntervalState state;
    state.step = step;
    state.interval_index = interval.index;
    state.interval = interval.name;
    for (const auto& [key, atom] : carried) state.carried_in.insert(key);

    for (const auto& f : model.base_facts) {
      if (!f.active_in(interval.name)) continue;
      if (state.active_fact_keys.insert(f.atom.key()).second)
        state.active_facts.push_back(f.atom);
    }
    for (const auto& p : placed) {
      if (state.active_fact_keys.insert(p.key()).second) state.active_facts.push_back(p);
    }

    std::vector<Atom> inputs = state.active_facts;
    for (const auto& [key, atom] : carried) inputs.push_back(atom);
    state.log = datalog::fixpoint(inputs, model.rules);

    for (const auto& atom : state.log.derived) {
      if (!model.persistent_predicates.count(atom.predicate)) continue;
      carried.emplace(atom.key(), atom);
    }
    state.carried_out = state.carried_in;
    for (const auto& [key, atom] : carried) state.carried_out.insert(key);

    bool goal_now = state.log.contains_key(goal_key);
    result.steps.push_back(std::move(state));
    if (goal_now && !result.reached) {
      result.reached = true;
      result.earliest_step = step;
      if (options.stop_at_goal) break;
    }

    // Global fixpoint: a full cycle added no persistent atom, so every
    // later cycle would replay these states exactly.
    if (step % cycle == cycle - 1 && carried.size() == cycle_start_carried.size()) break;
  }

  result.steps_evaluated = result.steps.size();
  return result;
}

inline const IntervalState& states_at(const ReachabilityResult& result, std::size_t step) {
  if (step >= result.steps.size())
    throw Error(ErrorCode::StepOutOfRange,
                "step " + std::to_string(step) + " out of range; " +
                    std::to_string(result.steps.size()) + " steps were evaluated");
  return result.steps[step];
}

}  // namespace atg::temporal
