#pragma once

// Horn-rule grounding and least-fixpoint evaluation.
//
// The evaluator is semi-naive: each sweep only considers rule instances
// whose body touches an atom derived in the previous sweep. Every ground
// instance whose body holds in the least model is recorded exactly once,
// in a deterministic firing order (sweep, rule declaration order,
// substitution order), so downstream node ids and proof enumeration are
// stable across runs.

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "atg/errors.hpp"
#include "atg/scenario.hpp"

namespace atg::datalog {

// One fired exploit: a rule plus the substitution that grounded it.
struct GroundRuleInstance {
  std::string rule_name;
  std::map<std::string, std::string> substitution;  // variable -> constant
  Atom head;
  std::vector<Atom> body;
  double cost = 1.0;

  // Canonical id, `rule{X=a,Y=b}` with keys sorted (std::map order).
  std::string key() const {
    std::string out = rule_name;
    out += '{';
    bool first = true;
    for (const auto& [var, constant] : substitution) {
      if (!first) out += ',';
      out += var;
      out += '=';
      out += constant;
      first = false;
    }
    out += '}';
    return out;
  }

  bool operator==(const GroundRuleInstance&) const = default;
};

struct DerivationLog {
  // Least model of (active facts, rules), base facts included, in
  // derivation order (facts first, then heads as they are derived).
  std::vector<Atom> derived;
  std::set<std::string> derived_keys;
  // Every instance whose body holds in the least model, in firing order.
  std::vector<GroundRuleInstance> instances;
  // Rule-derived atom key -> indices of supporting instances (ascending).
  std::map<std::string, std::vector<std::size_t>> supports;

  bool contains(const Atom& atom) const { return derived_keys.count(atom.key()) > 0; }
  bool contains_key(const std::string& key) const { return derived_keys.count(key) > 0; }

  std::set<std::string> instance_keys() const {
    std::set<std::string> out;
    for (const auto& inst : instances) out.insert(inst.key());
    return out;
  }
};

namespace detail {

inline Atom substitute(const Atom& pattern, const std::map<std::string, std::string>& subst) {
  Atom out;
  out.predicate = pattern.predicate;
  out.args.reserve(pattern.args.size());
  for (const auto& t : pattern.args) {
    if (t.is_variable)
      out.args.push_back(make_constant(subst.at(t.text)));
    else
      out.args.push_back(t);
  }
  return out;
}

inline bool unify(const Atom& pattern, const Atom& ground,
                  std::map<std::string, std::string>& subst,
                  std::vector<std::string>& bound_here) {
  if (pattern.predicate != ground.predicate || pattern.args.size() != ground.args.size())
    return false;
  for (std::size_t i = 0; i < pattern.args.size(); ++i) {
    const Term& p = pattern.args[i];
    const std::string& value = ground.args[i].text;
    if (!p.is_variable) {
      if (p.text != value) {
        for (const auto& v : bound_here) subst.erase(v);
        return false;
      }
      continue;
    }
    auto it = subst.find(p.text);
    if (it == subst.end()) {
      subst.emplace(p.text, value);
      bound_here.push_back(p.text);
    } else if (it->second != value) {
      for (const auto& v : bound_here) subst.erase(v);
      return false;
    }
  }
  return true;
}

}  // namespace detail

// Least fixpoint of the rules over the active facts. `derived` is the least
// model (facts included); `instances` lists every satisfiable ground rule
// instance once, in a deterministic order.
inline DerivationLog fixpoint(const std::vector<Atom>& active_facts,
                              const std::vector<Rule>& rules) {
  DerivationLog log;
  // Atom key -> index into log.derived; predicate -> atom indices.
  std::map<std::string, std::size_t> atom_index;
  std::map<std::string, std::vector<std::size_t>> by_predicate;

  auto add_atom = [&](const Atom& atom) -> bool {
    std::string key = atom.key();
    if (!log.derived_keys.insert(key).second) return false;
    atom_index.emplace(std::move(key), log.derived.size());
    by_predicate[atom.predicate].push_back(log.derived.size());
    log.derived.push_back(atom);
    return true;
  };

  for (const auto& f : active_facts) add_atom(f);

  std::set<std::string> seen_instances;
  std::set<std::size_t> delta;  // indices of atoms derived in the previous sweep
  for (std::size_t i = 0; i < log.derived.size(); ++i) delta.insert(i);

  while (!delta.empty()) {
    // Collect this sweep's new instances per rule, then fire them in rule
    // declaration order with substitutions sorted, so the instance list is
    // a pure function of the input.
    std::vector<std::vector<GroundRuleInstance>> sweep(rules.size());
    for (std::size_t ri = 0; ri < rules.size(); ++ri) {
      const Rule& rule = rules[ri];
      std::map<std::string, std::string> subst;
      std::set<std::map<std::string, std::string>> found;

      // Depth-first join over body positions; `used_delta` enforces the
      // semi-naive restriction that at least one matched atom is fresh.
      auto match = [&](auto&& self, std::size_t pos, bool used_delta) -> void {
        if (pos == rule.body.size()) {
          if (used_delta) found.insert(subst);
          return;
        }
        auto it = by_predicate.find(rule.body[pos].predicate);
        if (it == by_predicate.end()) return;
        for (std::size_t ai : it->second) {
          std::vector<std::string> bound_here;
          if (!detail::unify(rule.body[pos], log.derived[ai], subst, bound_here)) continue;
          self(self, pos + 1, used_delta || delta.count(ai) > 0);
          for (const auto& v : bound_here) subst.erase(v);
        }
      };
      match(match, 0, false);

      for (const auto& s : found) {
        GroundRuleInstance inst;
        inst.rule_name = rule.name;
        inst.substitution = s;
        inst.head = detail::substitute(rule.head, s);
        inst.body.reserve(rule.body.size());
        for (const auto& b : rule.body) inst.body.push_back(detail::substitute(b, s));
        inst.cost = rule.cost;
        if (seen_instances.insert(inst.key()).second)
          sweep[ri].push_back(std::move(inst));
      }
    }

    delta.clear();
    for (auto& per_rule : sweep) {
      for (auto& inst : per_rule) {
        std::string head_key = inst.head.key();
        log.supports[head_key].push_back(log.instances.size());
        log.instances.push_back(std::move(inst));
        const Atom& head = log.instances.back().head;
        if (add_atom(head)) delta.insert(atom_index.at(head_key));
      }
    }
  }

  return log;
}

// Supporting instances of a rule-derived atom, in firing order.
inline std::vector<GroundRuleInstance> ground_instances_of(const DerivationLog& log,
                                                           const Atom& atom) {
  std::string key = atom.key();
  auto it = log.supports.find(key);
  if (it == log.supports.end()) {
    if (log.derived_keys.count(key))
      throw Error(ErrorCode::NotDerived, key + " is a base fact, not a derived atom");
    throw Error(ErrorCode::NotDerived, key + " is not in the derived set");
  }
  std::vector<GroundRuleInstance> out;
  out.reserve(it->second.size());
  for (std::size_t idx : it->second) out.push_back(log.instances[idx]);
  return out;
}

}  // namespace atg::datalog
