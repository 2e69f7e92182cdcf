#pragma once

// Materializes an evaluation into the three-kind logical attack graph and
// renders it as DOT.
//
// The graph is the union over every evaluated step: each base fact ever
// active becomes a FACT node, each fired ground rule instance an EXPLOIT
// node, each rule-derived atom a PRIVILEGE node. Edges run FACT->EXPLOIT,
// PRIVILEGE->EXPLOIT (the AND preconditions) and EXPLOIT->PRIVILEGE (the
// implied head). Ids are a canonical function of kind and label, so the
// same scenario always produces byte-identical output.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "atg/errors.hpp"
#include "atg/scenario.hpp"
#include "atg/temporal.hpp"

namespace atg::graph {

enum class NodeKind { Fact, Exploit, Privilege };

struct Node {
  std::string id;
  NodeKind kind = NodeKind::Fact;
  std::string label;

  bool operator==(const Node&) const = default;
};

struct AttackGraph {
  std::vector<Node> nodes;                                  // sorted by id
  std::vector<std::pair<std::string, std::string>> edges;  // sorted, deduped
  std::optional<std::string> goal_id;

  const Node* find(const std::string& id) const {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), id,
                               [](const Node& n, const std::string& v) { return n.id < v; });
    return it != nodes.end() && it->id == id ? &*it : nullptr;
  }

  std::vector<std::string> predecessors(const std::string& id) const {
    std::vector<std::string> out;
    for (const auto& [from, to] : edges)
      if (to == id) out.push_back(from);
    return out;
  }

  const std::string& require_goal() const {
    if (!goal_id)
      throw Error(ErrorCode::GoalUnrepresentable,
                  "the goal atom is neither derivable nor an active base fact in any step");
    return *goal_id;
  }
};

inline std::string fact_id(const std::string& atom_key) { return "f:" + atom_key; }
inline std::string privilege_id(const std::string& atom_key) { return "p:" + atom_key; }
inline std::string exploit_id(const std::string& instance_key) { return "e:" + instance_key; }

inline AttackGraph build_graph(const temporal::ReachabilityResult& result) {
  AttackGraph g;
  std::set<std::string> fact_keys;        // base/placement atoms ever active
  std::set<std::string> privilege_keys;   // rule-derived atoms (any step)
  std::map<std::string, const datalog::GroundRuleInstance*> instances;

  for (const auto& step : result.steps) {
    fact_keys.insert(step.active_fact_keys.begin(), step.active_fact_keys.end());
    for (const auto& inst : step.log.instances) {
      privilege_keys.insert(inst.head.key());
      instances.emplace(inst.key(), &inst);
    }
  }

  for (const auto& key : fact_keys) g.nodes.push_back(Node{fact_id(key), NodeKind::Fact, key});
  for (const auto& key : privilege_keys)
    g.nodes.push_back(Node{privilege_id(key), NodeKind::Privilege, key});

  std::set<std::pair<std::string, std::string>> edges;
  for (const auto& [key, inst] : instances) {
    std::string eid = exploit_id(key);
    g.nodes.push_back(Node{eid, NodeKind::Exploit, key});
    for (const auto& b : inst->body) {
      std::string bkey = b.key();
      // A precondition that is ever rule-derived attaches to its privilege
      // node (the OR node carries derivation state); pure base facts attach
      // to their fact node.
      edges.emplace(privilege_keys.count(bkey) ? privilege_id(bkey) : fact_id(bkey), eid);
    }
    edges.emplace(eid, privilege_id(inst->head.key()));
  }
  g.edges.assign(edges.begin(), edges.end());
  std::sort(g.nodes.begin(), g.nodes.end(),
            [](const Node& a, const Node& b) { return a.id < b.id; });

  std::string goal_key = result.model.goal.key();
  if (privilege_keys.count(goal_key))
    g.goal_id = privilege_id(goal_key);
  else if (fact_keys.count(goal_key))
    g.goal_id = fact_id(goal_key);
  return g;
}

// ON/OFF assignment for every node at one evaluated step: facts by interval
// activity, privileges by membership in the step's least model (carried
// atoms included), exploits by whether the instance fired this step.
inline std::map<std::string, bool> node_states(const AttackGraph& graph,
                                               const temporal::ReachabilityResult& result,
                                               std::size_t step) {
  const temporal::IntervalState& s = temporal::states_at(result, step);
  std::set<std::string> fired;
  for (const auto& inst : s.log.instances) fired.insert(inst.key());

  std::map<std::string, bool> out;
  for (const auto& node : graph.nodes) {
    switch (node.kind) {
      case NodeKind::Fact:
        out[node.id] = s.active_fact_keys.count(node.label) > 0;
        break;
      case NodeKind::Privilege:
        out[node.id] = s.log.derived_keys.count(node.label) > 0;
        break;
      case NodeKind::Exploit:
        out[node.id] = fired.count(node.label) > 0;
        break;
    }
  }
  return out;
}

namespace detail {

inline std::string dot_escape(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

inline const char* dot_shape(NodeKind kind) {
  switch (kind) {
    case NodeKind::Fact: return "box";
    case NodeKind::Exploit: return "ellipse";
    case NodeKind::Privilege: return "diamond";
  }
  return "box";
}

inline std::string export_dot_impl(const AttackGraph& graph,
                                   const std::map<std::string, bool>* states) {
  if (states) {
    for (const auto& [id, on] : *states)
      if (!graph.find(id))
        throw Error(ErrorCode::UnknownNodeId, "state map references unknown node '" + id + "'");
    for (const auto& node : graph.nodes)
      if (!states->count(node.id))
        throw Error(ErrorCode::UnknownNodeId, "state map misses node '" + node.id + "'");
  }

  std::string out = "digraph attack_graph {\n";
  for (const auto& node : graph.nodes) {
    out += "  \"";
    out += detail::dot_escape(node.id);
    out += "\" [shape=";
    out += dot_shape(node.kind);
    out += ", label=\"";
    out += detail::dot_escape(node.label);
    out += '"';
    if (states) {
      out += ", style=filled, fillcolor=";
      out += states->at(node.id) ? "gray" : "white";
    }
    out += "];\n";
  }
  for (const auto& [from, to] : graph.edges) {
    out += "  \"";
    out += detail::dot_escape(from);
    out += "\" -> \"";
    out += detail::dot_escape(to);
    out += "\";\n";
  }
  out += "}\n";
  return out;
}

}  // namespace detail

inline std::string export_dot(const AttackGraph& graph) {
  return detail::export_dot_impl(graph, nullptr);
}

inline std::string export_dot(const AttackGraph& graph,
                              const std::map<std::string, bool>& states) {
  return detail::export_dot_impl(graph, &states);
}

}  // namespace atg::graph
