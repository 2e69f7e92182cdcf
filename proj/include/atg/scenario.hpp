#pragma once

// Network-model data types and the declarative scenario-file format.
//
// A scenario is a line-oriented text file; one statement per line, `#`
// starts a comment:
//
//   intervals: <name> (, <name>)*
//   fact <pred>(<const> (, <const>)*) [@ <ival> (, <ival>)*]
//   rule <name> [cost=<number>]: <atom> :- <atom> (, <atom>)* .
//   persistent <pred> (, <pred>)*
//   goal: <pred>(<const>*)
//   deploy <device> in { <zone> (, <zone>)* }
//   vuln <const> severity=<number> complexity=<number>
//
// Variables start with an uppercase letter, constants with a lowercase one.
// Facts default to every interval unless tagged with `@`.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace atg {

// ---------------------------------------------------------------------------
// Terms and atoms

struct Term {
  bool is_variable = false;
  std::string text;

  auto operator<=>(const Term&) const = default;
};

inline Term make_constant(std::string text) { return Term{false, std::move(text)}; }
inline Term make_variable(std::string text) { return Term{true, std::move(text)}; }

struct Atom {
  std::string predicate;
  std::vector<Term> args;

  bool ground() const {
    return std::none_of(args.begin(), args.end(),
                        [](const Term& t) { return t.is_variable; });
  }

  // Canonical text form, `pred(a,b)`; used as the set/map key for ground
  // atoms and embedded in graph node ids.
  std::string key() const {
    std::string out = predicate;
    out += '(';
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (i) out += ',';
      out += args[i].text;
    }
    out += ')';
    return out;
  }

  auto operator<=>(const Atom&) const = default;
};

inline Atom make_fact(std::string predicate, std::vector<std::string> constants) {
  Atom a;
  a.predicate = std::move(predicate);
  a.args.reserve(constants.size());
  for (auto& c : constants) a.args.push_back(make_constant(std::move(c)));
  return a;
}

// ---------------------------------------------------------------------------
// Model pieces

struct Interval {
  std::string name;
  std::size_t index = 0;

  auto operator<=>(const Interval&) const = default;
};

struct BaseFact {
  Atom atom;
  // nullopt means active in every interval.
  std::optional<std::set<std::string>> active_intervals;

  bool active_in(const std::string& interval) const {
    return !active_intervals || active_intervals->count(interval) > 0;
  }

  auto operator<=>(const BaseFact&) const = default;
};

struct Rule {
  std::string name;
  Atom head;
  std::vector<Atom> body;
  double cost = 1.0;

  auto operator<=>(const Rule&) const = default;
};

struct DeploymentVariable {
  std::string device;
  std::vector<std::string> candidates;  // declaration order matters for ties

  auto operator<=>(const DeploymentVariable&) const = default;
};

struct VulnInfo {
  double severity = 0.0;
  double complexity = 0.0;

  auto operator<=>(const VulnInfo&) const = default;
};

// Predicate used to inject deployment choices as facts: placed(device, zone).
inline constexpr const char* kPlacementPredicate = "placed";
inline constexpr std::size_t kPlacementArity = 2;

struct NetworkModel {
  std::vector<Interval> schedule;
  std::vector<BaseFact> base_facts;
  std::vector<Rule> rules;
  std::set<std::string> persistent_predicates;
  Atom goal;
  std::vector<DeploymentVariable> deployment_vars;
  std::map<std::string, VulnInfo> vuln_metadata;

  bool operator==(const NetworkModel&) const = default;

  std::optional<std::size_t> interval_index(const std::string& name) const {
    for (const auto& iv : schedule)
      if (iv.name == name) return iv.index;
    return std::nullopt;
  }

  // Every constant occurring in facts, rules, the goal, deployments and
  // vulnerability metadata: the Herbrand universe of the scenario.
  std::set<std::string> constants() const {
    std::set<std::string> out;
    auto add_atom = [&out](const Atom& a) {
      for (const auto& t : a.args)
        if (!t.is_variable) out.insert(t.text);
    };
    for (const auto& f : base_facts) add_atom(f.atom);
    for (const auto& r : rules) {
      add_atom(r.head);
      for (const auto& b : r.body) add_atom(b);
    }
    add_atom(goal);
    for (const auto& d : deployment_vars) {
      out.insert(d.device);
      out.insert(d.candidates.begin(), d.candidates.end());
    }
    for (const auto& [name, info] : vuln_metadata) out.insert(name);
    return out;
  }

  // Arity of each predicate, taken from its first use in declaration order.
  std::map<std::string, std::size_t> predicate_arities() const {
    std::map<std::string, std::size_t> out;
    out[kPlacementPredicate] = kPlacementArity;
    auto note = [&out](const Atom& a) { out.emplace(a.predicate, a.args.size()); };
    for (const auto& f : base_facts) note(f.atom);
    for (const auto& r : rules) {
      note(r.head);
      for (const auto& b : r.body) note(b);
    }
    note(goal);
    return out;
  }

  const DeploymentVariable* deployment_var(const std::string& device) const {
    for (const auto& d : deployment_vars)
      if (d.device == device) return &d;
    return nullptr;
  }
};

// ---------------------------------------------------------------------------
// Diagnostics

enum class DiagCode {
  SyntaxError,
  ArityMismatch,
  UnknownInterval,
  UnboundHeadVariable,
  DuplicateName,
  UnknownGoalPredicate,
  MissingSchedule,
  MissingGoal,
  EmptyIntervalSet,
  NonGroundAtom,
  EmptyRuleBody,
  PersistentNotRuleHead,
  UnknownZone,
  BadNumber,
};

inline const char* to_string(DiagCode code) {
  switch (code) {
    case DiagCode::SyntaxError: return "SyntaxError";
    case DiagCode::ArityMismatch: return "ArityMismatch";
    case DiagCode::UnknownInterval: return "UnknownInterval";
    case DiagCode::UnboundHeadVariable: return "UnboundHeadVariable";
    case DiagCode::DuplicateName: return "DuplicateName";
    case DiagCode::UnknownGoalPredicate: return "UnknownGoalPredicate";
    case DiagCode::MissingSchedule: return "MissingSchedule";
    case DiagCode::MissingGoal: return "MissingGoal";
    case DiagCode::EmptyIntervalSet: return "EmptyIntervalSet";
    case DiagCode::NonGroundAtom: return "NonGroundAtom";
    case DiagCode::EmptyRuleBody: return "EmptyRuleBody";
    case DiagCode::PersistentNotRuleHead: return "PersistentNotRuleHead";
    case DiagCode::UnknownZone: return "UnknownZone";
    case DiagCode::BadNumber: return "BadNumber";
  }
  return "Unknown";
}

struct Diagnostic {
  DiagCode code = DiagCode::SyntaxError;
  std::string entity;   // offending predicate/rule/interval name, if any
  std::string message;
  int line = 0;         // 1-based; 0 when unknown (hand-built models)
  int column = 0;

  bool operator==(const Diagnostic&) const = default;

  std::string render() const {
    std::string out;
    if (line > 0) {
      out += std::to_string(line);
      out += ':';
      out += std::to_string(column);
      out += ": ";
    }
    out += to_string(code);
    out += ": ";
    out += message;
    return out;
  }
};

// Shortest decimal form that round-trips; "2" not "2.000000".
inline std::string format_number(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) return "0";
  return std::string(buf, ptr);
}

// ---------------------------------------------------------------------------
// Model validation
//
// Checks every type invariant that is re-checkable on a bare model (no
// source locations). The parser runs the same checks with locations
// attached. Diagnostics come back in a fixed traversal order so repeated
// runs are identical.

namespace detail {

struct SourceMap {
  int schedule_line = 0;
  std::vector<int> fact_lines;
  std::vector<int> rule_lines;
  int goal_line = 0;
  int persistent_line = 0;
  std::vector<int> deploy_lines;
  std::map<std::string, int> vuln_lines;
};

inline std::vector<Diagnostic> validate_model_impl(const NetworkModel& model,
                                                   const SourceMap& where) {
  std::vector<Diagnostic> out;
  auto diag = [&out](DiagCode code, std::string entity, std::string message, int line) {
    out.push_back(Diagnostic{code, std::move(entity), std::move(message), line, line > 0 ? 1 : 0});
  };

  // Schedule
  if (model.schedule.empty()) {
    diag(DiagCode::MissingSchedule, "", "scenario declares no intervals", where.schedule_line);
  } else {
    std::set<std::string> seen;
    for (std::size_t i = 0; i < model.schedule.size(); ++i) {
      const auto& iv = model.schedule[i];
      if (!seen.insert(iv.name).second)
        diag(DiagCode::DuplicateName, iv.name, "duplicate interval '" + iv.name + "'",
             where.schedule_line);
      if (iv.index != i)
        diag(DiagCode::SyntaxError, iv.name,
             "interval '" + iv.name + "' has index " + std::to_string(iv.index) +
                 ", expected " + std::to_string(i),
             where.schedule_line);
    }
  }

  // Arity consistency across every use, first use wins.
  std::map<std::string, std::size_t> arity;
  arity[kPlacementPredicate] = kPlacementArity;
  auto check_arity = [&](const Atom& a, int line) {
    auto [it, inserted] = arity.emplace(a.predicate, a.args.size());
    if (!inserted && it->second != a.args.size())
      diag(DiagCode::ArityMismatch, a.predicate,
           "predicate '" + a.predicate + "' used with arity " +
               std::to_string(a.args.size()) + ", expected " + std::to_string(it->second),
           line);
  };

  // Base facts
  for (std::size_t i = 0; i < model.base_facts.size(); ++i) {
    const auto& f = model.base_facts[i];
    int line = i < where.fact_lines.size() ? where.fact_lines[i] : 0;
    check_arity(f.atom, line);
    if (!f.atom.ground())
      diag(DiagCode::NonGroundAtom, f.atom.predicate,
           "base fact " + f.atom.key() + " contains variables", line);
    if (f.active_intervals) {
      if (f.active_intervals->empty())
        diag(DiagCode::EmptyIntervalSet, f.atom.predicate,
             "base fact " + f.atom.key() + " has an empty interval set", line);
      for (const auto& name : *f.active_intervals)
        if (!model.interval_index(name))
          diag(DiagCode::UnknownInterval, name,
               "base fact " + f.atom.key() + " references unknown interval '" + name + "'",
               line);
    }
  }

  // Rules
  std::set<std::string> rule_names;
  std::set<std::string> head_predicates;
  for (std::size_t i = 0; i < model.rules.size(); ++i) {
    const auto& r = model.rules[i];
    int line = i < where.rule_lines.size() ? where.rule_lines[i] : 0;
    if (!rule_names.insert(r.name).second)
      diag(DiagCode::DuplicateName, r.name, "duplicate rule '" + r.name + "'", line);
    head_predicates.insert(r.head.predicate);
    check_arity(r.head, line);
    if (r.body.empty())
      diag(DiagCode::EmptyRuleBody, r.name, "rule '" + r.name + "' has an empty body", line);
    std::set<std::string> body_vars;
    for (const auto& b : r.body) {
      check_arity(b, line);
      for (const auto& t : b.args)
        if (t.is_variable) body_vars.insert(t.text);
    }
    for (const auto& t : r.head.args)
      if (t.is_variable && !body_vars.count(t.text))
        diag(DiagCode::UnboundHeadVariable, r.name,
             "rule '" + r.name + "' binds head variable '" + t.text + "' nowhere in its body",
             line);
    if (!(r.cost >= 0.0) || !std::isfinite(r.cost))
      diag(DiagCode::BadNumber, r.name,
           "rule '" + r.name + "' has a negative or non-finite cost", line);
  }

  // Goal
  if (model.goal.predicate.empty()) {
    diag(DiagCode::MissingGoal, "", "scenario declares no goal", 0);
  } else {
    check_arity(model.goal, where.goal_line);
    if (!model.goal.ground())
      diag(DiagCode::NonGroundAtom, model.goal.predicate, "goal atom contains variables",
           where.goal_line);
    bool known = head_predicates.count(model.goal.predicate) > 0;
    for (const auto& f : model.base_facts)
      known = known || f.atom.predicate == model.goal.predicate;
    if (!known)
      diag(DiagCode::UnknownGoalPredicate, model.goal.predicate,
           "goal predicate '" + model.goal.predicate +
               "' is neither a rule head nor a base fact",
           where.goal_line);
  }

  // Persistent predicates
  for (const auto& p : model.persistent_predicates)
    if (!head_predicates.count(p))
      diag(DiagCode::PersistentNotRuleHead, p,
           "persistent predicate '" + p + "' never appears as a rule head",
           where.persistent_line);

  // Deployment variables
  std::set<std::string> declared;
  {
    auto add_atom = [&declared](const Atom& a) {
      for (const auto& t : a.args)
        if (!t.is_variable) declared.insert(t.text);
    };
    for (const auto& f : model.base_facts) add_atom(f.atom);
    for (const auto& r : model.rules) {
      add_atom(r.head);
      for (const auto& b : r.body) add_atom(b);
    }
    add_atom(model.goal);
  }
  std::set<std::string> devices;
  for (std::size_t i = 0; i < model.deployment_vars.size(); ++i) {
    const auto& d = model.deployment_vars[i];
    int line = i < where.deploy_lines.size() ? where.deploy_lines[i] : 0;
    if (!devices.insert(d.device).second)
      diag(DiagCode::DuplicateName, d.device,
           "device '" + d.device + "' deployed more than once", line);
    if (d.candidates.empty())
      diag(DiagCode::EmptyIntervalSet, d.device,
           "device '" + d.device + "' has no candidate zones", line);
    std::set<std::string> zones;
    for (const auto& z : d.candidates) {
      if (!zones.insert(z).second)
        diag(DiagCode::DuplicateName, z,
             "candidate zone '" + z + "' repeated for device '" + d.device + "'", line);
      if (!declared.count(z))
        diag(DiagCode::UnknownZone, z,
             "candidate zone '" + z + "' does not occur anywhere else in the scenario", line);
    }
  }

  // Vulnerability metadata
  for (const auto& [name, info] : model.vuln_metadata) {
    auto it = where.vuln_lines.find(name);
    int line = it != where.vuln_lines.end() ? it->second : 0;
    if (!(info.severity >= 0.0) || !std::isfinite(info.severity) ||
        !(info.complexity >= 0.0) || !std::isfinite(info.complexity))
      diag(DiagCode::BadNumber, name,
           "vulnerability '" + name + "' has a negative or non-finite metric", line);
  }

  return out;
}

}  // namespace detail

inline std::vector<Diagnostic> validate_model(const NetworkModel& model) {
  return detail::validate_model_impl(model, detail::SourceMap{});
}

// ---------------------------------------------------------------------------
// Parser

struct ParseResult {
  std::optional<NetworkModel> model;
  std::vector<Diagnostic> errors;

  bool ok() const { return model.has_value() && errors.empty(); }
};

namespace detail {

struct ParseFail {
  Diagnostic diagnostic;
};

class LineCursor {
 public:
  LineCursor(std::string_view text, int line) : text_(text), line_(line) {}

  int line() const { return line_; }
  int column() const { return static_cast<int>(pos_) + 1; }

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }

  bool at_end() {
    skip_ws();
    return pos_ >= text_.size();
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  bool try_consume(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  bool try_consume(std::string_view s) {
    skip_ws();
    if (text_.substr(pos_, s.size()) == s) {
      pos_ += s.size();
      return true;
    }
    return false;
  }

  // Consume `word` only when it is a whole identifier, not a prefix.
  bool try_keyword(std::string_view word) {
    skip_ws();
    if (text_.substr(pos_, word.size()) != word) return false;
    std::size_t after = pos_ + word.size();
    if (after < text_.size() &&
        (std::isalnum(static_cast<unsigned char>(text_[after])) || text_[after] == '_'))
      return false;
    pos_ = after;
    return true;
  }

  void expect(char c, const char* what) {
    if (!try_consume(c)) fail(std::string("expected '") + c + "' " + what);
  }

  [[noreturn]] void fail(std::string message) {
    throw ParseFail{Diagnostic{DiagCode::SyntaxError, "", std::move(message), line_, column()}};
  }

  [[noreturn]] void fail_as(DiagCode code, std::string entity, std::string message) {
    throw ParseFail{Diagnostic{code, std::move(entity), std::move(message), line_, column()}};
  }

  std::string identifier(const char* what) {
    skip_ws();
    std::size_t start = pos_;
    if (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
    }
    if (start == pos_) fail(std::string("expected ") + what);
    return std::string(text_.substr(start, pos_ - start));
  }

  double number(const char* what) {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
      ++pos_;
    if (start == pos_)
      fail_as(DiagCode::BadNumber, "", std::string("expected a non-negative number for ") + what);
    double value = 0.0;
    auto sv = text_.substr(start, pos_ - start);
    auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), value);
    if (ec != std::errc() || ptr != sv.data() + sv.size() || !std::isfinite(value) || value < 0.0) {
      pos_ = start;
      fail_as(DiagCode::BadNumber, "", "malformed number '" + std::string(sv) + "'");
    }
    return value;
  }

  void expect_end() {
    if (!at_end()) fail("unexpected trailing text");
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  int line_;
};

inline bool is_variable_name(const std::string& name) {
  return !name.empty() && std::isupper(static_cast<unsigned char>(name[0]));
}

inline Term parse_term(LineCursor& cur, bool allow_variables) {
  std::string name = cur.identifier("a term");
  if (is_variable_name(name)) {
    if (!allow_variables) cur.fail("expected a constant, got variable '" + name + "'");
    return make_variable(std::move(name));
  }
  return make_constant(std::move(name));
}

inline Atom parse_atom(LineCursor& cur, bool allow_variables, bool require_args) {
  Atom atom;
  atom.predicate = cur.identifier("a predicate name");
  if (is_variable_name(atom.predicate))
    cur.fail("predicate names start with a lowercase letter, got '" + atom.predicate + "'");
  cur.expect('(', "after predicate name");
  if (!cur.try_consume(')')) {
    atom.args.push_back(parse_term(cur, allow_variables));
    while (cur.try_consume(',')) atom.args.push_back(parse_term(cur, allow_variables));
    cur.expect(')', "to close the argument list");
  }
  if (require_args && atom.args.empty()) cur.fail("expected at least one argument");
  return atom;
}

}  // namespace detail

// Parse a scenario file. Total: any input yields either a validated model or
// a located diagnostic, never a crash. Grammar errors stop at the first
// offending line; whole-model checks run afterwards and report everything.
//
// With validate=false only the grammar and per-statement checks run; use
// validate_model on the result to list semantic diagnostics separately.
inline ParseResult parse_scenario(std::string_view text, bool validate = true) {
  using detail::LineCursor;
  NetworkModel model;
  detail::SourceMap where;
  std::vector<Diagnostic> errors;

  // Progressive arity checking in file order, so mismatches point at the
  // exact line of the second, conflicting use.
  std::map<std::string, std::size_t> arity;
  arity[kPlacementPredicate] = kPlacementArity;
  std::set<std::string> rule_names;
  std::set<std::string> devices;

  bool saw_schedule = false;
  bool saw_goal = false;

  try {
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t eol = text.find('\n', pos);
      std::string_view raw = text.substr(pos, eol == std::string_view::npos ? text.size() - pos
                                                                            : eol - pos);
      pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
      ++line_no;
      if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
      if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);

      LineCursor cur(raw, line_no);
      if (cur.at_end()) continue;

      auto check_arity = [&](const Atom& a) {
        auto [it, inserted] = arity.emplace(a.predicate, a.args.size());
        if (!inserted && it->second != a.args.size())
          cur.fail_as(DiagCode::ArityMismatch, a.predicate,
                      "predicate '" + a.predicate + "' used with arity " +
                          std::to_string(a.args.size()) + ", expected " +
                          std::to_string(it->second));
      };

      std::string keyword = cur.identifier("a statement keyword");
      if (keyword == "intervals") {
        cur.expect(':', "after 'intervals'");
        if (saw_schedule)
          cur.fail_as(DiagCode::DuplicateName, "intervals", "schedule declared twice");
        saw_schedule = true;
        where.schedule_line = line_no;
        std::set<std::string> seen;
        do {
          std::string name = cur.identifier("an interval name");
          if (!seen.insert(name).second)
            cur.fail_as(DiagCode::DuplicateName, name, "duplicate interval '" + name + "'");
          model.schedule.push_back(Interval{name, model.schedule.size()});
        } while (cur.try_consume(','));
        cur.expect_end();
      } else if (keyword == "fact") {
        BaseFact fact;
        fact.atom = detail::parse_atom(cur, /*allow_variables=*/false, /*require_args=*/true);
        check_arity(fact.atom);
        if (cur.try_consume('@')) {
          std::set<std::string> tags;
          do {
            std::string name = cur.identifier("an interval name");
            if (!saw_schedule || !std::any_of(model.schedule.begin(), model.schedule.end(),
                                              [&](const Interval& iv) { return iv.name == name; }))
              cur.fail_as(DiagCode::UnknownInterval, name,
                          "fact tagged with unknown interval '" + name + "'");
            tags.insert(std::move(name));
          } while (cur.try_consume(','));
          fact.active_intervals = std::move(tags);
        }
        cur.expect_end();
        model.base_facts.push_back(std::move(fact));
        where.fact_lines.push_back(line_no);
      } else if (keyword == "rule") {
        Rule rule;
        rule.name = cur.identifier("a rule name");
        if (!rule_names.insert(rule.name).second)
          cur.fail_as(DiagCode::DuplicateName, rule.name, "duplicate rule '" + rule.name + "'");
        if (cur.try_keyword("cost")) {
          cur.expect('=', "after 'cost'");
          rule.cost = cur.number("cost");
        }
        cur.expect(':', "before the rule head");
        rule.head = detail::parse_atom(cur, /*allow_variables=*/true, /*require_args=*/false);
        check_arity(rule.head);
        if (!cur.try_consume(":-")) cur.fail("expected ':-' between head and body");
        std::set<std::string> body_vars;
        do {
          Atom b = detail::parse_atom(cur, /*allow_variables=*/true, /*require_args=*/false);
          check_arity(b);
          for (const auto& t : b.args)
            if (t.is_variable) body_vars.insert(t.text);
          rule.body.push_back(std::move(b));
        } while (cur.try_consume(','));
        cur.expect('.', "to end the rule");
        cur.expect_end();
        for (const auto& t : rule.head.args)
          if (t.is_variable && !body_vars.count(t.text))
            cur.fail_as(DiagCode::UnboundHeadVariable, rule.name,
                        "rule '" + rule.name + "' binds head variable '" + t.text +
                            "' nowhere in its body");
        model.rules.push_back(std::move(rule));
        where.rule_lines.push_back(line_no);
      } else if (keyword == "persistent") {
        where.persistent_line = line_no;
        do {
          model.persistent_predicates.insert(cur.identifier("a predicate name"));
        } while (cur.try_consume(','));
        cur.expect_end();
      } else if (keyword == "goal") {
        cur.expect(':', "after 'goal'");
        if (saw_goal) cur.fail_as(DiagCode::DuplicateName, "goal", "goal declared twice");
        saw_goal = true;
        where.goal_line = line_no;
        model.goal = detail::parse_atom(cur, /*allow_variables=*/false, /*require_args=*/false);
        check_arity(model.goal);
        cur.expect_end();
      } else if (keyword == "deploy") {
        DeploymentVariable var;
        var.device = cur.identifier("a device name");
        if (!devices.insert(var.device).second)
          cur.fail_as(DiagCode::DuplicateName, var.device,
                      "device '" + var.device + "' deployed more than once");
        if (!cur.try_keyword("in")) cur.fail("expected 'in' after the device name");
        cur.expect('{', "to open the zone list");
        std::set<std::string> zones;
        do {
          std::string zone = cur.identifier("a zone name");
          if (!zones.insert(zone).second)
            cur.fail_as(DiagCode::DuplicateName, zone,
                        "candidate zone '" + zone + "' repeated for device '" + var.device + "'");
          var.candidates.push_back(std::move(zone));
        } while (cur.try_consume(','));
        cur.expect('}', "to close the zone list");
        cur.expect_end();
        model.deployment_vars.push_back(std::move(var));
        where.deploy_lines.push_back(line_no);
      } else if (keyword == "vuln") {
        std::string name = cur.identifier("a vulnerability name");
        if (model.vuln_metadata.count(name))
          cur.fail_as(DiagCode::DuplicateName, name,
                      "vulnerability '" + name + "' declared twice");
        VulnInfo info;
        if (!cur.try_keyword("severity")) cur.fail("expected 'severity'");
        cur.expect('=', "after 'severity'");
        info.severity = cur.number("severity");
        if (!cur.try_keyword("complexity")) cur.fail("expected 'complexity'");
        cur.expect('=', "after 'complexity'");
        info.complexity = cur.number("complexity");
        cur.expect_end();
        where.vuln_lines.emplace(name, line_no);
        model.vuln_metadata.emplace(std::move(name), info);
      } else {
        cur.fail("unknown statement '" + keyword + "'");
      }
    }

    if (!saw_schedule)
      throw detail::ParseFail{Diagnostic{DiagCode::MissingSchedule, "",
                                         "scenario declares no intervals", 0, 0}};
    if (!saw_goal)
      throw detail::ParseFail{
          Diagnostic{DiagCode::MissingGoal, "", "scenario declares no goal", 0, 0}};
  } catch (const detail::ParseFail& fail) {
    return ParseResult{std::nullopt, {fail.diagnostic}};
  }

  if (validate) {
    auto diags = detail::validate_model_impl(model, where);
    if (!diags.empty()) return ParseResult{std::nullopt, std::move(diags)};
  }
  return ParseResult{std::move(model), std::move(errors)};
}

// ---------------------------------------------------------------------------
// Serializer (canonical form; reparsing yields a field-identical model)

inline std::string serialize_scenario(const NetworkModel& model) {
  std::string out;
  out += "intervals:";
  for (std::size_t i = 0; i < model.schedule.size(); ++i) {
    out += i ? ", " : " ";
    out += model.schedule[i].name;
  }
  out += '\n';

  auto atom_text = [](const Atom& a) { return a.key(); };

  for (const auto& f : model.base_facts) {
    out += "fact ";
    out += atom_text(f.atom);
    if (f.active_intervals) {
      out += " @";
      // Emit tags in schedule order so output is canonical.
      bool first = true;
      for (const auto& iv : model.schedule) {
        if (!f.active_intervals->count(iv.name)) continue;
        out += first ? " " : ", ";
        out += iv.name;
        first = false;
      }
      // Tags naming unknown intervals (invalid models) still round-trip.
      for (const auto& name : *f.active_intervals) {
        if (model.interval_index(name)) continue;
        out += first ? " " : ", ";
        out += name;
        first = false;
      }
    }
    out += '\n';
  }

  for (const auto& r : model.rules) {
    out += "rule ";
    out += r.name;
    if (r.cost != 1.0) {
      out += " cost=";
      out += format_number(r.cost);
    }
    out += ": ";
    out += atom_text(r.head);
    out += " :- ";
    for (std::size_t i = 0; i < r.body.size(); ++i) {
      if (i) out += ", ";
      out += atom_text(r.body[i]);
    }
    out += ".\n";
  }

  if (!model.persistent_predicates.empty()) {
    out += "persistent";
    bool first = true;
    for (const auto& p : model.persistent_predicates) {
      out += first ? " " : ", ";
      out += p;
      first = false;
    }
    out += '\n';
  }

  if (!model.goal.predicate.empty()) {
    out += "goal: ";
    out += atom_text(model.goal);
    out += '\n';
  }

  for (const auto& d : model.deployment_vars) {
    out += "deploy ";
    out += d.device;
    out += " in { ";
    for (std::size_t i = 0; i < d.candidates.size(); ++i) {
      if (i) out += ", ";
      out += d.candidates[i];
    }
    out += " }\n";
  }

  for (const auto& [name, info] : model.vuln_metadata) {
    out += "vuln ";
    out += name;
    out += " severity=";
    out += format_number(info.severity);
    out += " complexity=";
    out += format_number(info.complexity);
    out += '\n';
  }

  return out;
}

}  // namespace atg
