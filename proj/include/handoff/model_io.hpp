#pragma once

#include <array>
#include <string>

#include "handoff/simulate.hpp"

namespace handoff {

enum class ModelKind { labeled_mdp, cognitive, automaton, bundle };

/** Whole-file read/write; io_error names the path on failure. */
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

/** What a JSON document claims to be: an explicit "type" field wins;
 *  otherwise "models" means bundle, "pairs" automaton, "events" cognitive,
 *  anything else a labeled MDP. */
ModelKind sniff_kind(const std::string& text, const std::string& where);

/**
 * Parsers are strict: unknown fields, wrong JSON types, and duplicate
 * transition triples are schema_errors naming the offending JSON path.
 * Parsing checks shape only; semantic validation stays with the validate_*
 * functions.
 */
LabeledMdp parse_labeled_mdp(const std::string& text, const std::string& where);
CognitiveModel parse_cognitive(const std::string& text, const std::string& where);
RabinAutomaton parse_automaton(const std::string& text, const std::string& where);

/** Canonical serialization: fixed field order, sorted keys, newline-
 *  terminated. parse(serialize(m)) == m for every valid model. */
std::string serialize(const LabeledMdp& m);
std::string serialize(const CognitiveModel& c);
std::string serialize(const RabinAutomaton& a);

struct InputModels {
  LabeledMdp ma;
  LabeledMdp mh;
  CognitiveModel att;
  RabinAutomaton dra;

  bool operator==(const InputModels&) const = default;
};

/**
 * Self-contained result of a synthesis run: the four input models plus the
 * synthesized policies and tables, everything keyed by printable ids so the
 * file is meaningful on its own and executable later without re-solving.
 */
struct Bundle {
  InputModels models;
  std::array<double, 2> weights{};
  std::array<double, 2> lambda{};
  std::array<double, 2> recovered{};
  double eps_aug = kDefaultAugmentation;
  double eps_visit = kDefaultVisitFloor;
  double scalar_objective = 0.0;
  ValueProfile profile;
  std::vector<std::string> warnings;
  std::map<Id, std::map<Id, double>> stage1;  // state id -> action id -> probability

  struct Component {
    std::vector<Id> states;
    std::map<Id, std::map<Id, double>> policy;
    std::map<Id, double> terminal;  // this component's own per-state cost
    double floor = kDefaultVisitFloor;
    bool irreducible = false;

    bool operator==(const Component&) const = default;
  };
  std::vector<Component> components;
  std::map<Id, double> terminal;   // best cost over containing components
  std::map<Id, int> component_of;  // component attaining it

  bool operator==(const Bundle&) const = default;
};

/** Packages a solved point (point.eps_aug is carried along). Throws
 *  invariant_error on an unsolved one. */
Bundle make_bundle(const InputModels& in, const TwoStage& ts, const SweepPoint& point,
                   double eps_visit);

std::string serialize(const Bundle& b);
Bundle parse_bundle(const std::string& text, const std::string& where);

/** A bundle re-attached to its rebuilt product, ready to execute. */
struct RunnableBundle {
  SharedAutonomyMdp sa;
  ProductMdp product;
  RewardVector rewards;
  SwitchingPolicy policy;
};

/** Rebuilds composition and product from the embedded models and resolves
 *  the id-keyed policies against them. A bundle that references states or
 *  actions its own models do not define is a schema_error. */
RunnableBundle instantiate(const Bundle& b);

/** CSV with header w1,w2,lambda1,lambda2,u1,u2 at 12 significant digits;
 *  unsolved points carry nan profiles plus a trailing '#' comment line. */
std::string sweep_csv(const std::vector<SweepPoint>& points);

/** Plain scatter of the solved (u1, u2) profiles. */
std::string sweep_svg(const std::vector<SweepPoint>& points);

/** One weight pair per line, separated by a comma or whitespace; blank
 *  lines and '#' comments are skipped. */
std::vector<std::array<double, 2>> parse_weights_lines(const std::string& text,
                                                       const std::string& where);

std::string estimates_json(const ProductMdp& p, const Estimate& est, const SimOptions& opt);

/** Line-delimited trace: one meta record, then one record per step. */
std::string trace_lines(const ProductMdp& p, const Trace& tr);

}  // namespace handoff
