#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace handoff {

enum class Rel { le, eq, ge };
enum class Sense { minimize, maximize };

enum class LpStatus { optimal, infeasible, unbounded };

/**
 * Sparse linear program over real variables with individual lower bounds
 * (default 0) and no upper bounds. Built incrementally; variables and
 * constraints are addressed by dense indices in insertion order.
 */
class LinearProgram {
 public:
  int add_variable(std::string name, double lower = 0.0);

  /** Sets the objective coefficient of one variable (default 0). */
  void set_objective_coeff(int var, double coeff);
  void set_objective_constant(double c) { objective_constant_ = c; }
  void set_sense(Sense s) { sense_ = s; }

  /** Adds a constraint sum(coeffs) rel rhs. Duplicate variable entries are
   *  accumulated. Returns the constraint index. */
  int add_constraint(const std::vector<std::pair<int, double>>& coeffs, Rel rel,
                     double rhs);

  int num_variables() const { return static_cast<int>(lower_.size()); }
  int num_constraints() const { return static_cast<int>(rhs_.size()); }
  const std::string& variable_name(int v) const { return names_.at(v); }
  double lower_bound(int v) const { return lower_.at(v); }
  double objective_coeff(int v) const { return objective_.at(v); }
  double objective_constant() const { return objective_constant_; }
  Sense sense() const { return sense_; }

  /** Debug dump in CPLEX LP text format. */
  void write_lp_format(std::ostream& os) const;

 private:
  friend struct SimplexSolver;
  std::vector<std::string> names_;
  std::vector<double> lower_;
  std::vector<double> objective_;
  double objective_constant_ = 0.0;
  Sense sense_ = Sense::minimize;
  std::vector<std::vector<std::pair<int, double>>> rows_;
  std::vector<Rel> rels_;
  std::vector<double> rhs_;
};

struct LpSolution {
  LpStatus status = LpStatus::optimal;
  double objective = 0.0;        // includes the objective constant
  std::vector<double> values;    // per variable; empty unless optimal
  std::vector<double> duals;     // per constraint, original row order/signs
  double dual_objective = 0.0;   // dual bound in original coordinates
  long iterations = 0;
};

/**
 * Two-phase revised simplex with a dense basis inverse, Dantzig pricing and
 * Bland's rule engaged on degenerate streaks for anti-cycling. Deterministic
 * for a fixed program. Throws solver_error on numerical breakdown (singular
 * basis, iteration limit); infeasibility and unboundedness are statuses.
 */
LpSolution solve(const LinearProgram& lp);

// Solver tolerances, fixed for reproducibility.
inline constexpr double kLpPivotTol = 1e-9;
inline constexpr double kLpFeasTol = 1e-7;

}  // namespace handoff
