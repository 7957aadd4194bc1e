#pragma once

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "handoff/end_components.hpp"
#include "handoff/errors.hpp"
#include "handoff/lp.hpp"
#include "handoff/policy.hpp"

namespace handoff {

/** Raised when the per-state visitation floor makes the occupancy LP
 *  infeasible at the current epsilon; callers may retry with a smaller one. */
class visit_floor_error : public solver_error {
 public:
  explicit visit_floor_error(double eps)
      : solver_error("visitation floor " + std::to_string(eps) +
                     " makes the occupancy program infeasible"),
        eps_(eps) {}
  double eps() const { return eps_; }

 private:
  double eps_;
};

inline constexpr double kDefaultVisitFloor = 1e-6;
inline constexpr double kVisitFloorMin = 1e-15;

struct AecLp {
  LinearProgram lp;
  // (product state index, row position within p.rows[v]) -> LP column
  std::map<std::pair<int, int>, int> var_of;
};

/**
 * Discounted occupancy program for one accepting component: minimize expected
 * attention cost over stationary policies that keep the chain inside the
 * component, with source weights eta and a per-state visitation floor.
 *
 * Variables range over the component's staying actions only, so any feasible
 * point already certifies closure.
 */
AecLp build_aec_lp(const ProductMdp& p, const EndComponent& ec,
                   const std::map<int, double>& eta, double eps_visit);

struct AecSolution {
  MemorylessPolicy policy;
  std::map<std::pair<int, int>, double> occupancy;  // (state, action) -> mass
  double objective = 0.0;                           // eta-weighted cost
  bool irreducible = false;  // whole component is one recurrent class
};

/**
 * Solve the occupancy program with uniform eta over the component and extract
 * the stationary policy x(v,a)/sum_a x(v,a). The floor guarantees every state
 * carries mass, so no row needs a fallback. Throws visit_floor_error when the
 * floor is too aggressive for the component's discount structure.
 */
AecSolution solve_aec_policy(const ProductMdp& p, const EndComponent& ec,
                             double eps_visit = kDefaultVisitFloor);

/**
 * Per-transition value used by policy evaluation: called with the source
 * state, the row position within p.rows[v], and the successor position
 * within that row.
 */
using TransitionValue = std::function<double(int, int, std::size_t)>;

/**
 * Exact evaluation of the discounted value of a stationary policy restricted
 * to `domain`. Probability that leaves the domain is treated as terminal with
 * value zero (its one-step transition value still accrues). When
 * `require_closed` is set, any leaving probability above tolerance is an
 * invariant violation instead.
 *
 * Solves (I - gamma P_g) U = r_g by dense elimination and checks the residual
 * to 1e-10; the system is strictly diagonally dominant for gamma < 1, so the
 * solve cannot fail on a valid policy.
 */
std::map<int, double> evaluate_policy(const ProductMdp& p, const std::vector<int>& domain,
                                      const MemorylessPolicy& g, const TransitionValue& value,
                                      bool require_closed);

struct TerminalCosts {
  std::vector<EndComponent> components;   // the accepting components, in id order
  std::vector<AecSolution> solutions;     // aligned with components
  std::vector<double> floors;             // visitation floor each solve settled on
  std::vector<std::map<int, double>> component_values;  // per-component state values
  std::map<int, double> value;            // state -> best achievable cost
  std::map<int, int> component_of;        // state -> component attaining it
};

/**
 * Optimal steady-state attention cost for every state covered by some
 * accepting component. States in several components take the minimum; exact
 * ties resolve toward the smaller component id. Each component solve retries
 * with a tenfold smaller visitation floor when infeasible, down to 1e-15.
 */
TerminalCosts terminal_costs(const ProductMdp& p, const std::vector<EndComponent>& aecs,
                             double eps_visit = kDefaultVisitFloor);

}  // namespace handoff
