#pragma once

#include <map>

#include "handoff/compose.hpp"

namespace handoff {

/**
 * Memoryless randomized policy over a product MDP. Keys are product state
 * indices; per state, a distribution over global action indices whose
 * support must be enabled at the state.
 */
struct MemorylessPolicy {
  std::map<int, std::map<int, double>> choice;

  bool defined_at(int v) const { return choice.count(v) > 0; }

  const std::map<int, double>& at(int v) const { return choice.at(v); }

  /** Most likely action at v; ties resolved toward the smaller index. */
  int argmax(int v) const {
    int best = -1;
    double bp = -1.0;
    for (const auto& [a, pr] : choice.at(v))
      if (pr > bp + 1e-15) {
        bp = pr;
        best = a;
      }
    return best;
  }
};

/** Structural validation of a policy against its product: probabilities form
 *  a distribution per state and the support is enabled. */
std::vector<Violation> validate_policy(const ProductMdp& p, const MemorylessPolicy& g);

}  // namespace handoff
