#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>

namespace handoff {

using Id = std::string;

// Tolerance for probability normalization checks.
inline constexpr double kProbTol = 1e-9;

/**
 * Finite probability distribution over string ids.
 *
 * Stored as an ordered map so that iteration order (and therefore every
 * algorithm that walks a distribution) is deterministic. The struct itself
 * does not enforce normalization; validation reports violations as data so
 * that a malformed model file can be fully diagnosed in one pass.
 */
struct Distribution {
  std::map<Id, double> entries;

  Distribution() = default;
  explicit Distribution(std::map<Id, double> e) : entries(std::move(e)) {}

  double prob(const Id& id) const {
    auto it = entries.find(id);
    return it == entries.end() ? 0.0 : it->second;
  }

  double total() const {
    double s = 0.0;
    for (const auto& [id, p] : entries) s += p;
    return s;
  }

  // Entries with probability exactly zero are kept out of the support.
  bool in_support(const Id& id) const { return prob(id) > 0.0; }

  /** Returns a description of the first defect, or nullopt if the
   *  distribution is a valid probability distribution within kProbTol. */
  std::optional<std::string> defect() const {
    if (entries.empty()) return "empty distribution";
    for (const auto& [id, p] : entries) {
      if (!std::isfinite(p)) return "non-finite probability at '" + id + "'";
      if (p < 0.0) return "negative probability at '" + id + "'";
    }
    double s = total();
    if (std::abs(s - 1.0) > kProbTol)
      return "probabilities sum to " + std::to_string(s) + ", expected 1";
    return std::nullopt;
  }

  bool valid() const { return !defect().has_value(); }

  bool operator==(const Distribution&) const = default;
};

/** Inverse-CDF sample: maps u in [0,1) to an id, walking entries in order.
 *  Deterministic given the same u; the last positive entry absorbs rounding. */
inline Id sample(const Distribution& d, double u) {
  double acc = 0.0;
  const Id* last = nullptr;
  for (const auto& [id, p] : d.entries) {
    if (p <= 0.0) continue;
    acc += p;
    last = &id;
    if (u < acc) return id;
  }
  return last ? *last : Id{};
}

}  // namespace handoff
