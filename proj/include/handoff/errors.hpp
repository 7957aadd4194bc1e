#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace handoff {

// Lookup of an id that does not exist in the containing object.
class not_found_error : public std::runtime_error {
 public:
  explicit not_found_error(const std::string& what) : std::runtime_error(what) {}
};

// Two models that must agree (state sets, labels, initial distributions)
// do not; `mismatches` lists every disagreement found.
class composition_error : public std::runtime_error {
 public:
  composition_error(const std::string& what, std::vector<std::string> mismatches)
      : std::runtime_error(what + ": " + join(mismatches)), mismatches_(std::move(mismatches)) {}

  const std::vector<std::string>& mismatches() const { return mismatches_; }

 private:
  static std::string join(const std::vector<std::string>& parts) {
    std::string out;
    for (size_t i = 0; i < parts.size(); ++i) {
      if (i) out += "; ";
      out += parts[i];
    }
    return out;
  }
  std::vector<std::string> mismatches_;
};

// Numerical breakdown inside the LP solver (singular basis, iteration limit).
// Infeasible/unbounded programs are reported through the solution status,
// not through this exception.
class solver_error : public std::runtime_error {
 public:
  explicit solver_error(const std::string& what) : std::runtime_error(what) {}
};

// File or schema problem while reading external model files.
class io_error : public std::runtime_error {
 public:
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

// A schema violation at a known location inside a JSON document.
class schema_error : public io_error {
 public:
  schema_error(const std::string& where, const std::string& what)
      : io_error(where + ": " + what), where_(where) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

// Internal consistency check failed (residual too large, leaked probability).
class invariant_error : public std::runtime_error {
 public:
  explicit invariant_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace handoff
