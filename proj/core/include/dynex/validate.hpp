#pragma once

#include "dynex/error.hpp"
#include "dynex/model.hpp"

#include <string>
#include <vector>

namespace dynex {

enum class Severity { error, warning };

struct Finding {
  Severity severity;
  std::string location; // declaration id, or "model"
  std::string message;

  friend bool operator==(const Finding&, const Finding&) = default;
};

struct ValidationReport {
  std::vector<Finding> findings;

  bool ok() const noexcept;
  std::size_t error_count() const noexcept;
  std::vector<Finding> errors() const;

  friend bool operator==(const ValidationReport&, const ValidationReport&) = default;
};

// Structural checks (identifiers, undeclared references, algebraic cycles,
// arities, units, lookups) and, when those pass, a numeric check that every
// flow is finite at the initial point. Never throws for model defects.
ValidationReport validate_model(const ModelSpec& spec);

// Auxiliary ids ordered so that each one follows every auxiliary it reads.
// Ties go to declaration order. References inside SMOOTH/DELAY calls count.
// Throws CycleError on an algebraic cycle.
std::vector<std::string> evaluation_order(const ModelSpec& spec);

class ValidationErrors : public Error {
public:
  explicit ValidationErrors(ValidationReport report);
  const ValidationReport& report() const noexcept { return report_; }

private:
  ValidationReport report_;
};

// Throws ValidationErrors when the report has errors.
void require_valid(const ModelSpec& spec);

} // namespace dynex
