#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace kerrcat {

/// Invalid input: violated precondition, wrong dimension, unphysical parameter.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A numerical procedure failed (eigensolver, root search, integrator, ...).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-fatal diagnostics (truncation tails, clipped eigenvalues). The default
/// sink prints to stderr; tests and the CLI may install their own.
using WarningSink = std::function<void(const std::string&)>;

void set_warning_sink(WarningSink sink);
void warn(const std::string& message);

}  // namespace kerrcat
