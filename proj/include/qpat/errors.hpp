#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qpat {

/// Failure classes raised by the library. Each maps onto one CLI exit code.
enum class ErrorKind {
  config,
  invalid_domain,
  pole_placement,
  empty_region,
  geometry,
  precondition,
  singular_phase,
  h_too_small,
  amplitude,
  format,
  io,
  stencil,
  solver,
  degenerate_field,
  ill_conditioned,
  partial_coverage,
  non_exiting_trace,
  boundary_data,
  unresolvable_node,
  zero_eigenvalue,
  positivity,
  nonpositive_coefficient,
};

std::string_view to_string(ErrorKind kind);

/// Exit code table of the `qpat` CLI:
///   0 ok, 2 config, 3 solver, 4 degenerate field, 5 coverage,
///   6 positivity / eigenvalue, 7 I/O.
int exit_code(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) throw Error(kind, what);
}

}  // namespace qpat
