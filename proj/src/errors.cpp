#include "qpat/errors.hpp"

namespace qpat {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config: return "config error";
    case ErrorKind::invalid_domain: return "invalid-domain error";
    case ErrorKind::pole_placement: return "pole-placement error";
    case ErrorKind::empty_region: return "empty-region error";
    case ErrorKind::geometry: return "geometry error";
    case ErrorKind::precondition: return "precondition violation";
    case ErrorKind::singular_phase: return "singular-phase error";
    case ErrorKind::h_too_small: return "h-too-small error";
    case ErrorKind::amplitude: return "amplitude-construction error";
    case ErrorKind::format: return "format error";
    case ErrorKind::io: return "I/O error";
    case ErrorKind::stencil: return "stencil error";
    case ErrorKind::solver: return "solver error";
    case ErrorKind::degenerate_field: return "degenerate-field error";
    case ErrorKind::ill_conditioned: return "ill-conditioned-system error";
    case ErrorKind::partial_coverage: return "partial-coverage error";
    case ErrorKind::non_exiting_trace: return "non-exiting-trace error";
    case ErrorKind::boundary_data: return "boundary-data error";
    case ErrorKind::unresolvable_node: return "unresolvable-node error";
    case ErrorKind::zero_eigenvalue: return "zero-eigenvalue error";
    case ErrorKind::positivity: return "positivity error";
    case ErrorKind::nonpositive_coefficient: return "non-positive-coefficient error";
  }
  return "error";
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config:
    case ErrorKind::invalid_domain:
    case ErrorKind::pole_placement:
    case ErrorKind::empty_region:
    case ErrorKind::geometry:
    case ErrorKind::precondition:
    case ErrorKind::singular_phase:
    case ErrorKind::h_too_small:
    case ErrorKind::amplitude:
      return 2;
    case ErrorKind::stencil:
    case ErrorKind::solver:
      return 3;
    case ErrorKind::degenerate_field:
    case ErrorKind::ill_conditioned:
      return 4;
    case ErrorKind::partial_coverage:
    case ErrorKind::non_exiting_trace:
    case ErrorKind::boundary_data:
    case ErrorKind::unresolvable_node:
      return 5;
    case ErrorKind::zero_eigenvalue:
    case ErrorKind::positivity:
    case ErrorKind::nonpositive_coefficient:
      return 6;
    case ErrorKind::format:
    case ErrorKind::io:
      return 7;
  }
  return 1;
}

}  // namespace qpat
