// SPDX-License-Identifier: Apache-2.0
#include "pcct/error.hpp"

namespace pcct {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::argument: return "argument";
    case ErrorKind::domain: return "domain";
    case ErrorKind::range: return "range";
    case ErrorKind::unsupported: return "unsupported";
    case ErrorKind::fit_failure: return "fit_failure";
    case ErrorKind::undefined_indices: return "undefined_indices";
    case ErrorKind::non_convergence: return "non_convergence";
    case ErrorKind::topology: return "topology";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::search_range: return "search_range";
    case ErrorKind::io: return "io";
    case ErrorKind::config: return "config";
    case ErrorKind::study_aborted: return "study_aborted";
  }
  return "unknown";
}

}  // namespace pcct
