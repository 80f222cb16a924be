#include "dpd/error.hpp"

namespace dpd {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::configuration: return "configuration";
    case ErrorKind::degenerate_input: return "degenerate-input";
    case ErrorKind::insufficient_data: return "insufficient-data";
    case ErrorKind::conditioning: return "conditioning";
    case ErrorKind::divergence: return "divergence";
    case ErrorKind::correctness: return "correctness";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

}  // namespace dpd
