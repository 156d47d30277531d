#include "hstat/errors.hpp"

namespace hstat {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Validity: return "validity";
    case ErrorKind::Degeneracy: return "degeneracy";
    case ErrorKind::Stencil: return "stencil";
    case ErrorKind::Support: return "support";
    case ErrorKind::Parameter: return "parameter";
    case ErrorKind::Shape: return "shape";
    case ErrorKind::Ellipticity: return "ellipticity";
    case ErrorKind::Assembly: return "assembly";
    case ErrorKind::Hypothesis: return "hypothesis";
    case ErrorKind::Steepness: return "steepness";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

}  // namespace hstat
