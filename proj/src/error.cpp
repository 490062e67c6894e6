#include "ntmal/error.hpp"

namespace ntmal {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptyTrace: return "EmptyTrace";
    case ErrorKind::Io: return "IoError";
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::EmptyVocabulary: return "EmptyVocabulary";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DegenerateLabels: return "DegenerateLabels";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::SingleClass: return "SingleClass";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::VersionMismatch: return "VersionMismatch";
  }
  return "Error";
}

}  // namespace ntmal
