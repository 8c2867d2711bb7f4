#include "warpq/error.hpp"

namespace warpq {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kIo: return "io";
    case ErrorKind::kUnsupportedFormat: return "unsupported_format";
    case ErrorKind::kEmptyAudio: return "empty_audio";
    case ErrorKind::kInvalidArgument: return "invalid_argument";
    case ErrorKind::kNoSpeech: return "no_speech";
    case ErrorKind::kNoAlignment: return "no_alignment";
    case ErrorKind::kDimensionMismatch: return "dimension_mismatch";
    case ErrorKind::kInternal: return "internal";
  }
  return "unknown";
}

}  // namespace warpq
