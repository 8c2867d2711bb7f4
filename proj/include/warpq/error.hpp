#pragma once

#include <stdexcept>
#include <string>

namespace warpq {

enum class ErrorKind {
  kIo,                // file missing or unreadable
  kUnsupportedFormat, // container/encoding we refuse to decode
  kEmptyAudio,        // zero-length audio
  kInvalidArgument,
  kNoSpeech,          // VAD removed everything
  kNoAlignment,       // SDTW last row entirely unreachable
  kDimensionMismatch,
  kInternal,
};

const char* to_string(ErrorKind kind);

/// Exception carrying a machine-checkable kind alongside the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace warpq
