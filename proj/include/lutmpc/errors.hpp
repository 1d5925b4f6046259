#pragma once

#include <stdexcept>
#include <string>

namespace lutmpc {

// Every failure the protocols can hit maps to one of these codes. Errors are
// thrown, never encoded in return values, so a bug can't silently corrupt a
// share: either the operation completed or the caller sees a typed error.
enum class Errc {
  frame_corrupt,        // wire frame failed structural validation
  missing_key,          // derived lookup key not present in the table
  table_exhausted,      // single-use table already consumed / no tables left
  budget_exhausted,     // privacy budget spent and no further table available
  invalid_point,        // peer sent an off-curve / identity curve point
  triple_reuse,         // a one-shot multiplication triple was used twice
  version_mismatch,     // serialized artifact written by an incompatible version
  corrupt_bundle,       // checksum or structural failure in an offline bundle
  insufficient_samples, // audit asked for a ratio the trace cannot support
  encode_range,         // value outside the representable fixed-point range
  io_error,             // socket / file system failure
  bad_config,           // caller passed an invalid configuration
  under_provisioned,    // offline bundle lacks material the run needs
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

#define LUTMPC_DEFINE_ERROR(Name, code)                                  \
  class Name : public Error {                                            \
   public:                                                               \
    explicit Name(const std::string& what) : Error(Errc::code, what) {}  \
  }

LUTMPC_DEFINE_ERROR(FrameCorrupt, frame_corrupt);
LUTMPC_DEFINE_ERROR(MissingKey, missing_key);
LUTMPC_DEFINE_ERROR(TableExhausted, table_exhausted);
LUTMPC_DEFINE_ERROR(BudgetExhausted, budget_exhausted);
LUTMPC_DEFINE_ERROR(InvalidPoint, invalid_point);
LUTMPC_DEFINE_ERROR(TripleReuse, triple_reuse);
LUTMPC_DEFINE_ERROR(VersionMismatch, version_mismatch);
LUTMPC_DEFINE_ERROR(CorruptBundle, corrupt_bundle);
LUTMPC_DEFINE_ERROR(InsufficientSamples, insufficient_samples);
LUTMPC_DEFINE_ERROR(EncodeRange, encode_range);
LUTMPC_DEFINE_ERROR(IoError, io_error);
LUTMPC_DEFINE_ERROR(BadConfig, bad_config);
LUTMPC_DEFINE_ERROR(OfflineUnderprovisioned, under_provisioned);

#undef LUTMPC_DEFINE_ERROR

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::frame_corrupt: return "frame_corrupt";
    case Errc::missing_key: return "missing_key";
    case Errc::table_exhausted: return "table_exhausted";
    case Errc::budget_exhausted: return "budget_exhausted";
    case Errc::invalid_point: return "invalid_point";
    case Errc::triple_reuse: return "triple_reuse";
    case Errc::version_mismatch: return "version_mismatch";
    case Errc::corrupt_bundle: return "corrupt_bundle";
    case Errc::insufficient_samples: return "insufficient_samples";
    case Errc::encode_range: return "encode_range";
    case Errc::io_error: return "io_error";
    case Errc::bad_config: return "bad_config";
    case Errc::under_provisioned: return "under_provisioned";
  }
  return "unknown";
}

}  // namespace lutmpc
