#pragma once

#include <stdexcept>
#include <string>

namespace ipw {

// Stable machine-parsable error codes; the CLI prints these verbatim.
enum class ErrorCode {
  data_not_found,
  bad_data,
  bad_spec,
  rank_deficient,
  empty_cell,
  nonconvergence,
  separation,
  internal,
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::data_not_found: return "E_DATA_NOT_FOUND";
    case ErrorCode::bad_data: return "E_BAD_DATA";
    case ErrorCode::bad_spec: return "E_BAD_SPEC";
    case ErrorCode::rank_deficient: return "E_RANK_DEFICIENT";
    case ErrorCode::empty_cell: return "E_EMPTY_CELL";
    case ErrorCode::nonconvergence: return "E_NONCONVERGENCE";
    case ErrorCode::separation: return "E_SEPARATION";
    case ErrorCode::internal: return "E_INTERNAL";
  }
  return "E_INTERNAL";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(msg), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ipw
