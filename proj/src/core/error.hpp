#pragma once

#include <stdexcept>
#include <string>

namespace bw {

enum class Errc {
  invalid_argument,
  range_out_of_bounds,
  bin_out_of_bounds,
  unknown_gesture,
  shape_mismatch,
  too_few_columns,
  insufficient_columns,
  empty_dataset,
  length_mismatch,
  unknown_user,
  missing_session,
  missing_prediction,
  corrupt_file,
  io_failure,
  non_finite,
  non_positive_height,
  internal,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& msg) { throw Error(code, msg); }

inline void require(bool ok, Errc code, const std::string& msg) {
  if (!ok) fail(code, msg);
}

}  // namespace bw
