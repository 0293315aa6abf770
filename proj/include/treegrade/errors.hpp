#pragma once
// Diagnostic failures shared across the library.  Every failure carries a
// machine-readable code plus a rendered message so reports can replay it.

#include <stdexcept>
#include <string>

namespace tg {

enum class errc {
  io_error,
  schema_error,
  invalid_argument,
  chain_malformed,
  missing_certificate,
  transport_failed,
  not_tree_graded,
  basepoint_not_unique,
  basepoint_bound_violated,
  base_stratum_not_singleton,
  slack_exceeded,
  not_transitive,
  glue_violated,
  piece_disconnected,
  parent_cycle,
  lipschitz_violation,
  bound_violated,
  coordinate_mismatch,
  attach_point_unmapped,
  cycle_in_coordinate_tree,
  non_decreasing_violated,
  unsupported_piece_shape,
  precondition_failed,
};

const char* errc_name(errc c);

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& message);
  errc code() const { return code_; }

 private:
  errc code_;
};

[[noreturn]] void fail(errc code, const std::string& message);

}  // namespace tg
