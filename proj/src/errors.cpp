#include "treegrade/errors.hpp"

namespace tg {

const char* errc_name(errc c) {
  switch (c) {
    case errc::io_error: return "IoError";
    case errc::schema_error: return "SchemaError";
    case errc::invalid_argument: return "InvalidArgument";
    case errc::chain_malformed: return "ChainMalformed";
    case errc::missing_certificate: return "MissingCertificate";
    case errc::transport_failed: return "TransportFailed";
    case errc::not_tree_graded: return "NotTreeGraded";
    case errc::basepoint_not_unique: return "BasepointNotUnique";
    case errc::basepoint_bound_violated: return "BasepointBoundViolated";
    case errc::base_stratum_not_singleton: return "BaseStratumNotSingleton";
    case errc::slack_exceeded: return "SlackExceeded";
    case errc::not_transitive: return "NotTransitive";
    case errc::glue_violated: return "GlueViolated";
    case errc::piece_disconnected: return "PieceDisconnected";
    case errc::parent_cycle: return "ParentCycle";
    case errc::lipschitz_violation: return "LipschitzViolation";
    case errc::bound_violated: return "BoundViolated";
    case errc::coordinate_mismatch: return "CoordinateMismatch";
    case errc::attach_point_unmapped: return "AttachPointUnmapped";
    case errc::cycle_in_coordinate_tree: return "CycleInCoordinateTree";
    case errc::non_decreasing_violated: return "NonDecreasingViolated";
    case errc::unsupported_piece_shape: return "UnsupportedPieceShape";
    case errc::precondition_failed: return "PreconditionFailed";
  }
  return "UnknownError";
}

error::error(errc code, const std::string& message)
    : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

void fail(errc code, const std::string& message) { throw error(code, message); }

}  // namespace tg
