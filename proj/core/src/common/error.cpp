#include "archie/common/error.hpp"

namespace archie {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kUnknownEnv: return "UnknownEnv";
    case ErrorCode::kEpisodeExhausted: return "EpisodeExhausted";
    case ErrorCode::kNotReset: return "NotReset";
    case ErrorCode::kSyntax: return "SyntaxError";
    case ErrorCode::kDuplicateComponent: return "DuplicateComponent";
    case ErrorCode::kMissingSuccess: return "MissingSuccess";
    case ErrorCode::kUnboundSpec: return "UnboundSpec";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kInconsistentEpisode: return "InconsistentEpisode";
    case ErrorCode::kFixtureMiss: return "FixtureMiss";
    case ErrorCode::kAuthMissing: return "AuthMissing";
    case ErrorCode::kNetwork: return "NetworkError";
    case ErrorCode::kNoCodeBlock: return "NoCodeBlock";
    case ErrorCode::kEmptyTask: return "EmptyTask";
    case ErrorCode::kCheckpointFormat: return "CheckpointFormat";
    case ErrorCode::kRaggedGrid: return "RaggedGrid";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kParse: return "ParseError";
  }
  return "Unknown";
}

}  // namespace archie
