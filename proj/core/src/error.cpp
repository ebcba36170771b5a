#include "surfcert/error.hpp"

namespace surfcert {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Parse: return "ParseError";
    case ErrorCode::EmptyWord: return "EmptyWord";
    case ErrorCode::TrivialGenerator: return "TrivialGenerator";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DisconnectedFatgraph: return "DisconnectedFatgraph";
    case ErrorCode::NoLift: return "NoLift";
    case ErrorCode::AmbiguousLift: return "AmbiguousLift";
    case ErrorCode::RigidityRequired: return "RigidityRequired";
    case ErrorCode::UnmatchedBoundary: return "UnmatchedBoundary";
    case ErrorCode::WordMismatch: return "WordMismatch";
    case ErrorCode::FailedCheck: return "FailedCheck";
    case ErrorCode::TagInfeasible: return "TagInfeasible";
    case ErrorCode::NotHomologicallyTrivial: return "NotHomologicallyTrivial";
    case ErrorCode::SearchExhausted: return "SearchExhausted";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::RankDrop: return "RankDrop";
    case ErrorCode::MalnormalityFailed: return "MalnormalityFailed";
    case ErrorCode::RigidityFailed: return "RigidityFailed";
    case ErrorCode::Io: return "IoError";
  }
  return "Unknown";
}

}  // namespace surfcert
