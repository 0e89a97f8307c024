#include "topiclens/error.hpp"

namespace topiclens {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::DuplicateId: return "DuplicateId";
    case ErrorKind::EmptyDocument: return "EmptyDocument";
    case ErrorKind::EmptyVocabulary: return "EmptyVocabulary";
    case ErrorKind::UnknownTerm: return "UnknownTerm";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::RankTooLarge: return "RankTooLarge";
    case ErrorKind::EmptyStream: return "EmptyStream";
    case ErrorKind::InvalidTokenId: return "InvalidTokenId";
    case ErrorKind::MissingEmbedding: return "MissingEmbedding";
    case ErrorKind::MissingComponent: return "MissingComponent";
    case ErrorKind::DegenerateResult: return "DegenerateResult";
    case ErrorKind::FingerprintMismatch: return "FingerprintMismatch";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DuplicateChunkId: return "DuplicateChunkId";
    case ErrorKind::EmptyIndex: return "EmptyIndex";
    case ErrorKind::KTooLarge: return "KTooLarge";
    case ErrorKind::SingleCluster: return "SingleCluster";
    case ErrorKind::NEqualsK: return "NEqualsK";
    case ErrorKind::CoincidentCentroids: return "CoincidentCentroids";
    case ErrorKind::MissingJudgments: return "MissingJudgments";
    case ErrorKind::ArtifactFormat: return "ArtifactFormat";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::TransportError: return "TransportError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace topiclens
