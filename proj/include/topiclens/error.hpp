#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace topiclens {

enum class ErrorKind {
  // usage / configuration
  InvalidArgument,
  ConfigError,
  // data
  ParseError,
  DuplicateId,
  EmptyDocument,
  EmptyVocabulary,
  UnknownTerm,
  ShapeMismatch,
  RankTooLarge,
  EmptyStream,
  InvalidTokenId,
  MissingEmbedding,
  MissingComponent,
  DegenerateResult,
  FingerprintMismatch,
  DimensionMismatch,
  DuplicateChunkId,
  EmptyIndex,
  KTooLarge,
  SingleCluster,
  NEqualsK,
  CoincidentCentroids,
  MissingJudgments,
  ArtifactFormat,
  // environment / internal
  ConvergenceFailure,
  TransportError,
  IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a machine-checkable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace topiclens
