#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mapft {

enum class Errc {
  MalformedHeader,
  DimensionMismatch,
  NoTraversableCell,
  MalformedRow,
  NonNumericField,
  EmptyScenario,
  AgentCountOutOfRange,
  DuplicateMapAssignment,
  UnknownDomainName,
  ScenarioMapMismatch,
  EndpointBlocked,
  IllegalCharacter,
  PlanCountMismatch,
  OutOfBounds,
  IntoObstacle,
  GoalNotReached,
  NonTraversableEndpoint,
  UnreachablePair,
  InconsistentBounds,
  DegenerateLowerBound,
  BucketUnsatisfiable,
  NotEnoughCells,
  BoundConflict,
  UnknownBatch,
  EmptyScope,
  UnknownDomain,
  UnknownMap,
  UnknownScenario,
  UnknownAlgorithm,
  NoSolution,
  InvalidScope,
  MissingHeader,
  ColumnCountMismatch,
  MissingMetadata,
  ReservedAlgorithm,
  AdapterSpawnFailure,
  OutputContractViolation,
  MalformedDescriptor,
  CorruptLog,
  StorageFailure,
  Io,
};

constexpr std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::MalformedHeader: return "MalformedHeader";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::NoTraversableCell: return "NoTraversableCell";
    case Errc::MalformedRow: return "MalformedRow";
    case Errc::NonNumericField: return "NonNumericField";
    case Errc::EmptyScenario: return "EmptyScenario";
    case Errc::AgentCountOutOfRange: return "AgentCountOutOfRange";
    case Errc::DuplicateMapAssignment: return "DuplicateMapAssignment";
    case Errc::UnknownDomainName: return "UnknownDomainName";
    case Errc::ScenarioMapMismatch: return "ScenarioMapMismatch";
    case Errc::EndpointBlocked: return "EndpointBlocked";
    case Errc::IllegalCharacter: return "IllegalCharacter";
    case Errc::PlanCountMismatch: return "PlanCountMismatch";
    case Errc::OutOfBounds: return "OutOfBounds";
    case Errc::IntoObstacle: return "IntoObstacle";
    case Errc::GoalNotReached: return "GoalNotReached";
    case Errc::NonTraversableEndpoint: return "NonTraversableEndpoint";
    case Errc::UnreachablePair: return "UnreachablePair";
    case Errc::InconsistentBounds: return "InconsistentBounds";
    case Errc::DegenerateLowerBound: return "DegenerateLowerBound";
    case Errc::BucketUnsatisfiable: return "BucketUnsatisfiable";
    case Errc::NotEnoughCells: return "NotEnoughCells";
    case Errc::BoundConflict: return "BoundConflict";
    case Errc::UnknownBatch: return "UnknownBatch";
    case Errc::EmptyScope: return "EmptyScope";
    case Errc::UnknownDomain: return "UnknownDomain";
    case Errc::UnknownMap: return "UnknownMap";
    case Errc::UnknownScenario: return "UnknownScenario";
    case Errc::UnknownAlgorithm: return "UnknownAlgorithm";
    case Errc::NoSolution: return "NoSolution";
    case Errc::InvalidScope: return "InvalidScope";
    case Errc::MissingHeader: return "MissingHeader";
    case Errc::ColumnCountMismatch: return "ColumnCountMismatch";
    case Errc::MissingMetadata: return "MissingMetadata";
    case Errc::ReservedAlgorithm: return "ReservedAlgorithm";
    case Errc::AdapterSpawnFailure: return "AdapterSpawnFailure";
    case Errc::OutputContractViolation: return "OutputContractViolation";
    case Errc::MalformedDescriptor: return "MalformedDescriptor";
    case Errc::CorruptLog: return "CorruptLog";
    case Errc::StorageFailure: return "StorageFailure";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

/// Every failure raised by the library. `position()` carries the offending
/// index when one exists (character index, agent, timestep, row, bucket),
/// otherwise -1.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what, std::int64_t position = -1)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code),
        position_(position) {}

  Errc code() const noexcept { return code_; }
  std::int64_t position() const noexcept { return position_; }

 private:
  Errc code_;
  std::int64_t position_;
};

}  // namespace mapft
