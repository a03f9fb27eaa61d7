#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sysmine {

enum class Errc {
  // nets and modules
  DuplicateInterfaceLabel,
  NonBipartiteFlow,
  DanglingArc,
  MissingLabel,
  OverlappingNodeKinds,
  UnknownNode,
  // composition
  NodeIdCollision,
  MergeTypeMismatch,
  ResultingDuplicateInterfaceLabel,
  // occurrence nets
  CyclicFlow,
  PlaceBranching,
  InvalidLinearization,
  // logs
  ParseError,
  DuplicateEventName,
  EmptyAgentSet,
  BadTimestamp,
  UnknownAgent,
  EmptyBehavior,
  MissingRole,
  EmptyLog,
  DissentError,
  // algebra
  UndeclaredSort,
  NonTotalTable,
  ValueOutsideCarrier,
  IllSorted,
  UnknownSymbol,
  UnboundVariable,
  // lifting
  UnresolvableValue,
  MissingPlaceRole,
  AmbiguousFunctionalMatch,
  SortClash,
  UnmappedMarkedPlace,
  NotEnabled,
  UnknownTransitionLabel,
};

std::string_view to_string(Errc code) noexcept;

/// Every failure raised by the library. `what()` renders as `Code(detail)`.
class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string detail);

  Errc code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::string detail_;
};

}  // namespace sysmine
