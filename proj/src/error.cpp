#include "sysmine/error.hpp"

namespace sysmine {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::DuplicateInterfaceLabel: return "DuplicateInterfaceLabel";
    case Errc::NonBipartiteFlow: return "NonBipartiteFlow";
    case Errc::DanglingArc: return "DanglingArc";
    case Errc::MissingLabel: return "MissingLabel";
    case Errc::OverlappingNodeKinds: return "OverlappingNodeKinds";
    case Errc::UnknownNode: return "UnknownNode";
    case Errc::NodeIdCollision: return "NodeIdCollision";
    case Errc::MergeTypeMismatch: return "MergeTypeMismatch";
    case Errc::ResultingDuplicateInterfaceLabel: return "ResultingDuplicateInterfaceLabel";
    case Errc::CyclicFlow: return "CyclicFlow";
    case Errc::PlaceBranching: return "PlaceBranching";
    case Errc::InvalidLinearization: return "InvalidLinearization";
    case Errc::ParseError: return "ParseError";
    case Errc::DuplicateEventName: return "DuplicateEventName";
    case Errc::EmptyAgentSet: return "EmptyAgentSet";
    case Errc::BadTimestamp: return "BadTimestamp";
    case Errc::UnknownAgent: return "UnknownAgent";
    case Errc::EmptyBehavior: return "EmptyBehavior";
    case Errc::MissingRole: return "MissingRole";
    case Errc::EmptyLog: return "EmptyLog";
    case Errc::DissentError: return "DissentError";
    case Errc::UndeclaredSort: return "UndeclaredSort";
    case Errc::NonTotalTable: return "NonTotalTable";
    case Errc::ValueOutsideCarrier: return "ValueOutsideCarrier";
    case Errc::IllSorted: return "IllSorted";
    case Errc::UnknownSymbol: return "UnknownSymbol";
    case Errc::UnboundVariable: return "UnboundVariable";
    case Errc::UnresolvableValue: return "UnresolvableValue";
    case Errc::MissingPlaceRole: return "MissingPlaceRole";
    case Errc::AmbiguousFunctionalMatch: return "AmbiguousFunctionalMatch";
    case Errc::SortClash: return "SortClash";
    case Errc::UnmappedMarkedPlace: return "UnmappedMarkedPlace";
    case Errc::NotEnabled: return "NotEnabled";
    case Errc::UnknownTransitionLabel: return "UnknownTransitionLabel";
  }
  return "Unknown";
}

Error::Error(Errc code, std::string detail)
    : std::runtime_error(std::string(to_string(code)) + "(" + detail + ")"),
      code_(code),
      detail_(std::move(detail)) {}

}  // namespace sysmine
