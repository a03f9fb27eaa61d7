#pragma once

#include <chrono>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sysmine/occurrence.hpp"

namespace sysmine {

using AgentId = std::string;
using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

struct Event {
  std::string name;
  std::set<AgentId> agents;
  std::map<std::string, std::string> data;
  Timestamp timestamp{};
  std::string timestamp_text;  // as written in the source, echoed back on export

  friend bool operator==(const Event&, const Event&) = default;
};

/// Events of one case, in timestamp order (stable on ties). Event names are unique
/// and every event has at least one agent.
class EventLog {
 public:
  EventLog() = default;
  explicit EventLog(std::vector<Event> events);

  const std::vector<Event>& events() const noexcept { return events_; }
  std::size_t size() const noexcept { return events_.size(); }
  bool empty() const noexcept { return events_.empty(); }
  const Event* find(std::string_view name) const;
  std::set<AgentId> agents() const;

 private:
  std::vector<Event> events_;
};

enum class LogFormat { jsonl, csv };

/// ISO-8601 date-time: `YYYY-MM-DDTHH:MM:SS[.fff](Z|±HH:MM)`. A missing zone
/// means UTC. Throws BadTimestamp.
Timestamp parse_timestamp(std::string_view text);

/// Throws ParseError(line, reason), DuplicateEventName, EmptyAgentSet, BadTimestamp.
EventLog parse_log(std::istream& in, LogFormat format);
/// Format chosen by extension: `.csv` is CSV, anything else JSONL.
EventLog load_log(const std::filesystem::path& path);

enum class Side { left, right };

std::string_view to_string(Side side) noexcept;

/// Which interface an agent's events go to: agent -> role -> side.
struct RolePolicy {
  std::map<AgentId, std::string> role_of;
  std::map<std::string, Side> side_of;

  /// Throws MissingRole when the agent or its role is not configured.
  const std::string& role(const AgentId& agent) const;
  Side side(const AgentId& agent) const;
};

/// `{"roles": {agent: role}, "sides": {role: "left"|"right"}}`
RolePolicy role_policy_from_json(const nlohmann::json& doc);

/// Events involving `agent`, in log order. Throws UnknownAgent.
std::vector<Event> agent_behavior(const EventLog& log, const AgentId& agent);

/// Label of a chain place: `producer→consumer/agent`, with `start` and `end`
/// standing in for a missing producer or consumer.
std::string chain_place_label(std::string_view producer, std::string_view consumer, std::string_view agent);

struct ChainPlace {
  std::string producer;  // "start" for the first place of a chain
  std::string consumer;  // "end" for the last one
  AgentId agent;
};
std::optional<ChainPlace> parse_chain_place_label(std::string_view label);

/// Node ids used by agent chains: `agent:event` for transitions and `agent:p<k>`
/// for the k-th place.
NodeId chain_transition_id(std::string_view agent, std::string_view event);

/// The agent's behaviour as a chain p0 t1 p1 ... tn pn. Every transition is
/// labelled by its event name and sits on the interface the policy assigns to
/// the agent; places are interior. Throws EmptyBehavior, MissingRole.
OccurrenceModule behavior_to_module(std::span<const Event> behavior, const AgentId& agent,
                                    const RolePolicy& policy);

struct MinedRun {
  OccurrenceModule run;
  /// Agents in composition order: right-side agents, then left-side agents,
  /// each group sorted by id.
  std::vector<AgentId> fold_order;
  /// Events left on an interface of the run (UnmatchedEvent).
  std::vector<std::string> warnings;
};

/// Composes the behaviour modules of all agents into one run.
///
/// An event shared by agents g1..gn (in fold order) is exposed so that each
/// composition step consumes one copy: g1 offers it on its policy side (and on
/// the right if more agents follow), middle agents take it on the left and
/// re-expose it on the right, the last agent takes it on the left. An event
/// whose agents all sit on one side keeps one copy on that side of the run and
/// produces a warning. Throws EmptyLog, MissingRole, DissentError.
MinedRun mine_run(const EventLog& log, const RolePolicy& policy);

}  // namespace sysmine
