#include "sysmine/logkit.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

#include "sysmine/composition.hpp"

namespace sysmine {

EventLog::EventLog(std::vector<Event> events) : events_(std::move(events)) {
  std::set<std::string> names;
  for (const auto& e : events_) {
    if (!names.insert(e.name).second) throw Error(Errc::DuplicateEventName, e.name);
    if (e.agents.empty()) throw Error(Errc::EmptyAgentSet, e.name);
  }
  std::stable_sort(events_.begin(), events_.end(),
                   [](const Event& a, const Event& b) { return a.timestamp < b.timestamp; });
}

const Event* EventLog::find(std::string_view name) const {
  for (const auto& e : events_) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

std::set<AgentId> EventLog::agents() const {
  std::set<AgentId> out;
  for (const auto& e : events_) out.insert(e.agents.begin(), e.agents.end());
  return out;
}

namespace {

bool read_int(std::string_view text, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > text.size()) return false;
  auto first = text.data() + pos;
  for (std::size_t i = 0; i < len; ++i) {
    if (first[i] < '0' || first[i] > '9') return false;
  }
  return std::from_chars(first, first + len, out).ec == std::errc{};
}

}  // namespace

Timestamp parse_timestamp(std::string_view text) {
  using namespace std::chrono;
  auto bad = [&] { return Error(Errc::BadTimestamp, std::string(text)); };
  int y, mo, d, h, mi, s;
  if (text.size() < 19 || text[4] != '-' || text[7] != '-' || (text[10] != 'T' && text[10] != ' ') ||
      text[13] != ':' || text[16] != ':') {
    throw bad();
  }
  if (!read_int(text, 0, 4, y) || !read_int(text, 5, 2, mo) || !read_int(text, 8, 2, d) ||
      !read_int(text, 11, 2, h) || !read_int(text, 14, 2, mi) || !read_int(text, 17, 2, s)) {
    throw bad();
  }
  year_month_day date{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!date.ok() || h > 23 || mi > 59 || s > 60) throw bad();

  std::size_t pos = 19;
  milliseconds fraction{0};
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    std::size_t digits = 0;
    int scaled = 0;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
      if (digits < 3) scaled = scaled * 10 + (text[pos] - '0');
      ++digits;
      ++pos;
    }
    if (digits == 0) throw bad();
    for (auto k = digits; k < 3; ++k) scaled *= 10;
    fraction = milliseconds{scaled};
  }
  minutes offset{0};
  if (pos < text.size()) {
    if (text[pos] == 'Z' && pos + 1 == text.size()) {
      pos += 1;
    } else if ((text[pos] == '+' || text[pos] == '-') && pos + 6 == text.size() && text[pos + 3] == ':') {
      int oh, om;
      if (!read_int(text, pos + 1, 2, oh) || !read_int(text, pos + 4, 2, om)) throw bad();
      offset = hours{oh} + minutes{om};
      if (text[pos] == '-') offset = -offset;
    } else {
      throw bad();
    }
  }
  return sys_days{date} + hours{h} + minutes{mi} + seconds{s} + fraction - offset;
}

namespace {

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  if (text.empty()) return out;
  std::size_t start = 0;
  while (true) {
    auto pos = text.find(sep, start);
    out.emplace_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string trim(std::string_view text) {
  auto first = text.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  auto last = text.find_last_not_of(" \t\r");
  return std::string(text.substr(first, last - first + 1));
}

Error parse_error(std::size_t line, const std::string& reason) {
  return Error(Errc::ParseError, "line " + std::to_string(line) + ": " + reason);
}

// One CSV record; double quotes delimit fields and "" escapes a quote.
std::vector<std::string> csv_fields(std::string_view line, std::size_t line_no) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          fields.back() += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  if (quoted) throw parse_error(line_no, "unterminated quoted field");
  return fields;
}

Event make_event(std::string name, std::vector<std::string> agents, std::map<std::string, std::string> data,
                 std::string ts, std::size_t line_no) {
  if (name.empty()) throw parse_error(line_no, "empty event name");
  Event e;
  e.name = std::move(name);
  for (auto& a : agents) {
    auto agent = trim(a);
    if (!agent.empty()) e.agents.insert(std::move(agent));
  }
  if (e.agents.empty()) throw Error(Errc::EmptyAgentSet, e.name);
  e.data = std::move(data);
  e.timestamp = parse_timestamp(ts);
  e.timestamp_text = std::move(ts);
  return e;
}

std::vector<Event> parse_jsonl(std::istream& in) {
  std::vector<Event> events;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw parse_error(line_no, e.what());
    }
    if (!doc.is_object()) throw parse_error(line_no, "expected an object");
    for (const char* key : {"name", "agents", "ts"}) {
      if (!doc.contains(key)) throw parse_error(line_no, std::string("missing key '") + key + "'");
    }
    if (!doc["name"].is_string() || !doc["ts"].is_string() || !doc["agents"].is_array()) {
      throw parse_error(line_no, "name and ts must be strings, agents an array");
    }
    std::vector<std::string> agents;
    for (const auto& a : doc["agents"]) {
      if (!a.is_string()) throw parse_error(line_no, "agent ids must be strings");
      agents.push_back(a.get<std::string>());
    }
    std::map<std::string, std::string> data;
    if (doc.contains("data")) {
      if (!doc["data"].is_object()) throw parse_error(line_no, "data must be an object");
      for (const auto& [key, value] : doc["data"].items()) {
        data[key] = value.is_string() ? value.get<std::string>() : value.dump();
      }
    }
    events.push_back(make_event(doc["name"].get<std::string>(), std::move(agents), std::move(data),
                                doc["ts"].get<std::string>(), line_no));
  }
  return events;
}

std::vector<Event> parse_csv(std::istream& in) {
  std::vector<Event> events;
  std::string line;
  std::size_t line_no = 0;
  std::map<std::string, std::size_t> column;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = csv_fields(line, line_no);
    if (column.empty()) {
      for (std::size_t i = 0; i < fields.size(); ++i) column[trim(fields[i])] = i;
      for (const char* key : {"name", "agents", "data", "ts"}) {
        if (!column.count(key)) throw parse_error(line_no, std::string("header lacks column '") + key + "'");
      }
      if (column.size() != 4 || fields.size() != 4) throw parse_error(line_no, "header must be name,agents,data,ts");
      continue;
    }
    if (fields.size() != 4) throw parse_error(line_no, "expected 4 fields, got " + std::to_string(fields.size()));
    std::map<std::string, std::string> data;
    for (const auto& pair : split(fields[column["data"]], ';')) {
      if (trim(pair).empty()) continue;
      auto eq = pair.find('=');
      if (eq == std::string::npos) throw parse_error(line_no, "data entry '" + pair + "' lacks '='");
      data[trim(pair.substr(0, eq))] = trim(pair.substr(eq + 1));
    }
    events.push_back(make_event(trim(fields[column["name"]]), split(fields[column["agents"]], ';'), std::move(data),
                                trim(fields[column["ts"]]), line_no));
  }
  return events;
}

}  // namespace

EventLog parse_log(std::istream& in, LogFormat format) {
  return EventLog(format == LogFormat::csv ? parse_csv(in) : parse_jsonl(in));
}

EventLog load_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ParseError, "cannot open " + path.string());
  return parse_log(in, path.extension() == ".csv" ? LogFormat::csv : LogFormat::jsonl);
}

std::string_view to_string(Side side) noexcept { return side == Side::left ? "left" : "right"; }

const std::string& RolePolicy::role(const AgentId& agent) const {
  auto it = role_of.find(agent);
  if (it == role_of.end()) throw Error(Errc::MissingRole, agent);
  return it->second;
}

Side RolePolicy::side(const AgentId& agent) const {
  const auto& r = role(agent);
  auto it = side_of.find(r);
  if (it == side_of.end()) throw Error(Errc::MissingRole, agent + " (role '" + r + "' has no side)");
  return it->second;
}

RolePolicy role_policy_from_json(const nlohmann::json& doc) {
  RolePolicy policy;
  try {
    policy.role_of = doc.at("roles").get<std::map<AgentId, std::string>>();
    for (const auto& [role, side] : doc.at("sides").items()) {
      const auto text = side.get<std::string>();
      if (text == "left") {
        policy.side_of[role] = Side::left;
      } else if (text == "right") {
        policy.side_of[role] = Side::right;
      } else {
        throw Error(Errc::ParseError, "side of role '" + role + "' must be left or right");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, e.what());
  }
  return policy;
}

std::vector<Event> agent_behavior(const EventLog& log, const AgentId& agent) {
  std::vector<Event> out;
  for (const auto& e : log.events()) {
    if (e.agents.count(agent)) out.push_back(e);
  }
  if (out.empty()) throw Error(Errc::UnknownAgent, agent);
  return out;
}

std::string chain_place_label(std::string_view producer, std::string_view consumer, std::string_view agent) {
  return std::string(producer) + "→" + std::string(consumer) + "/" + std::string(agent);
}

std::optional<ChainPlace> parse_chain_place_label(std::string_view label) {
  constexpr std::string_view arrow = "→";
  auto slash = label.rfind('/');
  if (slash == std::string_view::npos) return std::nullopt;
  auto head = label.substr(0, slash);
  auto at = head.find(arrow);
  if (at == std::string_view::npos) return std::nullopt;
  ChainPlace out{std::string(head.substr(0, at)), std::string(head.substr(at + arrow.size())),
                 std::string(label.substr(slash + 1))};
  if (out.producer.empty() || out.consumer.empty() || out.agent.empty()) return std::nullopt;
  return out;
}

NodeId chain_transition_id(std::string_view agent, std::string_view event) {
  return std::string(agent) + ":" + std::string(event);
}

namespace {

struct Exposure {
  bool left = false;
  bool right = false;
};

Module chain_module(std::span<const Event> behavior, const AgentId& agent,
                    const std::map<std::string, Exposure>& exposure) {
  if (behavior.empty()) throw Error(Errc::EmptyBehavior, agent);
  std::set<NodeId> places, transitions, left, right;
  std::set<Arc> arcs;
  std::map<NodeId, Label> labels;
  auto place_id = [&](std::size_t k) { return agent + ":p" + std::to_string(k); };
  for (std::size_t k = 0; k <= behavior.size(); ++k) {
    const std::string producer = k == 0 ? "start" : behavior[k - 1].name;
    const std::string consumer = k == behavior.size() ? "end" : behavior[k].name;
    places.insert(place_id(k));
    labels[place_id(k)] = chain_place_label(producer, consumer, agent);
  }
  std::set<std::string> names;
  for (std::size_t k = 0; k < behavior.size(); ++k) {
    const auto& event = behavior[k];
    if (!names.insert(event.name).second) throw Error(Errc::DuplicateEventName, event.name);
    auto t = chain_transition_id(agent, event.name);
    transitions.insert(t);
    labels[t] = event.name;
    arcs.emplace(place_id(k), t);
    arcs.emplace(t, place_id(k + 1));
    const auto& side = exposure.at(event.name);
    if (side.left) left.insert(t);
    if (side.right) right.insert(t);
  }
  return Module(Net(std::move(places), std::move(transitions), std::move(arcs)), std::move(labels),
                std::move(left), std::move(right));
}

}  // namespace

OccurrenceModule behavior_to_module(std::span<const Event> behavior, const AgentId& agent,
                                    const RolePolicy& policy) {
  if (behavior.empty()) throw Error(Errc::EmptyBehavior, agent);
  const auto side = policy.side(agent);
  std::map<std::string, Exposure> exposure;
  for (const auto& e : behavior) exposure[e.name] = Exposure{side == Side::left, side == Side::right};
  return as_occurrence(chain_module(behavior, agent, exposure));
}

MinedRun mine_run(const EventLog& log, const RolePolicy& policy) {
  if (log.empty()) throw Error(Errc::EmptyLog, "empty log");

  MinedRun out{};
  std::vector<AgentId> right_agents, left_agents;
  for (const auto& agent : log.agents()) {
    (policy.side(agent) == Side::right ? right_agents : left_agents).push_back(agent);
  }
  out.fold_order = right_agents;
  out.fold_order.insert(out.fold_order.end(), left_agents.begin(), left_agents.end());
  std::map<AgentId, std::size_t> position;
  for (std::size_t i = 0; i < out.fold_order.size(); ++i) position[out.fold_order[i]] = i;

  // exposure[agent][event]
  std::map<AgentId, std::map<std::string, Exposure>> exposure;
  for (const auto& event : log.events()) {
    std::vector<AgentId> involved(event.agents.begin(), event.agents.end());
    std::sort(involved.begin(), involved.end(),
              [&](const AgentId& a, const AgentId& b) { return position.at(a) < position.at(b); });
    bool spans_left = false, spans_right = false;
    for (const auto& a : involved) (policy.side(a) == Side::left ? spans_left : spans_right) = true;
    const bool one_sided_right = spans_right && !spans_left;
    const auto n = involved.size();
    for (std::size_t k = 0; k < n; ++k) {
      Exposure e;
      if (n == 1) {
        e.left = policy.side(involved[k]) == Side::left;
        e.right = !e.left;
      } else if (k == 0) {
        e.left = policy.side(involved[k]) == Side::left;
        e.right = true;
      } else if (k + 1 < n) {
        e.left = e.right = true;
      } else {
        e.left = true;
        e.right = one_sided_right;
      }
      exposure[involved[k]][event.name] = e;
    }
  }

  std::optional<OccurrenceModule> acc_run;
  for (const auto& agent : out.fold_order) {
    auto behavior = agent_behavior(log, agent);
    auto next = as_occurrence(chain_module(behavior, agent, exposure.at(agent)));
    if (!acc_run) {
      acc_run = next;
      continue;
    }
    auto dissent = dissenting_pairs(*acc_run, next);
    if (!dissent.empty()) {
      std::string detail;
      for (const auto& d : dissent) {
        if (!detail.empty()) detail += "; ";
        detail += "{" + d.first.label + "} vs {" + d.second.label + "}";
      }
      throw Error(Errc::DissentError, detail);
    }
    try {
      acc_run = as_occurrence(compose(acc_run->module(), next.module()));
    } catch (const Error& e) {
      if (e.code() == Errc::CyclicFlow || e.code() == Errc::PlaceBranching) {
        throw Error(Errc::DissentError, "composing " + agent + ": " + e.what());
      }
      throw;
    }
  }
  out.run = std::move(*acc_run);

  const auto& module = out.run.module();
  std::set<NodeId> exposed = module.left();
  exposed.insert(module.right().begin(), module.right().end());
  for (const auto& node : exposed) {
    const auto side = module.left().count(node) ? "left" : "right";
    out.warnings.push_back("UnmatchedEvent(" + module.label(node) + ") remains on the " + side + " interface");
  }
  return out;
}

}  // namespace sysmine
