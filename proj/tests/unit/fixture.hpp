#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "sysmine/pipeline.hpp"

namespace fixture {

inline const std::filesystem::path data_dir{SYSMINE_DATA_DIR};

inline sysmine::PipelineConfig config() {
  sysmine::PipelineConfig c;
  c.log = data_dir / "retail.jsonl";
  c.roles = data_dir / "roles.json";
  c.structure = data_dir / "s0.json";
  c.place_roles = data_dir / "place_roles.json";
  return c;
}

inline const sysmine::EventLog& log() {
  static const auto value = sysmine::load_log(data_dir / "retail.jsonl");
  return value;
}

inline const sysmine::RolePolicy& policy() {
  static const auto value = sysmine::load_roles_step(data_dir / "roles.json", log());
  return value;
}

inline const sysmine::Structure& s0() {
  static const auto value = sysmine::load_structure(data_dir / "s0.json");
  return value;
}

inline const sysmine::SystemMining& mining() {
  static const auto value = sysmine::mine_system_steps(config());
  return value;
}

inline sysmine::Module module(const std::string& name) {
  return sysmine::load_module(data_dir / "modules" / (name + ".json"));
}

inline sysmine::Module behavior(const sysmine::AgentId& agent) {
  const auto events = sysmine::agent_behavior(log(), agent);
  return sysmine::behavior_to_module(events, agent, policy()).module();
}

inline sysmine::NodeId transition_labelled(const sysmine::Module& m, const sysmine::Label& label) {
  for (const auto& t : m.net().transitions())
    if (m.label(t) == label) return t;
  throw std::runtime_error("no transition labelled " + label);
}

}  // namespace fixture
