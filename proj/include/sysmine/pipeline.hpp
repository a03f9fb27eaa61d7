#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sysmine/algebra.hpp"
#include "sysmine/composition.hpp"
#include "sysmine/lifting.hpp"
#include "sysmine/logkit.hpp"

namespace sysmine {

enum class OutputFormat { json, dot };

struct PipelineConfig {
  std::filesystem::path log;
  std::filesystem::path structure;
  std::filesystem::path roles;
  std::filesystem::path place_roles;
  /// Overrides the priority list of the place-role file when non-empty.
  std::vector<Symbol> function_priority;
  OutputFormat format = OutputFormat::json;
};

/// A pipeline failure tagged with the step it happened in:
/// 1 log, 2 behaviours, 3 composition, 4 annotation, 5 generalization,
/// 6 symbolic composition, 7 folding, 8 schema, 9 replay.
class StepError : public std::runtime_error {
 public:
  StepError(int step, const std::string& message);
  int step() const noexcept { return step_; }

 private:
  int step_;
};

/// File name -> content. Contents are deterministic for identical inputs.
using Artifacts = std::map<std::string, std::string>;

struct PipelineResult {
  Artifacts artifacts;
  std::vector<std::string> summary;
  std::vector<std::string> warnings;
};

/// Everything mine-system computes, for callers that want the objects.
struct SystemMining {
  EventLog log;
  RolePolicy policy;
  MinedRun run;
  Structure structure;
  LiftingConfig config;
  std::vector<AnnotatedAtom> annotated;
  std::vector<SystemAtom> atoms;
  SymbolicModule symbolic;
  SystemNet net;
  NetSchema schema;
  ConformanceReport replay;
};

EventLog load_log_step(const std::filesystem::path& path);
RolePolicy load_roles_step(const std::filesystem::path& path, const EventLog& log);
Structure load_structure(const std::filesystem::path& path);
LiftingConfig load_lifting_config(const std::filesystem::path& path);
Module load_module(const std::filesystem::path& path);

/// Steps 1-3. Throws StepError.
MinedRun mine_run_steps(const PipelineConfig& config, EventLog* log_out = nullptr);
/// Steps 1-9. Throws StepError.
SystemMining mine_system_steps(const PipelineConfig& config);

PipelineResult mine_run_pipeline(const PipelineConfig& config);
PipelineResult mine_system_pipeline(const PipelineConfig& config);

/// Harmonic pairs, commutativity and dissent of `a` followed by `b`, one line each.
std::vector<std::string> check_modules(const Module& a, const Module& b);

/// Reads any artifact written by the pipeline and renders it in Graphviz
/// syntax. System nets and schemas need the structure to parse their terms.
std::string export_dot(const nlohmann::json& artifact, const Structure* structure);

std::string dump(const nlohmann::json& doc);

}  // namespace sysmine
