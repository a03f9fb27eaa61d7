#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "sysmine/pipeline.hpp"

namespace fs = std::filesystem;
using namespace sysmine;

namespace {

void write_artifacts(const Artifacts& artifacts, const fs::path& dir) {
  fs::create_directories(dir);
  for (const auto& [name, content] : artifacts) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    out << content;
  }
}

void report(const PipelineResult& result) {
  for (const auto& line : result.summary) std::cout << line << '\n';
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return nlohmann::json::parse(in);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mine occurrence runs and system nets from multi-agent event logs"};
  app.require_subcommand(1);

  PipelineConfig config;
  fs::path out_dir = ".";
  std::map<std::string, OutputFormat> formats{{"json", OutputFormat::json}, {"dot", OutputFormat::dot}};

  auto* mine_run_cmd = app.add_subcommand("mine-run", "Steps 1-3: compose the agents' behaviours into a run");
  mine_run_cmd->add_option("--log", config.log, "Event log (.jsonl or .csv)")->required();
  mine_run_cmd->add_option("--roles", config.roles, "Role policy JSON")->required();
  mine_run_cmd->add_option("--format", config.format, "Also write DOT when 'dot'")
      ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
  mine_run_cmd->add_option("--out-dir", out_dir, "Directory for artifacts");

  auto* mine_system_cmd = app.add_subcommand("mine-system", "Steps 1-8: lift the run to a system net and schema");
  mine_system_cmd->add_option("--log", config.log, "Event log (.jsonl or .csv)")->required();
  mine_system_cmd->add_option("--structure", config.structure, "Structure JSON")->required();
  mine_system_cmd->add_option("--roles", config.roles, "Role policy JSON")->required();
  mine_system_cmd->add_option("--place-roles", config.place_roles, "Place-role configuration JSON")->required();
  mine_system_cmd->add_option("--priority", config.function_priority, "Function priority for generalization");
  mine_system_cmd->add_option("--format", config.format, "Also write DOT when 'dot'")
      ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
  mine_system_cmd->add_option("--out-dir", out_dir, "Directory for artifacts");

  std::vector<fs::path> modules;
  auto* check_cmd = app.add_subcommand("check", "Composition diagnostics for two module files");
  check_cmd->add_option("modules", modules, "A.json B.json")->required()->expected(2)->check(CLI::ExistingFile);

  fs::path in_path, structure_path, out_path;
  auto* export_cmd = app.add_subcommand("export", "Render an artifact as Graphviz");
  export_cmd->add_option("--in", in_path, "Artifact JSON")->required()->check(CLI::ExistingFile);
  export_cmd->add_option("--format", config.format, "Only 'dot' is supported")
      ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
  export_cmd->add_option("--structure", structure_path, "Structure JSON, for system nets and schemas");
  export_cmd->add_option("--out", out_path, "Output file instead of stdout");

  fs::path net_path, run_path, witnesses_path;
  auto* replay_cmd = app.add_subcommand("replay", "Check that a system net can fire a run");
  replay_cmd->add_option("--net", net_path, "System net JSON")->required()->check(CLI::ExistingFile);
  replay_cmd->add_option("--run", run_path, "Run JSON")->required()->check(CLI::ExistingFile);
  replay_cmd->add_option("--witnesses", witnesses_path, "Witness valuations JSON")->required();
  replay_cmd->add_option("--structure", structure_path, "Structure JSON")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*mine_run_cmd) {
      auto result = mine_run_pipeline(config);
      write_artifacts(result.artifacts, out_dir);
      report(result);
    } else if (*mine_system_cmd) {
      auto result = mine_system_pipeline(config);
      write_artifacts(result.artifacts, out_dir);
      report(result);
    } else if (*check_cmd) {
      for (const auto& line : check_modules(load_module(modules[0]), load_module(modules[1]))) {
        std::cout << line << '\n';
      }
    } else if (*export_cmd) {
      if (config.format != OutputFormat::dot) throw std::runtime_error("export supports --format dot only");
      std::optional<Structure> structure;
      if (!structure_path.empty()) structure = load_structure(structure_path);
      const auto dot = export_dot(read_json(in_path), structure ? &*structure : nullptr);
      if (out_path.empty()) {
        std::cout << dot;
      } else {
        std::ofstream(out_path, std::ios::binary) << dot;
      }
    } else if (*replay_cmd) {
      const auto structure = load_structure(structure_path);
      const auto net = system_net_from_json(read_json(net_path), structure);
      const auto run = as_occurrence(load_module(run_path));
      const auto witnesses = read_json(witnesses_path).get<std::map<std::string, Valuation>>();
      const auto result = replay(net, structure, run, witnesses);
      std::cout << "conformant: " << (result.conformant ? "yes" : "no") << '\n';
      if (result.conformant) {
        for (const auto& t : result.firing_sequence) std::cout << "  " << t << '\n';
      } else {
        if (result.blocked_at) std::cout << "blocked at: " << *result.blocked_at << '\n';
        for (const auto& [place, token] : result.missing) {
          std::cout << "  missing " << to_string(token) << " on " << place << '\n';
        }
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
