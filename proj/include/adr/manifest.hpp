#pragma once

// Every CLI run writes a manifest next to its outputs: the exact command line,
// the resolved configuration, the seed and timestamps. Written atomically via
// a temp file so a crash never leaves a half manifest.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "adr/text.hpp"

namespace adr::cli {

#ifndef ADR_PLANNER_VERSION
#define ADR_PLANNER_VERSION "0.0.0"
#endif

struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  nlohmann::json config = nlohmann::json::object();
  std::uint64_t seed = 0;
  std::string version = ADR_PLANNER_VERSION;
  std::string started_at;
  std::string finished_at;
  std::vector<std::string> outputs;
};

inline void write_manifest(const RunManifest& m, const std::string& path) {
  nlohmann::json j{{"command", m.command}, {"argv", m.argv},       {"config", m.config},
                   {"seed", m.seed},       {"version", m.version}, {"started_at", m.started_at},
                   {"finished_at", m.finished_at}, {"outputs", m.outputs}};
  const std::filesystem::path target(path);
  const std::filesystem::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << j.dump(2) << "\n";
  }
  std::filesystem::rename(tmp, target);
}

}  // namespace adr::cli
