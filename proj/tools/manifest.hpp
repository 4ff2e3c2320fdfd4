#pragma once

// Every CLI run writes a manifest next to its primary output: the exact
// argument vector, content hashes of the inputs, the outputs, and timing.
// `cone_embed --manifest <file>` replays the recorded arguments.

#include <cstdint>
#include <string>
#include <vector>

namespace cone_embed::cli {

struct InputRef {
  std::string path;
  std::string hash;  // FNV-1a 64 of the file bytes, hex
};

struct RunManifest {
  std::string command;
  std::vector<std::string> argv;  // original order, program name excluded
  std::uint64_t seed = 0;
  std::vector<InputRef> inputs;
  std::vector<std::string> outputs;
  double wall_time_seconds = 0.0;
  double cpu_time_seconds = 0.0;
  int threads = 1;

  void add_input(const std::string& path);
};

std::string fnv1a64_file(const std::string& path);
void save_manifest(const RunManifest& m, const std::string& path);
std::vector<std::string> load_manifest_argv(const std::string& path);

}  // namespace cone_embed::cli
