#include "manifest.hpp"

#include <fstream>
#include <sstream>

#include <cone_embed/errors.hpp>

#include <json.hpp>

namespace cone_embed::cli {

std::string fnv1a64_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot hash input file: " + path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 14];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  std::ostringstream hex;
  hex << std::hex << h;
  return hex.str();
}

void RunManifest::add_input(const std::string& path) {
  inputs.push_back({path, fnv1a64_file(path)});
}

void save_manifest(const RunManifest& m, const std::string& path) {
  nlohmann::json j;
  j["format"] = "cone-embed-manifest-v1";
  j["command"] = m.command;
  j["argv"] = m.argv;
  j["seed"] = m.seed;
  nlohmann::json inputs = nlohmann::json::array();
  for (const auto& in : m.inputs) inputs.push_back({{"path", in.path}, {"hash", in.hash}});
  j["inputs"] = std::move(inputs);
  j["outputs"] = m.outputs;
  j["wall_time_seconds"] = m.wall_time_seconds;
  j["cpu_time_seconds"] = m.cpu_time_seconds;
  j["threads"] = m.threads;
  std::ofstream out(path);
  if (!out) throw DataError("cannot write manifest: " + path);
  out << j.dump(2) << '\n';
}

std::vector<std::string> load_manifest_argv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest: " + path);
  nlohmann::json j;
  try {
    in >> j;
    return j.at("argv").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
}

}  // namespace cone_embed::cli
