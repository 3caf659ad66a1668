#pragma once

#include <string>

#include "ihrl/hrl_agent.hpp"

namespace ihrl {

inline constexpr int kSnapshotVersion = 1;

struct GraphSnapshot {
  CompressionSpec compression;
  int width = 0;
  int height = 0;
  RegionGraph graph;
};

// All files are JSON documents tagged with "format" and "version". Loading a
// missing, truncated or mismatched file throws LoadError and never returns a
// partially filled object. Replay buffers are not stored.
void save_graph(const RegionGraph& graph, const Compression& f, const std::string& path);
GraphSnapshot load_graph(const std::string& path);

void save_manager(const ManagerQ& q, const std::string& path);
ManagerQ load_manager(const std::string& path);

void save_agent(const HrlAgent& agent, const std::string& path);
HrlAgent load_agent(const std::string& path);

std::string serialize_agent(const HrlAgent& agent);
HrlAgent deserialize_agent(const std::string& text);

}  // namespace ihrl
