#pragma once

#include <filesystem>
#include <string>

#include "wormbench/topology.hpp"

namespace wormbench {

// Topology exchange format (JSON):
//   {"format": "wormbench-topology", "version": 1, "name": ...,
//    "as_count": N, "as_links": [[a, b], ...],
//    "nodes":   [{"id", "role", "server_kind"?, "address", "as", "subnet"}],
//    "links":   [{"a", "b", "class", "bandwidth_bps", "delay_ns", "queue_packets"}],
//    "subnets": [{"id", "as", "index", "prefix", "members": [...]}]}
std::string topology_to_json(const Topology& topo);
// Throws ConfigError on schema violations.
Topology topology_from_json(const std::string& text);

void write_topology(const Topology& topo, const std::filesystem::path& path);
Topology read_topology(const std::filesystem::path& path);

}  // namespace wormbench
