#include "wormbench/topology_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "wormbench/errors.hpp"

namespace wormbench {

using nlohmann::json;

std::string topology_to_json(const Topology& topo) {
  json j;
  j["format"] = "wormbench-topology";
  j["version"] = 1;
  j["name"] = topo.name;
  j["as_count"] = topo.as_count;
  j["as_links"] = json::array();
  for (auto [a, b] : topo.as_links) j["as_links"].push_back({a, b});
  j["nodes"] = json::array();
  for (const auto& n : topo.nodes) {
    json jn{{"id", n.id}, {"role", to_string(n.role)}, {"address", n.address.to_string()}, {"as", n.as_id}, {"subnet", n.subnet_id}};
    if (n.server_kind) jn["server_kind"] = to_string(*n.server_kind);
    j["nodes"].push_back(std::move(jn));
  }
  j["links"] = json::array();
  for (const auto& l : topo.links) {
    j["links"].push_back({{"a", l.a},
                          {"b", l.b},
                          {"class", to_string(l.link_class)},
                          {"bandwidth_bps", l.bandwidth_bps},
                          {"delay_ns", l.delay.ns()},
                          {"queue_packets", l.queue_capacity}});
  }
  j["subnets"] = json::array();
  for (const auto& s : topo.subnets) {
    j["subnets"].push_back({{"id", s.id}, {"as", s.as_id}, {"index", s.index_in_as}, {"prefix", s.prefix.to_string()}, {"members", s.members}});
  }
  return j.dump(1);
}

namespace {

LinkClass link_class_from_string(const std::string& s) {
  for (auto c : {LinkClass::kCoreCore, LinkClass::kCoreGateway, LinkClass::kGatewayEdge, LinkClass::kEdgeServer,
                 LinkClass::kEdgeClient}) {
    if (s == to_string(c)) return c;
  }
  throw ConfigError("topology: unknown link class '" + s + "'");
}

}  // namespace

Topology topology_from_json(const std::string& text) {
  Topology t;
  try {
    const json j = json::parse(text);
    if (j.value("format", "") != "wormbench-topology") throw ConfigError("topology: missing format tag");
    t.name = j.value("name", "external");
    t.as_count = j.at("as_count").get<std::uint32_t>();
    for (const auto& e : j.at("as_links")) t.as_links.emplace_back(e.at(0).get<std::uint32_t>(), e.at(1).get<std::uint32_t>());
    for (const auto& jn : j.at("nodes")) {
      Node n;
      n.id = jn.at("id").get<NodeId>();
      n.role = role_from_string(jn.at("role").get<std::string>());
      if (jn.contains("server_kind")) n.server_kind = server_kind_from_string(jn.at("server_kind").get<std::string>());
      n.address = Ipv4::parse(jn.at("address").get<std::string>());
      n.as_id = jn.at("as").get<std::uint32_t>();
      n.subnet_id = jn.at("subnet").get<std::uint32_t>();
      t.nodes.push_back(n);
    }
    for (const auto& jl : j.at("links")) {
      LinkSpec l;
      l.a = jl.at("a").get<NodeId>();
      l.b = jl.at("b").get<NodeId>();
      l.link_class = link_class_from_string(jl.at("class").get<std::string>());
      l.bandwidth_bps = jl.at("bandwidth_bps").get<std::uint64_t>();
      l.delay = SimTime::from_ns(jl.at("delay_ns").get<std::int64_t>());
      l.queue_capacity = jl.value("queue_packets", Link::kDefaultQueueCapacity);
      t.links.push_back(l);
    }
    for (const auto& js : j.at("subnets")) {
      Subnet s;
      s.id = js.at("id").get<std::uint32_t>();
      s.as_id = js.at("as").get<std::uint32_t>();
      s.index_in_as = js.at("index").get<std::uint32_t>();
      s.prefix = Cidr::parse(js.at("prefix").get<std::string>());
      s.members = js.at("members").get<std::vector<NodeId>>();
      t.subnets.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("topology: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("topology: ") + e.what());
  }
  try {
    t.check_invariants();
  } catch (const std::logic_error& e) {
    throw ConfigError(std::string("topology: ") + e.what());
  }
  return t;
}

void write_topology(const Topology& topo, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeFailure("cannot write " + path.string());
  out << topology_to_json(topo) << '\n';
}

Topology read_topology(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read topology file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return topology_from_json(ss.str());
}

}  // namespace wormbench
