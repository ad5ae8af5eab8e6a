#include "wormbench/network.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "wormbench/errors.hpp"

namespace wormbench {

double FlowRecord::goodput_bps() const {
  if (end == SimTime::max() || end <= start) return 0.0;
  return static_cast<double>(delivered_bytes) * 8.0 / (end - start).seconds();
}

SimTime path_rtt(const Topology& topo, const Routing& routing, NodeId a, NodeId b) {
  std::int64_t one_way = 0;
  for (auto li : routing.path_links(a, b)) {
    const auto& l = topo.links[li];
    const Link probe(l.a, l.b, l.bandwidth_bps, l.delay);
    one_way += l.delay.ns() + probe.serialization_time(1500).ns();
  }
  return SimTime::from_ns(2 * one_way);
}

namespace {

constexpr std::uint64_t kWormFlowBit = 1ULL << 63;

std::uint64_t conn_key(std::uint16_t local_port, Ipv4 remote, std::uint16_t remote_port) {
  return (std::uint64_t{local_port} << 48) | (std::uint64_t{remote_port} << 32) | remote.value;
}

std::uint32_t to_count(double x) { return static_cast<std::uint32_t>(std::max(1.0, std::round(x))); }

SimTime to_time(double seconds) { return SimTime::from_seconds(std::max(0.0, seconds)); }

enum class ConnRole : std::uint8_t { kBgClient, kBgServer, kWormAttacker, kWormVictim };

struct Exchange {
  std::uint32_t request = 0;
  std::vector<std::uint32_t> replies;
  SimTime respond_delay;
  SimTime gap_after;
  NodeId upstream = kNoNode;  // peer queried before answering
  std::uint64_t reply_total() const {
    std::uint64_t s = 0;
    for (auto r : replies) s += r;
    return s;
  }
};

struct Flow {
  std::uint64_t id = 0;
  std::size_t record = 0;  // index into result.flows
  NodeId client = kNoNode;
  NodeId server = kNoNode;
  const TrafficProfile* profile = nullptr;
  std::vector<Exchange> ex;
  std::uint16_t client_port = 0;
  std::uint16_t server_port = 0;
  // Client side progress.
  std::size_t cur = 0;
  std::uint64_t client_rx = 0;
  std::uint64_t client_rx_target = 0;  // cumulative reply bytes through `cur`
  // Server side progress.
  std::size_t server_cur = 0;
  std::uint64_t server_rx = 0;
  std::uint64_t server_rx_target = 0;  // cumulative request bytes through server_cur
  std::uint32_t client_conn = 0xffffffffu;
  std::uint32_t server_conn = 0xffffffffu;
  EventId timeout;
  bool done = false;
};

struct Conn {
  std::uint32_t id = 0;
  NodeId host = kNoNode;
  NodeId remote_node = kNoNode;
  Ipv4 remote;
  std::uint16_t local_port = 0;
  std::uint16_t remote_port = 0;
  ConnRole role = ConnRole::kBgClient;
  Origin origin = Origin::kBackground;
  std::uint64_t flow_id = 0;
  TcpConnection tcp;
  EventId timer;
  std::optional<SimTime> timer_at;
  std::uint64_t rx = 0;
  bool port_owned = false;  // release local_port when done
  bool finished = false;
};

struct Host {
  NodeId id = kNoNode;
  Ipv4 addr;
  NodeId access_router = kNoNode;
  std::optional<std::uint16_t> server_port;
  PortAllocator ports;
  std::unordered_map<std::uint64_t, std::uint32_t> conns;
  std::uint64_t flow_counter = 0;
  RngStream* traffic_rng = nullptr;
  RngStream* port_rng = nullptr;
  // Worm.
  RngStream* worm_rng = nullptr;
  std::optional<TargetChooser> chooser;
  EventId probe_event;
  EventId recovery_event;
  std::vector<std::uint32_t> worm_threads;
  bool scanning = false;
};

}  // namespace

struct Simulation::Impl {
  const Topology& topo;
  SimulationOptions opt;
  Engine engine;
  Routing routing;
  AddressPlan plan;
  std::vector<Link> links;
  SimulationResult res;
  bool ran = false;

  std::vector<std::unique_ptr<Host>> hosts;  // by node id; null for routers
  std::vector<NodeId> host_ids;
  // Candidate servers per kind, overall and per AS.
  std::vector<std::vector<NodeId>> servers_of_kind;
  std::vector<std::vector<std::vector<NodeId>>> servers_of_kind_in_as;
  std::vector<std::vector<NodeId>> hosts_in_as;

  std::vector<std::unique_ptr<Conn>> conns;
  std::vector<std::unique_ptr<Flow>> flows;
  std::unordered_map<std::uint64_t, std::size_t> flow_index;
  std::unordered_map<std::uint64_t, SimTime> rtt_cache;

  std::uint64_t next_packet_id = 1;
  std::uint64_t worm_flow_counter = 0;
  std::uint64_t current_packet_id = 0;  // packet being delivered to a host

  // Worm.
  std::optional<InfectionTracker> tracker;
  AddressSet scan_range;
  const WormConfig* worm = nullptr;

  Impl(const Topology& t, SimulationOptions o)
      : topo(t), opt(std::move(o)), engine(opt.seed), routing(t), plan(make_address_plan(t)) {
    for (const auto& l : topo.links) links.emplace_back(l.a, l.b, l.bandwidth_bps, l.delay, l.queue_capacity);
    res.links.resize(links.size());
    res.series_bin = opt.series_bin;
    if (opt.series_bin <= SimTime{}) throw ConfigError("series_bin must be positive");
    res.background_series.assign(static_cast<std::size_t>((opt.duration.ns() + opt.series_bin.ns() - 1) / opt.series_bin.ns()), 0);

    const auto adj = topo.adjacency();
    hosts.resize(topo.nodes.size());
    servers_of_kind.resize(kServerKindCount);
    servers_of_kind_in_as.assign(kServerKindCount, std::vector<std::vector<NodeId>>(topo.as_count));
    hosts_in_as.resize(topo.as_count);
    for (const auto& n : topo.nodes) {
      if (!is_host(n.role)) continue;
      auto h = std::make_unique<Host>();
      h->id = n.id;
      h->addr = n.address;
      if (!adj[n.id].empty()) h->access_router = adj[n.id].front().first;
      if (n.server_kind) {
        h->server_port = server_port(*n.server_kind);
        servers_of_kind[static_cast<std::size_t>(*n.server_kind)].push_back(n.id);
        servers_of_kind_in_as[static_cast<std::size_t>(*n.server_kind)][n.as_id].push_back(n.id);
      }
      h->traffic_rng = &engine.rng_stream("traffic.host." + std::to_string(n.id));
      h->port_rng = &engine.rng_stream("ports.host." + std::to_string(n.id));
      hosts_in_as[n.as_id].push_back(n.id);
      host_ids.push_back(n.id);
      hosts[n.id] = std::move(h);
    }
    if (opt.background) {
      opt.mix.validate();
    }
    if (opt.worm) setup_worm();
  }

  SimTime now() const { return engine.now(); }

  // ---------------------------------------------------------------- packets

  void tap(NodeId node, const Packet& p) {
    if (opt.sink) opt.sink->record(node, now(), p);
  }

  void host_send(NodeId from, Packet p) {
    Host& h = *hosts[from];
    p.id = next_packet_id++;
    p.src = h.addr;
    p.src_node = from;
    const Resolution r = resolve(topo, plan, p.dst);
    p.dst_node = r.host;
    p.drop_node = r.drop_router;
    if (p.dst_node == kNoNode && p.drop_node == kNoNode) p.drop_node = h.access_router;
    res.network.packets_sent++;
    if (p.origin == Origin::kBackground) {
      const auto bin = static_cast<std::size_t>(now().ns() / opt.series_bin.ns());
      if (bin < res.background_series.size()) res.background_series[bin] += p.size_bytes();
    }
    tap(from, p);
    if (p.dst_node == from) {
      // Only reachable through misconfiguration; hosts never address themselves.
      return;
    }
    forward(from, std::move(p));
  }

  void forward(NodeId at, Packet&& p) {
    const NodeId target = p.dst_node != kNoNode ? p.dst_node : p.drop_node;
    if (target == kNoNode) {
      res.network.unroutable_drops++;
      return;
    }
    const std::uint32_t li = routing.next_link(at, target);
    Link& l = links[li];
    const Direction d = l.direction_from(at);
    const auto when = l.transmit(d, p.size_bytes(), now());
    if (!when) {
      res.network.queue_drops++;
      res.links[li].dropped_packets++;
      return;
    }
    (p.origin == Origin::kWorm ? res.links[li].worm_bytes : res.links[li].background_bytes) += p.size_bytes();
    const NodeId next = l.far_end(d);
    engine.schedule(*when, EventKind::kPacketArrival, next,
                    [this, next, li, d, p = std::move(p)]() mutable { arrive(next, li, d, std::move(p)); });
  }

  void arrive(NodeId at, std::uint32_t li, Direction d, Packet&& p) {
    links[li].note_delivered(d);
    if (at == p.dst_node) {
      res.network.packets_delivered++;
      tap(at, p);
      current_packet_id = p.id;
      host_receive(at, p);
      return;
    }
    if (opt.router_taps && is_router(topo.nodes[at].role)) tap(at, p);
    if (at == p.drop_node) {
      res.network.unassigned_drops++;
      return;
    }
    forward(at, std::move(p));
  }

  void host_receive(NodeId at, const Packet& p) {
    switch (p.protocol) {
      case Protocol::kTcp: tcp_receive(at, p); break;
      case Protocol::kUdp: udp_receive(at, p); break;
      case Protocol::kIcmp: icmp_receive(at, p); break;
    }
  }

  // -------------------------------------------------------------------- TCP

  SimTime rto_for(NodeId a, NodeId b) {
    const std::uint64_t key = (std::uint64_t{a} << 32) | b;
    auto it = rtt_cache.find(key);
    if (it == rtt_cache.end()) it = rtt_cache.emplace(key, path_rtt(topo, routing, a, b)).first;
    const auto scaled = SimTime::from_seconds(it->second.seconds() * opt.rto_rtt_factor);
    return std::max(scaled, opt.rto_floor);
  }

  std::uint32_t iss_for(std::uint64_t flow_id, int side) const {
    return static_cast<std::uint32_t>(splitmix64(opt.seed ^ splitmix64(flow_id * 2 + static_cast<std::uint64_t>(side))));
  }

  Conn& new_conn(NodeId host, NodeId remote_node, Ipv4 remote, std::uint16_t local_port, std::uint16_t remote_port,
                 ConnRole role, Origin origin, std::uint64_t flow_id, TcpConnection tcp) {
    auto c = std::make_unique<Conn>(Conn{static_cast<std::uint32_t>(conns.size()), host, remote_node, remote, local_port,
                                         remote_port, role, origin, flow_id, std::move(tcp), {}, {}, 0, false, false});
    Conn& ref = *c;
    conns.push_back(std::move(c));
    hosts[host]->conns[conn_key(local_port, remote, remote_port)] = ref.id;
    return ref;
  }

  NodeId node_of(Ipv4 a) const {
    const Resolution r = resolve(topo, plan, a);
    return r.host != kNoNode ? r.host : r.drop_router;
  }

  TcpConfig tcp_config(NodeId a, NodeId b) {
    TcpConfig c = opt.tcp;
    c.rto = rto_for(a, b == kNoNode ? hosts[a]->access_router : b);
    return c;
  }

  void send_segment(const Conn& c, const TcpSegment& s) {
    Packet p;
    p.protocol = Protocol::kTcp;
    p.dst = c.remote;
    p.src_port = c.local_port;
    p.dst_port = c.remote_port;
    p.tcp_flags = s.flags;
    p.seq = s.seq;
    p.ack = s.ack;
    p.payload_len = s.len;
    p.flow_id = c.flow_id;
    p.origin = c.origin;
    host_send(c.host, p);
  }

  void sync_timer(Conn& c) {
    const auto want = c.tcp.timer();
    if (want == c.timer_at && (!want || engine.pending(c.timer))) return;
    if (c.timer.valid()) engine.cancel(c.timer);
    c.timer = EventId{};
    c.timer_at = want;
    if (want) {
      const std::uint32_t id = c.id;
      c.timer = engine.schedule(std::max(*want, now()), EventKind::kTimerExpiry, c.host, [this, id] {
        Conn& cc = *conns[id];
        cc.timer = EventId{};
        cc.timer_at.reset();
        apply(cc, cc.tcp.on_timer(now()));
      });
    }
  }

  void apply(Conn& c, TcpOutput out) {
    for (const auto& s : out.segments) send_segment(c, s);
    sync_timer(c);
    if (out.delivered) c.rx += out.delivered;
    switch (c.role) {
      case ConnRole::kBgClient: bg_client_event(c, out); break;
      case ConnRole::kBgServer: bg_server_event(c, out); break;
      case ConnRole::kWormAttacker: worm_attacker_event(c, out); break;
      case ConnRole::kWormVictim: worm_victim_event(c, out); break;
    }
    if ((out.closed || out.failed) && !c.finished) finish_conn(c);
  }

  void finish_conn(Conn& c) {
    c.finished = true;
    if (c.timer.valid()) engine.cancel(c.timer);
    c.timer = EventId{};
    c.timer_at.reset();
    if (c.port_owned) {
      hosts[c.host]->ports.release(c.local_port);
      c.port_owned = false;
    }
  }

  void send_rst(NodeId at, const Packet& p) {
    Packet r;
    r.protocol = Protocol::kTcp;
    r.dst = p.src;
    r.src_port = p.dst_port;
    r.dst_port = p.src_port;
    r.tcp_flags = tcp_flags::kRst | tcp_flags::kAck;
    r.seq = 0;
    r.ack = p.seq + p.payload_len + ((p.tcp_flags & (tcp_flags::kSyn | tcp_flags::kFin)) ? 1 : 0);
    r.flow_id = p.flow_id;
    r.origin = p.origin;
    res.network.rst_sent++;
    host_send(at, r);
  }

  void tcp_receive(NodeId at, const Packet& p) {
    Host& h = *hosts[at];
    TcpSegment seg{p.seq, p.ack, p.tcp_flags, p.payload_len};
    const std::uint64_t key = conn_key(p.dst_port, p.src, p.src_port);
    auto it = h.conns.find(key);
    const bool fresh_syn = (p.tcp_flags & tcp_flags::kSyn) && !(p.tcp_flags & tcp_flags::kAck);
    if (it != h.conns.end()) {
      Conn& c = *conns[it->second];
      // A new SYN on a finished connection's 4-tuple starts a new connection.
      if (!(fresh_syn && c.finished)) {
        apply(c, c.tcp.on_segment(seg, now()));
        return;
      }
    }
    if (!fresh_syn) return;  // stray segment for a forgotten connection
    if (p.origin == Origin::kWorm) {
      if (worm && p.dst_port == worm->infection_port &&
          (tracker->vulnerable(at) || (h.server_port && *h.server_port == worm->infection_port))) {
        TcpOutput out;
        auto tcp = TcpConnection::server(tcp_config(at, p.src_node), iss_for(p.flow_id, 1), seg, now(), out);
        Conn& c = new_conn(at, p.src_node, p.src, p.dst_port, p.src_port, ConnRole::kWormVictim, Origin::kWorm,
                           p.flow_id, std::move(tcp));
        apply(c, std::move(out));
        return;
      }
    } else if (h.server_port && *h.server_port == p.dst_port) {
      auto fit = flow_index.find(p.flow_id);
      if (fit != flow_index.end()) {
        Flow& f = *flows[fit->second];
        TcpOutput out;
        auto tcp = TcpConnection::server(tcp_config(at, p.src_node), iss_for(p.flow_id, 1), seg, now(), out);
        Conn& c = new_conn(at, p.src_node, p.src, p.dst_port, p.src_port, ConnRole::kBgServer, Origin::kBackground,
                           p.flow_id, std::move(tcp));
        f.server_conn = c.id;
        apply(c, std::move(out));
        return;
      }
    }
    send_rst(at, p);
  }

  // ------------------------------------------------------------ background

  void start_background() {
    for (NodeId id : host_ids) {
      Host& h = *hosts[id];
      const auto& first = opt.mix.profiles[select_profile(opt.mix, *h.traffic_rng)];
      const SimTime at = to_time(first.time_between_flows.draw(*h.traffic_rng));
      schedule_flow(id, at);
    }
  }

  void schedule_flow(NodeId client, SimTime at) {
    if (at >= opt.duration) return;
    engine.schedule(at, EventKind::kFlowStart, client, [this, client] { start_flow(client); });
  }

  void next_flow_after(NodeId client, const TrafficProfile& prof) {
    Host& h = *hosts[client];
    schedule_flow(client, now() + to_time(prof.time_between_flows.draw(*h.traffic_rng)));
  }

  NodeId pick_peer(NodeId self, const TrafficProfile& prof, RngStream& rng) {
    const std::uint32_t my_as = topo.nodes[self].as_id;
    const bool wan = prof.wan_probability > 0.0 && rng.bernoulli(prof.wan_probability);
    auto pick_from = [&](auto&& gather) -> NodeId {
      std::vector<NodeId> cand;
      gather(cand);
      cand.erase(std::remove(cand.begin(), cand.end(), self), cand.end());
      if (cand.empty()) return kNoNode;
      return cand[rng.uniform_int(0, cand.size() - 1)];
    };
    auto gather_as = [&](bool foreign) {
      return [&, foreign](std::vector<NodeId>& cand) {
        for (std::uint32_t as = 0; as < topo.as_count; ++as) {
          if ((as != my_as) != foreign) continue;
          const auto& pool = prof.server_kind ? servers_of_kind_in_as[static_cast<std::size_t>(*prof.server_kind)][as]
                                              : hosts_in_as[as];
          cand.insert(cand.end(), pool.begin(), pool.end());
        }
      };
    };
    NodeId peer = pick_from(gather_as(wan));
    if (peer == kNoNode) peer = pick_from(gather_as(!wan));
    return peer;
  }

  void start_flow(NodeId client) {
    Host& h = *hosts[client];
    RngStream& rng = *h.traffic_rng;
    const TrafficProfile& prof = opt.mix.profiles[select_profile(opt.mix, rng)];
    const NodeId server = pick_peer(client, prof, rng);
    if (server == kNoNode) {
      next_flow_after(client, prof);
      return;
    }
    auto f = std::make_unique<Flow>();
    f->id = (std::uint64_t{client} << 32) | ++h.flow_counter;
    f->client = client;
    f->server = server;
    f->profile = &prof;
    f->server_port = prof.server_port;
    const std::uint32_t n = to_count(prof.requests_per_flow.draw(rng));
    std::uint64_t planned = 0;
    for (std::uint32_t i = 0; i < n; ++i) {
      Exchange e;
      e.request = to_count(prof.request_length.draw(rng));
      const std::uint32_t replies = prof.transport == Transport::kIcmp ? 1 : to_count(prof.replies_per_request.draw(rng));
      for (std::uint32_t r = 0; r < replies; ++r) e.replies.push_back(to_count(prof.reply_length.draw(rng)));
      if (prof.transport == Transport::kIcmp) {
        e.request = std::min(e.request, kMaxUdpPayload);
        e.replies = {e.request};
      }
      e.respond_delay = to_time(prof.time_to_respond.draw(rng));
      e.gap_after = to_time(prof.time_between_requests.draw(rng));
      if (prof.upstream_probability > 0.0 && rng.bernoulli(prof.upstream_probability)) {
        e.upstream = pick_peer(server, prof, rng);
      }
      planned += e.request + e.reply_total();
      f->ex.push_back(std::move(e));
    }
    FlowRecord rec;
    rec.id = f->id;
    rec.client = client;
    rec.server = server;
    rec.profile = prof.name;
    rec.transport = prof.transport;
    rec.start = now();
    rec.planned_bytes = planned;
    f->record = res.flows.size();
    res.flows.push_back(rec);
    f->client_port = h.ports.allocate(*h.port_rng);
    const std::size_t idx = flows.size();
    flow_index[f->id] = idx;
    flows.push_back(std::move(f));
    Flow& fl = *flows[idx];

    if (prof.transport == Transport::kTcp) {
      auto tcp = TcpConnection::client(tcp_config(client, server), iss_for(fl.id, 0));
      Conn& c = new_conn(client, server, topo.nodes[server].address, fl.client_port, fl.server_port, ConnRole::kBgClient,
                         Origin::kBackground, fl.id, std::move(tcp));
      c.port_owned = true;
      fl.client_conn = c.id;
      apply(c, c.tcp.open(now()));
    } else {
      send_request(fl);
    }
  }

  Flow* flow_of(std::uint64_t id) {
    auto it = flow_index.find(id);
    return it == flow_index.end() ? nullptr : flows[it->second].get();
  }

  void end_flow(Flow& f, bool ok) {
    if (f.done) return;
    f.done = true;
    if (f.timeout.valid()) engine.cancel(f.timeout);
    auto& rec = res.flows[f.record];
    rec.end = now();
    rec.completed = ok;
    rec.failed = !ok;
    rec.delivered_bytes = f.client_rx + f.server_rx;
    if (f.profile->transport != Transport::kTcp) hosts[f.client]->ports.release(f.client_port);
    next_flow_after(f.client, *f.profile);
  }

  // Client finished receiving exchange `cur`: next request or done.
  void client_exchange_done(Flow& f) {
    const SimTime gap = f.ex[f.cur].gap_after;
    ++f.cur;
    if (f.cur == f.ex.size()) {
      if (f.profile->transport == Transport::kTcp) {
        Conn& c = *conns[f.client_conn];
        end_flow(f, true);
        apply(c, c.tcp.close(now()));
      } else {
        end_flow(f, true);
      }
      return;
    }
    const std::uint64_t id = f.id;
    engine.schedule(now() + gap, EventKind::kTimerExpiry, f.client, [this, id] {
      Flow* fl = flow_of(id);
      if (!fl || fl->done) return;
      if (fl->profile->transport == Transport::kTcp) {
        Conn& c = *conns[fl->client_conn];
        if (c.finished) return;
        apply(c, c.tcp.send(fl->ex[fl->cur].request, now()));
      } else {
        send_request(*fl);
      }
    });
  }

  void bg_client_event(Conn& c, const TcpOutput& out) {
    Flow* f = flow_of(c.flow_id);
    if (!f || f->done) return;
    if (out.failed) {
      end_flow(*f, false);
      return;
    }
    if (out.connected) apply(c, c.tcp.send(f->ex[0].request, now()));
    if (out.delivered) {
      f->client_rx += out.delivered;
      while (!f->done && f->cur < f->ex.size() && f->client_rx >= f->client_rx_target + f->ex[f->cur].reply_total()) {
        f->client_rx_target += f->ex[f->cur].reply_total();
        client_exchange_done(*f);
      }
    }
  }

  void bg_server_event(Conn& c, const TcpOutput& out) {
    Flow* f = flow_of(c.flow_id);
    if (!f) return;
    if (out.delivered) {
      f->server_rx += out.delivered;
      while (f->server_cur < f->ex.size() && f->server_rx >= f->server_rx_target + f->ex[f->server_cur].request) {
        f->server_rx_target += f->ex[f->server_cur].request;
        const Exchange& e = f->ex[f->server_cur];
        const std::uint64_t bytes = e.reply_total();
        const std::uint32_t cid = c.id;
        ++f->server_cur;
        engine.schedule(now() + e.respond_delay, EventKind::kTimerExpiry, c.host, [this, cid, bytes] {
          Conn& cc = *conns[cid];
          if (cc.finished || cc.tcp.state() == TcpState::kClosed) return;
          apply(cc, cc.tcp.send(bytes, now()));
        });
      }
    }
    if (out.peer_closed) apply(c, c.tcp.close(now()));
  }

  // UDP and ICMP exchanges.
  void send_datagrams(NodeId from, Ipv4 to, std::uint16_t sport, std::uint16_t dport, std::uint64_t bytes,
                      std::uint64_t flow_id) {
    while (bytes > 0) {
      Packet p;
      p.protocol = Protocol::kUdp;
      p.dst = to;
      p.src_port = sport;
      p.dst_port = dport;
      p.payload_len = static_cast<std::uint32_t>(std::min<std::uint64_t>(bytes, kMaxUdpPayload));
      p.flow_id = flow_id;
      bytes -= p.payload_len;
      host_send(from, p);
    }
  }

  void send_icmp(NodeId from, Ipv4 to, std::uint8_t type, std::uint32_t len, std::uint64_t flow_id, std::uint16_t seq) {
    Packet p;
    p.protocol = Protocol::kIcmp;
    p.dst = to;
    p.icmp_type = type;
    p.icmp_id = static_cast<std::uint16_t>(flow_id);
    p.icmp_seq = seq;
    p.payload_len = len;
    p.flow_id = flow_id;
    host_send(from, p);
  }

  void send_request(Flow& f) {
    const Exchange& e = f.ex[f.cur];
    const Ipv4 dst = topo.nodes[f.server].address;
    if (f.profile->transport == Transport::kIcmp) {
      send_icmp(f.client, dst, 8, e.request, f.id, static_cast<std::uint16_t>(f.cur));
    } else {
      send_datagrams(f.client, dst, f.client_port, f.server_port, e.request, f.id);
    }
    if (f.timeout.valid()) engine.cancel(f.timeout);
    const std::uint64_t id = f.id;
    const std::size_t which = f.cur;
    f.timeout = engine.schedule(now() + opt.udp_timeout, EventKind::kTimerExpiry, f.client, [this, id, which] {
      Flow* fl = flow_of(id);
      if (!fl || fl->done || fl->cur != which) return;
      fl->timeout = EventId{};
      res.network.udp_timeouts++;
      end_flow(*fl, false);
    });
  }

  void client_datagram(Flow& f, std::uint32_t len) {
    if (f.done) return;
    f.client_rx += len;
    while (!f.done && f.cur < f.ex.size() && f.client_rx >= f.client_rx_target + f.ex[f.cur].reply_total()) {
      f.client_rx_target += f.ex[f.cur].reply_total();
      if (f.timeout.valid()) engine.cancel(f.timeout);
      f.timeout = EventId{};
      client_exchange_done(f);
    }
  }

  void server_reply(Flow& f, std::size_t which) {
    const std::uint64_t id = f.id;
    engine.schedule(now() + f.ex[which].respond_delay, EventKind::kTimerExpiry, f.server, [this, id, which] {
      Flow* fl = flow_of(id);
      if (!fl) return;
      const Exchange& e = fl->ex[which];
      const Ipv4 dst = topo.nodes[fl->client].address;
      for (auto r : e.replies) send_datagrams(fl->server, dst, fl->server_port, fl->client_port, r, fl->id);
    });
  }

  void udp_receive(NodeId at, const Packet& p) {
    if (p.origin == Origin::kWorm) {
      worm_probe_received(at, p);
      return;
    }
    Flow* f = flow_of(p.flow_id);
    if (!f) return;
    if (at == f->client && p.dst_port == f->client_port) {
      client_datagram(*f, p.payload_len);
      return;
    }
    if (at == f->server && p.dst_port == f->server_port) {
      if (p.src_node == f->client) {
        f->server_rx += p.payload_len;
        while (f->server_cur < f->ex.size() && f->server_rx >= f->server_rx_target + f->ex[f->server_cur].request) {
          f->server_rx_target += f->ex[f->server_cur].request;
          const std::size_t which = f->server_cur++;
          const NodeId up = f->ex[which].upstream;
          if (up != kNoNode) {
            // Recursive lookup first; the answer arrives as a datagram from `up`.
            send_datagrams(at, topo.nodes[up].address, f->server_port, f->server_port, f->ex[which].request, f->id);
          } else {
            server_reply(*f, which);
          }
        }
      } else {
        // Upstream answer for the most recent exchange that asked for one.
        for (std::size_t k = f->server_cur; k-- > 0;) {
          if (f->ex[k].upstream == p.src_node) {
            server_reply(*f, k);
            break;
          }
        }
      }
      return;
    }
    // Acting as the upstream peer of another server.
    if (hosts[at]->server_port && *hosts[at]->server_port == p.dst_port) {
      for (const auto& e : f->ex) {
        if (e.upstream == at) {
          const Ipv4 back = p.src;
          const std::uint16_t port = p.src_port;
          const std::uint32_t len = e.replies.empty() ? 1 : e.replies.front();
          const std::uint64_t fid = f->id;
          engine.schedule(now() + e.respond_delay, EventKind::kTimerExpiry, at, [this, at, back, port, len, fid] {
            send_datagrams(at, back, *hosts[at]->server_port, port, len, fid);
          });
          break;
        }
      }
    }
  }

  void icmp_receive(NodeId at, const Packet& p) {
    if (p.icmp_type == 8) {
      send_icmp(at, p.src, 0, p.payload_len, p.flow_id, p.icmp_seq);
      return;
    }
    if (p.icmp_type == 0) {
      Flow* f = flow_of(p.flow_id);
      if (f && at == f->client) client_datagram(*f, p.payload_len);
    }
  }

  // ------------------------------------------------------------------ worm

  void setup_worm() {
    const WormSetup& ws = *opt.worm;
    worm = &ws.config;
    ws.config.validate();
    tracker.emplace(topo.nodes.size(), ws.vulnerable);
    if (ws.origin >= topo.nodes.size() || !tracker->vulnerable(ws.origin)) {
      throw ConfigError("worm origin is not in the vulnerable population");
    }
    scan_range = AddressSet(ws.config.scan_range.empty() ? populated_blocks(topo) : ws.config.scan_range);
    res.origin = ws.origin;
    for (NodeId id : host_ids) hosts[id]->worm_rng = &engine.rng_stream("worm.host." + std::to_string(id));
  }

  void start_worm() {
    const NodeId origin = opt.worm->origin;
    const SimTime start = opt.worm->start;
    if (start >= opt.duration) return;
    engine.schedule(start, EventKind::kTimerExpiry, origin, [this, origin] {
      if (tracker->infect(origin, kNoNode, now())) on_infected(origin);
    });
  }

  TargetChooser& chooser_of(Host& h) {
    if (!h.chooser) {
      const auto& node = topo.nodes[h.id];
      h.chooser.emplace(worm->scanning, scan_range, h.addr, topo.subnets[node.subnet_id].prefix);
    }
    return *h.chooser;
  }

  Ipv4 next_target(Host& h) {
    const TargetChoice c = chooser_of(h).choose(*h.worm_rng);
    res.worm.class_draws[static_cast<int>(c.drawn)]++;
    if (c.fell_back) res.worm.locality_fallbacks++;
    return c.address;
  }

  void on_infected(NodeId id) {
    Host& h = *hosts[id];
    h.scanning = true;
    if (worm->recovery_probability > 0.0) {
      const SimTime at = recovery_time(now(), worm->recovery_probability, *h.worm_rng);
      if (at < opt.duration) {
        h.recovery_event = engine.schedule(at, EventKind::kRecoveryCheck, id, [this, id] { recover(id); });
      }
    }
    if (worm->transport == Transport::kUdp) {
      send_probe(id);
    } else {
      for (std::uint32_t i = 0; i < *worm->concurrent_connections; ++i) spawn_thread(id);
    }
  }

  void recover(NodeId id) {
    Host& h = *hosts[id];
    tracker->recover(id, now());
    h.scanning = false;
    if (h.probe_event.valid()) engine.cancel(h.probe_event);
    h.probe_event = EventId{};
    const auto threads = h.worm_threads;
    h.worm_threads.clear();
    for (auto cid : threads) {
      Conn& c = *conns[cid];
      if (c.finished) continue;
      if (c.tcp.state() != TcpState::kClosed) {
        const bool had_peer = c.tcp.state() != TcpState::kSynSent;
        const TcpSegment rst = c.tcp.abort();
        if (had_peer) send_segment(c, rst);
      }
      res.worm.connections_failed++;
      finish_conn(c);
    }
  }

  void send_probe(NodeId id) {
    Host& h = *hosts[id];
    if (!h.scanning) return;
    Packet p;
    p.protocol = Protocol::kUdp;
    p.dst = next_target(h);
    p.src_port = static_cast<std::uint16_t>(h.worm_rng->uniform_int(1024, 65535));
    p.dst_port = worm->infection_port;
    p.payload_len = worm->payload_length;
    p.origin = Origin::kWorm;
    p.flow_id = kWormFlowBit | ++worm_flow_counter;
    res.worm.probes_sent++;
    host_send(id, p);
    const SimTime gap = to_time(worm->probe_interval->draw(*h.worm_rng));
    h.probe_event = engine.schedule(now() + std::max(gap, SimTime::from_ns(1)), EventKind::kProbeDue, id,
                                    [this, id] { send_probe(id); });
  }

  void infect(NodeId victim, NodeId attacker, const Ipv4& attacker_addr, std::uint64_t packet_id) {
    if (!tracker->infect(victim, attacker, now())) return;
    res.infections.push_back({now(), attacker_addr, topo.nodes[victim].address, worm->transport, packet_id});
    on_infected(victim);
  }

  void worm_probe_received(NodeId at, const Packet& p) {
    if (!worm || worm->transport != Transport::kUdp || p.dst_port != worm->infection_port) return;
    if (p.payload_len < worm->payload_length) return;
    infect(at, p.src_node, p.src, p.id);
  }

  void spawn_thread(NodeId id) {
    Host& h = *hosts[id];
    if (!h.scanning) return;
    const Ipv4 target = next_target(h);
    const NodeId remote = node_of(target);
    const std::uint64_t fid = kWormFlowBit | ++worm_flow_counter;
    const std::uint16_t port = h.ports.allocate(*h.worm_rng);
    auto tcp = TcpConnection::client(tcp_config(id, remote), iss_for(fid, 0));
    Conn& c = new_conn(id, remote, target, port, worm->infection_port, ConnRole::kWormAttacker, Origin::kWorm, fid,
                       std::move(tcp));
    c.port_owned = true;
    h.worm_threads.push_back(c.id);
    res.worm.connections_started++;
    res.worm.max_concurrent_connections =
        std::max(res.worm.max_concurrent_connections, static_cast<std::uint32_t>(h.worm_threads.size()));
    apply(c, c.tcp.open(now()));
  }

  void retire_thread(Conn& c, bool ok) {
    Host& h = *hosts[c.host];
    auto it = std::find(h.worm_threads.begin(), h.worm_threads.end(), c.id);
    if (it == h.worm_threads.end()) return;
    h.worm_threads.erase(it);
    (ok ? res.worm.connections_completed : res.worm.connections_failed)++;
    finish_conn(c);
    spawn_thread(c.host);
  }

  void worm_attacker_event(Conn& c, const TcpOutput& out) {
    if (out.connected) apply(c, c.tcp.send(worm->payload_length, now()));
    if (out.send_complete) apply(c, c.tcp.close(now()));
    if (out.peer_closed && c.tcp.state() != TcpState::kClosed) apply(c, c.tcp.close(now()));
    if (out.closed) retire_thread(c, true);
    if (out.failed) retire_thread(c, false);
  }

  void worm_victim_event(Conn& c, const TcpOutput& out) {
    if (out.delivered && c.rx >= worm->payload_length && c.rx - out.delivered < worm->payload_length) {
      infect(c.host, c.remote_node, c.remote, current_packet_id);
    }
    if (out.peer_closed) apply(c, c.tcp.close(now()));
  }

  // ------------------------------------------------------------------- run

  const SimulationResult& run() {
    if (ran) throw std::logic_error("Simulation::run called twice");
    ran = true;
    if (opt.background) start_background();
    if (opt.worm) start_worm();
    engine.run_until(opt.duration);
    res.events_processed = engine.stats().events_processed;
    for (NodeId id : host_ids) res.network.port_reuses += hosts[id]->ports.reuse_count();
    for (auto& f : flows) {
      if (!f->done) res.flows[f->record].delivered_bytes = f->client_rx + f->server_rx;
    }
    if (tracker) {
      res.transitions = tracker->transitions();
      res.final_infected = tracker->infected();
      res.final_recovered = tracker->recovered();
    }
    return res;
  }
};

Simulation::Simulation(const Topology& topo, SimulationOptions options)
    : impl_(std::make_unique<Impl>(topo, std::move(options))) {}

Simulation::~Simulation() = default;

const SimulationResult& Simulation::run() { return impl_->run(); }
const SimulationResult& Simulation::result() const { return impl_->res; }
const Routing& Simulation::routing() const { return impl_->routing; }
const AddressPlan& Simulation::address_plan() const { return impl_->plan; }
const InfectionTracker* Simulation::tracker() const { return impl_->tracker ? &*impl_->tracker : nullptr; }

}  // namespace wormbench
