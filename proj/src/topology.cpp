#include "twinsim/topology.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace twinsim {

namespace {

constexpr NodeId kNoHop = std::numeric_limits<NodeId>::max();

std::vector<std::vector<NodeId>> adjacency(const NetworkGraph& g) {
  std::vector<std::vector<NodeId>> adj(g.nodes.size());
  for (const Link& l : g.links) {
    adj[l.a].push_back(l.b);
    adj[l.b].push_back(l.a);
  }
  for (const Wlan& w : g.wlans) {
    for (NodeId sta : w.stations) {
      adj[w.ap].push_back(sta);
      adj[sta].push_back(w.ap);
    }
  }
  for (auto& row : adj) std::sort(row.begin(), row.end());
  return adj;
}

}  // namespace

const char* to_string(NodeRole role) {
  switch (role) {
    case NodeRole::CoreSwitch: return "core-switch";
    case NodeRole::DistributionSwitch: return "distribution-switch";
    case NodeRole::AccessSwitch: return "access-switch";
    case NodeRole::AccessPoint: return "access-point";
    case NodeRole::Station: return "station";
    case NodeRole::DtServer: return "dt-server";
  }
  return "?";
}

const char* to_string(TopologyScale scale) {
  switch (scale) {
    case TopologyScale::Small: return "small";
    case TopologyScale::Middle: return "middle";
    case TopologyScale::Large: return "large";
  }
  return "?";
}

TopologyScale scale_from_string(const std::string& name) {
  if (name == "small") return TopologyScale::Small;
  if (name == "middle") return TopologyScale::Middle;
  if (name == "large") return TopologyScale::Large;
  throw std::runtime_error("unknown topology scale: " + name);
}

ScaleSpec scale_spec(TopologyScale scale) {
  switch (scale) {
    case TopologyScale::Small: return {"small", 4, 2, 2};
    case TopologyScale::Middle: return {"middle", 16, 4, 8};
    case TopologyScale::Large: return {"large", 32, 8, 16};
  }
  throw std::runtime_error("bad scale");
}

NodeId NetworkGraph::dt_server() const {
  for (const Node& n : nodes) {
    if (n.role == NodeRole::DtServer) return n.id;
  }
  throw std::runtime_error("graph has no dt-server node");
}

std::vector<NodeId> NetworkGraph::nodes_with_role(NodeRole role) const {
  std::vector<NodeId> out;
  for (const Node& n : nodes) {
    if (n.role == role) out.push_back(n.id);
  }
  return out;
}

std::size_t NetworkGraph::count_role(NodeRole role) const {
  return nodes_with_role(role).size();
}

int NetworkGraph::wlan_of(NodeId station) const {
  for (std::size_t i = 0; i < wlans.size(); ++i) {
    const Wlan& w = wlans[i];
    if (std::find(w.stations.begin(), w.stations.end(), station) != w.stations.end()) {
      return static_cast<int>(i);
    }
  }
  return -1;
}

void NetworkGraph::validate() const {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].id != i) throw std::runtime_error("node ids must be dense and ordered");
  }
  if (count_role(NodeRole::CoreSwitch) != 2) {
    throw std::runtime_error("topology needs exactly 2 core switches");
  }
  if (count_role(NodeRole::DistributionSwitch) < 2) {
    throw std::runtime_error("topology needs at least 2 distribution switches");
  }
  if (count_role(NodeRole::DtServer) != 1) {
    throw std::runtime_error("topology needs exactly one dt-server");
  }
  std::set<std::uint32_t> channels;
  std::set<NodeId> wlan_members;
  for (const Wlan& w : wlans) {
    if (!channels.insert(w.channel).second) {
      throw std::runtime_error("WLAN channels must be pairwise distinct");
    }
    if (nodes.at(w.ap).role != NodeRole::AccessPoint) {
      throw std::runtime_error("WLAN anchor must be an access point");
    }
    for (NodeId sta : w.stations) {
      if (!wlan_members.insert(sta).second) {
        throw std::runtime_error("station belongs to more than one WLAN");
      }
    }
  }
  for (const Link& l : links) {
    if (l.a >= nodes.size() || l.b >= nodes.size() || l.a == l.b) {
      throw std::runtime_error("malformed link endpoints");
    }
    if (l.rate_bps <= 0) throw std::runtime_error("link rate must be positive");
  }
  // Connectivity over wired links + WLAN association edges.
  auto adj = adjacency(*this);
  std::vector<char> seen(nodes.size(), 0);
  std::deque<NodeId> frontier{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    NodeId u = frontier.front();
    frontier.pop_front();
    for (NodeId v : adj[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        frontier.push_back(v);
      }
    }
  }
  if (reached != nodes.size()) throw std::runtime_error("graph is not connected");
}

NetworkGraph build_topology(TopologyScale scale, const TopologyParams& params) {
  const ScaleSpec spec = scale_spec(scale);
  NetworkGraph g;

  auto add_node = [&g](NodeRole role) {
    const NodeId id = static_cast<NodeId>(g.nodes.size());
    g.nodes.push_back(Node{id, role});
    return id;
  };
  auto l3 = [&](NodeId a, NodeId b) {
    g.links.push_back(Link{a, b, params.l3_rate_bps, params.l3_delay_ns, params.queue_capacity});
  };
  auto l2 = [&](NodeId a, NodeId b) {
    g.links.push_back(Link{a, b, params.l2_rate_bps, params.l2_delay_ns, params.queue_capacity});
  };

  std::vector<NodeId> cores, dists, accesses, aps;
  for (int i = 0; i < 2; ++i) cores.push_back(add_node(NodeRole::CoreSwitch));
  for (int i = 0; i < spec.distribution_switches; ++i) {
    dists.push_back(add_node(NodeRole::DistributionSwitch));
  }
  for (int i = 0; i < spec.access_switches; ++i) {
    accesses.push_back(add_node(NodeRole::AccessSwitch));
  }
  for (int i = 0; i < spec.ap_count; ++i) aps.push_back(add_node(NodeRole::AccessPoint));

  l3(cores[0], cores[1]);
  for (NodeId d : dists) {
    l3(cores[0], d);
    l3(cores[1], d);
  }
  const int pairs = spec.distribution_switches / 2;
  for (int p = 0; p < pairs; ++p) l3(dists[2 * p], dists[2 * p + 1]);

  const int accesses_per_pair = spec.access_switches / pairs;
  for (int i = 0; i < spec.access_switches; ++i) {
    const int p = i / accesses_per_pair;
    l3(dists[2 * p], accesses[i]);
    l3(dists[2 * p + 1], accesses[i]);
  }

  for (int k = 0; k < spec.ap_count; ++k) l2(accesses[k / 2], aps[k]);

  for (int k = 0; k < spec.ap_count; ++k) {
    Wlan w;
    w.ap = aps[k];
    w.channel = static_cast<std::uint32_t>(k);
    for (int s = 0; s < params.stations_per_ap; ++s) {
      w.stations.push_back(add_node(NodeRole::Station));
    }
    g.wlans.push_back(std::move(w));
  }

  const NodeId dt = add_node(NodeRole::DtServer);
  l3(cores[0], dt);

  g.validate();
  return g;
}

StationAssignment assign_stations(const NetworkGraph& graph, double td_fraction,
                                  RandomStream& rng) {
  if (td_fraction < 0.0 || td_fraction > 1.0) {
    throw std::runtime_error("td fraction must lie in [0, 1]");
  }
  StationAssignment out;
  out.role.assign(graph.nodes.size(), StationRole::EndUser);
  for (const Wlan& w : graph.wlans) {
    std::vector<NodeId> members = w.stations;
    const auto want = static_cast<std::size_t>(
        std::llround(static_cast<double>(members.size()) * td_fraction));
    // Partial Fisher-Yates: the first `want` positions become twinned.
    for (std::size_t i = 0; i < want; ++i) {
      const std::size_t j =
          i + static_cast<std::size_t>(rng.uniform_int(members.size() - 1 - i));
      std::swap(members[i], members[j]);
      out.role[members[i]] = StationRole::TwinnedDevice;
    }
  }
  for (const Node& n : graph.nodes) {
    if (n.role != NodeRole::Station) continue;
    if (out.role[n.id] == StationRole::TwinnedDevice) {
      out.twinned.push_back(n.id);
    } else {
      out.end_users.push_back(n.id);
    }
  }
  return out;
}

RoutingTable RoutingTable::compute(const NetworkGraph& graph) {
  graph.validate();
  RoutingTable table;
  const auto n = static_cast<std::uint32_t>(graph.nodes.size());
  table.n_ = n;
  table.next_.assign(static_cast<std::size_t>(n) * n, kNoHop);
  const auto adj = adjacency(graph);

  std::vector<std::uint32_t> dist(n);
  std::deque<NodeId> frontier;
  for (NodeId dest = 0; dest < n; ++dest) {
    std::fill(dist.begin(), dist.end(), std::numeric_limits<std::uint32_t>::max());
    dist[dest] = 0;
    frontier.assign(1, dest);
    while (!frontier.empty()) {
      const NodeId u = frontier.front();
      frontier.pop_front();
      for (NodeId v : adj[u]) {
        if (dist[v] > dist[u] + 1) {
          dist[v] = dist[u] + 1;
          frontier.push_back(v);
        }
      }
    }
    for (NodeId node = 0; node < n; ++node) {
      if (node == dest) continue;
      // Lowest-id neighbor one hop closer to dest; adj rows are sorted.
      for (NodeId nbr : adj[node]) {
        if (dist[nbr] + 1 == dist[node]) {
          table.next_[static_cast<std::size_t>(dest) * n + node] = nbr;
          break;
        }
      }
      if (table.next_[static_cast<std::size_t>(dest) * n + node] == kNoHop) {
        throw std::runtime_error("disconnected graph: no route");
      }
    }
  }
  return table;
}

NodeId RoutingTable::next_hop(NodeId from, NodeId dest) const {
  if (from == dest) return from;
  const NodeId hop = next_[static_cast<std::size_t>(dest) * n_ + from];
  if (hop == kNoHop) throw std::logic_error("missing route");
  return hop;
}

std::vector<NodeId> RoutingTable::path(NodeId from, NodeId dest) const {
  std::vector<NodeId> out;
  NodeId cur = from;
  while (cur != dest) {
    cur = next_hop(cur, dest);
    out.push_back(cur);
    if (out.size() > n_) throw std::logic_error("routing loop");
  }
  return out;
}

std::size_t RoutingTable::hop_count(NodeId from, NodeId dest) const {
  return path(from, dest).size();
}

std::string topology_json(const NetworkGraph& graph, const RoutingTable& routes) {
  nlohmann::json j;
  j["nodes"] = nlohmann::json::array();
  for (const Node& n : graph.nodes) {
    j["nodes"].push_back({{"id", n.id}, {"role", to_string(n.role)}});
  }
  j["links"] = nlohmann::json::array();
  for (const Link& l : graph.links) {
    j["links"].push_back({{"a", l.a},
                          {"b", l.b},
                          {"rate_bps", l.rate_bps},
                          {"delay_s", ns_to_seconds(l.prop_delay_ns)},
                          {"queue_capacity", l.queue_capacity}});
  }
  j["wlans"] = nlohmann::json::array();
  for (const Wlan& w : graph.wlans) {
    j["wlans"].push_back({{"ap", w.ap}, {"channel", w.channel}, {"stations", w.stations}});
  }
  // routes[dest][node] = next hop toward dest.
  nlohmann::json r = nlohmann::json::object();
  for (NodeId dest = 0; dest < graph.nodes.size(); ++dest) {
    nlohmann::json per_dest = nlohmann::json::object();
    for (NodeId node = 0; node < graph.nodes.size(); ++node) {
      if (node == dest) continue;
      per_dest[std::to_string(node)] = routes.next_hop(node, dest);
    }
    r[std::to_string(dest)] = std::move(per_dest);
  }
  j["routes"] = std::move(r);
  return j.dump(2);
}

}  // namespace twinsim
