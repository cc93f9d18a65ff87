#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "twinsim/rng.hpp"
#include "twinsim/time.hpp"

namespace twinsim {

using NodeId = std::uint32_t;

enum class NodeRole : std::uint8_t {
  CoreSwitch,
  DistributionSwitch,
  AccessSwitch,
  AccessPoint,
  Station,
  DtServer,
};

const char* to_string(NodeRole role);

struct Node {
  NodeId id;
  NodeRole role;
};

// Undirected point-to-point link; each direction gets its own queue at
// run time.
struct Link {
  NodeId a;
  NodeId b;
  std::int64_t rate_bps;
  SimTime prop_delay_ns;
  std::size_t queue_capacity;
};

struct Wlan {
  NodeId ap;
  std::uint32_t channel;
  std::vector<NodeId> stations;
};

struct NetworkGraph {
  std::vector<Node> nodes;  // node id == index
  std::vector<Link> links;
  std::vector<Wlan> wlans;

  NodeId dt_server() const;
  std::vector<NodeId> nodes_with_role(NodeRole role) const;
  std::size_t count_role(NodeRole role) const;
  int wlan_of(NodeId station) const;  // index into wlans, -1 if none

  // Throws std::runtime_error when a structural invariant is broken
  // (dense ids, two cores, >=2 distribution switches, distinct WLAN
  // channels, single DT server, connected graph).
  void validate() const;
};

enum class TopologyScale : std::uint8_t { Small, Middle, Large };

const char* to_string(TopologyScale scale);
TopologyScale scale_from_string(const std::string& name);

struct TopologyParams {
  std::int64_t l3_rate_bps = 1'000'000;
  SimTime l3_delay_ns = 2 * kNanosPerMilli;
  std::int64_t l2_rate_bps = 500'000;
  SimTime l2_delay_ns = 1 * kNanosPerMilli;
  std::size_t queue_capacity = 100;
  int stations_per_ap = 10;
};

struct ScaleSpec {
  const char* name;
  int ap_count;
  int distribution_switches;
  int access_switches;
};

ScaleSpec scale_spec(TopologyScale scale);

// Three-tier preset: 2 cores interlinked, distribution switches in linked
// pairs uplinked to both cores, access switches uplinked to both members
// of one distribution pair, 2 APs per access switch, 10 stations per AP,
// DT server on core 0. L3 links for everything switch-level plus the DT
// attachment; L2 links from access switch to AP; the AP<->station hop is
// the WLAN MAC, not a link.
NetworkGraph build_topology(TopologyScale scale, const TopologyParams& params = {});

enum class StationRole : std::uint8_t { TwinnedDevice, EndUser };

struct StationAssignment {
  // Indexed by node id; meaningful only for stations.
  std::vector<StationRole> role;
  std::vector<NodeId> twinned;    // sorted by id
  std::vector<NodeId> end_users;  // sorted by id
};

// Per WLAN, round(stations * td_fraction) members become twinned devices;
// which ones is drawn from `rng`.
StationAssignment assign_stations(const NetworkGraph& graph, double td_fraction,
                                  RandomStream& rng);

// All-pairs next-hop table from per-destination BFS; ties go to the
// lowest next-hop node id. The routing graph is wired links plus the
// AP<->station association edges.
class RoutingTable {
 public:
  static RoutingTable compute(const NetworkGraph& graph);

  NodeId next_hop(NodeId from, NodeId dest) const;
  std::vector<NodeId> path(NodeId from, NodeId dest) const;  // excludes `from`
  std::size_t hop_count(NodeId from, NodeId dest) const;

 private:
  std::uint32_t n_ = 0;
  std::vector<NodeId> next_;  // next_[dest * n_ + node]
};

// Structured dump (nodes, links, wlans, routes) for inspection and
// golden-file tests.
std::string topology_json(const NetworkGraph& graph, const RoutingTable& routes);

}  // namespace twinsim
