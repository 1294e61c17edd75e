#include "trigsim/topology.hpp"

#include <algorithm>
#include <deque>
#include <limits>

namespace trigsim {

Topology::Topology(std::vector<Node> nodes, std::vector<Link> links,
                   std::uint32_t fanout_width)
    : nodes_(std::move(nodes)), links_(std::move(links)),
      fanout_width_(fanout_width) {
    validate();
    for (const Node& n : nodes_) {
        if (n.kind == NodeKind::master_awg) master_ = n.id;
        if (n.kind == NodeKind::slave_awg) slaves_.push_back(n.id);
    }
    std::sort(slaves_.begin(), slaves_.end());
}

const Node& Topology::node(NodeId id) const {
    if (id >= nodes_.size()) throw TopologyError("node id out of range");
    return nodes_[id];
}

void Topology::validate() const {
    if (fanout_width_ == 0) throw TopologyError("fanout width must be >= 1");

    std::size_t clock_roots = 0, masters = 0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (nodes_[i].id != i)
            throw TopologyError("node ids must equal their index");
        if (nodes_[i].kind == NodeKind::clock_root) ++clock_roots;
        if (nodes_[i].kind == NodeKind::master_awg) ++masters;
    }
    if (clock_roots != 1) throw TopologyError("topology needs exactly one clock root");
    if (masters != 1) throw TopologyError("topology needs exactly one master AWG");

    std::vector<std::uint32_t> trigger_out(nodes_.size(), 0);
    std::vector<std::uint32_t> trigger_in(nodes_.size(), 0);
    std::vector<std::uint32_t> clock_in(nodes_.size(), 0);
    std::size_t return_links = 0;
    for (const Link& l : links_) {
        if (l.from >= nodes_.size() || l.to >= nodes_.size())
            throw TopologyError("link references unknown node");
        if (l.from == l.to) throw TopologyError("link endpoints must differ");
        if (l.nominal_delay.count() < 0)
            throw TopologyError("link delay must be >= 0");
        l.jitter.validate();
        switch (l.purpose) {
            case LinkPurpose::clock:
                ++clock_in[l.to];
                break;
            case LinkPurpose::trigger_return:
                ++return_links;
                if (nodes_[l.to].kind != NodeKind::master_awg)
                    throw TopologyError("return link must end at the master");
                [[fallthrough]];
            case LinkPurpose::trigger:
                ++trigger_out[l.from];
                ++trigger_in[l.to];
                break;
        }
    }
    if (return_links > 1)
        throw TopologyError("at most one return link is allowed");

    for (const Node& n : nodes_) {
        if (clock_in[n.id] > 1)
            throw TopologyError("node has more than one clock source");
        if (n.kind == NodeKind::fanout_unit && trigger_out[n.id] > fanout_width_)
            throw TopologyError("fanout unit exceeds its output width");
        if (n.kind == NodeKind::slave_awg && trigger_in[n.id] != 1)
            throw TopologyError("each slave needs exactly one trigger input");
    }
}

std::vector<std::size_t> Topology::route(NodeId from, NodeId to,
                                         bool clock_links) const {
    // BFS over links of one class; link order breaks ties, so routes are
    // deterministic for a given topology.
    constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> via(nodes_.size(), kNone);
    std::vector<char> seen(nodes_.size(), 0);
    std::deque<NodeId> frontier{from};
    seen[from] = 1;
    while (!frontier.empty()) {
        const NodeId at = frontier.front();
        frontier.pop_front();
        if (at == to) break;
        for (std::size_t i = 0; i < links_.size(); ++i) {
            const Link& l = links_[i];
            const bool is_clock = l.purpose == LinkPurpose::clock;
            if (is_clock != clock_links) continue;
            if (!clock_links && l.purpose == LinkPurpose::trigger_return) continue;
            if (l.from != at || seen[l.to]) continue;
            seen[l.to] = 1;
            via[l.to] = i;
            frontier.push_back(l.to);
        }
    }
    if (!seen[to] || (to != from && via[to] == kNone))
        throw TopologyError("no route between the requested nodes");
    std::vector<std::size_t> path;
    for (NodeId at = to; at != from; at = links_[via[at]].from)
        path.push_back(via[at]);
    std::reverse(path.begin(), path.end());
    return path;
}

std::vector<std::size_t> Topology::trigger_path(NodeId slave) const {
    if (node(slave).kind != NodeKind::slave_awg)
        throw TopologyError("trigger_path target must be a slave AWG");
    return route(master_, slave, false);
}

std::vector<std::size_t> Topology::return_path() const {
    for (std::size_t i = 0; i < links_.size(); ++i) {
        if (links_[i].purpose != LinkPurpose::trigger_return) continue;
        std::vector<std::size_t> path;
        if (links_[i].from != master_)
            path = route(master_, links_[i].from, false);
        path.push_back(i);
        return path;
    }
    throw TopologyError("topology has no return link for round-trip probing");
}

std::vector<std::size_t> Topology::clock_path(NodeId awg) const {
    NodeId root = 0;
    for (const Node& n : nodes_)
        if (n.kind == NodeKind::clock_root) root = n.id;
    return route(root, awg, true);
}

Duration propagation_delay(const Topology& topo,
                           std::span<const std::size_t> path, RngHandle& rng) {
    Duration total{0};
    for (const std::size_t i : path) {
        if (i >= topo.links().size()) throw TopologyError("path link index out of range");
        const Link& l = topo.links()[i];
        total += l.nominal_delay + sample_jitter(l.jitter, rng);
    }
    return total;
}

std::uint64_t max_supported_awgs(std::uint32_t fanout_width, std::uint32_t levels) {
    if (fanout_width == 0) throw ConfigError("fanout width must be >= 1");
    std::uint64_t total = 1;
    for (std::uint32_t i = 0; i <= levels; ++i) {
        if (total > std::numeric_limits<std::uint64_t>::max() / fanout_width)
            throw ConfigError("AWG capacity overflows 64 bits");
        total *= fanout_width;
    }
    return total;
}

ResourceEstimate resources_for_qubits(std::uint64_t qubits) {
    return ResourceEstimate{4 * qubits, (qubits + 3) / 4};
}

Topology build_star_topology(const StarTopologyConfig& config) {
    if (config.fanout_width == 0) throw ConfigError("fanout width must be >= 1");
    if (config.trigger_link_delay.count() < 0 || config.clock_link_delay.count() < 0)
        throw ConfigError("link delays must be >= 0");
    config.trigger_link_jitter.validate();
    config.clock_link_jitter.validate();

    // One endpoint per slave plus the loopback tap that lets the master
    // measure the round trip.
    const std::uint64_t endpoints = static_cast<std::uint64_t>(config.n_slaves) + 1;
    const std::uint64_t width = config.fanout_width;
    std::uint32_t levels = 1;
    std::uint64_t reach = width;
    while (reach < endpoints) {
        if (reach > std::numeric_limits<std::uint64_t>::max() / width)
            throw ConfigError("slave count exceeds representable fanout depth");
        reach *= width;
        ++levels;
    }

    // Unit counts per level, deepest first: level k fans out to level k+1,
    // the last level drives the endpoints.
    std::vector<std::uint64_t> units_at(levels);
    std::uint64_t need = endpoints;
    for (std::uint32_t lvl = levels; lvl-- > 0;) {
        need = (need + width - 1) / width;
        units_at[lvl] = need;
    }
    // units_at[0] == 1 by choice of `levels`.

    std::vector<Node> nodes;
    std::vector<Link> links;
    const NodeId clock_root = 0;
    const NodeId master = 1;
    nodes.push_back({clock_root, NodeKind::clock_root, "clock"});
    nodes.push_back({master, NodeKind::master_awg, "awg-master"});

    std::vector<std::vector<NodeId>> level_units(levels);
    NodeId next_id = 2;
    for (std::uint32_t lvl = 0; lvl < levels; ++lvl) {
        for (std::uint64_t i = 0; i < units_at[lvl]; ++i) {
            nodes.push_back({next_id, NodeKind::fanout_unit,
                             "fanout-" + std::to_string(lvl) + "." + std::to_string(i)});
            level_units[lvl].push_back(next_id++);
        }
    }
    std::vector<NodeId> slave_ids;
    for (std::uint32_t i = 0; i < config.n_slaves; ++i) {
        nodes.push_back({next_id, NodeKind::slave_awg, "awg-" + std::to_string(i)});
        slave_ids.push_back(next_id++);
    }

    // Clock plane: equal-length direct runs from the root to every AWG.
    links.push_back({clock_root, master, LinkPurpose::clock,
                     config.clock_link_delay, config.clock_link_jitter});
    for (const NodeId s : slave_ids)
        links.push_back({clock_root, s, LinkPurpose::clock,
                         config.clock_link_delay, config.clock_link_jitter});

    // Trigger tree: master -> root unit -> ... -> leaf units.
    links.push_back({master, level_units[0][0], LinkPurpose::trigger,
                     config.trigger_link_delay, config.trigger_link_jitter});
    for (std::uint32_t lvl = 0; lvl + 1 < levels; ++lvl) {
        const auto& parents = level_units[lvl];
        const auto& children = level_units[lvl + 1];
        for (std::size_t c = 0; c < children.size(); ++c)
            links.push_back({parents[c / width], children[c], LinkPurpose::trigger,
                             config.trigger_link_delay, config.trigger_link_jitter});
    }

    // Endpoint assignments, leaf units filled in order. Endpoint 0 is the
    // return tap, so it lands on the first leaf unit and the probe route
    // has the same depth as every slave route.
    const auto& leaves = level_units[levels - 1];
    for (std::uint64_t e = 0; e < endpoints; ++e) {
        const NodeId unit = leaves[e / width];
        if (e == 0)
            links.push_back({unit, master, LinkPurpose::trigger_return,
                             config.trigger_link_delay, config.trigger_link_jitter});
        else
            links.push_back({unit, slave_ids[e - 1], LinkPurpose::trigger,
                             config.trigger_link_delay, config.trigger_link_jitter});
    }

    return Topology(std::move(nodes), std::move(links), config.fanout_width);
}

} // namespace trigsim
