#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trigsim/jitter.hpp"
#include "trigsim/rng.hpp"
#include "trigsim/time.hpp"

namespace trigsim {

using NodeId = std::uint32_t;

enum class NodeKind : std::uint8_t {
    clock_root,   // common reference oscillator
    fanout_unit,  // clock/trigger distribution chip
    master_awg,
    slave_awg,
    adc,
};

enum class LinkPurpose : std::uint8_t {
    clock,          // reference clock distribution
    trigger,        // downstream trigger fanout
    trigger_return, // loopback tap from the fanout tree to the master input
};

struct Node {
    NodeId id;
    NodeKind kind;
    std::string label;
};

struct Link {
    NodeId from;
    NodeId to;
    LinkPurpose purpose;
    Duration nominal_delay;
    JitterSpec jitter;
};

// Distribution network for one control rack: a clock tree and a star-shaped
// trigger fanout, both rooted at shared infrastructure. Construction
// validates the invariants; a Topology instance is immutable afterwards.
class Topology {
public:
    Topology(std::vector<Node> nodes, std::vector<Link> links,
             std::uint32_t fanout_width);

    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<Link>& links() const { return links_; }
    std::uint32_t fanout_width() const { return fanout_width_; }

    const Node& node(NodeId id) const;
    NodeId master() const { return master_; }
    const std::vector<NodeId>& slaves() const { return slaves_; }

    // Unique trigger route from the master to a slave (indices into
    // links()). Throws TopologyError if none exists.
    std::vector<std::size_t> trigger_path(NodeId slave) const;

    // Master -> fanout tree -> master loopback route used for round-trip
    // delay probing. Throws TopologyError if the return tap is missing.
    std::vector<std::size_t> return_path() const;

    // Clock route from the clock root to an AWG.
    std::vector<std::size_t> clock_path(NodeId awg) const;

private:
    std::vector<std::size_t> route(NodeId from, NodeId to,
                                   bool clock_links) const;
    void validate() const;

    std::vector<Node> nodes_;
    std::vector<Link> links_;
    std::uint32_t fanout_width_;
    NodeId master_ = 0;
    std::vector<NodeId> slaves_;
};

// Total delay along a sequence of links: sum of nominal delays plus one
// jitter draw per link. Draw order follows the path order.
Duration propagation_delay(const Topology& topo,
                           std::span<const std::size_t> path, RngHandle& rng);

// Device ceiling for a fanout chip driven through `levels` cascade stages:
// width outputs per chip, every output at the last stage feeding one AWG.
// levels = 0 means a single chip. Throws ConfigError on zero width or if
// the count overflows 64 bits.
std::uint64_t max_supported_awgs(std::uint32_t fanout_width, std::uint32_t levels);

struct ResourceEstimate {
    std::uint64_t awg_channels;
    std::uint64_t adc_units;
};

// Channel budget for an N qubit machine: 4 AWG channels per qubit (XY pair
// plus Z plus readout drive) and one 4-channel ADC unit per 4 qubits.
ResourceEstimate resources_for_qubits(std::uint64_t qubits);

struct StarTopologyConfig {
    std::uint32_t n_slaves = 10;
    std::uint32_t fanout_width = 28;
    // Delay for every trigger and trigger_return link.
    Duration trigger_link_delay = nanoseconds(1);
    // Per trigger-link jitter (applied per pulse traversal).
    JitterSpec trigger_link_jitter = JitterSpec::none();
    // Clock links get zero delay by default: a shared low-skew clock plane.
    Duration clock_link_delay = Duration(0);
    JitterSpec clock_link_jitter = JitterSpec::none();
};

// Builds the reference rack layout: one clock root feeding every AWG
// directly, one master AWG driving a fanout tree of the minimum uniform
// depth that reaches n_slaves + 1 endpoints (the extra endpoint is the
// loopback tap to the master used for calibration), and one slave AWG per
// leaf output. Every slave sits at the same tree depth, so nominal trigger
// delays are equal by construction.
Topology build_star_topology(const StarTopologyConfig& config);

} // namespace trigsim
