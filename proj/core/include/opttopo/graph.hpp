#ifndef OPTTOPO_GRAPH_HPP
#define OPTTOPO_GRAPH_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "opttopo/dimension.hpp"
#include "opttopo/polynomial.hpp"

namespace opttopo {

/// One subsystem with its model and the per-node role of every dimension it
/// touches. The parameter lists partition the model inputs; the effort,
/// benefit and internal lists partition the outputs. A dimension listed under
/// effort_dims is either fed by an incoming flow edge or drawn from the
/// virtual root.
struct SubsystemNode {
    std::string name;
    PolynomialModel model;
    std::vector<std::string> free_params;
    std::vector<std::string> coupling_params;
    std::vector<std::string> external_params;
    std::vector<std::string> effort_dims;
    std::vector<std::string> benefit_dims;
    std::vector<std::string> internal_dims;

    bool operator==(const SubsystemNode&) const = default;
};

/// Directed energy flow: the named dimension is a benefit of `from` acting as
/// an effort of `to`, discretized in steps of `step_size`.
struct FlowEdge {
    std::string from;
    std::string to;
    std::string dimension;
    double step_size = 0.0;

    bool operator==(const FlowEdge&) const = default;
};

struct SinkSpec {
    std::string node;
    std::string dimension;
    double step_size = 0.0;

    bool operator==(const SinkSpec&) const = default;
};

/// Reserved names of the two virtual endpoints in topological listings.
inline constexpr const char* kRootName = "root";
inline constexpr const char* kSinkName = "sink";

/// Validated directed acyclic system: subsystem nodes joined by flow edges,
/// a virtual root merging all weighted energy draws and a virtual sink
/// carrying the single request dimension.
class SystemGraph {
  public:
    DimensionRegistry dimensions;
    std::vector<SubsystemNode> nodes;
    std::vector<FlowEdge> edges;
    std::map<std::string, double> root_weights; // energy type (unit) -> weight
    SinkSpec sink;
    std::map<std::string, double> external_defaults;

    /// Validates and freezes the graph; throws CycleDetected, DanglingFlow,
    /// Orphan, MultipleSinks, UnsupportedSplit, MissingWeight, UnknownDimension
    /// or BadModel. Must be called before any traversal query.
    void finalize();
    bool finalized() const { return finalized_; }

    std::size_t node_index(const std::string& name) const;
    const SubsystemNode& node(const std::string& name) const { return nodes[node_index(name)]; }

    /// Subsystem node indices in traversal order (virtual endpoints excluded).
    const std::vector<std::size_t>& solve_order() const;

    /// Incoming / outgoing flow edges per node index.
    const std::vector<std::vector<std::size_t>>& in_edges() const;
    const std::vector<std::vector<std::size_t>>& out_edges() const;

    /// Effort dimensions of a node that draw from the virtual root (not fed
    /// by any incoming edge).
    const std::vector<std::string>& root_draws(std::size_t node_idx) const;

    bool operator==(const SystemGraph& other) const;

  private:
    bool finalized_ = false;
    std::map<std::string, std::size_t> node_index_;
    std::vector<std::size_t> solve_order_;
    std::vector<std::vector<std::size_t>> in_edges_;
    std::vector<std::vector<std::size_t>> out_edges_;
    std::vector<std::vector<std::string>> root_draws_;
};

/// Fills every node's role lists from the registered dimension kinds and the
/// edge set: inputs partition by kind; an output of kind benefit fed by an
/// incoming edge is a flow effort of that node, otherwise its benefit.
/// Builders call this before finalize().
void derive_roles(SystemGraph& g);

/// Full traversal order including the virtual endpoints:
/// ["root", subsystem names..., "sink"]. Nodes in the same layer are ordered
/// lexicographically so the order is deterministic.
std::vector<std::string> topological_order(const SystemGraph& g);

/// Weighted sum of root energy inputs. Throws MissingWeight when an input
/// type has no weight.
double commensurate_effort(const std::map<std::string, double>& root_inputs,
                           const std::map<std::string, double>& weights);

} // namespace opttopo

#endif
