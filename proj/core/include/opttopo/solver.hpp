#ifndef OPTTOPO_SOLVER_HPP
#define OPTTOPO_SOLVER_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "opttopo/graph.hpp"
#include "opttopo/grid.hpp"

namespace opttopo {

/// Grid configuration for one solve. Parameter dimensions (free and coupling)
/// get `param_steps` levels unless overridden per dimension; flow dimensions
/// use the step size declared on their edge / the sink unless
/// `flow_step_override` replaces all of them.
struct DiscretizationSettings {
    int param_steps = 5;
    std::map<std::string, int> param_steps_override;
    std::optional<double> flow_step_override;
    double tie_tolerance = 1e-9; // relative, on cumulative root effort

    int steps_for(const std::string& dimension) const {
        auto it = param_steps_override.find(dimension);
        return it == param_steps_override.end() ? param_steps : it->second;
    }
};

/// Table key: the node's own benefit level plus the levels of every coupling
/// dimension that is still referenced by an unsolved node. Levels are grid
/// indices, so key comparison is exact.
struct TableKey {
    int benefit_index = 0;
    std::vector<std::pair<std::uint32_t, int>> coupling; // (dimension id, level index), sorted by id

    bool operator==(const TableKey&) const = default;
    bool operator<(const TableKey& other) const {
        if (benefit_index != other.benefit_index) return benefit_index < other.benefit_index;
        return coupling < other.coupling;
    }
};

struct TableKeyHash {
    std::size_t operator()(const TableKey& k) const {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        auto mix = [&h](std::uint64_t v) {
            h ^= v;
            h *= 0x100000001b3ULL;
        };
        mix(static_cast<std::uint64_t>(k.benefit_index));
        for (const auto& [id, idx] : k.coupling) {
            mix((static_cast<std::uint64_t>(id) << 32) ^ static_cast<std::uint64_t>(idx));
        }
        return static_cast<std::size_t>(h);
    }
};

/// Reference to the predecessor table entry a solution was assembled from.
struct PredRef {
    std::uint32_t node = 0; // node index in graph.nodes
    TableKey key;

    bool operator==(const PredRef&) const = default;
};

/// Best-known configuration of one node (and, through the predecessor
/// references, of everything upstream of it) for one table key.
struct SolutionEntry {
    std::vector<int> free_levels;     // per node free param, grid level indices
    std::vector<int> coupling_levels; // per node coupling param, grid level indices
    double benefit_value = 0.0;       // raw model output before snapping
    int benefit_index = 0;
    double local_root_effort = 0.0; // commensurated draws of this node alone
    double cumulative_root_effort = 0.0;
    std::map<std::string, double> local_outputs; // every model output incl. internals
    std::vector<PredRef> predecessors;

    bool operator==(const SolutionEntry&) const = default;
};

/// Per-node map from table key to the cheapest known entries. More than one
/// entry under a key means a tie within tolerance.
struct NodeTable {
    std::string node;
    std::unordered_map<TableKey, std::vector<SolutionEntry>, TableKeyHash> entries;
};

struct SolvedSystem {
    SystemGraph graph;
    DiscretizationSettings settings;
    std::map<std::string, double> external_values;
    std::map<std::string, Grid> grids; // every parameter and flow dimension
    std::vector<NodeTable> tables;     // one per graph.nodes, same order
    NodeTable sink_table;              // last node's table keyed by request level only
    std::uint64_t eval_count = 0;
    double wall_seconds = 0.0;
};

/// Fully reconstructed configuration returned by lookup.
struct Solution {
    std::map<std::string, double> set_points;      // free parameter -> value
    std::map<std::string, double> coupling_values; // coupling parameter -> value
    double benefit_level = 0.0;
    double expected_effort = 0.0;
    std::optional<double> expected_efficiency;
    std::map<std::string, std::map<std::string, double>> node_outputs; // node -> outputs
};

struct LookupResult {
    enum class Status { Solved, NoSolution } status = Status::NoSolution;
    double request = 0.0;
    std::optional<double> snapped_level;
    std::vector<Solution> solutions; // all tied entries, canonical order

    bool solved() const { return status == Status::Solved; }
};

struct BenchRecord {
    std::uint64_t combinations = 0; // densest node's parameter grid size
    std::uint64_t eval_count = 0;
    double wall_seconds = 0.0;
    std::map<std::string, std::size_t> table_sizes; // node -> key count
};

class SolveContext; // internal

/// Solves one component over its discretized inputs given the tables of all
/// its predecessors. Exposed for tests; propagate() is the normal entry.
NodeTable solve_component(const SolveContext& ctx, std::size_t node_idx,
                          const std::vector<const NodeTable*>& predecessor_tables);

/// Runs the full traversal in topological order. Throws Infeasible naming the
/// first node whose table comes out empty.
SolvedSystem propagate(const SystemGraph& graph, const DiscretizationSettings& settings,
                       const std::map<std::string, double>& external_values = {});

/// Answers a request from the solved tables. Never evaluates a model; a
/// request outside the sink grid or on an unpopulated level yields NoSolution.
LookupResult lookup(const SolvedSystem& solved, double request);

BenchRecord evaluation_report(const SolvedSystem& solved);

/// The densest node's parameter-grid size (the paper-style "combinations"
/// metric); computable without solving.
std::uint64_t combinations_metric(const SystemGraph& graph, const DiscretizationSettings& settings);

} // namespace opttopo

#endif
