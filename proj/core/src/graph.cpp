#include "opttopo/graph.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <sstream>

namespace opttopo {

namespace {

bool contains(const std::vector<std::string>& list, const std::string& name) {
    return std::find(list.begin(), list.end(), name) != list.end();
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::ostringstream oss;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) oss << sep;
        oss << parts[i];
    }
    return oss.str();
}

} // namespace

void SystemGraph::finalize() {
    finalized_ = false;
    node_index_.clear();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const std::string& name = nodes[i].name;
        if (name.empty() || name == kRootName || name == kSinkName) {
            throw Error(ErrorCode::ParseError, "invalid node name '" + name + "'");
        }
        if (!node_index_.emplace(name, i).second) {
            throw Error(ErrorCode::ParseError, "duplicate node '" + name + "'");
        }
    }
    if (nodes.empty()) {
        throw Error(ErrorCode::ParseError, "system has no nodes");
    }

    // Per-node signature checks: parameter lists partition the inputs by kind,
    // output lists partition the outputs, exactly one benefit per node.
    for (const SubsystemNode& node : nodes) {
        node.model.validate();
        auto check_kind = [&](const std::vector<std::string>& list, DimensionKind kind,
                              const char* role) {
            for (const std::string& d : list) {
                if (dimensions.get(d).kind != kind) {
                    throw Error(ErrorCode::ParseError, "dimension '" + d + "' of node '" +
                                                           node.name + "' is not a " + role);
                }
            }
        };
        check_kind(node.free_params, DimensionKind::FreeParameter, "free parameter");
        check_kind(node.coupling_params, DimensionKind::CouplingParameter, "coupling parameter");
        check_kind(node.external_params, DimensionKind::ExternalParameter, "external parameter");
        check_kind(node.internal_dims, DimensionKind::Internal, "internal variable");

        std::set<std::string> inputs(node.model.inputs.begin(), node.model.inputs.end());
        std::set<std::string> declared;
        for (const auto* list : {&node.free_params, &node.coupling_params, &node.external_params}) {
            for (const std::string& d : *list) {
                if (!declared.insert(d).second) {
                    throw Error(ErrorCode::ParseError,
                                "input '" + d + "' listed twice on node '" + node.name + "'");
                }
            }
        }
        if (inputs != declared) {
            throw Error(ErrorCode::ParseError, "parameter lists of node '" + node.name +
                                                   "' do not partition the model inputs");
        }

        std::set<std::string> outputs(node.model.outputs.begin(), node.model.outputs.end());
        std::set<std::string> declared_out;
        for (const auto* list : {&node.effort_dims, &node.benefit_dims, &node.internal_dims}) {
            for (const std::string& d : *list) {
                if (!declared_out.insert(d).second) {
                    throw Error(ErrorCode::ParseError,
                                "output '" + d + "' listed twice on node '" + node.name + "'");
                }
            }
        }
        if (outputs != declared_out) {
            throw Error(ErrorCode::ParseError, "output lists of node '" + node.name +
                                                   "' do not partition the model outputs");
        }
        if (node.benefit_dims.size() != 1) {
            throw Error(ErrorCode::ParseError, "node '" + node.name + "' must have exactly one " +
                                                   "benefit dimension, has " +
                                                   std::to_string(node.benefit_dims.size()));
        }
        if (dimensions.get(node.benefit_dims.front()).kind != DimensionKind::Benefit) {
            throw Error(ErrorCode::ParseError, "benefit dimension '" + node.benefit_dims.front() +
                                                   "' of node '" + node.name +
                                                   "' is not of kind benefit");
        }
        for (const std::string& d : node.effort_dims) {
            DimensionKind kind = dimensions.get(d).kind;
            if (kind != DimensionKind::Effort && kind != DimensionKind::Benefit) {
                throw Error(ErrorCode::ParseError,
                            "effort dimension '" + d + "' of node '" + node.name +
                                "' must be of kind effort (root draw) or benefit (flow)");
            }
        }
    }

    // Edge endpoints and flow dimensions.
    in_edges_.assign(nodes.size(), {});
    out_edges_.assign(nodes.size(), {});
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const FlowEdge& edge = edges[e];
        auto from_it = node_index_.find(edge.from);
        auto to_it = node_index_.find(edge.to);
        if (from_it == node_index_.end() || to_it == node_index_.end()) {
            throw Error(ErrorCode::DanglingFlow, "edge '" + edge.from + "' -> '" + edge.to +
                                                     "' references an unknown node");
        }
        if (!(edge.step_size > 0.0)) {
            throw Error(ErrorCode::BadStepSize, "edge '" + edge.from + "' -> '" + edge.to +
                                                    "' needs a positive step size");
        }
        const SubsystemNode& from = nodes[from_it->second];
        const SubsystemNode& to = nodes[to_it->second];
        if (!contains(from.benefit_dims, edge.dimension)) {
            throw Error(ErrorCode::DanglingFlow, "flow '" + edge.dimension +
                                                     "' is not a benefit of node '" + edge.from +
                                                     "'");
        }
        if (!contains(to.effort_dims, edge.dimension)) {
            throw Error(ErrorCode::DanglingFlow, "flow '" + edge.dimension +
                                                     "' is not an effort of node '" + edge.to +
                                                     "'");
        }
        out_edges_[from_it->second].push_back(e);
        in_edges_[to_it->second].push_back(e);
    }

    // Sink: exactly one request dimension, carried by the declared node,
    // consumed by nothing else.
    if (node_index_.count(sink.node) == 0) {
        throw Error(ErrorCode::ParseError, "sink node '" + sink.node + "' is unknown");
    }
    if (!(sink.step_size > 0.0)) {
        throw Error(ErrorCode::BadStepSize, "sink needs a positive step size");
    }
    if (!contains(nodes[node_index_[sink.node]].benefit_dims, sink.dimension)) {
        throw Error(ErrorCode::ParseError, "sink dimension '" + sink.dimension +
                                               "' is not a benefit of node '" + sink.node + "'");
    }

    // Every benefit is consumed exactly once: by one edge or by the sink.
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const std::string& benefit = nodes[i].benefit_dims.front();
        const bool is_sink = nodes[i].name == sink.node && benefit == sink.dimension;
        const std::size_t consumers = out_edges_[i].size() + (is_sink ? 1 : 0);
        if (consumers == 0) {
            throw Error(ErrorCode::MultipleSinks,
                        "benefit '" + benefit + "' of node '" + nodes[i].name +
                            "' has no consumer; only the declared sink may terminate a flow");
        }
        if (consumers > 1) {
            throw Error(ErrorCode::UnsupportedSplit,
                        "benefit '" + benefit + "' of node '" + nodes[i].name +
                            "' feeds " + std::to_string(consumers) +
                            " consumers; flow splitting is not supported");
        }
    }

    // Flow-fed efforts need a matching incoming edge.
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        for (const std::string& d : nodes[i].effort_dims) {
            if (dimensions.get(d).kind != DimensionKind::Benefit) continue;
            bool fed = false;
            for (std::size_t e : in_edges_[i]) {
                if (edges[e].dimension == d) fed = true;
            }
            if (!fed) {
                throw Error(ErrorCode::DanglingFlow, "flow effort '" + d + "' of node '" +
                                                         nodes[i].name +
                                                         "' has no incoming edge");
            }
        }
    }

    // Root draws and their weights.
    root_draws_.assign(nodes.size(), {});
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        for (const std::string& d : nodes[i].effort_dims) {
            const Dimension& dim = dimensions.get(d);
            if (dim.kind != DimensionKind::Effort) continue;
            root_draws_[i].push_back(d);
            auto it = root_weights.find(dim.unit);
            if (it == root_weights.end()) {
                throw Error(ErrorCode::MissingWeight, "no root weight for energy type '" +
                                                          dim.unit + "' (effort '" + d + "')");
            }
            if (!(it->second > 0.0)) {
                throw Error(ErrorCode::BadArgument,
                            "root weight for '" + dim.unit + "' must be positive");
            }
        }
    }

    // Acyclicity, with one offending cycle reported.
    {
        std::vector<int> state(nodes.size(), 0); // 0 new, 1 on stack, 2 done
        std::vector<std::size_t> stack;
        auto dfs = [&](auto&& self, std::size_t v) -> std::optional<std::vector<std::string>> {
            state[v] = 1;
            stack.push_back(v);
            for (std::size_t e : out_edges_[v]) {
                std::size_t w = node_index_[edges[e].to];
                if (state[w] == 1) {
                    std::vector<std::string> cycle;
                    auto begin = std::find(stack.begin(), stack.end(), w);
                    for (auto it = begin; it != stack.end(); ++it) {
                        cycle.push_back(nodes[*it].name);
                    }
                    cycle.push_back(nodes[w].name);
                    return cycle;
                }
                if (state[w] == 0) {
                    if (auto cycle = self(self, w)) return cycle;
                }
            }
            stack.pop_back();
            state[v] = 2;
            return std::nullopt;
        };
        for (std::size_t v = 0; v < nodes.size(); ++v) {
            if (state[v] == 0) {
                if (auto cycle = dfs(dfs, v)) {
                    throw Error(ErrorCode::CycleDetected, "cycle: " + join(*cycle, " -> "));
                }
            }
        }
    }

    // Every node must lie on a root -> sink path. The root feeds the nodes
    // that draw energy from it; the sink hangs off the declared request.
    {
        std::vector<bool> from_root(nodes.size(), false);
        std::queue<std::size_t> queue;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (!root_draws_[i].empty()) {
                from_root[i] = true;
                queue.push(i);
            }
        }
        while (!queue.empty()) {
            std::size_t v = queue.front();
            queue.pop();
            for (std::size_t e : out_edges_[v]) {
                std::size_t w = node_index_[edges[e].to];
                if (!from_root[w]) {
                    from_root[w] = true;
                    queue.push(w);
                }
            }
        }
        std::vector<bool> to_sink(nodes.size(), false);
        queue.push(node_index_[sink.node]);
        to_sink[node_index_[sink.node]] = true;
        while (!queue.empty()) {
            std::size_t v = queue.front();
            queue.pop();
            for (std::size_t e : in_edges_[v]) {
                std::size_t w = node_index_[edges[e].from];
                if (!to_sink[w]) {
                    to_sink[w] = true;
                    queue.push(w);
                }
            }
        }
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (!from_root[i] || !to_sink[i]) {
                throw Error(ErrorCode::Orphan, "node '" + nodes[i].name +
                                                   "' is not on any root -> sink path");
            }
        }
    }

    // Traversal order: Kahn's algorithm with a lexicographic frontier, so
    // same-layer nodes come out in a fixed deterministic order.
    {
        std::vector<std::size_t> in_degree(nodes.size(), 0);
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            in_degree[i] = in_edges_[i].size();
        }
        auto by_name = [this](std::size_t a, std::size_t b) {
            return nodes[a].name > nodes[b].name; // min-heap
        };
        std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(by_name)> frontier(
            by_name);
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (in_degree[i] == 0) frontier.push(i);
        }
        solve_order_.clear();
        while (!frontier.empty()) {
            std::size_t v = frontier.top();
            frontier.pop();
            solve_order_.push_back(v);
            for (std::size_t e : out_edges_[v]) {
                std::size_t w = node_index_[edges[e].to];
                if (--in_degree[w] == 0) frontier.push(w);
            }
        }
    }

    finalized_ = true;
}

std::size_t SystemGraph::node_index(const std::string& name) const {
    auto it = node_index_.find(name);
    if (it == node_index_.end()) {
        throw Error(ErrorCode::BadArgument, "unknown node '" + name + "'");
    }
    return it->second;
}

const std::vector<std::size_t>& SystemGraph::solve_order() const {
    if (!finalized_) throw Error(ErrorCode::BadArgument, "graph not finalized");
    return solve_order_;
}

const std::vector<std::vector<std::size_t>>& SystemGraph::in_edges() const {
    if (!finalized_) throw Error(ErrorCode::BadArgument, "graph not finalized");
    return in_edges_;
}

const std::vector<std::vector<std::size_t>>& SystemGraph::out_edges() const {
    if (!finalized_) throw Error(ErrorCode::BadArgument, "graph not finalized");
    return out_edges_;
}

const std::vector<std::string>& SystemGraph::root_draws(std::size_t node_idx) const {
    if (!finalized_) throw Error(ErrorCode::BadArgument, "graph not finalized");
    return root_draws_.at(node_idx);
}

bool SystemGraph::operator==(const SystemGraph& other) const {
    return dimensions == other.dimensions && nodes == other.nodes && edges == other.edges &&
           root_weights == other.root_weights && sink == other.sink &&
           external_defaults == other.external_defaults;
}

void derive_roles(SystemGraph& g) {
    for (SubsystemNode& node : g.nodes) {
        node.free_params.clear();
        node.coupling_params.clear();
        node.external_params.clear();
        node.effort_dims.clear();
        node.benefit_dims.clear();
        node.internal_dims.clear();
        for (const std::string& input : node.model.inputs) {
            switch (g.dimensions.get(input).kind) {
                case DimensionKind::FreeParameter: node.free_params.push_back(input); break;
                case DimensionKind::CouplingParameter: node.coupling_params.push_back(input); break;
                case DimensionKind::ExternalParameter: node.external_params.push_back(input); break;
                default:
                    throw Error(ErrorCode::ParseError,
                                "input '" + input + "' of node '" + node.name +
                                    "' is not a parameter dimension");
            }
        }
        for (const std::string& output : node.model.outputs) {
            switch (g.dimensions.get(output).kind) {
                case DimensionKind::Effort: node.effort_dims.push_back(output); break;
                case DimensionKind::Internal: node.internal_dims.push_back(output); break;
                case DimensionKind::Benefit: {
                    bool fed_by_edge = false;
                    for (const FlowEdge& edge : g.edges) {
                        if (edge.to == node.name && edge.dimension == output) fed_by_edge = true;
                    }
                    if (fed_by_edge) {
                        node.effort_dims.push_back(output);
                    } else {
                        node.benefit_dims.push_back(output);
                    }
                    break;
                }
                default:
                    throw Error(ErrorCode::ParseError,
                                "output '" + output + "' of node '" + node.name +
                                    "' is not an effort, benefit or internal dimension");
            }
        }
    }
}

std::vector<std::string> topological_order(const SystemGraph& g) {
    std::vector<std::string> order;
    order.reserve(g.nodes.size() + 2);
    order.emplace_back(kRootName);
    for (std::size_t idx : g.solve_order()) {
        order.push_back(g.nodes[idx].name);
    }
    order.emplace_back(kSinkName);
    return order;
}

double commensurate_effort(const std::map<std::string, double>& root_inputs,
                           const std::map<std::string, double>& weights) {
    double total = 0.0;
    for (const auto& [type, amount] : root_inputs) {
        auto it = weights.find(type);
        if (it == weights.end()) {
            throw Error(ErrorCode::MissingWeight, "no weight for energy type '" + type + "'");
        }
        total += it->second * amount;
    }
    return total;
}

} // namespace opttopo
