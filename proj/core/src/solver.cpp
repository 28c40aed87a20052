#include "opttopo/solver.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cmath>
#include <limits>
#include <set>

#include "opttopo/eval_counter.hpp"

namespace opttopo {

namespace {

// Odometer over a set of grids. runs the callback once per combination with
// the current level indices.
template <typename F>
void for_each_combination(const std::vector<const Grid*>& grids, std::vector<int>& indices, F&& f) {
    indices.assign(grids.size(), 0);
    if (grids.empty()) {
        f();
        return;
    }
    while (true) {
        f();
        std::size_t pos = 0;
        while (pos < grids.size()) {
            if (++indices[pos] < static_cast<int>(grids[pos]->levels.size())) break;
            indices[pos] = 0;
            ++pos;
        }
        if (pos == grids.size()) break;
    }
}

bool entry_order(const SolutionEntry& a, const SolutionEntry& b) {
    if (a.cumulative_root_effort != b.cumulative_root_effort) {
        return a.cumulative_root_effort < b.cumulative_root_effort;
    }
    if (a.free_levels != b.free_levels) return a.free_levels < b.free_levels;
    if (a.coupling_levels != b.coupling_levels) return a.coupling_levels < b.coupling_levels;
    auto ref_key = [](const SolutionEntry& e) {
        std::vector<std::pair<std::uint32_t, TableKey>> refs;
        refs.reserve(e.predecessors.size());
        for (const PredRef& r : e.predecessors) refs.emplace_back(r.node, r.key);
        return refs;
    };
    return ref_key(a) < ref_key(b);
}

double list_minimum(const std::vector<SolutionEntry>& list) {
    double current_min = list.front().cumulative_root_effort;
    for (const SolutionEntry& e : list) {
        current_min = std::min(current_min, e.cumulative_root_effort);
    }
    return current_min;
}

/// Keeps, per key, every candidate within tie tolerance of the running
/// minimum. The final set is exactly {e : cum <= min * (1 + tol)}, independent
/// of insertion order.
void offer_entry(NodeTable& table, const TableKey& key, SolutionEntry&& entry, double tie_tol) {
    auto& list = table.entries[key];
    if (list.empty()) {
        list.push_back(std::move(entry));
        return;
    }
    const double current_min = list_minimum(list);
    const double cum = entry.cumulative_root_effort;
    if (cum < current_min) {
        const double keep_below = cum * (1.0 + tie_tol);
        std::erase_if(list, [&](const SolutionEntry& e) {
            return e.cumulative_root_effort > keep_below;
        });
        list.insert(list.begin(), std::move(entry));
    } else if (cum <= current_min * (1.0 + tie_tol)) {
        list.push_back(std::move(entry));
    }
}

} // namespace

/// Resolved solve state: grids, external values, coupling lifetimes and the
/// evaluation tally shared by every component solve.
class SolveContext {
  public:
    SolveContext(const SystemGraph& g, const DiscretizationSettings& s,
                 const std::map<std::string, double>& external)
        : graph(g), settings(s) {
        if (!g.finalized()) {
            throw Error(ErrorCode::BadArgument, "graph must be finalized before solving");
        }
        external_values = g.external_defaults;
        for (const auto& [k, v] : external) {
            if (!g.dimensions.has(k) ||
                g.dimensions.get(k).kind != DimensionKind::ExternalParameter) {
                throw Error(ErrorCode::BadArgument,
                            "'" + k + "' is not an external parameter of this system");
            }
            external_values[k] = v;
        }

        for (const SubsystemNode& node : g.nodes) {
            for (const std::string& d : node.free_params) add_param_grid(d);
            for (const std::string& d : node.coupling_params) add_param_grid(d);
            for (const std::string& d : node.external_params) {
                if (external_values.count(d) == 0) {
                    throw Error(ErrorCode::MissingInput,
                                "external parameter '" + d + "' has no value for this solve");
                }
            }
        }
        for (const FlowEdge& edge : g.edges) {
            add_flow_grid(edge.dimension, edge.step_size);
        }
        add_flow_grid(g.sink.dimension, g.sink.step_size);

        // A coupling dimension stays in table keys until the last node that
        // references it has been solved.
        position_of.assign(g.nodes.size(), 0);
        const auto& order = g.solve_order();
        for (std::size_t pos = 0; pos < order.size(); ++pos) {
            position_of[order[pos]] = pos;
        }
        std::map<std::uint32_t, std::size_t> retire_pos;
        for (std::size_t i = 0; i < g.nodes.size(); ++i) {
            for (const std::string& d : g.nodes[i].coupling_params) {
                std::uint32_t id = g.dimensions.id(d);
                auto [it, fresh] = retire_pos.emplace(id, position_of[i]);
                if (!fresh) it->second = std::max(it->second, position_of[i]);
            }
        }
        carried.assign(g.nodes.size(), {});
        for (std::size_t i = 0; i < g.nodes.size(); ++i) {
            std::set<std::uint32_t> ids;
            collect_carried(i, retire_pos, ids);
            carried[i].assign(ids.begin(), ids.end());
        }
    }

    const Grid& grid(const std::string& dimension) const {
        auto it = grids.find(dimension);
        if (it == grids.end()) {
            throw Error(ErrorCode::BadArgument, "no grid for dimension '" + dimension + "'");
        }
        return it->second;
    }

    const SystemGraph& graph;
    DiscretizationSettings settings;
    std::map<std::string, double> external_values;
    std::map<std::string, Grid> grids;
    std::vector<std::size_t> position_of;            // node -> solve position
    std::vector<std::vector<std::uint32_t>> carried; // node -> key coupling dims, sorted
    mutable EvalCounter counter;

  private:
    void add_param_grid(const std::string& name) {
        if (grids.count(name)) return;
        const Dimension& dim = graph.dimensions.get(name);
        grids.emplace(name, make_param_grid(dim, settings.steps_for(name)));
    }

    void add_flow_grid(const std::string& name, double declared_step) {
        const double step = settings.flow_step_override.value_or(declared_step);
        auto it = grids.find(name);
        if (it != grids.end()) {
            if (it->second.step_size != step) {
                throw Error(ErrorCode::BadStepSize,
                            "conflicting step sizes for flow '" + name + "'");
            }
            return;
        }
        grids.emplace(name, make_flow_grid(graph.dimensions.get(name), step));
    }

    void collect_carried(std::size_t node_idx, const std::map<std::uint32_t, std::size_t>& retire,
                         std::set<std::uint32_t>& out) const {
        const std::size_t pos = position_of[node_idx];
        for (const std::string& d : graph.nodes[node_idx].coupling_params) {
            std::uint32_t id = graph.dimensions.id(d);
            if (retire.at(id) > pos) out.insert(id);
        }
        for (std::size_t e : graph.in_edges()[node_idx]) {
            std::size_t pred = graph.node_index(graph.edges[e].from);
            std::set<std::uint32_t> pred_ids;
            collect_carried(pred, retire, pred_ids);
            for (std::uint32_t id : pred_ids) {
                if (retire.at(id) > pos) out.insert(id);
            }
        }
    }
};

namespace {

/// Per-predecessor view used during combination matching.
struct PredView {
    std::size_t node_idx = 0;
    const NodeTable* table = nullptr;
    const std::vector<std::uint32_t>* carried = nullptr;
    bool all_pinned_locally = false; // every carried dim is a coupling of the current node
    std::unordered_map<int, std::vector<const TableKey*>> keys_by_benefit;
};

/// Enumerates, for one flow dimension with k incoming edges, every tuple of
/// per-edge level indices whose levels sum to the required level. With one
/// edge this is just the required index itself.
void sum_partitions(int required_index, int edge_count, int level_count,
                    std::vector<int>& current, std::vector<std::vector<int>>& out) {
    // level(i) = (k_lo + i) * step, so sum equality over k edges reduces to
    // sum(i_j) == required_index - (k - 1) * k_lo in index space; the caller
    // pre-translates that into `required_index` here.
    if (edge_count == 1) {
        if (required_index >= 0 && required_index < level_count) {
            current.push_back(required_index);
            out.push_back(current);
            current.pop_back();
        }
        return;
    }
    for (int i = 0; i < level_count && i <= required_index; ++i) {
        current.push_back(i);
        sum_partitions(required_index - i, edge_count - 1, level_count, current, out);
        current.pop_back();
    }
}

} // namespace

NodeTable solve_component(const SolveContext& ctx, std::size_t node_idx,
                          const std::vector<const NodeTable*>& predecessor_tables) {
    const SystemGraph& g = ctx.graph;
    const SubsystemNode& node = g.nodes[node_idx];
    NodeTable table;
    table.node = node.name;

    // Input slots: each model input is a free parameter, a coupling parameter
    // or a fixed external value.
    enum class SlotKind { Free, Coupling, External };
    struct Slot {
        SlotKind kind;
        std::size_t param_index;
        double fixed = 0.0;
    };
    std::vector<Slot> slots;
    slots.reserve(node.model.inputs.size());
    std::vector<const Grid*> free_grids, coupling_grids;
    for (const std::string& d : node.free_params) free_grids.push_back(&ctx.grid(d));
    for (const std::string& d : node.coupling_params) coupling_grids.push_back(&ctx.grid(d));
    for (const std::string& input : node.model.inputs) {
        auto find_in = [&](const std::vector<std::string>& list) {
            auto it = std::find(list.begin(), list.end(), input);
            return it == list.end() ? std::string::npos
                                    : static_cast<std::size_t>(it - list.begin());
        };
        if (auto i = find_in(node.free_params); i != std::string::npos) {
            slots.push_back({SlotKind::Free, i});
        } else if (auto c = find_in(node.coupling_params); c != std::string::npos) {
            slots.push_back({SlotKind::Coupling, c});
        } else {
            const double value = ctx.external_values.at(input);
            // An external value outside its interval makes every combination
            // of this node infeasible; the empty table reports it.
            if (!g.dimensions.get(input).interval.contains(value)) {
                return table;
            }
            slots.push_back({SlotKind::External, 0, value});
        }
    }

    // Output bookkeeping: own benefit, flow requirements, root draws.
    const std::string& benefit_dim = node.benefit_dims.front();
    const Grid& benefit_grid = ctx.grid(benefit_dim);
    std::size_t benefit_out = node.model.outputs.size();
    std::vector<std::pair<std::size_t, const Grid*>> flow_requirements; // (output idx, grid)
    std::vector<std::pair<std::size_t, double>> weighted_draws;         // (output idx, weight)
    for (std::size_t o = 0; o < node.model.outputs.size(); ++o) {
        const std::string& name = node.model.outputs[o];
        if (name == benefit_dim) benefit_out = o;
        const Dimension& dim = g.dimensions.get(name);
        if (dim.kind == DimensionKind::Effort) {
            weighted_draws.emplace_back(o, g.root_weights.at(dim.unit));
        } else if (dim.kind == DimensionKind::Benefit && name != benefit_dim) {
            flow_requirements.emplace_back(o, &ctx.grid(name));
        }
    }

    // Incoming edges grouped by flow dimension; each group must partition the
    // snapped requirement across its predecessors (conservation at the node).
    struct InGroup {
        std::size_t output_idx; // requirement output of this node
        const Grid* grid;
        std::vector<std::size_t> pred_nodes; // one per edge
    };
    std::vector<InGroup> groups;
    for (auto [out_idx, grid] : flow_requirements) {
        InGroup group{out_idx, grid, {}};
        for (std::size_t e : g.in_edges()[node_idx]) {
            if (g.edges[e].dimension == node.model.outputs[out_idx]) {
                group.pred_nodes.push_back(g.node_index(g.edges[e].from));
            }
        }
        groups.push_back(std::move(group));
    }

    // Predecessor views with fast-path detection: when every coupling carried
    // by a predecessor key is pinned by this node's own coupling choice, the
    // matching key can be built directly instead of scanned.
    std::unordered_map<std::size_t, PredView> views;
    for (const NodeTable* pred_table : predecessor_tables) {
        std::size_t pred_idx = g.node_index(pred_table->node);
        PredView view;
        view.node_idx = pred_idx;
        view.table = pred_table;
        view.carried = &ctx.carried[pred_idx];
        view.all_pinned_locally = true;
        for (std::uint32_t id : *view.carried) {
            const std::string& name = g.dimensions.get(id).name;
            if (std::find(node.coupling_params.begin(), node.coupling_params.end(), name) ==
                node.coupling_params.end()) {
                view.all_pinned_locally = false;
            }
        }
        if (!view.all_pinned_locally) {
            for (const auto& [key, entries] : pred_table->entries) {
                view.keys_by_benefit[key.benefit_index].push_back(&key);
            }
        }
        views.emplace(pred_idx, view);
    }

    // Coupling assignment shared between the local choice and predecessor
    // keys; indexed by dimension id.
    std::vector<int> xi_assign(g.dimensions.size(), -1);
    std::vector<std::uint32_t> local_xi_ids;
    for (const std::string& d : node.coupling_params) {
        local_xi_ids.push_back(g.dimensions.id(d));
    }

    std::vector<double> input_values(slots.size(), 0.0);
    std::vector<int> free_idx, coupling_idx;
    std::vector<int> scratch;
    std::vector<std::vector<std::vector<int>>> group_partitions(groups.size());

    bool all_single_edge = true;
    for (const InGroup& group : groups) {
        if (group.pred_nodes.size() != 1) all_single_edge = false;
    }

    struct PredChoice {
        std::size_t pred_idx;
        const TableKey* key;
        double cumulative;
    };
    std::vector<PredChoice> chosen;
    std::vector<std::pair<std::size_t, int>> single_assignment;
    std::vector<std::vector<std::pair<std::size_t, int>>> flat_assignments;
    std::vector<Snap> requirement_snaps(groups.size());
    TableKey key_buffer, probe_buffer;

    const double tie_tol = ctx.settings.tie_tolerance;

    // One pass per possible own-benefit level: the subcomponent is optimized
    // for each target level over its full parameter grid. The evaluation
    // counter deliberately ticks once per (level, combination) probe; the
    // pass structure is what ties the call count to the flow discretization.
    for (int target = 0; target < static_cast<int>(benefit_grid.levels.size()); ++target) {
        for_each_combination(free_grids, free_idx, [&] {
            for_each_combination(coupling_grids, coupling_idx, [&] {
                for (std::size_t s = 0; s < slots.size(); ++s) {
                    switch (slots[s].kind) {
                        case SlotKind::Free:
                            input_values[s] =
                                free_grids[slots[s].param_index]->levels[static_cast<std::size_t>(
                                    free_idx[slots[s].param_index])];
                            break;
                        case SlotKind::Coupling:
                            input_values[s] =
                                coupling_grids[slots[s].param_index]
                                    ->levels[static_cast<std::size_t>(
                                        coupling_idx[slots[s].param_index])];
                            break;
                        case SlotKind::External:
                            input_values[s] = slots[s].fixed;
                            break;
                    }
                }

                ctx.counter.increment();
                const double benefit_value = eval_output_raw(node.model, benefit_out, input_values);
                if (!std::isfinite(benefit_value)) return;
                const Snap benefit_snap = snap_to_level(benefit_value, benefit_grid);
                if (benefit_snap.clamped || benefit_snap.index != target) return;

                double local_effort = 0.0;
                bool valid = true;
                for (auto [out_idx, weight] : weighted_draws) {
                    const double draw = eval_output_raw(node.model, out_idx, input_values);
                    if (!std::isfinite(draw) || draw < 0.0) {
                        valid = false;
                        break;
                    }
                    local_effort += weight * draw;
                }
                if (!valid) return;

                // Snap every flow requirement; clamped means off-grid and the
                // combination is silently infeasible.
                for (std::size_t gi = 0; gi < groups.size(); ++gi) {
                    const double req =
                        eval_output_raw(node.model, groups[gi].output_idx, input_values);
                    if (!std::isfinite(req)) {
                        valid = false;
                        break;
                    }
                    requirement_snaps[gi] = snap_to_level(req, *groups[gi].grid);
                    if (requirement_snaps[gi].clamped) {
                        valid = false;
                        break;
                    }
                }
                if (!valid) return;

                // Pin this node's own coupling levels.
                for (std::size_t c = 0; c < local_xi_ids.size(); ++c) {
                    xi_assign[local_xi_ids[c]] = coupling_idx[c];
                }

                // Emit one candidate per consistent predecessor combination.
                auto match = [&](auto&& self, const std::vector<std::pair<std::size_t, int>>& assignment,
                                 std::size_t p) -> void {
                    if (p == assignment.size()) {
                        // Predecessors first, then the local draw: the same
                        // association a plain traversal-order sum produces.
                        double cumulative = 0.0;
                        for (const PredChoice& c : chosen) cumulative += c.cumulative;
                        cumulative += local_effort;
                        if (!std::isfinite(cumulative)) return;

                        key_buffer.benefit_index = target;
                        key_buffer.coupling.clear();
                        for (std::uint32_t id : ctx.carried[node_idx]) {
                            assert(xi_assign[id] >= 0);
                            key_buffer.coupling.emplace_back(id, xi_assign[id]);
                        }
                        // Cheap reject before building the entry payload.
                        if (auto it = table.entries.find(key_buffer); it != table.entries.end()) {
                            const double current_min = list_minimum(it->second);
                            if (cumulative > current_min * (1.0 + tie_tol)) return;
                        }

                        SolutionEntry entry;
                        entry.free_levels.assign(free_idx.begin(), free_idx.end());
                        entry.coupling_levels.assign(coupling_idx.begin(), coupling_idx.end());
                        entry.benefit_value = benefit_value;
                        entry.benefit_index = target;
                        entry.local_root_effort = local_effort;
                        entry.cumulative_root_effort = cumulative;
                        for (std::size_t o = 0; o < node.model.outputs.size(); ++o) {
                            entry.local_outputs[node.model.outputs[o]] =
                                eval_output_raw(node.model, o, input_values);
                        }
                        for (const PredChoice& c : chosen) {
                            entry.predecessors.push_back(
                                {static_cast<std::uint32_t>(c.pred_idx), *c.key});
                        }
                        std::sort(entry.predecessors.begin(), entry.predecessors.end(),
                                  [](const PredRef& a, const PredRef& b) { return a.node < b.node; });
                        offer_entry(table, key_buffer, std::move(entry), tie_tol);
                        return;
                    }
                    const auto [pred_idx, required_bidx] = assignment[p];
                    const PredView& view = views.at(pred_idx);
                    if (view.all_pinned_locally) {
                        // Every coupling dim of the predecessor key is already
                        // pinned; build the key and look it up directly.
                        probe_buffer.benefit_index = required_bidx;
                        probe_buffer.coupling.clear();
                        for (std::uint32_t id : *view.carried) {
                            assert(xi_assign[id] >= 0);
                            probe_buffer.coupling.emplace_back(id, xi_assign[id]);
                        }
                        auto it = view.table->entries.find(probe_buffer);
                        if (it == view.table->entries.end()) return;
                        chosen.push_back(
                            {pred_idx, &it->first, it->second.front().cumulative_root_effort});
                        self(self, assignment, p + 1);
                        chosen.pop_back();
                        return;
                    }
                    auto keys_it = view.keys_by_benefit.find(required_bidx);
                    if (keys_it == view.keys_by_benefit.end()) return;
                    for (const TableKey* key : keys_it->second) {
                        bool consistent = true;
                        std::vector<std::uint32_t> pinned_now;
                        for (const auto& [id, idx] : key->coupling) {
                            if (xi_assign[id] < 0) {
                                xi_assign[id] = idx;
                                pinned_now.push_back(id);
                            } else if (xi_assign[id] != idx) {
                                consistent = false;
                                break;
                            }
                        }
                        if (consistent) {
                            const auto& entries = view.table->entries.at(*key);
                            chosen.push_back(
                                {pred_idx, key, entries.front().cumulative_root_effort});
                            self(self, assignment, p + 1);
                            chosen.pop_back();
                        }
                        for (std::uint32_t id : pinned_now) xi_assign[id] = -1;
                    }
                };

                if (all_single_edge) {
                    // Chain / merge-free case: the requirement pins each
                    // predecessor level directly.
                    single_assignment.clear();
                    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
                        single_assignment.emplace_back(groups[gi].pred_nodes.front(),
                                                       requirement_snaps[gi].index);
                    }
                    chosen.clear();
                    match(match, single_assignment, 0);
                } else {
                    // Conservation at the node: enumerate every split of each
                    // requirement across its incoming edges (exact in index
                    // arithmetic), then match the cartesian product.
                    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
                        auto& parts = group_partitions[gi];
                        parts.clear();
                        const int edge_count = static_cast<int>(groups[gi].pred_nodes.size());
                        const int level_count = static_cast<int>(groups[gi].grid->levels.size());
                        const int required = requirement_snaps[gi].index;
                        // level(i) = (k_lo + i) * step, so equality of the sum
                        // with the required level reduces to
                        // sum(i_j) = required - (edge_count - 1) * k_lo.
                        const double step = groups[gi].grid->step_size;
                        const long long k_lo =
                            std::llround(groups[gi].grid->levels.front() / step);
                        const long long target_sum =
                            static_cast<long long>(required) -
                            (static_cast<long long>(edge_count) - 1) * k_lo;
                        if (target_sum >= 0 && target_sum <= std::numeric_limits<int>::max()) {
                            sum_partitions(static_cast<int>(target_sum), edge_count, level_count,
                                           scratch, parts);
                        }
                        if (parts.empty()) {
                            valid = false;
                            break;
                        }
                    }
                    if (valid) {
                        flat_assignments.clear();
                        flat_assignments.emplace_back();
                        for (std::size_t gi = 0; gi < groups.size(); ++gi) {
                            std::vector<std::vector<std::pair<std::size_t, int>>> next;
                            for (const auto& base : flat_assignments) {
                                for (const auto& tuple : group_partitions[gi]) {
                                    auto extended = base;
                                    for (std::size_t e = 0; e < tuple.size(); ++e) {
                                        extended.emplace_back(groups[gi].pred_nodes[e], tuple[e]);
                                    }
                                    next.push_back(std::move(extended));
                                }
                            }
                            flat_assignments = std::move(next);
                        }
                        for (const auto& assignment : flat_assignments) {
                            chosen.clear();
                            match(match, assignment, 0);
                        }
                    }
                }

                for (std::size_t c = 0; c < local_xi_ids.size(); ++c) {
                    xi_assign[local_xi_ids[c]] = -1;
                }
            });
        });
    }

    // Canonical entry order per key: cheapest first, then lexicographic
    // configuration. Reports and serialization sort the keys themselves.
    for (auto& [key, list] : table.entries) {
        std::sort(list.begin(), list.end(), entry_order);
    }
    return table;
}

namespace {

NodeTable project_to_benefit(const NodeTable& source, double tie_tol) {
    NodeTable sink;
    sink.node = source.node;
    // Deterministic merge: visit keys in sorted order.
    std::vector<const TableKey*> keys;
    keys.reserve(source.entries.size());
    for (const auto& [key, _] : source.entries) keys.push_back(&key);
    std::sort(keys.begin(), keys.end(),
              [](const TableKey* a, const TableKey* b) { return *a < *b; });
    for (const TableKey* key : keys) {
        TableKey flat;
        flat.benefit_index = key->benefit_index;
        for (const SolutionEntry& entry : source.entries.at(*key)) {
            SolutionEntry copy = entry;
            offer_entry(sink, flat, std::move(copy), tie_tol);
        }
    }
    for (auto& [key, list] : sink.entries) {
        std::sort(list.begin(), list.end(), entry_order);
    }
    return sink;
}

} // namespace

SolvedSystem propagate(const SystemGraph& graph, const DiscretizationSettings& settings,
                       const std::map<std::string, double>& external_values) {
    const auto start = std::chrono::steady_clock::now();
    SolveContext ctx(graph, settings, external_values);

    SolvedSystem solved;
    solved.graph = graph;
    solved.settings = settings;
    solved.external_values = ctx.external_values;
    solved.grids = ctx.grids;
    solved.tables.resize(graph.nodes.size());

    for (std::size_t node_idx : graph.solve_order()) {
        std::vector<const NodeTable*> preds;
        std::vector<std::size_t> pred_indices;
        for (std::size_t e : graph.in_edges()[node_idx]) {
            pred_indices.push_back(graph.node_index(graph.edges[e].from));
        }
        std::sort(pred_indices.begin(), pred_indices.end());
        pred_indices.erase(std::unique(pred_indices.begin(), pred_indices.end()),
                           pred_indices.end());
        for (std::size_t p : pred_indices) preds.push_back(&solved.tables[p]);

        solved.tables[node_idx] = solve_component(ctx, node_idx, preds);
        if (solved.tables[node_idx].entries.empty()) {
            throw Error(ErrorCode::Infeasible,
                        "no feasible combination for node '" + graph.nodes[node_idx].name + "'");
        }
    }

    const std::size_t last = graph.node_index(graph.sink.node);
    solved.sink_table = project_to_benefit(solved.tables[last], settings.tie_tolerance);
    solved.eval_count = ctx.counter.count();
    solved.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return solved;
}

namespace {

struct PartialConfig {
    std::map<std::string, double> set_points;
    std::map<std::string, double> coupling_values;
    std::map<std::string, std::map<std::string, double>> node_outputs;
};

/// Expands one entry into every full upstream configuration, following tied
/// predecessor entries through all combinations.
void reconstruct(const SolvedSystem& solved, std::size_t node_idx, const SolutionEntry& entry,
                 PartialConfig config, std::vector<PartialConfig>& out) {
    const SubsystemNode& node = solved.graph.nodes[node_idx];
    for (std::size_t i = 0; i < node.free_params.size(); ++i) {
        const Grid& grid = solved.grids.at(node.free_params[i]);
        config.set_points[node.free_params[i]] =
            grid.levels[static_cast<std::size_t>(entry.free_levels[i])];
    }
    for (std::size_t i = 0; i < node.coupling_params.size(); ++i) {
        const Grid& grid = solved.grids.at(node.coupling_params[i]);
        config.coupling_values[node.coupling_params[i]] =
            grid.levels[static_cast<std::size_t>(entry.coupling_levels[i])];
    }
    config.node_outputs[node.name] = entry.local_outputs;

    if (entry.predecessors.empty()) {
        out.push_back(std::move(config));
        return;
    }
    // Cartesian expansion over tied predecessor entries, one predecessor at a
    // time (predecessor subtrees are disjoint).
    std::vector<PartialConfig> partials{std::move(config)};
    for (const PredRef& ref : entry.predecessors) {
        const NodeTable& pred_table = solved.tables[ref.node];
        const auto& tied = pred_table.entries.at(ref.key);
        std::vector<PartialConfig> next;
        for (const PartialConfig& base : partials) {
            for (const SolutionEntry& pred_entry : tied) {
                std::vector<PartialConfig> expanded;
                reconstruct(solved, ref.node, pred_entry, base, expanded);
                for (auto& e : expanded) next.push_back(std::move(e));
            }
        }
        partials = std::move(next);
    }
    for (auto& p : partials) out.push_back(std::move(p));
}

} // namespace

LookupResult lookup(const SolvedSystem& solved, double request) {
    LookupResult result;
    result.request = request;
    const Grid& sink_grid = solved.grids.at(solved.graph.sink.dimension);
    const Snap snap = snap_to_level(request, sink_grid);
    if (snap.clamped) {
        return result; // outside the representable range
    }
    result.snapped_level = snap.level;
    TableKey key;
    key.benefit_index = snap.index;
    auto it = solved.sink_table.entries.find(key);
    if (it == solved.sink_table.entries.end()) {
        return result;
    }
    const std::size_t sink_idx = solved.graph.node_index(solved.graph.sink.node);
    for (const SolutionEntry& entry : it->second) {
        std::vector<PartialConfig> configs;
        reconstruct(solved, sink_idx, entry, {}, configs);
        for (PartialConfig& config : configs) {
            Solution solution;
            solution.set_points = std::move(config.set_points);
            solution.coupling_values = std::move(config.coupling_values);
            solution.node_outputs = std::move(config.node_outputs);
            solution.benefit_level = snap.level;
            solution.expected_effort = entry.cumulative_root_effort;
            if (entry.cumulative_root_effort > 0.0) {
                solution.expected_efficiency =
                    efficiency(snap.level, entry.cumulative_root_effort);
            }
            result.solutions.push_back(std::move(solution));
        }
    }
    std::sort(result.solutions.begin(), result.solutions.end(),
              [](const Solution& a, const Solution& b) {
                  if (a.expected_effort != b.expected_effort) {
                      return a.expected_effort < b.expected_effort;
                  }
                  return a.set_points < b.set_points;
              });
    result.status = LookupResult::Status::Solved;
    return result;
}

BenchRecord evaluation_report(const SolvedSystem& solved) {
    BenchRecord record;
    record.combinations = combinations_metric(solved.graph, solved.settings);
    record.eval_count = solved.eval_count;
    record.wall_seconds = solved.wall_seconds;
    for (const NodeTable& table : solved.tables) {
        record.table_sizes[table.node] = table.entries.size();
    }
    return record;
}

std::uint64_t combinations_metric(const SystemGraph& graph,
                                  const DiscretizationSettings& settings) {
    std::uint64_t densest = 0;
    for (const SubsystemNode& node : graph.nodes) {
        std::uint64_t combos = 1;
        for (const std::string& d : node.free_params) {
            combos *= static_cast<std::uint64_t>(settings.steps_for(d));
        }
        for (const std::string& d : node.coupling_params) {
            combos *= static_cast<std::uint64_t>(settings.steps_for(d));
        }
        densest = std::max(densest, combos);
    }
    return densest;
}

} // namespace opttopo
