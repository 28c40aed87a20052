#include "opttopo/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "chain_eval.hpp"
#include "opttopo/rng.hpp"

namespace opttopo {

namespace {

/// Flow grids for a system under the given settings (edges plus sink).
std::map<std::string, Grid> build_flow_grids(const SystemGraph& g,
                                             const DiscretizationSettings& settings) {
    std::map<std::string, Grid> grids;
    auto add = [&](const std::string& dim, double declared) {
        const double step = settings.flow_step_override.value_or(declared);
        auto it = grids.find(dim);
        if (it != grids.end()) {
            if (it->second.step_size != step) {
                throw Error(ErrorCode::BadStepSize, "conflicting step sizes for flow '" + dim + "'");
            }
            return;
        }
        grids.emplace(dim, make_flow_grid(g.dimensions.get(dim), step));
    };
    for (const FlowEdge& edge : g.edges) add(edge.dimension, edge.step_size);
    add(g.sink.dimension, g.sink.step_size);
    return grids;
}

/// The free/coupling dimensions of a joint configuration in a fixed order:
/// free parameters per traversal-ordered node, then coupling symbols by id.
std::vector<std::string> configuration_dimensions(const SystemGraph& g) {
    std::vector<std::string> dims;
    for (std::size_t node_idx : g.solve_order()) {
        for (const std::string& d : g.nodes[node_idx].free_params) {
            dims.push_back(d);
        }
    }
    std::vector<std::string> coupling;
    for (const Dimension& dim : g.dimensions.all()) {
        if (dim.kind == DimensionKind::CouplingParameter) coupling.push_back(dim.name);
    }
    for (const std::string& d : coupling) {
        dims.push_back(d);
    }
    return dims;
}

/// Applies the traversal's feasibility rules to a fully evaluated chain:
/// every produced benefit must land on-grid, every requirement must be met by
/// the summed incoming levels, and root draws must be non-negative.
/// Returns the snapped sink level index, or nothing when infeasible.
std::optional<int> chain_feasible(const SystemGraph& g, const std::map<std::string, Grid>& grids,
                                  const detail::ChainResult& chain) {
    // Produced levels per flow dimension.
    std::map<std::string, int> produced_level;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const SubsystemNode& node = g.nodes[i];
        const std::string& benefit = node.benefit_dims.front();
        const double value = chain.node_outputs.at(node.name).at(benefit);
        if (!std::isfinite(value)) return std::nullopt;
        const Snap snap = snap_to_level(value, grids.at(benefit));
        if (snap.clamped) return std::nullopt;
        produced_level[node.name] = snap.index;
        for (const std::string& d : node.effort_dims) {
            if (g.dimensions.get(d).kind != DimensionKind::Effort) continue;
            const double draw = chain.node_outputs.at(node.name).at(d);
            if (!std::isfinite(draw) || draw < 0.0) return std::nullopt;
        }
    }
    // Conservation per node and flow dimension (index arithmetic, exact).
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const SubsystemNode& node = g.nodes[i];
        std::map<std::string, std::vector<std::size_t>> incoming;
        for (std::size_t e : g.in_edges()[i]) {
            incoming[g.edges[e].dimension].push_back(g.node_index(g.edges[e].from));
        }
        for (const auto& [dim, preds] : incoming) {
            const Grid& grid = grids.at(dim);
            const double required = chain.node_outputs.at(node.name).at(dim);
            if (!std::isfinite(required)) return std::nullopt;
            const Snap snap = snap_to_level(required, grid);
            if (snap.clamped) return std::nullopt;
            const long long k_lo = std::llround(grid.levels.front() / grid.step_size);
            long long produced_sum = 0;
            for (std::size_t p : preds) produced_sum += k_lo + produced_level.at(g.nodes[p].name);
            if (produced_sum != k_lo + snap.index) return std::nullopt;
        }
    }
    const std::size_t sink_idx = g.node_index(g.sink.node);
    return produced_level.at(g.nodes[sink_idx].name);
}

} // namespace

RandomBaselineResult random_configurations(const SystemGraph& g,
                                           const DiscretizationSettings& settings, int n,
                                           std::uint64_t seed,
                                           const std::map<std::string, double>& external_values) {
    if (n < 1) {
        throw Error(ErrorCode::BadArgument, "sample count must be at least 1");
    }
    const std::map<std::string, Grid> grids = build_flow_grids(g, settings);
    const std::vector<std::string> dims = configuration_dimensions(g);
    const SplitMix64 base(seed);

    RandomBaselineResult result;
    EvalCounter counter;
    result.samples.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        SplitMix64 stream = base.split(static_cast<std::uint64_t>(i));
        RandomSample sample;
        for (const std::string& d : dims) {
            const Interval& interval = g.dimensions.get(d).interval;
            sample.configuration[d] = stream.uniform(interval.lo, interval.hi);
        }
        const detail::ChainResult chain =
            detail::evaluate_chain(g, sample.configuration, external_values, &counter);
        sample.realized_effort = chain.effort;
        sample.realized_benefit = chain.benefit;
        if (chain.effort > 0.0) {
            sample.realized_efficiency = chain.benefit / chain.effort;
        }
        const std::optional<int> level = chain_feasible(g, grids, chain);
        sample.feasible = level.has_value();
        sample.benefit_index = level;
        result.samples.push_back(std::move(sample));
    }
    result.eval_count = counter.count();
    return result;
}

namespace {

struct JointEnumeration {
    std::vector<std::string> dims;
    std::vector<const Grid*> grids;
    std::map<std::string, Grid> param_grids;
    std::map<std::string, Grid> flow_grids;
};

JointEnumeration prepare_joint(const SystemGraph& g, const DiscretizationSettings& settings,
                               std::uint64_t cap) {
    JointEnumeration joint;
    joint.flow_grids = build_flow_grids(g, settings);
    joint.dims = configuration_dimensions(g);
    for (const std::string& d : joint.dims) {
        joint.param_grids.emplace(d, make_param_grid(g.dimensions.get(d), settings.steps_for(d)));
    }
    std::uint64_t total = 1;
    for (const std::string& d : joint.dims) {
        const Grid& grid = joint.param_grids.at(d);
        joint.grids.push_back(&grid);
        const std::uint64_t size = grid.levels.size();
        if (total > cap / size) {
            throw Error(ErrorCode::CapExceeded,
                        "joint grid exceeds the enumeration cap of " + std::to_string(cap));
        }
        total *= size;
    }
    return joint;
}

/// Enumerates the full joint grid; calls `visit(level_index, effort, config)`
/// for every feasible assignment with its snapped sink level.
template <typename Visit>
std::uint64_t enumerate_joint(const SystemGraph& g, const JointEnumeration& joint,
                              const std::map<std::string, double>& external_values, Visit&& visit) {
    std::vector<std::size_t> odometer(joint.dims.size(), 0);
    std::map<std::string, double> configuration;
    EvalCounter counter;
    while (true) {
        for (std::size_t i = 0; i < joint.dims.size(); ++i) {
            configuration[joint.dims[i]] = joint.grids[i]->levels[odometer[i]];
        }
        const detail::ChainResult chain =
            detail::evaluate_chain(g, configuration, external_values, &counter);
        if (const std::optional<int> level = chain_feasible(g, joint.flow_grids, chain)) {
            visit(*level, chain.effort, configuration);
        }

        std::size_t pos = 0;
        while (pos < joint.dims.size()) {
            if (++odometer[pos] < joint.grids[pos]->levels.size()) break;
            odometer[pos] = 0;
            ++pos;
        }
        if (pos == joint.dims.size()) break;
        if (joint.dims.empty()) break;
    }
    return counter.count();
}

} // namespace

BruteForceResult joint_bruteforce(const SystemGraph& g, const DiscretizationSettings& settings,
                                  double request,
                                  const std::map<std::string, double>& external_values,
                                  std::uint64_t cap) {
    const JointEnumeration joint = prepare_joint(g, settings, cap);
    BruteForceResult result;
    result.request = request;
    const Snap snap = snap_to_level(request, joint.flow_grids.at(g.sink.dimension));
    if (snap.clamped) {
        result.eval_count = 0;
        return result; // request outside the representable range: NoSolution
    }
    result.snapped_level = snap.level;
    double best = std::numeric_limits<double>::infinity();
    std::map<std::string, double> best_config;
    result.eval_count = enumerate_joint(
        g, joint, external_values,
        [&](int level, double effort, const std::map<std::string, double>& config) {
            if (level == snap.index && effort < best) {
                best = effort;
                best_config = config;
            }
        });
    if (std::isfinite(best)) {
        result.solved = true;
        result.best_effort = best;
        result.configuration = std::move(best_config);
    }
    return result;
}

std::map<int, double> bruteforce_level_optima(const SystemGraph& g,
                                              const DiscretizationSettings& settings,
                                              const std::map<std::string, double>& external_values,
                                              std::uint64_t cap) {
    const JointEnumeration joint = prepare_joint(g, settings, cap);
    std::map<int, double> optima;
    enumerate_joint(g, joint, external_values,
                    [&](int level, double effort, const std::map<std::string, double>&) {
                        auto [it, fresh] = optima.emplace(level, effort);
                        if (!fresh) it->second = std::min(it->second, effort);
                    });
    return optima;
}

PenaltyResult penalty_search(const SystemGraph& g, const DiscretizationSettings& settings,
                             double request, const std::map<std::string, double>& start,
                             const PenaltyOptions& options,
                             const std::map<std::string, double>& external_values) {
    const std::map<std::string, Grid> flow_grids = build_flow_grids(g, settings);
    const std::vector<std::string> dims = configuration_dimensions(g);

    std::vector<double> x(dims.size());
    std::vector<double> width(dims.size());
    for (std::size_t i = 0; i < dims.size(); ++i) {
        const Interval& interval = g.dimensions.get(dims[i]).interval;
        auto it = start.find(dims[i]);
        if (it == start.end()) {
            throw Error(ErrorCode::MissingInput, "start lacks '" + dims[i] + "'");
        }
        if (!interval.contains(it->second)) {
            throw Error(ErrorCode::OutOfBounds, "start value for '" + dims[i] + "' out of bounds");
        }
        x[i] = it->second;
        width[i] = interval.width();
    }

    double violation_tol = options.violation_tolerance.value_or(0.0);
    if (!options.violation_tolerance) {
        double finest = std::numeric_limits<double>::infinity();
        for (const auto& [_, grid] : flow_grids) finest = std::min(finest, grid.step_size);
        violation_tol = 0.5 * finest;
    }

    EvalCounter counter;
    double last_effort = 0.0;
    double last_violation = 0.0;
    auto objective = [&](const std::vector<double>& point, double rho) {
        std::map<std::string, double> config;
        for (std::size_t i = 0; i < dims.size(); ++i) config[dims[i]] = point[i];
        const detail::ChainResult chain =
            detail::evaluate_chain(g, config, external_values, &counter);
        double penalty = 0.0;
        double max_violation = std::abs(chain.benefit - request);
        penalty += (chain.benefit - request) * (chain.benefit - request);
        // Every flow coupling enters the penalty, not just the request:
        // produced and required values have to agree for the point to mean
        // anything physically.
        for (const FlowEdge& edge : g.edges) {
            const double produced = chain.node_outputs.at(edge.from).at(edge.dimension);
            const double required = chain.node_outputs.at(edge.to).at(edge.dimension);
            const double gap = produced - required;
            penalty += gap * gap;
            max_violation = std::max(max_violation, std::abs(gap));
        }
        last_effort = chain.effort;
        last_violation = max_violation;
        return chain.effort + rho * penalty;
    };

    PenaltyResult result;
    double rho = options.initial_penalty;
    double step_fraction = options.initial_step_fraction;
    double f_best = objective(x, rho);
    double best_effort = last_effort;
    double best_violation = last_violation;

    for (int outer = 0; outer < options.max_outer_iterations; ++outer) {
        f_best = objective(x, rho); // re-score under the current penalty weight
        best_effort = last_effort;
        best_violation = last_violation;
        for (int sweep = 0; sweep < options.max_sweeps_per_outer; ++sweep) {
            bool improved = false;
            for (std::size_t i = 0; i < dims.size(); ++i) {
                const Interval& interval = g.dimensions.get(dims[i]).interval;
                const double h = step_fraction * width[i];
                for (const double direction : {+1.0, -1.0}) {
                    const double candidate =
                        std::clamp(x[i] + direction * h, interval.lo, interval.hi);
                    if (candidate == x[i]) continue;
                    const double saved = x[i];
                    x[i] = candidate;
                    const double f = objective(x, rho);
                    if (f < f_best) {
                        f_best = f;
                        best_effort = last_effort;
                        best_violation = last_violation;
                        improved = true;
                        break;
                    }
                    x[i] = saved;
                }
            }
            if (!improved) break;
        }
        result.trace.push_back({outer, rho, step_fraction, f_best, best_effort, best_violation,
                                counter.count()});
        if (step_fraction < options.step_tolerance) break;
        rho *= options.penalty_growth;
        step_fraction *= 0.5;
    }

    for (std::size_t i = 0; i < dims.size(); ++i) result.configuration[dims[i]] = x[i];
    const double f_final = objective(x, rho);
    (void)f_final;
    result.effort = last_effort;
    result.max_violation = last_violation;
    {
        std::map<std::string, double> config;
        for (std::size_t i = 0; i < dims.size(); ++i) config[dims[i]] = x[i];
        const detail::ChainResult chain = detail::evaluate_chain(g, config, external_values, nullptr);
        result.benefit = chain.benefit;
    }
    result.diverged = result.max_violation > violation_tol;
    result.eval_count = counter.count();
    return result;
}

} // namespace opttopo
