#include "chain_eval.hpp"

#include "opttopo/polynomial.hpp"

namespace opttopo::detail {

ChainResult evaluate_chain(const SystemGraph& g, const std::map<std::string, double>& configuration,
                           const std::map<std::string, double>& external_values,
                           EvalCounter* counter) {
    EvalCounter local;
    EvalCounter& tally = counter ? *counter : local;

    auto resolve = [&](const std::string& name) -> double {
        if (auto it = configuration.find(name); it != configuration.end()) return it->second;
        if (auto it = external_values.find(name); it != external_values.end()) return it->second;
        if (auto it = g.external_defaults.find(name); it != g.external_defaults.end()) {
            return it->second;
        }
        throw Error(ErrorCode::MissingInput, "configuration lacks '" + name + "'");
    };

    ChainResult result;
    for (std::size_t node_idx : g.solve_order()) {
        const SubsystemNode& node = g.nodes[node_idx];
        std::map<std::string, double> point;
        for (const std::string& input : node.model.inputs) {
            point[input] = resolve(input);
        }
        std::map<std::string, double> outputs = eval_model(node.model, g.dimensions, point, tally);
        // Per-node local draw first, then one accumulation step: the same
        // association the traversal uses, so expected and realized efforts
        // agree bit-exactly on chains.
        double local = 0.0;
        for (const std::string& output : node.model.outputs) {
            const Dimension& dim = g.dimensions.get(output);
            if (dim.kind == DimensionKind::Effort) {
                local += g.root_weights.at(dim.unit) * outputs.at(output);
            }
        }
        result.effort += local;
        if (node.name == g.sink.node) {
            result.benefit = outputs.at(g.sink.dimension);
        }
        result.node_outputs.emplace(node.name, std::move(outputs));
    }
    return result;
}

} // namespace opttopo::detail
