#ifndef OPTTOPO_CHAIN_EVAL_HPP
#define OPTTOPO_CHAIN_EVAL_HPP

#include <map>
#include <string>

#include "opttopo/eval_counter.hpp"
#include "opttopo/graph.hpp"

namespace opttopo::detail {

struct ChainResult {
    double effort = 0.0;  // weighted root draws accumulated in traversal order
    double benefit = 0.0; // sink node benefit output
    std::map<std::string, std::map<std::string, double>> node_outputs;
};

/// Evaluates every node of the system at a full configuration. External
/// parameters resolve from the configuration, then `external_values`, then
/// the graph defaults. Throws MissingInput / OutOfBounds.
ChainResult evaluate_chain(const SystemGraph& g, const std::map<std::string, double>& configuration,
                           const std::map<std::string, double>& external_values,
                           EvalCounter* counter);

} // namespace opttopo::detail

#endif
