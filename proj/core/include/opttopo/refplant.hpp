#ifndef OPTTOPO_REFPLANT_HPP
#define OPTTOPO_REFPLANT_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "opttopo/eval_counter.hpp"
#include "opttopo/graph.hpp"
#include "opttopo/identify.hpp"

namespace opttopo {

// Reference cooling complex: cooling tower -> cooling water -> chillers ->
// chilled water, all drawing electrical power from the root, with a cooling
// power request at the sink. The models are synthetic polynomials (the plant
// ships its own ground truth in place of an external simulation); their
// coefficients are deterministic per seed. Requests around 74 kW sit below
// the attainable range by construction.

namespace refplant {

inline constexpr std::uint64_t kDefaultSeed = 0;

/// The four-node system with ground-truth models, validated and ready to
/// solve. Coefficients are jittered a few percent per seed.
SystemGraph build_cooling_complex(std::uint64_t coeff_seed = kDefaultSeed);

struct RealizedPoint {
    double effort = 0.0;  // commensurated root draw across the chain
    double benefit = 0.0; // sink node benefit output
    std::optional<double> efficiency;
    std::map<std::string, std::map<std::string, double>> node_outputs;
};

/// Evaluates a full configuration (free + coupling + external values) through
/// the chain of a system's own models. Used to realize set-points against the
/// ground truth. Throws MissingInput / OutOfBounds.
RealizedPoint realize(const SystemGraph& g, const std::map<std::string, double>& configuration,
                      EvalCounter* counter = nullptr,
                      const std::map<std::string, double>& external_values = {});

/// Random operating data for one subsystem: its inputs sampled uniformly over
/// their intervals, its outputs computed from the ground-truth model. A flow
/// dimension carries this node's own value (production and requirement differ
/// across nodes, so identification data is per node).
Dataset sample_node_dataset(const SystemGraph& g, const std::string& node, int rows,
                            std::uint64_t seed);

/// One dataset per node, keyed by node name.
std::map<std::string, Dataset> sample_datasets(const SystemGraph& g, int rows_per_node,
                                               std::uint64_t seed);

} // namespace refplant

} // namespace opttopo

#endif
