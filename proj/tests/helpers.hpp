#ifndef OPTTOPO_TEST_HELPERS_HPP
#define OPTTOPO_TEST_HELPERS_HPP

#include <map>
#include <string>
#include <vector>

#include "opttopo/graph.hpp"
#include "opttopo/rng.hpp"

namespace opttopo::testing {

inline PolynomialTerm term(double coeff, std::vector<int> exps) {
    return {coeff, std::move(exps)};
}

/// root -> plant -> sink with Output = Knob and Power = Knob^2.
/// Knob in [knob_lo, knob_hi]; Output interval matches the knob range.
inline SystemGraph single_node_system(double knob_lo = 0.0, double knob_hi = 10.0,
                                      double flow_step = 2.5) {
    SystemGraph g;
    g.dimensions.add({"Knob", DimensionKind::FreeParameter, "1", {knob_lo, knob_hi}});
    g.dimensions.add({"Power", DimensionKind::Effort, "kW_el", {0.0, 1000.0}});
    g.dimensions.add({"Output", DimensionKind::Benefit, "kW", {knob_lo, knob_hi}});
    SubsystemNode node;
    node.name = "plant";
    node.model.inputs = {"Knob"};
    node.model.outputs = {"Power", "Output"};
    node.model.terms = {{term(1.0, {2})}, {term(1.0, {1})}};
    node.model.max_degree = 2;
    g.nodes.push_back(node);
    g.root_weights = {{"kW_el", 1.0}};
    g.sink = {"plant", "Output", flow_step};
    derive_roles(g);
    g.finalize();
    return g;
}

/// One node with two knobs: Output = KnobA + KnobB, Power = KnobA^2 + w_b * KnobB^2.
inline SystemGraph two_knob_system(double weight_b, double knob_hi = 2.0,
                                   double flow_step = 1.0) {
    SystemGraph g;
    g.dimensions.add({"KnobA", DimensionKind::FreeParameter, "1", {0.0, knob_hi}});
    g.dimensions.add({"KnobB", DimensionKind::FreeParameter, "1", {0.0, knob_hi}});
    g.dimensions.add({"Power", DimensionKind::Effort, "kW_el", {0.0, 1000.0}});
    g.dimensions.add({"Output", DimensionKind::Benefit, "kW", {0.0, 2.0 * knob_hi}});
    SubsystemNode node;
    node.name = "plant";
    node.model.inputs = {"KnobA", "KnobB"};
    node.model.outputs = {"Power", "Output"};
    node.model.terms = {{term(1.0, {2, 0}), term(weight_b, {0, 2})},
                        {term(1.0, {1, 0}), term(1.0, {0, 1})}};
    node.model.max_degree = 2;
    g.nodes.push_back(node);
    g.root_weights = {{"kW_el", 1.0}};
    g.sink = {"plant", "Output", flow_step};
    derive_roles(g);
    g.finalize();
    return g;
}

/// root -> alpha -> beta -> sink. alpha: Flow = KnobA, PowerA = KnobA^2.
/// beta: needs Flow = 2 * KnobB, delivers Out = KnobB, PowerB = KnobB.
inline SystemGraph two_node_chain() {
    SystemGraph g;
    g.dimensions.add({"KnobA", DimensionKind::FreeParameter, "1", {0.0, 10.0}});
    g.dimensions.add({"KnobB", DimensionKind::FreeParameter, "1", {0.0, 5.0}});
    g.dimensions.add({"PowerA", DimensionKind::Effort, "kW_el", {0.0, 1000.0}});
    g.dimensions.add({"PowerB", DimensionKind::Effort, "kW_el", {0.0, 1000.0}});
    g.dimensions.add({"Flow", DimensionKind::Benefit, "kW", {0.0, 10.0}});
    g.dimensions.add({"Out", DimensionKind::Benefit, "kW", {0.0, 5.0}});
    {
        SubsystemNode node;
        node.name = "alpha";
        node.model.inputs = {"KnobA"};
        node.model.outputs = {"PowerA", "Flow"};
        node.model.terms = {{term(1.0, {2})}, {term(1.0, {1})}};
        node.model.max_degree = 2;
        g.nodes.push_back(node);
    }
    {
        SubsystemNode node;
        node.name = "beta";
        node.model.inputs = {"KnobB"};
        node.model.outputs = {"PowerB", "Flow", "Out"};
        node.model.terms = {{term(1.0, {1})}, {term(2.0, {1})}, {term(1.0, {1})}};
        node.model.max_degree = 1;
        g.nodes.push_back(node);
    }
    g.edges = {{"alpha", "beta", "Flow", 1.0}};
    g.root_weights = {{"kW_el", 1.0}};
    g.sink = {"beta", "Out", 1.0};
    derive_roles(g);
    g.finalize();
    return g;
}

/// Diamond: root -> {left, right} -> join -> sink. left and right produce the
/// same flow dimension; join needs their sum.
inline SystemGraph diamond_system() {
    SystemGraph g;
    g.dimensions.add({"KnobL", DimensionKind::FreeParameter, "1", {0.0, 4.0}});
    g.dimensions.add({"KnobR", DimensionKind::FreeParameter, "1", {0.0, 4.0}});
    g.dimensions.add({"KnobJ", DimensionKind::FreeParameter, "1", {0.0, 4.0}});
    g.dimensions.add({"PowerL", DimensionKind::Effort, "kW_el", {0.0, 1000.0}});
    g.dimensions.add({"PowerR", DimensionKind::Effort, "kW_el", {0.0, 1000.0}});
    g.dimensions.add({"PowerJ", DimensionKind::Effort, "kW_el", {0.0, 1000.0}});
    g.dimensions.add({"Feed", DimensionKind::Benefit, "kW", {0.0, 8.0}});
    g.dimensions.add({"Out", DimensionKind::Benefit, "kW", {0.0, 4.0}});
    auto leaf = [&](const char* name, const char* knob, const char* power, double quad) {
        SubsystemNode node;
        node.name = name;
        node.model.inputs = {knob};
        node.model.outputs = {power, "Feed"};
        node.model.terms = {{term(quad, {2})}, {term(1.0, {1})}};
        node.model.max_degree = 2;
        g.nodes.push_back(node);
    };
    leaf("left", "KnobL", "PowerL", 1.0);
    leaf("right", "KnobR", "PowerR", 2.0);
    {
        SubsystemNode node;
        node.name = "join";
        node.model.inputs = {"KnobJ"};
        node.model.outputs = {"PowerJ", "Feed", "Out"};
        // needs 2 * KnobJ of Feed, delivers KnobJ
        node.model.terms = {{term(0.5, {1})}, {term(2.0, {1})}, {term(1.0, {1})}};
        node.model.max_degree = 1;
        g.nodes.push_back(node);
    }
    g.edges = {{"left", "join", "Feed", 1.0}, {"right", "join", "Feed", 1.0}};
    g.root_weights = {{"kW_el", 1.0}};
    g.sink = {"join", "Out", 1.0};
    derive_roles(g);
    g.finalize();
    return g;
}

/// Chain of `length` nodes where adjacent nodes may share a coupling
/// dimension; coefficients drawn from the seed. Ranges are arranged so
/// production and requirement surfaces overlap.
inline SystemGraph random_chain_system(std::uint64_t seed, int length, bool with_coupling) {
    SplitMix64 rng = SplitMix64(seed).split("random-chain");
    SystemGraph g;
    const double step = 2.0;
    for (int i = 0; i < length; ++i) {
        const std::string suffix = std::to_string(i);
        g.dimensions.add({"Knob" + suffix, DimensionKind::FreeParameter, "1", {0.0, 4.0}});
        g.dimensions.add({"Power" + suffix, DimensionKind::Effort, "kW_el", {0.0, 1000.0}});
        // <= 8 flow levels with step 2
        g.dimensions.add({"Flow" + suffix, DimensionKind::Benefit, "kW", {10.0, 22.0}});
    }
    if (with_coupling) {
        g.dimensions.add({"Shared", DimensionKind::CouplingParameter, "degC", {0.0, 2.0}});
    }
    for (int i = 0; i < length; ++i) {
        const std::string suffix = std::to_string(i);
        SubsystemNode node;
        node.name = "node" + suffix;
        node.model.inputs = {"Knob" + suffix};
        const bool couple = with_coupling && (i == 0 || i == 1);
        if (couple) node.model.inputs.push_back("Shared");
        const std::size_t arity = node.model.inputs.size();
        auto t = [&](double c, int e_knob, int e_shared) {
            std::vector<int> exps(arity, 0);
            exps[0] = e_knob;
            if (couple && e_shared > 0) exps[1] = e_shared;
            return term(c, std::move(exps));
        };
        // produced: 10 + 3 * knob (+ shared tilt), spans [10, 22]
        std::vector<PolynomialTerm> produced{t(10.0 + rng.uniform(-0.4, 0.4), 0, 0),
                                             t(3.0, 1, 0)};
        if (couple) produced.push_back(t(rng.uniform(-0.5, 0.5), 0, 1));
        // power: positive, curved
        std::vector<PolynomialTerm> power{t(1.0 + rng.uniform(0.0, 2.0), 0, 0),
                                          t(rng.uniform(0.2, 1.4), 1, 0),
                                          t(rng.uniform(0.1, 0.9), 2, 0)};
        if (couple) power.push_back(t(rng.uniform(0.0, 0.8), 0, 1));
        node.model.outputs = {"Power" + suffix};
        node.model.terms = {std::move(power)};
        if (i > 0) {
            // requirement on the previous flow, same span as its production
            std::vector<PolynomialTerm> required{t(10.0 + rng.uniform(-0.8, 0.8), 0, 0),
                                                 t(3.0 + rng.uniform(-0.3, 0.3), 1, 0)};
            if (couple) required.push_back(t(rng.uniform(-0.5, 0.5), 0, 1));
            node.model.outputs.push_back("Flow" + std::to_string(i - 1));
            node.model.terms.push_back(std::move(required));
        }
        node.model.outputs.push_back("Flow" + suffix);
        node.model.terms.push_back(std::move(produced));
        node.model.max_degree = 2;
        g.nodes.push_back(std::move(node));
        if (i > 0) {
            g.edges.push_back(
                {"node" + std::to_string(i - 1), "node" + suffix, "Flow" + std::to_string(i - 1),
                 step});
        }
    }
    g.root_weights = {{"kW_el", 1.0}};
    g.sink = {"node" + std::to_string(length - 1), "Flow" + std::to_string(length - 1), step};
    derive_roles(g);
    g.finalize();
    return g;
}

} // namespace opttopo::testing

#endif
