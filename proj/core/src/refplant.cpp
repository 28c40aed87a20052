#include "opttopo/refplant.hpp"

#include <algorithm>
#include <map>
#include <vector>

#include "chain_eval.hpp"
#include "opttopo/rng.hpp"

namespace opttopo {
namespace refplant {

namespace {

/// Tiny polynomial expression builder used to assemble the ground-truth
/// models from offset forms like (28 - T)^2 without hand-expanding terms.
struct Expr {
    std::size_t arity = 0;
    std::map<std::vector<int>, double> terms;
};

Expr lit(std::size_t arity, double value) {
    Expr e{arity, {}};
    e.terms[std::vector<int>(arity, 0)] = value;
    return e;
}

Expr var(std::size_t arity, std::size_t index) {
    Expr e{arity, {}};
    std::vector<int> exps(arity, 0);
    exps[index] = 1;
    e.terms[std::move(exps)] = 1.0;
    return e;
}

Expr operator+(const Expr& a, const Expr& b) {
    Expr out = a;
    for (const auto& [exps, coeff] : b.terms) out.terms[exps] += coeff;
    return out;
}

Expr operator-(const Expr& a, const Expr& b) {
    Expr out = a;
    for (const auto& [exps, coeff] : b.terms) out.terms[exps] -= coeff;
    return out;
}

Expr operator*(double scale, const Expr& a) {
    Expr out = a;
    for (auto& [exps, coeff] : out.terms) coeff *= scale;
    return out;
}

Expr operator*(const Expr& a, const Expr& b) {
    Expr out{a.arity, {}};
    for (const auto& [ea, ca] : a.terms) {
        for (const auto& [eb, cb] : b.terms) {
            std::vector<int> exps(a.arity);
            for (std::size_t i = 0; i < a.arity; ++i) exps[i] = ea[i] + eb[i];
            out.terms[std::move(exps)] += ca * cb;
        }
    }
    return out;
}

std::vector<PolynomialTerm> to_terms(const Expr& e) {
    std::vector<PolynomialTerm> terms;
    for (const auto& [exps, coeff] : e.terms) {
        if (coeff == 0.0) continue;
        terms.push_back({coeff, exps});
    }
    return terms;
}

} // namespace

SystemGraph build_cooling_complex(std::uint64_t coeff_seed) {
    SystemGraph g;
    auto dim = [&](const char* name, DimensionKind kind, const char* unit, double lo, double hi) {
        g.dimensions.add({name, kind, unit, {lo, hi}});
    };
    dim("TempCoTo", DimensionKind::FreeParameter, "degC", 18.0, 28.0);
    dim("SetPressureCoWa", DimensionKind::FreeParameter, "bar", 1.5, 3.5);
    dim("HysteresisA", DimensionKind::FreeParameter, "1", 0.0, 1.0);
    dim("HysteresisB", DimensionKind::FreeParameter, "1", 0.0, 1.0);
    dim("SetPressureChWa", DimensionKind::FreeParameter, "bar", 1.5, 3.5);
    dim("TempHeatex", DimensionKind::CouplingParameter, "degC", 24.0, 34.0);
    dim("TempConsumer", DimensionKind::CouplingParameter, "degC", 8.0, 14.0);
    dim("TempAmbient", DimensionKind::ExternalParameter, "degC", 10.0, 35.0);
    dim("ElecCoTo", DimensionKind::Effort, "kW_el", 0.0, 40.0);
    dim("ElecCoWa", DimensionKind::Effort, "kW_el", 0.0, 20.0);
    dim("ElecChillers", DimensionKind::Effort, "kW_el", 0.0, 80.0);
    dim("ElecChWa", DimensionKind::Effort, "kW_el", 0.0, 20.0);
    dim("CoolCoTo", DimensionKind::Benefit, "kW", 84.0, 172.0);
    dim("CoolCoWa", DimensionKind::Benefit, "kW", 74.0, 147.0);
    dim("CoolChillers", DimensionKind::Benefit, "kW", 63.0, 136.5);
    dim("CoolChWa", DimensionKind::Benefit, "kW", 75.0, 124.5);

    // Every named base coefficient gets a small deterministic jitter so each
    // seed yields a distinct plant with the same structure; the dimension
    // bounds above stay fixed.
    SplitMix64 stream = SplitMix64(coeff_seed).split("refplant-coefficients");
    auto j = [&](double base) { return base * (1.0 + 0.003 * stream.uniform(-1.0, 1.0)); };

    {
        // cooling tower: fan electricity vs delivered condenser-loop cooling.
        const std::size_t n = 3; // TempCoTo, TempHeatex, TempAmbient
        const Expr u = lit(n, 28.0) - var(n, 0); // cooler set-point -> more output
        const Expr w = var(n, 1) - lit(n, 24.0);
        const Expr v = var(n, 2) - lit(n, 20.0);
        const Expr elec = lit(n, j(3.1)) + j(0.93) * u + j(0.052) * (u * u) + j(0.27) * v +
                          j(0.011) * (v * v) - j(0.08) * w;
        const Expr cool = lit(n, j(91.0)) + j(8.0) * u - j(0.10) * w + j(0.012) * (u * v);
        SubsystemNode node;
        node.name = "cooling_tower";
        node.model.inputs = {"TempCoTo", "TempHeatex", "TempAmbient"};
        node.model.outputs = {"ElecCoTo", "CoolCoTo"};
        node.model.terms = {to_terms(elec), to_terms(cool)};
        node.model.max_degree = 2;
        g.nodes.push_back(std::move(node));
    }
    {
        // cooling water cycle: pump electricity, required tower cooling,
        // delivered condenser cooling.
        const std::size_t n = 2; // SetPressureCoWa, TempHeatex
        const Expr p = var(n, 0) - lit(n, 1.5);
        const Expr w = var(n, 1) - lit(n, 24.0);
        const Expr elec = lit(n, j(2.15)) + j(0.62) * p + j(1.07) * (p * p) - j(0.04) * w;
        const Expr required = lit(n, j(90.0)) + j(30.0) * p + j(0.10) * (p * p) - j(0.54) * w;
        const Expr delivered = lit(n, j(79.6)) + j(30.4) * p + j(0.41) * (p * p) - j(0.52) * w;
        SubsystemNode node;
        node.name = "cooling_water";
        node.model.inputs = {"SetPressureCoWa", "TempHeatex"};
        node.model.outputs = {"ElecCoWa", "CoolCoTo", "CoolCoWa"};
        node.model.terms = {to_terms(elec), to_terms(required), to_terms(delivered)};
        node.model.max_degree = 2;
        g.nodes.push_back(std::move(node));
    }
    {
        // chillers: compressor electricity dominated by the temperature lift,
        // with cycling losses away from mid hysteresis.
        const std::size_t n = 4; // HysteresisA, HysteresisB, TempHeatex, TempConsumer
        const Expr a = var(n, 0);
        const Expr b = var(n, 1);
        const Expr w = var(n, 2) - lit(n, 24.0);
        const Expr c = var(n, 3) - lit(n, 8.0);
        const Expr elec = lit(n, j(20.4)) - j(0.73) * a - j(0.91) * b + j(1.41) * w +
                          j(0.62) * (a * w) + j(0.55) * (b * w) - j(0.82) * c -
                          j(0.36) * (a * c) - j(0.32) * (b * c) + j(7.3) * (a * a) +
                          j(6.8) * (b * b);
        const Expr required = lit(n, j(81.0)) + j(34.4) * a + j(30.9) * b - j(6.4) * (a * b) -
                              j(0.58) * w + j(0.62) * c;
        const Expr delivered = lit(n, j(71.8)) + j(31.6) * a + j(28.3) * b - j(5.9) * (a * b) -
                               j(0.84) * w + j(0.57) * c;
        SubsystemNode node;
        node.name = "chillers";
        node.model.inputs = {"HysteresisA", "HysteresisB", "TempHeatex", "TempConsumer"};
        node.model.outputs = {"ElecChillers", "CoolCoWa", "CoolChillers"};
        node.model.terms = {to_terms(elec), to_terms(required), to_terms(delivered)};
        node.model.max_degree = 2;
        g.nodes.push_back(std::move(node));
    }
    {
        // chilled water cycle: distribution pump and the consumer-side
        // cooling power that answers the request.
        const std::size_t n = 2; // SetPressureChWa, TempConsumer
        const Expr p = var(n, 0) - lit(n, 1.5);
        const Expr c = var(n, 1) - lit(n, 8.0);
        const Expr elec = lit(n, j(1.48)) + j(0.59) * p + j(1.13) * (p * p) + j(0.045) * c;
        const Expr required = lit(n, j(78.4)) + j(21.6) * p + j(1.08) * c + j(0.12) * (p * c) -
                              j(0.12) * (p * p);
        const Expr delivered = lit(n, j(75.4)) + j(21.0) * p + j(1.05) * c + j(0.12) * (p * c) -
                               j(0.25) * (p * p);
        SubsystemNode node;
        node.name = "chilled_water";
        node.model.inputs = {"SetPressureChWa", "TempConsumer"};
        node.model.outputs = {"ElecChWa", "CoolChillers", "CoolChWa"};
        node.model.terms = {to_terms(elec), to_terms(required), to_terms(delivered)};
        node.model.max_degree = 2;
        g.nodes.push_back(std::move(node));
    }

    g.edges = {{"cooling_tower", "cooling_water", "CoolCoTo", 5.0},
               {"cooling_water", "chillers", "CoolCoWa", 5.0},
               {"chillers", "chilled_water", "CoolChillers", 5.0}};
    g.root_weights = {{"kW_el", 1.0}};
    g.sink = {"chilled_water", "CoolChWa", 5.0};
    g.external_defaults = {{"TempAmbient", 20.0}};

    derive_roles(g);
    g.finalize();
    return g;
}

RealizedPoint realize(const SystemGraph& g, const std::map<std::string, double>& configuration,
                      EvalCounter* counter, const std::map<std::string, double>& external_values) {
    const detail::ChainResult chain =
        detail::evaluate_chain(g, configuration, external_values, counter);
    RealizedPoint point;
    point.effort = chain.effort;
    point.benefit = chain.benefit;
    if (chain.effort > 0.0) {
        point.efficiency = chain.benefit / chain.effort;
    }
    point.node_outputs = chain.node_outputs;
    return point;
}

Dataset sample_node_dataset(const SystemGraph& g, const std::string& node_name, int rows,
                            std::uint64_t seed) {
    if (rows < 1) {
        throw Error(ErrorCode::BadArgument, "sample count must be at least 1");
    }
    const SubsystemNode& node = g.node(node_name);
    Dataset data;
    data.provenance =
        "sampled from ground-truth model of '" + node_name + "', seed " + std::to_string(seed);
    data.columns = node.model.inputs;
    data.columns.insert(data.columns.end(), node.model.outputs.begin(),
                        node.model.outputs.end());

    const SplitMix64 base = SplitMix64(seed).split("dataset-" + node_name);
    std::vector<double> inputs(node.model.inputs.size());
    for (int r = 0; r < rows; ++r) {
        SplitMix64 stream = base.split(static_cast<std::uint64_t>(r));
        for (std::size_t i = 0; i < inputs.size(); ++i) {
            const Interval& interval = g.dimensions.get(node.model.inputs[i]).interval;
            inputs[i] = stream.uniform(interval.lo, interval.hi);
        }
        std::vector<double> row = inputs;
        for (std::size_t o = 0; o < node.model.outputs.size(); ++o) {
            row.push_back(eval_output_raw(node.model, o, inputs));
        }
        data.rows.push_back(std::move(row));
    }
    return data;
}

std::map<std::string, Dataset> sample_datasets(const SystemGraph& g, int rows_per_node,
                                               std::uint64_t seed) {
    std::map<std::string, Dataset> datasets;
    for (const SubsystemNode& node : g.nodes) {
        datasets.emplace(node.name, sample_node_dataset(g, node.name, rows_per_node, seed));
    }
    return datasets;
}

} // namespace refplant
} // namespace opttopo
