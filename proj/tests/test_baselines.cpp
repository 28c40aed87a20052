#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "opttopo/baselines.hpp"
#include "opttopo/refplant.hpp"
#include "opttopo/solver.hpp"

using namespace opttopo;
using opttopo::testing::term;

TEST_CASE("random sampling is reproducible per seed") {
    SystemGraph g = opttopo::testing::single_node_system();
    DiscretizationSettings settings;
    settings.param_steps = 5;
    RandomBaselineResult one = random_configurations(g, settings, 1, 42);
    REQUIRE(one.samples.size() == 1);
    CHECK(one.eval_count == 1);

    RandomBaselineResult a = random_configurations(g, settings, 25, 7);
    RandomBaselineResult b = random_configurations(g, settings, 25, 7);
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        CHECK(a.samples[i].configuration == b.samples[i].configuration);
        CHECK(a.samples[i].realized_effort == b.samples[i].realized_effort);
        CHECK(a.samples[i].feasible == b.samples[i].feasible);
    }
    RandomBaselineResult c = random_configurations(g, settings, 25, 8);
    CHECK(a.samples[0].configuration != c.samples[0].configuration);
}

TEST_CASE("no feasible random point beats the traversal at its own level") {
    SystemGraph g = refplant::build_cooling_complex(0);
    DiscretizationSettings settings;
    settings.param_steps = 12;
    SolvedSystem solved = propagate(g, settings);
    const Grid& sink_grid = solved.grids.at(g.sink.dimension);

    int feasible_count = 0;
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        RandomBaselineResult random = random_configurations(g, settings, 100, seed);
        for (const RandomSample& sample : random.samples) {
            if (!sample.feasible) continue;
            ++feasible_count;
            TableKey key;
            key.benefit_index = *sample.benefit_index;
            const auto it = solved.sink_table.entries.find(key);
            REQUIRE(it != solved.sink_table.entries.end());
            CHECK(it->second.front().cumulative_root_effort <=
                  sample.realized_effort + 1e-9 * sample.realized_effort);
            (void)sink_grid;
        }
    }
    MESSAGE("feasible random samples across seeds {1,2,3}: ", feasible_count);
}

TEST_CASE("the brute force agrees with the traversal on a single node") {
    SystemGraph g = opttopo::testing::single_node_system(0.0, 3.0, 1.0);
    DiscretizationSettings settings;
    settings.param_steps = 4;
    SolvedSystem s = propagate(g, settings);
    for (double request : {0.0, 1.0, 2.0, 3.0}) {
        BruteForceResult oracle = joint_bruteforce(g, settings, request);
        LookupResult mine = lookup(s, request);
        REQUIRE(oracle.solved == mine.solved());
        CHECK(oracle.best_effort == mine.solutions.front().expected_effort);
    }
    CHECK(!joint_bruteforce(g, settings, 99.0).solved);
}

TEST_CASE("the brute force agrees with the traversal on a two-node chain") {
    SystemGraph g = opttopo::testing::two_node_chain();
    DiscretizationSettings settings;
    settings.param_steps = 4;
    SolvedSystem s = propagate(g, settings);
    const std::map<int, double> optima = bruteforce_level_optima(g, settings);
    REQUIRE(!optima.empty());
    const Grid& sink_grid = s.grids.at(g.sink.dimension);
    for (const auto& [level_index, effort] : optima) {
        LookupResult mine = lookup(s, sink_grid.levels[level_index]);
        REQUIRE(mine.solved());
        CHECK(mine.solutions.front().expected_effort == effort);
    }
}

TEST_CASE("the enumeration cap guards against combinatorial explosions") {
    SystemGraph g = refplant::build_cooling_complex(0);
    DiscretizationSettings settings;
    settings.param_steps = 20; // 20^7 joint combinations
    try {
        joint_bruteforce(g, settings, 100.0);
        FAIL("expected CapExceeded");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::CapExceeded);
    }
}

TEST_CASE("the penalty search solves a convex single-node request") {
    SystemGraph g = opttopo::testing::single_node_system(0.0, 10.0, 2.5);
    DiscretizationSettings settings;
    settings.param_steps = 5;
    PenaltyResult result = penalty_search(g, settings, 5.0, {{"Knob", 2.0}});
    CHECK(!result.diverged);
    CHECK(result.configuration.at("Knob") == doctest::Approx(5.0).epsilon(1e-3));
    CHECK(result.benefit == doctest::Approx(5.0).epsilon(1e-3));
    CHECK(!result.trace.empty());
}

TEST_CASE("the penalty search stays local on a multimodal model") {
    // Power has a local basin near Knob = 5.6 and a global one at 0;
    // a start in the right basin stays there.
    SystemGraph g;
    g.dimensions.add({"Knob", DimensionKind::FreeParameter, "1", {0.0, 7.0}});
    g.dimensions.add({"Power", DimensionKind::Effort, "kW_el", {0.0, 3000.0}});
    g.dimensions.add({"Output", DimensionKind::Benefit, "kW", {0.0, 7.0}});
    SubsystemNode node;
    node.name = "plant";
    node.model.inputs = {"Knob"};
    node.model.outputs = {"Power", "Output"};
    // cubic with minima at 0 and ~5.6, local max near 2.4: x^3 - 12x^2 + 29x + 40
    node.model.terms = {{term(1.0, {3}), term(-12.0, {2}), term(29.0, {1}), term(40.0, {0})},
                        {term(1.0, {1})}};
    node.model.max_degree = 3;
    g.nodes.push_back(node);
    g.root_weights = {{"kW_el", 1.0}};
    g.sink = {"plant", "Output", 0.5};
    derive_roles(g);
    g.finalize();

    DiscretizationSettings settings;
    settings.param_steps = 8;
    PenaltyOptions options;
    options.initial_step_fraction = 0.05; // small steps keep the search local
    PenaltyResult local = penalty_search(g, settings, 5.5, {{"Knob", 5.4}}, options);
    CHECK(local.configuration.at("Knob") == doctest::Approx(5.5).epsilon(1e-2));

    // documented behavior: the result can be non-global; the request is the
    // equality constraint, so both basins answer it but at different effort
    PenaltyResult other = penalty_search(g, settings, 1.0, {{"Knob", 5.0}}, options);
    CHECK(other.configuration.at("Knob") > 2.4);
}

TEST_CASE("penalty search needs far fewer evaluations than the traversal") {
    SystemGraph g = refplant::build_cooling_complex(0);
    DiscretizationSettings settings;
    settings.param_steps = 20;
    SolvedSystem solved = propagate(g, settings);

    std::map<std::string, double> start;
    for (const Dimension& dim : g.dimensions.all()) {
        if (dim.kind == DimensionKind::FreeParameter ||
            dim.kind == DimensionKind::CouplingParameter) {
            start[dim.name] = 0.5 * (dim.interval.lo + dim.interval.hi);
        }
    }
    PenaltyResult result = penalty_search(g, settings, 100.0, start);
    CHECK(result.eval_count <= 100000);
    CHECK(result.eval_count * 100 <= solved.eval_count);

    // when it lands feasibly, it cannot beat the exact per-level optimum by
    // more than one flow step of benefit movement
    if (!result.diverged) {
        LookupResult exact = lookup(solved, result.benefit);
        if (exact.solved()) {
            const double slack_level = result.benefit - 5.0;
            LookupResult lower = lookup(solved, slack_level);
            const double reference = lower.solved()
                                         ? lower.solutions.front().expected_effort
                                         : exact.solutions.front().expected_effort;
            CHECK(result.effort >= reference - 1e-6);
        }
    }
}

TEST_CASE("start configurations outside the bounds are rejected") {
    SystemGraph g = opttopo::testing::single_node_system();
    DiscretizationSettings settings;
    try {
        penalty_search(g, settings, 5.0, {{"Knob", 55.0}});
        FAIL("expected OutOfBounds");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::OutOfBounds);
    }
    CHECK_THROWS_AS(penalty_search(g, settings, 5.0, {}), Error);
}
