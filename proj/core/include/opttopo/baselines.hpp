#ifndef OPTTOPO_BASELINES_HPP
#define OPTTOPO_BASELINES_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "opttopo/graph.hpp"
#include "opttopo/solver.hpp"

namespace opttopo {

/// One random configuration evaluated through the chain. `feasible` means
/// every flow coupling matched at grid resolution, not that the sample was
/// dropped; infeasible samples stay in the list.
struct RandomSample {
    std::map<std::string, double> configuration; // free + coupling values
    double realized_effort = 0.0;
    double realized_benefit = 0.0;
    std::optional<double> realized_efficiency;
    bool feasible = false;
    std::optional<int> benefit_index; // sink grid level when on-grid
};

struct RandomBaselineResult {
    std::vector<RandomSample> samples;
    std::uint64_t eval_count = 0;
};

/// Draws n configurations uniformly from the parameter intervals
/// (deterministic per seed) and evaluates each through the chain.
RandomBaselineResult random_configurations(const SystemGraph& g,
                                           const DiscretizationSettings& settings, int n,
                                           std::uint64_t seed,
                                           const std::map<std::string, double>& external_values = {});

struct BruteForceResult {
    bool solved = false;
    double request = 0.0;
    std::optional<double> snapped_level;
    double best_effort = 0.0;
    std::map<std::string, double> configuration;
    std::uint64_t eval_count = 0;
};

inline constexpr std::uint64_t kDefaultBruteForceCap = 10'000'000;

/// Independent correctness reference: enumerates the cross-product of every
/// node's parameter grids simultaneously, applies the same snapping and
/// conservation rules as the traversal, and returns the global minimum for
/// the snapped request. Throws CapExceeded when the joint grid exceeds `cap`.
BruteForceResult joint_bruteforce(const SystemGraph& g, const DiscretizationSettings& settings,
                                  double request,
                                  const std::map<std::string, double>& external_values = {},
                                  std::uint64_t cap = kDefaultBruteForceCap);

/// Same enumeration, reporting the minimal cumulative effort for every
/// populated sink level (the oracle form used by equivalence tests).
std::map<int, double> bruteforce_level_optima(const SystemGraph& g,
                                              const DiscretizationSettings& settings,
                                              const std::map<std::string, double>& external_values = {},
                                              std::uint64_t cap = kDefaultBruteForceCap);

struct PenaltyOptions {
    double initial_step_fraction = 0.25; // of each dimension's width
    double step_tolerance = 1e-4;        // relative to dimension width
    double initial_penalty = 10.0;
    double penalty_growth = 10.0;
    int max_outer_iterations = 24;
    int max_sweeps_per_outer = 40;
    std::optional<double> violation_tolerance; // default: half the finest flow step
};

struct PenaltyTracePoint {
    int outer = 0;
    double penalty_weight = 0.0;
    double step = 0.0;
    double objective = 0.0;
    double effort = 0.0;
    double max_violation = 0.0;
    std::uint64_t eval_count = 0;
};

struct PenaltyResult {
    std::map<std::string, double> configuration;
    double effort = 0.0;
    double benefit = 0.0;
    double max_violation = 0.0;
    bool diverged = false; // constraint violation not reduced below tolerance
    std::uint64_t eval_count = 0;
    std::vector<PenaltyTracePoint> trace;
};

/// Simplified sequential-penalty coordinate search: minimizes commensurated
/// effort plus a growing quadratic penalty on the request mismatch and every
/// flow-coupling mismatch, halving the step each outer iteration. A local
/// method; it may return a non-global optimum. Not a reimplementation of any
/// external solver.
PenaltyResult penalty_search(const SystemGraph& g, const DiscretizationSettings& settings,
                             double request, const std::map<std::string, double>& start,
                             const PenaltyOptions& options = {},
                             const std::map<std::string, double>& external_values = {});

} // namespace opttopo

#endif
