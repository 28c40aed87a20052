#include "opttopo/grid.hpp"

#include <algorithm>
#include <cmath>

namespace opttopo {

namespace {

void require_bounded(const Dimension& dim) {
    if (!std::isfinite(dim.interval.lo) || !std::isfinite(dim.interval.hi)) {
        throw Error(ErrorCode::UnboundedDimension, "'" + dim.name + "' has non-finite bounds");
    }
}

} // namespace

Grid make_param_grid(const Dimension& dim, int step_count) {
    require_bounded(dim);
    if (step_count < 2) {
        throw Error(ErrorCode::BadStepCount,
                    "'" + dim.name + "' needs at least 2 steps, got " + std::to_string(step_count));
    }
    if (dim.interval.width() <= 0.0) {
        throw Error(ErrorCode::DegenerateInterval,
                    "'" + dim.name + "' has zero width, cannot discretize");
    }
    Grid grid;
    grid.dimension = dim.name;
    grid.kind = GridKind::Parameter;
    grid.step_count = step_count;
    grid.levels.resize(static_cast<std::size_t>(step_count));
    const double spacing = dim.interval.width() / static_cast<double>(step_count - 1);
    for (int i = 0; i < step_count; ++i) {
        grid.levels[static_cast<std::size_t>(i)] = dim.interval.lo + spacing * i;
    }
    grid.levels.front() = dim.interval.lo;
    grid.levels.back() = dim.interval.hi;
    return grid;
}

Grid make_flow_grid(const Dimension& dim, double step_size) {
    require_bounded(dim);
    if (!(step_size > 0.0) || !std::isfinite(step_size)) {
        throw Error(ErrorCode::BadStepSize, "'" + dim.name + "' needs a positive step size");
    }
    Grid grid;
    grid.dimension = dim.name;
    grid.kind = GridKind::Flow;
    grid.step_size = step_size;
    // Consecutive multiples of the step, rounded outward past both interval ends.
    const auto k_lo = static_cast<long long>(std::floor(dim.interval.lo / step_size));
    const auto k_hi = static_cast<long long>(std::ceil(dim.interval.hi / step_size));
    grid.levels.reserve(static_cast<std::size_t>(k_hi - k_lo + 1));
    for (long long k = k_lo; k <= k_hi; ++k) {
        grid.levels.push_back(static_cast<double>(k) * step_size);
    }
    return grid;
}

Snap snap_to_level(double value, const Grid& grid) {
    if (grid.levels.empty()) {
        throw Error(ErrorCode::BadArgument, "snap on empty grid for '" + grid.dimension + "'");
    }
    Snap snap;
    if (value <= grid.levels.front()) {
        snap.level = grid.levels.front();
        snap.index = 0;
        snap.clamped = value < grid.levels.front();
        return snap;
    }
    if (value >= grid.levels.back()) {
        snap.level = grid.levels.back();
        snap.index = static_cast<int>(grid.levels.size()) - 1;
        snap.clamped = value > grid.levels.back();
        return snap;
    }
    const auto upper = std::upper_bound(grid.levels.begin(), grid.levels.end(), value);
    const auto hi_idx = static_cast<std::size_t>(upper - grid.levels.begin());
    const std::size_t lo_idx = hi_idx - 1;
    // Exact midpoints resolve toward the lower level.
    const double d_lo = value - grid.levels[lo_idx];
    const double d_hi = grid.levels[hi_idx] - value;
    const std::size_t idx = (d_lo <= d_hi) ? lo_idx : hi_idx;
    snap.level = grid.levels[idx];
    snap.index = static_cast<int>(idx);
    snap.clamped = false;
    return snap;
}

} // namespace opttopo
