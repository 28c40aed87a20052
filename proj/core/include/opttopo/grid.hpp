#ifndef OPTTOPO_GRID_HPP
#define OPTTOPO_GRID_HPP

#include <string>
#include <vector>

#include "opttopo/dimension.hpp"

namespace opttopo {

enum class GridKind : std::uint8_t { Parameter, Flow };

/// Discretization of one dimension. Parameter grids place `step_count`
/// equally spaced levels across the interval; flow grids cover the interval
/// with consecutive multiples of `step_size`, rounded outward so no
/// attainable flow falls off-grid.
struct Grid {
    std::string dimension;
    GridKind kind = GridKind::Parameter;
    int step_count = 0;     // parameter grids
    double step_size = 0.0; // flow grids
    std::vector<double> levels;

    bool operator==(const Grid&) const = default;
};

Grid make_param_grid(const Dimension& dim, int step_count);
Grid make_flow_grid(const Dimension& dim, double step_size);

struct Snap {
    double level = 0.0;
    int index = 0;
    bool clamped = false;
};

/// Nearest grid level; exact midpoints resolve toward the lower level and
/// values beyond the grid ends clamp to the end level with `clamped` set.
Snap snap_to_level(double value, const Grid& grid);

} // namespace opttopo

#endif
