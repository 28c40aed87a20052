#ifndef OPTTOPO_IDENTIFY_HPP
#define OPTTOPO_IDENTIFY_HPP

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "opttopo/dimension.hpp"
#include "opttopo/graph.hpp"
#include "opttopo/polynomial.hpp"

namespace opttopo {

/// Tabular operating data used to identify models and dimension bounds.
struct Dataset {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::string provenance;
    std::size_t dropped_rows = 0; // non-finite rows removed at ingestion

    std::size_t column_index(const std::string& name) const;
};

struct FitReport {
    double rms_residual = 0.0;
    double r_squared = 0.0;
    std::size_t rows_used = 0;
    std::size_t rows_dropped = 0;
    std::size_t term_count = 0;
};

struct FitResult {
    PolynomialModel model;
    FitReport report;
};

/// Least-squares fit over all monomials up to `degree`, solved by column-
/// pivoted QR on inputs rescaled to [-1, 1] (raw monomials on narrow
/// intervals are catastrophically ill-conditioned); coefficients are mapped
/// back to the original variables. Throws InsufficientRows or RankDeficient.
FitResult fit_polynomial(const Dataset& data, const std::vector<std::string>& inputs,
                         const std::string& output, int degree);

/// Observed [min, max] of a column. Throws EmptyColumn.
Interval extract_bounds(const Dataset& data, const std::string& column);

/// Rebuilds a system with every node's model refitted from its dataset
/// (keyed by node name) at the given degree. Dimension records and topology
/// are kept as declared.
SystemGraph refit_models(const SystemGraph& g, const std::map<std::string, Dataset>& datasets,
                         int degree);

} // namespace opttopo

#endif
