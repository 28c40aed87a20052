#include "opttopo/identify.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <Eigen/Dense>

namespace opttopo {

std::size_t Dataset::column_index(const std::string& name) const {
    auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) {
        throw Error(ErrorCode::BadArgument, "dataset has no column '" + name + "'");
    }
    return static_cast<std::size_t>(it - columns.begin());
}

namespace {

/// All exponent vectors over `count` inputs with total degree <= degree,
/// in a fixed lexicographic order (constant term first).
void enumerate_exponents(std::size_t count, int degree, std::vector<int>& current,
                         std::vector<std::vector<int>>& out) {
    if (current.size() == count) {
        out.push_back(current);
        return;
    }
    int used = 0;
    for (int e : current) used += e;
    for (int e = 0; e + used <= degree; ++e) {
        current.push_back(e);
        enumerate_exponents(count, degree, current, out);
        current.pop_back();
    }
}

long long binomial(int n, int k) {
    long long result = 1;
    for (int i = 1; i <= k; ++i) {
        result = result * (n - k + i) / i;
    }
    return result;
}

} // namespace

FitResult fit_polynomial(const Dataset& data, const std::vector<std::string>& inputs,
                         const std::string& output, int degree) {
    if (degree < 1) {
        throw Error(ErrorCode::BadArgument, "fit degree must be at least 1");
    }
    std::vector<std::size_t> input_cols;
    input_cols.reserve(inputs.size());
    for (const std::string& name : inputs) input_cols.push_back(data.column_index(name));
    const std::size_t output_col = data.column_index(output);

    std::vector<std::vector<int>> exponents;
    {
        std::vector<int> scratch;
        enumerate_exponents(inputs.size(), degree, scratch, exponents);
    }
    const std::size_t term_count = exponents.size();
    const std::size_t row_count = data.rows.size();
    if (row_count < term_count) {
        throw Error(ErrorCode::InsufficientRows,
                    std::to_string(row_count) + " rows for " + std::to_string(term_count) +
                        " monomials of degree " + std::to_string(degree));
    }

    // Affine rescale of each input to [-1, 1] over its observed range; raw
    // monomials on narrow intervals make the normal directions collapse.
    std::vector<double> scale_a(inputs.size(), 1.0), scale_b(inputs.size(), 0.0);
    for (std::size_t j = 0; j < inputs.size(); ++j) {
        double lo = data.rows.front()[input_cols[j]];
        double hi = lo;
        for (const auto& row : data.rows) {
            lo = std::min(lo, row[input_cols[j]]);
            hi = std::max(hi, row[input_cols[j]]);
        }
        if (hi > lo) {
            scale_a[j] = 2.0 / (hi - lo);
            scale_b[j] = -(hi + lo) / (hi - lo);
        } else {
            scale_a[j] = 1.0;
            scale_b[j] = -lo; // constant column maps to 0; rank check reports it
        }
    }

    Eigen::MatrixXd design(row_count, term_count);
    Eigen::VectorXd target(row_count);
    std::vector<double> scaled(inputs.size());
    for (std::size_t r = 0; r < row_count; ++r) {
        const auto& row = data.rows[r];
        for (std::size_t j = 0; j < inputs.size(); ++j) {
            scaled[j] = scale_a[j] * row[input_cols[j]] + scale_b[j];
        }
        for (std::size_t t = 0; t < term_count; ++t) {
            double value = 1.0;
            for (std::size_t j = 0; j < inputs.size(); ++j) {
                for (int e = 0; e < exponents[t][j]; ++e) value *= scaled[j];
            }
            design(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(t)) = value;
        }
        target(static_cast<Eigen::Index>(r)) = row[output_col];
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (static_cast<std::size_t>(qr.rank()) < term_count) {
        throw Error(ErrorCode::RankDeficient,
                    "design matrix rank " + std::to_string(qr.rank()) + " < " +
                        std::to_string(term_count) + " terms; data does not excite all monomials");
    }
    const Eigen::VectorXd coeffs = qr.solve(target);

    const Eigen::VectorXd residual = design * coeffs - target;
    const double ss_res = residual.squaredNorm();
    const double mean = target.mean();
    const double ss_tot = (target.array() - mean).square().sum();

    FitResult result;
    result.report.rms_residual = std::sqrt(ss_res / static_cast<double>(row_count));
    result.report.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    result.report.rows_used = row_count;
    result.report.rows_dropped = data.dropped_rows;
    result.report.term_count = term_count;

    // Map the polynomial in scaled variables back to the original inputs:
    // t_j = a_j x_j + b_j, expanded term by term with binomials.
    std::map<std::vector<int>, double> expanded;
    for (std::size_t t = 0; t < term_count; ++t) {
        std::map<std::vector<int>, double> partial{{std::vector<int>(inputs.size(), 0),
                                                    coeffs(static_cast<Eigen::Index>(t))}};
        for (std::size_t j = 0; j < inputs.size(); ++j) {
            const int e = exponents[t][j];
            if (e == 0) continue;
            std::map<std::vector<int>, double> next;
            for (int k = 0; k <= e; ++k) {
                const double factor = static_cast<double>(binomial(e, k)) *
                                      std::pow(scale_a[j], k) * std::pow(scale_b[j], e - k);
                if (factor == 0.0) continue;
                for (const auto& [exp_vec, coeff] : partial) {
                    std::vector<int> bumped = exp_vec;
                    bumped[j] += k;
                    next[bumped] += coeff * factor;
                }
            }
            partial = std::move(next);
        }
        for (const auto& [exp_vec, coeff] : partial) {
            expanded[exp_vec] += coeff;
        }
    }

    result.model.inputs = inputs;
    result.model.outputs = {output};
    result.model.max_degree = degree;
    result.model.terms.resize(1);
    for (const auto& [exp_vec, coeff] : expanded) {
        result.model.terms[0].push_back({coeff, exp_vec});
    }
    result.model.validate();
    return result;
}

Interval extract_bounds(const Dataset& data, const std::string& column) {
    const std::size_t col = data.column_index(column);
    if (data.rows.empty()) {
        throw Error(ErrorCode::EmptyColumn, "column '" + column + "' has no rows");
    }
    Interval interval{data.rows.front()[col], data.rows.front()[col]};
    for (const auto& row : data.rows) {
        interval.lo = std::min(interval.lo, row[col]);
        interval.hi = std::max(interval.hi, row[col]);
    }
    return interval;
}

SystemGraph refit_models(const SystemGraph& g, const std::map<std::string, Dataset>& datasets,
                         int degree) {
    SystemGraph fitted = g;
    for (SubsystemNode& node : fitted.nodes) {
        auto it = datasets.find(node.name);
        if (it == datasets.end()) {
            throw Error(ErrorCode::BadArgument, "no dataset for node '" + node.name + "'");
        }
        PolynomialModel refit;
        refit.inputs = node.model.inputs;
        refit.outputs = node.model.outputs;
        refit.max_degree = degree;
        for (const std::string& output : node.model.outputs) {
            FitResult fit = fit_polynomial(it->second, node.model.inputs, output, degree);
            refit.terms.push_back(std::move(fit.model.terms[0]));
        }
        node.model = std::move(refit);
    }
    derive_roles(fitted);
    fitted.finalize();
    return fitted;
}

} // namespace opttopo
