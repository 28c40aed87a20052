#ifndef OPTTOPO_POLYNOMIAL_HPP
#define OPTTOPO_POLYNOMIAL_HPP

#include <map>
#include <span>
#include <string>
#include <vector>

#include "opttopo/dimension.hpp"
#include "opttopo/eval_counter.hpp"

namespace opttopo {

/// One monomial: coefficient times the product of each input raised to its
/// exponent. The exponent vector always has one entry per model input.
struct PolynomialTerm {
    double coefficient = 0.0;
    std::vector<int> exponents;

    bool operator==(const PolynomialTerm&) const = default;
};

/// Quasi-static subsystem model: a polynomial map from parameter inputs to
/// effort/benefit/internal outputs. Terms are stored explicitly and summed
/// directly, so evaluation counts are reproducible.
struct PolynomialModel {
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::vector<std::vector<PolynomialTerm>> terms; // one term list per output
    int max_degree = 0;

    void validate() const; // throws BadModel on structural violations

    bool operator==(const PolynomialModel&) const = default;
};

/// Evaluates the model at a named point, checking the point against the
/// registered dimension intervals. Increments `counter` by one.
/// Throws MissingInput / OutOfBounds for invalid configurations.
std::map<std::string, double> eval_model(const PolynomialModel& model,
                                         const DimensionRegistry& dims,
                                         const std::map<std::string, double>& point,
                                         EvalCounter& counter);

/// Raw evaluation of a single output on an input vector ordered like
/// model.inputs. No bounds checks and no counting; enumeration loops do
/// their own.
double eval_output_raw(const PolynomialModel& model, std::size_t output_index,
                       std::span<const double> input_values);

/// Energy efficiency benefit/effort. Throws ZeroEffort when effort <= 0.
double efficiency(double benefit, double effort);

} // namespace opttopo

#endif
