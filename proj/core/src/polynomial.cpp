#include "opttopo/polynomial.hpp"

#include <cmath>
#include <numeric>

namespace opttopo {

void PolynomialModel::validate() const {
    if (outputs.empty()) {
        throw Error(ErrorCode::BadModel, "model has no outputs");
    }
    if (terms.size() != outputs.size()) {
        throw Error(ErrorCode::BadModel, "term list count does not match output count");
    }
    for (std::size_t out = 0; out < outputs.size(); ++out) {
        for (const PolynomialTerm& term : terms[out]) {
            if (term.exponents.size() != inputs.size()) {
                throw Error(ErrorCode::BadModel,
                            "term of '" + outputs[out] + "' has " +
                                std::to_string(term.exponents.size()) + " exponents, expected " +
                                std::to_string(inputs.size()));
            }
            int total = 0;
            for (int e : term.exponents) {
                if (e < 0) {
                    throw Error(ErrorCode::BadModel, "negative exponent in '" + outputs[out] + "'");
                }
                total += e;
            }
            if (total > max_degree) {
                throw Error(ErrorCode::BadModel,
                            "term of '" + outputs[out] + "' exceeds max degree " +
                                std::to_string(max_degree));
            }
        }
    }
}

double eval_output_raw(const PolynomialModel& model, std::size_t output_index,
                       std::span<const double> input_values) {
    double sum = 0.0;
    for (const PolynomialTerm& term : model.terms[output_index]) {
        double product = term.coefficient;
        for (std::size_t i = 0; i < term.exponents.size(); ++i) {
            int e = term.exponents[i];
            const double x = input_values[i];
            while (e-- > 0) {
                product *= x;
            }
        }
        sum += product;
    }
    return sum;
}

std::map<std::string, double> eval_model(const PolynomialModel& model,
                                         const DimensionRegistry& dims,
                                         const std::map<std::string, double>& point,
                                         EvalCounter& counter) {
    std::vector<double> values;
    values.reserve(model.inputs.size());
    for (const std::string& input : model.inputs) {
        auto it = point.find(input);
        if (it == point.end()) {
            throw Error(ErrorCode::MissingInput, "point lacks '" + input + "'");
        }
        const Dimension& dim = dims.get(input);
        if (!dim.interval.contains(it->second)) {
            throw Error(ErrorCode::OutOfBounds,
                        "'" + input + "' = " + std::to_string(it->second) + " outside [" +
                            std::to_string(dim.interval.lo) + ", " +
                            std::to_string(dim.interval.hi) + "]");
        }
        values.push_back(it->second);
    }
    counter.increment();
    std::map<std::string, double> out;
    for (std::size_t i = 0; i < model.outputs.size(); ++i) {
        out[model.outputs[i]] = eval_output_raw(model, i, values);
    }
    return out;
}

double efficiency(double benefit, double effort) {
    if (!(effort > 0.0)) {
        throw Error(ErrorCode::ZeroEffort,
                    "effort " + std::to_string(effort) + " is not positive");
    }
    return benefit / effort;
}

} // namespace opttopo
