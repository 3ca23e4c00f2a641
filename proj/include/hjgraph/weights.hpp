#pragma once

#include "hjgraph/lattice.hpp"

#include <string>

namespace hjgraph {

/// Boundary-vanishing weight w on the simplex.
struct WeightSpec {
    enum class Kind { Polynomial, Exponential, Mollifier };

    Kind kind = Kind::Polynomial;
    double alpha = 1.0;   // Polynomial exponent, >= 1
    double lambda = 1.0;  // Exponential rate, > 0

    static WeightSpec polynomial(double alpha = 1.0);
    static WeightSpec exponential(double lambda = 1.0);
    static WeightSpec mollifier();

    /// Throws std::invalid_argument when alpha < 1 or lambda <= 0.
    void validate() const;
};

std::string to_string(WeightSpec::Kind kind);
WeightSpec::Kind weight_kind_from_string(const std::string& name);

/// Polynomial: prod xi_i^alpha. Exponential: exp(-lambda / prod xi_i).
/// Mollifier: prod exp(-1/xi_i). Exactly 0 whenever some xi_i = 0.
double weight_eval(const WeightSpec& spec, const SimplexPoint& xi);

/// weight_eval at every site; boundary sites hold a literal 0.
Field weight_field(const WeightSpec& spec, std::shared_ptr<const Lattice> lattice);

}  // namespace hjgraph
