#include "hjgraph/weights.hpp"

#include <cmath>
#include <stdexcept>

namespace hjgraph {

WeightSpec WeightSpec::polynomial(double alpha) {
    WeightSpec w{Kind::Polynomial, alpha, 1.0};
    w.validate();
    return w;
}

WeightSpec WeightSpec::exponential(double lambda) {
    WeightSpec w{Kind::Exponential, 1.0, lambda};
    w.validate();
    return w;
}

WeightSpec WeightSpec::mollifier() { return WeightSpec{Kind::Mollifier, 1.0, 1.0}; }

void WeightSpec::validate() const {
    if (!(alpha >= 1.0)) throw std::invalid_argument("weight alpha must be >= 1");
    if (!(lambda > 0.0)) throw std::invalid_argument("weight lambda must be > 0");
}

std::string to_string(WeightSpec::Kind kind) {
    switch (kind) {
        case WeightSpec::Kind::Polynomial: return "polynomial";
        case WeightSpec::Kind::Exponential: return "exponential";
        case WeightSpec::Kind::Mollifier: return "mollifier";
    }
    return "unknown";
}

WeightSpec::Kind weight_kind_from_string(const std::string& name) {
    if (name == "polynomial") return WeightSpec::Kind::Polynomial;
    if (name == "exponential") return WeightSpec::Kind::Exponential;
    if (name == "mollifier") return WeightSpec::Kind::Mollifier;
    throw std::invalid_argument("unknown weight kind '" + name + "'");
}

double weight_eval(const WeightSpec& spec, const SimplexPoint& xi) {
    if (xi.on_boundary()) return 0.0;
    switch (spec.kind) {
        case WeightSpec::Kind::Polynomial: {
            double w = 1.0;
            for (double v : xi.values()) w *= std::pow(v, spec.alpha);
            return w;
        }
        case WeightSpec::Kind::Exponential: {
            double prod = 1.0;
            for (double v : xi.values()) prod *= v;
            return std::exp(-spec.lambda / prod);
        }
        case WeightSpec::Kind::Mollifier: {
            double w = 1.0;
            for (double v : xi.values()) w *= std::exp(-1.0 / v);
            return w;
        }
    }
    return 0.0;
}

Field weight_field(const WeightSpec& spec, std::shared_ptr<const Lattice> lattice) {
    Field w(lattice);
    for (std::size_t s = 0; s < lattice->size(); ++s) {
        w[s] = lattice->on_boundary(s) ? 0.0 : weight_eval(spec, lattice->xi(s));
    }
    return w;
}

}  // namespace hjgraph
