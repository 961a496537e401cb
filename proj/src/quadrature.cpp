#include "fdmix/quadrature.hpp"

#include "fdmix/model.hpp"

namespace fdmix {

void validate(const QuadratureSpec& spec) {
    if (!(spec.rel_tol > 0.0) || !(spec.abs_tol > 0.0))
        throw InvalidParameter("quadrature tolerances must be positive");
    if (spec.max_subdivisions < 1) throw InvalidParameter("max_subdivisions must be at least 1");
    if (!(spec.tail_mass_cutoff > 0.0 && spec.tail_mass_cutoff <= 1e-6))
        throw InvalidParameter("tail_mass_cutoff must lie in (0, 1e-6]");
}

double truncation_radius(double density, double nu, const QuadratureSpec& spec) {
    return std::sqrt(std::log(1.0 / spec.tail_mass_cutoff) / (kPi * nu * density));
}

}  // namespace fdmix
