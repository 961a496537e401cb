#pragma once

// Exponents of interference Laplace transforms for Poisson interferer fields
// with Rayleigh fading. Every function returns E >= 0 such that the Laplace
// factor is exp(-E). Received powers are expressed relative to the fading
// rate, i.e. `a` below is s * P * K / mu.

#include "fdmix/quadrature.hpp"

namespace fdmix {

/// Serving-distance law 1 - exp(-pi nu lambda z^2) of an interferer's own link.
struct DistanceLaw {
    double density = 1e-3;
    double nu = 1.0;

    double pdf(double z) const;
    double cdf(double z) const;
    double survival(double z) const;
    double median() const;
    double truncation(const QuadratureSpec& spec) const;
};

/// int_t0^inf t / (1 + t^alpha) dt, for alpha > 2.
double fixed_kernel_tail(double t0, double alpha, const QuadratureSpec& spec);

/// 2 pi lambda int_lower^inf (a v^-alpha) / (a v^-alpha + 1) v dv.
double fixed_power_exponent(double a, double alpha, double density, double lower,
                            const QuadratureSpec& spec);

/// 2 pi lambda int_0^inf (a v^-alpha) / (a v^-alpha + 1) P(Z <= v) v dv:
/// only interferers closer to their own BS than to the victim contribute.
double conditioned_fixed_power_exponent(double a, double alpha, double density,
                                        const DistanceLaw& serving,
                                        const QuadratureSpec& spec);

/// Interferers with fractional power control, transmit power ~ Z^(eps_alpha):
/// 2 pi lambda int_lower^inf E_Z[q / (q + 1)] v dv, q = c Z^eps_alpha v^-alpha.
double power_controlled_exponent(double c, double alpha, double eps_alpha, double density,
                                 double lower, const DistanceLaw& z_law,
                                 const QuadratureSpec& spec);

/// Uplink UE interferers with fractional power control, conditioned on Z < v:
/// 2 pi lambda int_0^inf v int_0^v q / (q + 1) f_Z(z) dz dv,
/// q = c z^(eps alpha) v^-alpha.
double conditioned_power_controlled_exponent(double c, double alpha, double eps,
                                             double density, const DistanceLaw& z_law,
                                             const QuadratureSpec& spec);

/// Same quantity after integrating by parts in z, so the inner integral runs
/// over the CDF instead of the density. Reduces to a single integral at eps = 0.
double conditioned_power_controlled_exponent_by_parts(double c, double alpha, double eps,
                                                      double density, const DistanceLaw& z_law,
                                                      const QuadratureSpec& spec);

}  // namespace fdmix
