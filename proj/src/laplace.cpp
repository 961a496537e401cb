#include "fdmix/laplace.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "fdmix/errors.hpp"
#include "fdmix/model.hpp"

namespace fdmix {

namespace {

// t / (1 + t^alpha): the universal fixed-power kernel after v = l t.
double fixed_kernel(double t, double alpha) {
    if (t <= 0.0) return 0.0;
    return t / (1.0 + std::pow(t, alpha));
}

// q / (q + 1) without overflow for large q.
double saturation(double q) { return q > 1.0 ? 1.0 / (1.0 + 1.0 / q) : q / (1.0 + q); }

// Typical interferer-to-victim length of a power-controlled field.
double controlled_length(double c, double alpha, double eps_alpha, const DistanceLaw& law) {
    return std::pow(c * std::pow(law.median(), eps_alpha), 1.0 / alpha);
}

}  // namespace

double DistanceLaw::pdf(double z) const { return nearest_distance_pdf(z, density, nu); }

double DistanceLaw::cdf(double z) const { return nearest_distance_cdf(z, density, nu); }

double DistanceLaw::survival(double z) const {
    return z <= 0.0 ? 1.0 : std::exp(-kPi * nu * density * z * z);
}

double DistanceLaw::median() const { return std::sqrt(std::log(2.0) / (kPi * nu * density)); }

double DistanceLaw::truncation(const QuadratureSpec& spec) const {
    return truncation_radius(density, nu, spec);
}

double fixed_kernel_tail(double t0, double alpha, const QuadratureSpec& spec) {
    if (!(alpha > 2.0)) throw InvalidParameter("path-loss exponent must exceed 2");
    const double kernel_total = (kPi / alpha) / std::sin(2.0 * kPi / alpha);
    if (t0 <= 0.0) return kernel_total;
    if (t0 <= 1.0) {
        const double head = integrate([alpha](double t) { return fixed_kernel(t, alpha); }, 0.0,
                                      t0, spec, "interferer field head");
        return kernel_total - head;
    }
    // With w = t^alpha and p = 1 / (1 + w) the tail is a regularised incomplete
    // beta integral; p = r^(1 / (1 - a)) removes the p^-a endpoint singularity.
    const double a = 2.0 / alpha;
    const double p0 = 1.0 / (1.0 + std::pow(t0, alpha));
    const double r0 = std::pow(p0, 1.0 - a);
    const double value = integrate(
        [a](double r) { return std::pow(1.0 - std::pow(r, 1.0 / (1.0 - a)), a - 1.0); }, 0.0, r0,
        spec, "interferer field tail");
    return value / (alpha * (1.0 - a));
}

double fixed_power_exponent(double a, double alpha, double density, double lower,
                            const QuadratureSpec& spec) {
    if (a <= 0.0 || density <= 0.0) return 0.0;
    const double length = std::pow(a, 1.0 / alpha);
    return 2.0 * kPi * density * length * length * fixed_kernel_tail(lower / length, alpha, spec);
}

double conditioned_fixed_power_exponent(double a, double alpha, double density,
                                        const DistanceLaw& serving,
                                        const QuadratureSpec& spec) {
    if (a <= 0.0 || density <= 0.0) return 0.0;
    const double length = std::pow(a, 1.0 / alpha);
    // Beyond t_max the serving CDF equals 1 up to the tail cutoff. Breaking at
    // the kernel's knee and at the CDF's median keeps each piece smooth.
    const double t_max = serving.truncation(spec) / length;
    std::vector<double> cuts = {0.0};
    for (double b : {1.0, serving.median() / length})
        if (b < t_max) cuts.push_back(b);
    std::sort(cuts.begin() + 1, cuts.end());
    cuts.push_back(t_max);
    double head = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        head += integrate(
            [&](double t) { return fixed_kernel(t, alpha) * serving.cdf(length * t); }, cuts[i],
            cuts[i + 1], spec, "conditioned interferer field over v");
    return 2.0 * kPi * density * length * length * (head + fixed_kernel_tail(t_max, alpha, spec));
}

double power_controlled_exponent(double c, double alpha, double eps_alpha, double density,
                                 double lower, const DistanceLaw& z_law,
                                 const QuadratureSpec& spec) {
    if (c <= 0.0 || density <= 0.0) return 0.0;
    const QuadratureSpec inner = spec.inner();
    const double z_max = z_law.truncation(spec);
    auto expected_saturation = [&](double v) {
        const double scale = c * std::pow(v, -alpha);
        return integrate(
            [&](double z) { return saturation(scale * std::pow(z, eps_alpha)) * z_law.pdf(z); },
            0.0, z_max, inner, "power-controlled interferer over Z");
    };
    const double length = controlled_length(c, alpha, eps_alpha, z_law);
    const double value = integrate([&](double v) { return v * expected_saturation(v); }, lower,
                                   INFINITY, spec, "power-controlled interferer field over v",
                                   std::max(length, lower));
    return 2.0 * kPi * density * value;
}

double conditioned_power_controlled_exponent(double c, double alpha, double eps,
                                             double density, const DistanceLaw& z_law,
                                             const QuadratureSpec& spec) {
    if (c <= 0.0 || density <= 0.0) return 0.0;
    const QuadratureSpec inner = spec.inner();
    const double eps_alpha = eps * alpha;
    const double z_max = z_law.truncation(spec);
    auto inner_value = [&](double v) {
        const double scale = c * std::pow(v, -alpha);
        return integrate(
            [&](double z) { return saturation(scale * std::pow(z, eps_alpha)) * z_law.pdf(z); },
            0.0, std::min(v, z_max), inner, "conditioned uplink interferer over Z");
    };
    const double length = std::max(controlled_length(c, alpha, eps_alpha, z_law), z_law.median());
    const double value = integrate([&](double v) { return v * inner_value(v); }, 0.0, INFINITY,
                                   spec, "conditioned uplink interferer field over v", length);
    return 2.0 * kPi * density * value;
}

double conditioned_power_controlled_exponent_by_parts(double c, double alpha, double eps,
                                                      double density, const DistanceLaw& z_law,
                                                      const QuadratureSpec& spec) {
    if (c <= 0.0 || density <= 0.0) return 0.0;
    const QuadratureSpec inner = spec.inner();
    const double eps_alpha = eps * alpha;
    // phi(z, v) = q / (q + 1); boundary term phi(v, v) F(v) minus int phi_z F dz.
    // Since phi(0, v) = 0 the same bracket is int phi_z S dz - phi(v, v) S(v)
    // with S = 1 - F; past the median that form avoids cancelling two terms
    // that each decay too slowly to integrate. q is carried as a logarithm.
    const double log_c = std::log(c);
    const double median = z_law.median();
    QuadratureSpec relative = inner;
    relative.abs_tol = 0.0;
    auto bracket = [&](double v) {
        if (v <= 0.0) return 0.0;
        const double log_scale = log_c - alpha * std::log(v);
        const double phi_vv = saturation(std::exp(log_scale + eps_alpha * std::log(v)));
        if (eps_alpha == 0.0) return phi_vv * z_law.cdf(v);
        const bool upper = v > median;
        const double correction = integrate(
            [&](double z) {
                if (z <= 0.0) return 0.0;
                const double h = std::cosh(0.5 * (log_scale + eps_alpha * std::log(z)));
                return eps_alpha / (4.0 * z * h * h) * (upper ? z_law.survival(z) : z_law.cdf(z));
            },
            0.0, v, relative, "by-parts correction over z");
        return upper ? correction - phi_vv * z_law.survival(v) : phi_vv * z_law.cdf(v) - correction;
    };
    const double length = std::max(controlled_length(c, alpha, eps_alpha, z_law), median);
    auto field = [&](double v) { return v * bracket(v); };
    const double value =
        integrate(field, 0.0, median, spec, "by-parts uplink interferer field over v") +
        integrate(field, median, INFINITY, spec, "by-parts uplink interferer field over v", length);
    return 2.0 * kPi * density * value;
}

}  // namespace fdmix
