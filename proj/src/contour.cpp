#include "contour.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "excised/errors.hpp"

namespace excised::detail {

namespace {
constexpr double kBend = 0.5;
}

std::vector<cplx> circle_offsets(double rho, int nodes) {
    std::vector<cplx> z(static_cast<std::size_t>(nodes));
    for (int m = 0; m < nodes; ++m) z[m] = std::polar(rho, 2.0 * std::numbers::pi * m / nodes);
    return z;
}

CircleResult circle_residue(const std::vector<cplx>& values, const std::vector<cplx>& offsets) {
    // dr = i z dphi, so (1/2 pi i) \oint g dr = mean of g(center + z) z
    cplx sum = 0.0;
    double size = 0.0;
    for (std::size_t m = 0; m < values.size(); ++m) {
        const cplx t = values[m] * offsets[m];
        sum += t;
        size += std::abs(t);
    }
    const double n = static_cast<double>(values.size());
    return {sum / n, kValueRelError * size / n};
}

CircleResult circle_residue(const Meromorphic& g, double center, double rho, int nodes) {
    const auto z = circle_offsets(rho, nodes);
    std::vector<cplx> v(z.size());
    for (std::size_t m = 0; m < z.size(); ++m) v[m] = g(center + z[m]);
    return circle_residue(v, z);
}

ContourResult parabola_integral(const Meromorphic& g, double c, double d, double tol) {
    if (d == 0.0 || std::isnan(d)) throw DomainError("parabola_integral: growth rate d must be nonzero");
    const double bend = d > 0 ? -kBend : kBend;
    // symmetric contour: the integral is (1/pi) int_0^inf Im(g(r) r'(u)) du
    auto f = [&](double u) {
        const cplx r(c + bend * u * u, u);
        const cplx dr(2.0 * bend * u, 1.0);
        return (g(r) * dr).imag();
    };
    // past u_max the Gaussian factor e^{-a|d|u^2} is below 1e-30
    const double u_max = std::sqrt(70.0 / (kBend * std::abs(d))) + 1.0;
    double err = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, u_max, 12, tol, &err);
    auto size = [&](double u) {
        const cplx r(c + bend * u * u, u);
        return std::abs(g(r) * cplx(2.0 * bend * u, 1.0));
    };
    double ignored = 0.0;
    const double l1 =
        boost::math::quadrature::gauss_kronrod<double, 31>::integrate(size, 0.0, u_max, 10, 1e-3, &ignored);
    return {value / std::numbers::pi, err / std::numbers::pi, kValueRelError * l1 / std::numbers::pi};
}

}  // namespace excised::detail
