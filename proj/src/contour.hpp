#pragma once

// Contour quadrature shared by the residue series and the line-integral
// route. Both assume g(conj r) = conj g(r) and that g has poles only on
// the real axis.

#include <complex>
#include <functional>
#include <vector>

namespace excised::detail {

using cplx = std::complex<double>;
using Meromorphic = std::function<cplx(cplx)>;

inline constexpr double kCircleRadius = 0.1;
inline constexpr int kCircleNodes = 128;

/// Offsets rho e^{2 pi i m / n}, m = 0..n-1.
std::vector<cplx> circle_offsets(double rho = kCircleRadius, int nodes = kCircleNodes);

// Relative accuracy assumed for a single integrand value when estimating
// the rounding error of a quadrature sum.
inline constexpr double kValueRelError = 1e-14;

struct ContourResult {
    double value = 0.0;
    double error = 0.0;     // quadrature error estimate
    double rounding = 0.0;  // kValueRelError times the integral of |g dr| / 2 pi
};

struct CircleResult {
    cplx value;
    double rounding = 0.0;
};

/// (1/2 pi i) of the integral of g around |r - center| = rho by the
/// trapezoid rule, given g at center + offsets.
CircleResult circle_residue(const std::vector<cplx>& values, const std::vector<cplx>& offsets);

CircleResult circle_residue(const Meromorphic& g, double center, double rho = kCircleRadius, int nodes = kCircleNodes);

/// (1/2 pi i) times the integral of g over the upward line Re r = c,
/// where |g| ~ e^{r d} at large |r|. The line is bent into the parabola
/// r(u) = c + iu - sign(d) a u^2, which sweeps no poles off the real axis
/// and turns the algebraic tail into a Gaussian one.
ContourResult parabola_integral(const Meromorphic& g, double c, double d, double tol = 1e-13);

}  // namespace excised::detail
