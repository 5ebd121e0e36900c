#pragma once

// Special functions used by the analytic formulas: complex log-Gamma,
// Barnes G, terminating Gauss hypergeometric sums and Jacobi polynomials
// with complex order parameters.

#include <complex>

namespace excised::specfun {

using cplx = std::complex<double>;

/// Principal branch of log Gamma(z). Throws DomainError at the poles
/// z = 0, -1, -2, ...
cplx log_gamma(cplx z);

/// Gamma(z) as exp(log_gamma(z)).
cplx gamma(cplx z);

/// 1/Gamma(z); entire, returns exactly 0 at nonpositive integers.
cplx rgamma(cplx z);

/// Barnes G-function for real z > 0.
double barnes_g(double z);
double log_barnes_g(double z);

/// Rising factorial (a)_k = a(a+1)...(a+k-1) as a direct product.
cplx pochhammer(cplx a, int k);

/// Binomial coefficient x over n for complex x, product form
/// x(x-1)...(x-n+1)/n!. Entire in x.
cplx generalized_binomial(cplx x, int n);

/// Same quantity through Gamma(x+1)/(Gamma(n+1) Gamma(x-n+1)); singular
/// where x - n + 1 is a nonpositive integer.
cplx generalized_binomial_gamma(cplx x, int n);

/// Finite sum of 2F1(a, b; c; z) for a = -m, m a nonnegative integer.
/// Throws std::invalid_argument when a is not a nonpositive integer, and
/// DomainError when (c)_k vanishes before the series terminates.
cplx hyp2f1_terminating(double a, cplx b, cplx c, cplx z);

/// Degree and (possibly complex) order parameters of P_n^(alpha,beta).
struct JacobiOrder {
    int n = 0;
    cplx alpha{0.0, 0.0};
    cplx beta{0.0, 0.0};
};

/// Orthogonality norm h_n and leading coefficient l_n of P_n^(alpha,beta).
struct NormalizationData {
    cplx h_n;
    cplx ell_n;
};

NormalizationData jacobi_normalization(const JacobiOrder& order);

/// P_n^(alpha,beta)(x) from the terminating hypergeometric representation
///   binom(n+alpha, n) 2F1(-n, n+alpha+beta+1; alpha+1; (1-x)/2)
/// with the binomial folded into each term, so the sum stays regular when
/// alpha+1 is a nonpositive integer. For x < 0 the series is taken about
/// x = -1 through P_n^(alpha,beta)(x) = (-1)^n P_n^(beta,alpha)(-x).
cplx jacobi_p(const JacobiOrder& order, double x);

/// Same polynomial from the three-term recurrence in n. Kept as an
/// independent check on jacobi_p.
cplx jacobi_p_recurrence(const JacobiOrder& order, double x);

/// d/dx P_n^(alpha,beta)(x) = (n+alpha+beta+1)/2 P_{n-1}^(alpha+1,beta+1)(x),
/// i.e. the shifted 2F1 identity d/dz F(a,b;c;z) = ab/c F(a+1,b+1;c+1;z).
cplx jacobi_p_deriv(const JacobiOrder& order, double x);

// The two weight conventions in use. The algebraic one, (1-x)^alpha
// (1+x)^beta on [-1,1], is the Jacobi orthogonality weight. The angular one
// absorbs the Jacobian of x = cos(theta):
// (1-cos theta)^(alpha+1/2) (1+cos theta)^(beta+1/2) on [0, pi].
cplx jacobi_weight_algebraic(cplx alpha, cplx beta, double x);
cplx jacobi_weight_angular(cplx alpha, cplx beta, double theta);

}  // namespace excised::specfun
