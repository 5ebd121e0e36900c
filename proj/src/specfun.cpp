#include "excised/specfun.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "excised/errors.hpp"

namespace excised::specfun {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLogPi = 1.1447298858494001741434273513531;
constexpr double kHalfLog2Pi = 0.91893853320467274178032973640562;
// zeta'(-1)
constexpr double kZetaPrimeMinus1 = -0.16542114370045092921391966024278;

// B_{2k} / (2k (2k-1)), k = 1..8
constexpr std::array<double, 8> kStirling = {1.0 / 12.0,   -1.0 / 360.0,      1.0 / 1260.0, -1.0 / 1680.0,
                                             1.0 / 1188.0, -691.0 / 360360.0, 1.0 / 156.0,  -3617.0 / 122400.0};

// B_{2k+2} / (4k(k+1)), k = 1..6
constexpr std::array<double, 6> kBarnes = {(-1.0 / 30.0) / 8.0, (1.0 / 42.0) / 24.0,       (-1.0 / 30.0) / 48.0,
                                           (5.0 / 66.0) / 80.0, (-691.0 / 2730.0) / 120.0, (7.0 / 6.0) / 168.0};

bool is_nonpositive_integer(cplx z) { return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real()); }

// Stirling series, valid for |z| >= 16 in the right half-plane.
cplx stirling(cplx z) {
    const cplx inv = 1.0 / z;
    const cplx inv2 = inv * inv;
    cplx series = 0.0;
    cplx power = inv;
    for (double c : kStirling) {
        series += c * power;
        power *= inv2;
    }
    return (z - 0.5) * std::log(z) - z + kHalfLog2Pi + series;
}

cplx log_gamma_right(cplx z) {
    cplx shift = 0.0;
    while (std::abs(z) < 16.0) {
        shift += std::log(z);
        z += 1.0;
    }
    return stirling(z) - shift;
}

// Branch of log(pi / sin(pi z)) that equals log Gamma(z) + log Gamma(1-z)
// on the principal branch, for Im z >= 0.
cplx log_reflection_upper(cplx z) {
    const double m = std::round(z.real());
    const double f = z.real() - m;
    const double y = z.imag();
    // 1 - exp(2 pi i (f + i y)) through expm1
    const double a = 2.0 * kPi * f;
    const double e = std::exp(-2.0 * kPi * y);
    const double s = std::sin(0.5 * a);
    const cplx one_minus_w(-std::expm1(-2.0 * kPi * y) + 2.0 * e * s * s, -e * std::sin(a));
    // log sin(pi z) = -log 2 + i pi/2 - i pi z + log(1 - exp(2 pi i z))
    const cplx log_sin = cplx(-std::log(2.0) + kPi * y, 0.5 * kPi - kPi * (m + f)) + std::log(one_minus_w);
    return kLogPi - log_sin;
}

}  // namespace

cplx log_gamma(cplx z) {
    if (is_nonpositive_integer(z)) throw DomainError("log_gamma: pole at z = " + std::to_string(z.real()));
    if (z.real() >= 0.5) return log_gamma_right(z);
    const cplx refl = z.imag() >= 0.0 ? log_reflection_upper(z) : std::conj(log_reflection_upper(std::conj(z)));
    return refl - log_gamma_right(1.0 - z);
}

cplx gamma(cplx z) { return std::exp(log_gamma(z)); }

cplx rgamma(cplx z) {
    if (is_nonpositive_integer(z)) return 0.0;
    return std::exp(-log_gamma(z));
}

double log_barnes_g(double z) {
    if (!(z > 0.0)) throw DomainError("barnes_g: requires z > 0");
    // G(z) = G(z+n) / prod_{k<n} Gamma(z+k); evaluate G(w+1) at w >= 20.
    double down = 0.0;
    while (z - 1.0 < 20.0) {
        down += std::lgamma(z);
        z += 1.0;
    }
    const double w = z - 1.0;
    const double logw = std::log(w);
    double value = w * w * (0.5 * logw - 0.75) + w * kHalfLog2Pi - logw / 12.0 + kZetaPrimeMinus1;
    const double inv2 = 1.0 / (w * w);
    double power = inv2;
    for (double c : kBarnes) {
        value += c * power;
        power *= inv2;
    }
    return value - down;
}

double barnes_g(double z) { return std::exp(log_barnes_g(z)); }

cplx pochhammer(cplx a, int k) {
    cplx p = 1.0;
    for (int i = 0; i < k; ++i) p *= a + static_cast<double>(i);
    return p;
}

cplx generalized_binomial(cplx x, int n) {
    if (n < 0) throw std::invalid_argument("generalized_binomial: n must be nonnegative");
    cplx p = 1.0;
    for (int i = 0; i < n; ++i) p *= (x - static_cast<double>(i)) / static_cast<double>(i + 1);
    return p;
}

cplx generalized_binomial_gamma(cplx x, int n) {
    return std::exp(log_gamma(x + 1.0) - std::lgamma(n + 1.0) - log_gamma(x - static_cast<double>(n) + 1.0));
}

cplx hyp2f1_terminating(double a, cplx b, cplx c, cplx z) {
    if (!(a <= 0.0 && a == std::floor(a)))
        throw std::invalid_argument("hyp2f1_terminating: a must be a nonpositive integer");
    const int m = static_cast<int>(-a);
    cplx term = 1.0;
    cplx sum = 1.0;
    for (int k = 0; k < m; ++k) {
        const cplx ck = c + static_cast<double>(k);
        if (ck == 0.0) throw DomainError("hyp2f1_terminating: (c)_k vanishes before termination");
        term *= (a + k) * (b + static_cast<double>(k)) / (ck * static_cast<double>(k + 1)) * z;
        sum += term;
    }
    return sum;
}

NormalizationData jacobi_normalization(const JacobiOrder& order) {
    const int n = order.n;
    const cplx a = order.alpha;
    const cplx b = order.beta;
    const cplx ab = a + b;
    cplx log_h =
        (ab + 1.0) * std::log(2.0) + log_gamma(a + (n + 1.0)) + log_gamma(b + (n + 1.0)) - std::lgamma(n + 1.0);
    cplx h;
    if (n == 0) {
        // (ab+1) Gamma(ab+1) = Gamma(ab+2), finite at ab = -1
        h = std::exp(log_h - log_gamma(ab + 2.0));
    } else {
        h = std::exp(log_h - log_gamma(ab + (n + 1.0))) / (2.0 * n + ab + 1.0);
    }
    const cplx ell = std::pow(2.0, -n) * generalized_binomial(2.0 * n + ab, n);
    return {h, ell};
}

namespace {

// sum_k (n+a+b+1)_k (a+k+1)_{n-k} / (k! (n-k)!) ((x-1)/2)^k
cplx jacobi_series(int n, cplx a, cplx b, double x) {
    const cplx shift = static_cast<double>(n) + a + b + 1.0;
    std::vector<cplx> tail(static_cast<std::size_t>(n) + 1);
    tail[n] = 1.0;
    for (int k = n; k >= 1; --k) tail[k - 1] = tail[k] * (a + static_cast<double>(k));
    const double y = 0.5 * (x - 1.0);
    cplx head = 1.0;
    double ypow = 1.0;
    double fk = 1.0;                    // k!
    double fnk = std::tgamma(n + 1.0);  // (n-k)!
    cplx sum = 0.0;
    for (int k = 0; k <= n; ++k) {
        sum += head * tail[k] * (ypow / (fk * fnk));
        head *= shift + static_cast<double>(k);
        ypow *= y;
        fk *= k + 1.0;
        if (n - k > 0) fnk /= static_cast<double>(n - k);
    }
    return sum;
}

}  // namespace

cplx jacobi_p(const JacobiOrder& order, double x) {
    const int n = order.n;
    if (n < 0) throw std::invalid_argument("jacobi_p: negative degree");
    // Expand about the nearer endpoint; P_n^(a,b)(x) = (-1)^n P_n^(b,a)(-x).
    if (x >= 0.0) return jacobi_series(n, order.alpha, order.beta, x);
    const double sign = n % 2 == 0 ? 1.0 : -1.0;
    return sign * jacobi_series(n, order.beta, order.alpha, -x);
}

cplx jacobi_p_recurrence(const JacobiOrder& order, double x) {
    const int n = order.n;
    const cplx a = order.alpha;
    const cplx b = order.beta;
    if (n == 0) return 1.0;
    cplx p0 = 1.0;
    cplx p1 = (a + 1.0) + (a + b + 2.0) * (0.5 * (x - 1.0));
    for (int k = 2; k <= n; ++k) {
        const double kk = k;
        const cplx s = 2.0 * kk + a + b;
        const cplx denom = 2.0 * kk * (kk + a + b) * (s - 2.0);
        const cplx c1 = (s - 1.0) * (s * (s - 2.0) * x + a * a - b * b);
        const cplx c0 = -2.0 * (kk + a - 1.0) * (kk + b - 1.0) * s;
        const cplx p2 = (c1 * p1 + c0 * p0) / denom;
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

cplx jacobi_p_deriv(const JacobiOrder& order, double x) {
    if (order.n == 0) return 0.0;
    const JacobiOrder shifted{order.n - 1, order.alpha + 1.0, order.beta + 1.0};
    return 0.5 * (static_cast<double>(order.n) + order.alpha + order.beta + 1.0) * jacobi_p(shifted, x);
}

cplx jacobi_weight_algebraic(cplx alpha, cplx beta, double x) {
    return std::pow(cplx(1.0 - x), alpha) * std::pow(cplx(1.0 + x), beta);
}

cplx jacobi_weight_angular(cplx alpha, cplx beta, double theta) {
    const double c = std::cos(theta);
    return std::pow(cplx(1.0 - c), alpha + 0.5) * std::pow(cplx(1.0 + c), beta + 0.5);
}

}  // namespace excised::specfun
