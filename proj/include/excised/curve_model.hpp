#pragma once

// Calibration of the excised model to a family of quadratic twists of an
// elliptic curve: matrix sizes, cutoff constants, the arithmetic factor
// a_s(E) and point counts over F_p.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace excised::curve {

/// y^2 + c1 xy + c3 y = x^3 + c2 x^2 + c4 x + c6
struct Weierstrass {
    std::array<std::int64_t, 5> c{};  // c1, c2, c3, c4, c6

    std::int64_t c1() const { return c[0]; }
    std::int64_t c2() const { return c[1]; }
    std::int64_t c3() const { return c[2]; }
    std::int64_t c4() const { return c[3]; }
    std::int64_t c6() const { return c[4]; }
};

struct CurveFamilyParams {
    std::int64_t conductor_m = 0;
    Weierstrass weierstrass;
    double kappa_e = 0.0;
    double a_minus_half = 0.0;
    double r1 = 0.0;
    std::optional<double> r2;
    double delta = 0.0;
    int sign_omega = 1;
    std::optional<double> x_bound;

    /// Throws DomainError on a composite conductor, nonpositive constants
    /// or omega not +-1.
    void validate() const;
};

/// Flat `key = value` lines, `#` starts a comment. Keys: conductor,
/// c1 c2 c3 c4 c6, kappa_E, a_minus_half, r1, r2, delta, omega, X_bound.
/// Throws std::runtime_error on unknown keys, bad values or missing
/// required keys; the result is validated.
CurveFamilyParams parse_config(std::istream& in);
CurveFamilyParams load_config(const std::string& path);

/// log(sqrt(M) X / 2 pi)
double n_std(double conductor, double x_bound);
/// N_std / (2 r1)
double n_eff(double n_std_value, double r1);

/// delta kappa_E / a_{-1/2}^2
double cutoff_std(const CurveFamilyParams& params);
/// cutoff_std (2 r1)^{-3/4}
double cutoff_eff(const CurveFamilyParams& params);

struct CutoffReport {
    double x_bound = 0.0;
    double n_std = 0.0;
    double n_eff = 0.0;
    int matrix_size_std = 0;  // round(N_std), the simulated SO(2N) size
    double c_std = 0.0;
    double c_eff = 0.0;
    double abs_cutoff_std = 0.0;  // c_std e^{-matrix_size_std / 2}
    double abs_cutoff_eff = 0.0;  // c_eff e^{-matrix_size_std / 2}
    double log_cutoff_std = 0.0;
    double log_cutoff_eff = 0.0;
    double delta_kappa = 0.0;
    double c_std_probability = 0.0;  // a_{-1/2}^2 delta kappa_E, matching probabilities
    double c_eff_probability = 0.0;

    std::string to_json() const;
};

CutoffReport cutoff_report(const CurveFamilyParams& params, double x_bound);

/// (8/3) 2^{-7/8} G(1/2) pi^{-1/4}
double vanishing_constant_factor();
/// Inverts vanishing_constant(delta) = factor * sqrt(delta).
double delta_from_vanishing_constant(double observed);
double vanishing_constant(double delta);

/// Expected number of vanishing central values with prime |d| <= X.
double expected_vanishing_count(double x_bound, const CurveFamilyParams& params);

bool is_prime(std::int64_t n);
std::vector<std::int64_t> primes_up_to(std::int64_t n);

/// a_p = p + 1 - #E(F_p), by enumeration. Throws DomainError if p is not
/// prime.
std::int64_t count_points_fp(const Weierstrass& w, std::int64_t p);

struct PointCount {
    std::int64_t p = 0;
    std::int64_t a_p = 0;
    double lambda_p = 0.0;  // a_p / sqrt(p)
};

/// a_p for every prime p <= p_max, in increasing p.
std::vector<PointCount> point_counts(const Weierstrass& w, std::int64_t p_max, int workers = 1);

/// (1 - lambda z + psi z^2)^{-1}. Throws DomainError if the denominator
/// vanishes.
double local_factor(double lambda_p, int psi_p, double z);

struct EulerProduct {
    double value = 0.0;
    double decade_value = 0.0;    // truncated at p_max / 10
    double last_increment = 0.0;  // |value - decade_value|
    std::int64_t primes = 0;
};

/// a_s(E) over primes p <= p_max, one combined factor per prime. The factor
/// at p = M uses L_M(+omega/sqrt M)^s and is applied even if M > p_max.
EulerProduct a_s_truncated(const Weierstrass& w, std::int64_t conductor, int omega, double s, std::int64_t p_max,
                           int workers = 1);

}  // namespace excised::curve
