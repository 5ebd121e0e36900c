#pragma once

// Closed forms and residue series for SO(2N) and the excised ensemble T_X:
// Selberg integral, normalization constants, moments of Lambda_A(1,N), the
// Jacobi-ensemble kernel and the excised one-level density.
//
// One-level densities are unscaled: functions of theta in [0, pi] that
// integrate to N.

#include <complex>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace excised::analytic {

using cplx = std::complex<double>;

// ---- SO(2N) -----------------------------------------------------------

/// (2N-1)/(2 pi) + sin((2N-1) theta) / (2 pi sin theta), continuous at 0 and pi.
double r1_so2n_unscaled(int n, double theta);

/// Density in y = N theta / pi, expanded in 1/N up to `order` (0, 1 or 2).
double r1_so2n_scaled_expansion(int n, double y, int order);

/// Selberg's integral over [0, pi]^N of prod (cos phi_j - cos phi_k)^2 with
/// weights (1 - cos phi)^r (1 + cos phi)^s. Requires Re r, Re s > -1/2.
cplx selberg_integral(int n, cplx r, cplx s);

/// Normalization of the SO(2N) eigenphase density, 1 / selberg_integral(N, 0, 0).
double c_so2n(int n);

/// M_O(N, s) = E[Lambda_A(1,N)^s] over Haar SO(2N); requires Re s > -1/2.
cplx moments_so2n(int n, cplx s);

/// Meromorphic continuation of M_O(N, s); throws DomainError only at the
/// poles s = -1/2, -3/2, ...
cplx moments_so2n_continued(int n, cplx s);

/// Residue of M_O(N, s) at s = -1/2, and its large-N form
/// 2^{-7/8} G(1/2) pi^{-1/4} N^{3/8}.
double h_exact(int n);
double h_asymptotic(int n);

/// P_O(N, x) ~ x^{-1/2} h(N) and its integral 2 sqrt(x) h(N), for small x > 0.
double value_density_small_x(int n, double x);
double value_cdf_small_x(int n, double x);

// ---- Jacobi kernel ------------------------------------------------------

/// P(N, r, theta) = P_N' P_{N-1} - P_N P_{N-1}' at cos theta, with Jacobi
/// parameters (r - 1/2, -1/2).
cplx pnr_theta(int n, cplx r, double theta);

/// Diagonal of the Christoffel-Darboux kernel f_N^{(r-1/2,-1/2)}(theta, theta).
/// Throws DomainError for theta outside (0, pi).
cplx cd_kernel_diag(int n, cplx r, double theta);

/// Off-diagonal kernel f_N(theta, phi) from the Christoffel-Darboux sum;
/// falls back to the diagonal formula when theta == phi. Real r > -1/2.
double cd_kernel(int n, double r, double theta, double phi);

struct NLevelDensity {
    double value = 0.0;
    bool repeated_points = false;
};

/// det[f_N(theta_j, theta_k)], the n-level density of the Jacobi ensemble
/// with parameters (r - 1/2, -1/2). Repeated points give 0 and set the flag.
NLevelDensity n_level_density(int n, double r, const std::vector<double>& thetas);

// ---- excised ensemble ---------------------------------------------------

/// d(theta, X) = (2N-1) log 2 + log(1 - cos theta) - X.
double gap_exponent(int n, double log_cutoff, double theta);

/// Edge of the hard gap, arccos(1 - 2^{-(2N-1)} e^X).
double theta_inf(int n, double log_cutoff);

/// Integrand of the contour representation of R_1^{T_X}:
/// e^{-rX}/r 2^{N^2+2Nr-N} prod_j Gamma(2+j)Gamma(1/2+j)Gamma(r+1/2+j)/Gamma(r+N+j)
/// times f_N(theta, theta; r). Throws DomainError at the poles r = 0, -1/2, -3/2, ...
cplx excised_integrand(int n, double log_cutoff, double theta, cplx r);

/// Residue of excised_integrand at r = 0 (independent of X) and at r = -1/2.
double residue_at_zero(int n, double theta);
double residue_at_minus_half(int n, double log_cutoff, double theta);

struct SeriesOptions {
    double tolerance = 1e-10;
    // Integrate the remainder along Re r = -K - 0.9 when the next residue
    // is above tolerance. Without it the result carries only the warning.
    bool add_remainder = true;
};

/// Poles 0, -1/2, -3/2, ..., -(2K+1)/2 with their residues. coefficients[k]
/// is residues[k] e^{-(k+1/2)X} for the half-integer poles (so the term is
/// coefficient e^{(k+1/2)X}) and the plain residue at 0.
struct ResidueSeries {
    std::vector<double> poles;
    std::vector<cplx> residues;
    std::vector<cplx> coefficients;
    int truncation_k = 0;
    bool leading_term_included = true;
    double tail_estimate = 0.0;  // size of the next residue, in output units
    // Estimated floating-point error of the sum, in output units. Residues
    // of the high-order poles grow and alternate in sign as N increases,
    // so the sum can cancel far below the size of its terms.
    double rounding_estimate = 0.0;
    bool warning = false;          // tail_estimate above tolerance
    bool ill_conditioned = false;  // rounding_estimate above tolerance
    bool remainder_used = false;
    double remainder = 0.0;  // remainder contour integral, raw units

    cplx residue_sum() const;
    /// True when the value meets the tolerance: the truncation tail is
    /// either small or replaced by the remainder, and rounding is small.
    bool reliable() const { return (!warning || remainder_used) && !ill_conditioned; }
    std::string to_json() const;
};

struct NormalizationRatio {
    double value = 1.0;  // C_SO(2N) / C_X, the Haar probability that log Lambda >= X
    ResidueSeries series;
};

NormalizationRatio normalization_ratio_series(int n, double log_cutoff, int k_max = 10,
                                              const SeriesOptions& options = {});
double normalization_ratio(int n, double log_cutoff, int k_max = 10);

/// Same probability through the parabola-deformed line integral.
double normalization_ratio_line_integral(int n, double log_cutoff);

struct DensityValue {
    double value = 0.0;
    ResidueSeries series;  // empty inside the gap
};

/// R_1^{T_X}(theta) by residues. The theta-independent part of the
/// integrand is tabulated on the residue circles once per instance, so
/// repeated evaluation is cheap. Thread-safe after construction.
class ExcisedDensity {
public:
    ExcisedDensity(int n, double log_cutoff, int k_max = 10, SeriesOptions options = {});

    int n_pairs() const { return n_; }
    double log_cutoff() const { return x_; }
    double gap_edge() const { return theta_inf_; }
    double ratio() const { return ratio_.value; }
    const NormalizationRatio& normalization() const { return ratio_; }

    DensityValue evaluate(double theta) const;
    double operator()(double theta) const { return evaluate(theta).value; }
    /// Same density by quadrature along a contour through Re r = c (default
    /// min(1/2, 1/|d|)), sharing this instance's normalization.
    double evaluate_line(double theta, std::optional<double> c = std::nullopt) const;

private:
    int n_;
    double x_;
    int k_max_;
    SeriesOptions options_;
    double theta_inf_;
    NormalizationRatio ratio_;
    double c_x_;
    std::vector<cplx> offsets_;
    // log of the theta-independent factor at pole_k + offsets_[m], k = 1..K+1
    std::vector<std::vector<cplx>> log_prefactor_;
};

double r1_excised(int n, double log_cutoff, double theta, int k_max = 10);

/// Direct quadrature of the contour integral through Re r = c > 0, default
/// min(1/2, 1/|d|). Throws DomainError when d(theta, X) = 0, where the
/// integral does not converge.
double r1_excised_line_integral(int n, double log_cutoff, double theta, std::optional<double> c = std::nullopt);

struct DensityGrid {
    std::vector<double> thetas;
    std::vector<double> values;
    int n_pairs = 0;
    double log_cutoff = 0.0;
    bool warning = false;  // some residue point is not reliable() and was kept
    int line_points = 0;   // points evaluated by the line integral

    void write_csv(std::ostream& out) const;
};

/// residue: series only. line: quadrature only. automatic: series, with the
/// line integral wherever the series is not reliable().
enum class DensityMethod { residue, line, automatic };

DensityMethod parse_density_method(const std::string& name);

DensityGrid density_grid(const ExcisedDensity& density, const std::vector<double>& thetas, int workers = 1,
                         DensityMethod method = DensityMethod::automatic);

/// `points` evenly spaced values from 0 to pi inclusive.
std::vector<double> theta_grid(int points);

}  // namespace excised::analytic
