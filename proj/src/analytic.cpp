#include "excised/analytic.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <numbers>
#include <ostream>
#include <thread>

#include "contour.hpp"
#include "excised/errors.hpp"
#include "excised/io.hpp"
#include "excised/specfun.hpp"

namespace excised::analytic {

using specfun::log_gamma;
using std::numbers::ln2;
using std::numbers::pi;

namespace {

void require_size(int n, const char* who) {
    if (n < 1) throw DomainError(std::string(who) + ": N must be >= 1");
}

double lgam(double x) { return std::lgamma(x); }

// sin(m theta)/sin(theta) = U_{m-1}(cos theta)
double chebyshev_u(int m_minus_1, double x) {
    double u0 = 1.0, u1 = 2.0 * x;
    if (m_minus_1 == 0) return u0;
    for (int k = 2; k <= m_minus_1; ++k) {
        const double u2 = 2.0 * x * u1 - u0;
        u0 = u1;
        u1 = u2;
    }
    return u1;
}

// log of the theta-independent part of excised_integrand:
// e^{-rX}/r 2^{N^2+2Nr-N} 2^{1-r} Gamma(N+1)/Gamma(N-1/2) prod_j Gamma(2+j)Gamma(1/2+j)
// prod_j Gamma(r+1/2+j) / prod_{j>=1} Gamma(r+N+j) / Gamma(N+r-1/2) / (2N+r-1).
// Gamma(N+r) of the kernel prefactor has been cancelled against the j = 0
// denominator.
cplx log_prefactor(int n, double x, cplx r) {
    const double nn = n;
    double constant = lgam(nn + 1.0) - lgam(nn - 0.5);
    for (int j = 0; j < n; ++j) constant += lgam(2.0 + j) + lgam(0.5 + j);
    cplx value = -r * x - std::log(r) + (nn * nn - nn + 1.0 + (2.0 * nn - 1.0) * r) * ln2 + constant;
    for (int j = 0; j < n; ++j) value += log_gamma(r + (0.5 + j));
    for (int j = 1; j < n; ++j) value -= log_gamma(r + (nn + j));
    value -= log_gamma(r + (nn - 0.5));
    value -= std::log(r + (2.0 * nn - 1.0));
    return value;
}

cplx pnr_at(int n, cplx r, double c) {
    const cplx alpha = r - 0.5;
    const specfun::JacobiOrder top{n, alpha, -0.5};
    const specfun::JacobiOrder low{n - 1, alpha, -0.5};
    return specfun::jacobi_p_deriv(top, c) * specfun::jacobi_p(low, c) -
           specfun::jacobi_p(top, c) * specfun::jacobi_p_deriv(low, c);
}

cplx integrand_unchecked(int n, double x, double theta, cplx r) {
    const double c = std::cos(theta);
    return std::exp(log_prefactor(n, x, r) + r * std::log1p(-c)) * pnr_at(n, r, c);
}

bool is_pole(cplx r) {
    if (r.imag() != 0.0) return false;
    const double t = r.real();
    return t == 0.0 || (t < 0.0 && t + 0.5 == std::floor(t + 0.5));
}

cplx moments_unchecked(int n, cplx s) {
    const double nn = n;
    cplx value = 2.0 * nn * s * ln2;
    for (int j = 1; j <= n; ++j)
        value += lgam(nn + j - 1.0) + log_gamma(s + (j - 0.5)) - lgam(j - 0.5) - log_gamma(s + (j + nn - 1.0));
    return std::exp(value);
}

double half_integer_pole(int k) { return -0.5 - k; }

// Re r = -K - 0.9 lies strictly between the poles -K - 1/2 and -K - 3/2.
double remainder_abscissa(int k_max) { return -k_max - 0.9; }

}  // namespace

// ---- SO(2N) -----------------------------------------------------------

double r1_so2n_unscaled(int n, double theta) {
    require_size(n, "r1_so2n_unscaled");
    const int m = 2 * n - 1;
    return (m + chebyshev_u(m - 1, std::cos(theta))) / (2.0 * pi);
}

double r1_so2n_scaled_expansion(int n, double y, int order) {
    require_size(n, "r1_so2n_scaled_expansion");
    if (order < 0 || order > 2) throw DomainError("r1_so2n_scaled_expansion: order must be 0, 1 or 2");
    const double t = 2.0 * pi * y;
    double value = 1.0 + (y == 0.0 ? 1.0 : std::sin(t) / t);
    if (order >= 1) value -= (1.0 + std::cos(t)) / (2.0 * n);
    if (order >= 2) value -= pi * y * std::sin(t) / (6.0 * n * double(n));
    return value;
}

cplx selberg_integral(int n, cplx r, cplx s) {
    require_size(n, "selberg_integral");
    if (!(r.real() > -0.5 && s.real() > -0.5)) throw DomainError("selberg_integral: requires Re r, Re s > -1/2");
    const double nn = n;
    cplx value = nn * (nn + r + s - 1.0) * ln2;
    for (int j = 0; j < n; ++j)
        value += lgam(2.0 + j) + log_gamma(s + (0.5 + j)) + log_gamma(r + (0.5 + j)) - log_gamma(s + r + (nn + j));
    return std::exp(value);
}

double c_so2n(int n) {
    require_size(n, "c_so2n");
    const double nn = n;
    double value = -nn * (nn - 1.0) * ln2;
    for (int j = 0; j < n; ++j) value += lgam(nn + j) - lgam(2.0 + j) - 2.0 * lgam(0.5 + j);
    return std::exp(value);
}

cplx moments_so2n(int n, cplx s) {
    require_size(n, "moments_so2n");
    if (!(s.real() > -0.5)) throw DomainError("moments_so2n: requires Re s > -1/2");
    return moments_unchecked(n, s);
}

cplx moments_so2n_continued(int n, cplx s) {
    require_size(n, "moments_so2n_continued");
    if (s.imag() == 0.0 && s.real() < 0.0 && is_pole(s)) throw DomainError("moments_so2n_continued: pole");
    return moments_unchecked(n, s);
}

double h_exact(int n) {
    require_size(n, "h_exact");
    const double nn = n;
    double value = -nn * ln2 - lgam(nn);
    for (int j = 1; j <= n; ++j) value += lgam(nn + j - 1.0) + lgam(j) - lgam(j - 0.5) - lgam(j + nn - 1.5);
    return std::exp(value);
}

double h_asymptotic(int n) {
    require_size(n, "h_asymptotic");
    return std::pow(2.0, -0.875) * specfun::barnes_g(0.5) * std::pow(pi, -0.25) * std::pow(double(n), 0.375);
}

double value_density_small_x(int n, double x) {
    if (!(x > 0.0)) throw DomainError("value_density_small_x: requires x > 0");
    return h_exact(n) / std::sqrt(x);
}

double value_cdf_small_x(int n, double x) {
    if (!(x > 0.0)) throw DomainError("value_cdf_small_x: requires x > 0");
    return 2.0 * std::sqrt(x) * h_exact(n);
}

// ---- Jacobi kernel ------------------------------------------------------

cplx pnr_theta(int n, cplx r, double theta) {
    require_size(n, "pnr_theta");
    return pnr_at(n, r, std::cos(theta));
}

cplx cd_kernel_diag(int n, cplx r, double theta) {
    require_size(n, "cd_kernel_diag");
    if (!(theta > 0.0 && theta < pi)) throw DomainError("cd_kernel_diag: theta must lie in (0, pi)");
    const double nn = n;
    const double c = std::cos(theta);
    // 2^{1-r}/(2N+r-1) Gamma(N+1) Gamma(N+r) / (Gamma(N+r-1/2) Gamma(N-1/2))
    const cplx log_pref = (1.0 - r) * ln2 - std::log(r + (2.0 * nn - 1.0)) + lgam(nn + 1.0) + log_gamma(r + nn) -
                          log_gamma(r + (nn - 0.5)) - lgam(nn - 0.5);
    return std::exp(log_pref + r * std::log1p(-c)) * pnr_at(n, r, c);
}

double cd_kernel(int n, double r, double theta, double phi) {
    require_size(n, "cd_kernel");
    if (!(r > -0.5)) throw DomainError("cd_kernel: requires r > -1/2");
    if (theta == phi) return cd_kernel_diag(n, r, theta).real();
    const double x = std::cos(theta), y = std::cos(phi);
    const specfun::JacobiOrder top{n, r - 0.5, -0.5};
    const specfun::JacobiOrder low{n - 1, r - 0.5, -0.5};
    const auto nt = specfun::jacobi_normalization(top);
    const auto nl = specfun::jacobi_normalization(low);
    const double scale = (nl.ell_n / (nt.ell_n * nl.h_n)).real();
    const double num =
        (specfun::jacobi_p(top, x) * specfun::jacobi_p(low, y) - specfun::jacobi_p(low, x) * specfun::jacobi_p(top, y))
            .real();
    const double weight = std::pow((1.0 - x) * (1.0 - y), 0.5 * r);
    return weight * scale * num / (x - y);
}

NLevelDensity n_level_density(int n, double r, const std::vector<double>& thetas) {
    require_size(n, "n_level_density");
    const auto m = static_cast<int>(thetas.size());
    if (m < 1 || m > n) throw DomainError("n_level_density: need 1 <= number of points <= N");
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            if (thetas[i] == thetas[j]) return {0.0, true};
    Eigen::MatrixXd k(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) k(i, j) = k(j, i) = cd_kernel(n, r, thetas[i], thetas[j]);
    return {k.determinant(), false};
}

// ---- excised ensemble ---------------------------------------------------

double gap_exponent(int n, double log_cutoff, double theta) {
    return (2.0 * n - 1.0) * ln2 + std::log1p(-std::cos(theta)) - log_cutoff;
}

double theta_inf(int n, double log_cutoff) {
    require_size(n, "theta_inf");
    if (!(log_cutoff < 2.0 * n * ln2)) throw DomainError("theta_inf: cutoff leaves the ensemble empty");
    return std::acos(1.0 - std::exp(log_cutoff - (2.0 * n - 1.0) * ln2));
}

cplx excised_integrand(int n, double log_cutoff, double theta, cplx r) {
    require_size(n, "excised_integrand");
    if (is_pole(r)) throw DomainError("excised_integrand: r is a pole");
    if (!(theta > 0.0 && theta < pi)) throw DomainError("excised_integrand: theta must lie in (0, pi)");
    return integrand_unchecked(n, log_cutoff, theta, r);
}

double residue_at_zero(int n, double theta) {
    require_size(n, "residue_at_zero");
    const double nn = n;
    double log_value =
        (nn * nn - nn) * ln2 + std::log(2.0 / (2.0 * nn - 1.0)) + lgam(nn + 1.0) + lgam(nn) - 2.0 * lgam(nn - 0.5);
    for (int j = 0; j < n; ++j) log_value += lgam(2.0 + j) + 2.0 * lgam(0.5 + j) - lgam(nn + j);
    return std::exp(log_value) * pnr_at(n, 0.0, std::cos(theta)).real();
}

double residue_at_minus_half(int n, double log_cutoff, double theta) {
    require_size(n, "residue_at_minus_half");
    if (n == 1) return 0.0;  // 1/Gamma(N-1) vanishes: the pole is cancelled
    const double nn = n;
    const double c = std::cos(theta);
    double log_value = 0.5 * log_cutoff + (nn * nn - 2.0 * nn + 1.5) * ln2 - 0.5 * std::log1p(-c) -
                       std::log(2.0 * nn - 1.5) + lgam(nn + 1.0) + lgam(0.5) - lgam(nn - 1.0) - lgam(nn - 0.5);
    for (int j = 1; j < n; ++j) log_value += lgam(2.0 + j) + lgam(0.5 + j) + lgam(j) - lgam(nn + j - 0.5);
    return -2.0 * std::exp(log_value) * pnr_at(n, -0.5, c).real();
}

cplx ResidueSeries::residue_sum() const {
    cplx s = 0.0;
    for (const auto& r : residues) s += r;
    return s;
}

std::string ResidueSeries::to_json() const {
    nlohmann::ordered_json j;
    j["poles"] = poles;
    std::vector<double> re, im;
    for (const auto& c : coefficients) {
        re.push_back(c.real());
        im.push_back(c.imag());
    }
    j["coefficients_re"] = re;
    j["coefficients_im"] = im;
    j["K"] = truncation_k;
    j["warning"] = warning;
    j["tail_estimate"] = tail_estimate;
    j["rounding_estimate"] = rounding_estimate;
    j["ill_conditioned"] = ill_conditioned;
    j["remainder_used"] = remainder_used;
    j["remainder"] = remainder;
    return j.dump();
}

NormalizationRatio normalization_ratio_series(int n, double log_cutoff, int k_max, const SeriesOptions& options) {
    require_size(n, "normalization_ratio");
    if (k_max < 1) throw DomainError("normalization_ratio: K must be >= 1");
    if (!(log_cutoff < 2.0 * n * ln2)) throw DomainError("normalization_ratio: cutoff leaves the ensemble empty");

    auto g = [n, log_cutoff](cplx a) { return std::exp(-a * log_cutoff) / a * moments_unchecked(n, a); };

    NormalizationRatio out;
    ResidueSeries& s = out.series;
    s.truncation_k = k_max;
    s.poles.push_back(0.0);
    s.residues.push_back(1.0);
    s.coefficients.push_back(1.0);
    double rounding = 0.0;
    for (int k = 0; k <= k_max; ++k) {
        const double pole = half_integer_pole(k);
        cplx res;
        if (k == 0) {
            res = -2.0 * std::exp(0.5 * log_cutoff) * h_exact(n);
        } else {
            const auto circle = detail::circle_residue(g, pole);
            res = circle.value;
            rounding += circle.rounding;
        }
        s.poles.push_back(pole);
        s.residues.push_back(res);
        s.coefficients.push_back(res * std::exp((k + 0.5) * -log_cutoff));
    }
    s.tail_estimate = std::abs(detail::circle_residue(g, half_integer_pole(k_max + 1)).value);
    s.warning = s.tail_estimate > options.tolerance;
    double value = s.residue_sum().real();
    if (s.warning && options.add_remainder) {
        const auto rem = detail::parabola_integral(g, remainder_abscissa(k_max), 2.0 * n * ln2 - log_cutoff);
        s.remainder_used = true;
        s.remainder = rem.value;
        rounding += rem.rounding + rem.error;
        value += s.remainder;
    }
    s.rounding_estimate = rounding;
    s.ill_conditioned = rounding > options.tolerance;
    out.value = value;
    return out;
}

double normalization_ratio(int n, double log_cutoff, int k_max) {
    return normalization_ratio_series(n, log_cutoff, k_max).value;
}

double normalization_ratio_line_integral(int n, double log_cutoff) {
    require_size(n, "normalization_ratio_line_integral");
    if (!(log_cutoff < 2.0 * n * ln2)) throw DomainError("normalization_ratio: cutoff leaves the ensemble empty");
    auto g = [n, log_cutoff](cplx a) { return std::exp(-a * log_cutoff) / a * moments_unchecked(n, a); };
    const double d = 2.0 * n * ln2 - log_cutoff;
    return detail::parabola_integral(g, std::min(0.5, 1.0 / d), d).value;
}

ExcisedDensity::ExcisedDensity(int n, double log_cutoff, int k_max, SeriesOptions options)
    : n_(n), x_(log_cutoff), k_max_(k_max), options_(options) {
    require_size(n, "ExcisedDensity");
    if (k_max < 1) throw DomainError("ExcisedDensity: K must be >= 1");
    theta_inf_ = theta_inf(n, log_cutoff);
    ratio_ = normalization_ratio_series(n, log_cutoff, k_max, options);
    if (!ratio_.series.reliable()) ratio_.value = normalization_ratio_line_integral(n, log_cutoff);
    c_x_ = c_so2n(n) / ratio_.value;
    offsets_ = detail::circle_offsets();
    log_prefactor_.resize(static_cast<std::size_t>(k_max) + 1);
    for (int k = 1; k <= k_max + 1; ++k) {
        auto& row = log_prefactor_[k - 1];
        row.reserve(offsets_.size());
        for (const auto& z : offsets_) row.push_back(log_prefactor(n, log_cutoff, half_integer_pole(k) + z));
    }
}

DensityValue ExcisedDensity::evaluate(double theta) const {
    if (!(theta >= 0.0 && theta <= pi)) throw DomainError("r1_excised: theta must lie in [0, pi]");
    DensityValue out;
    const double d = gap_exponent(n_, x_, theta);
    if (!(d > 0.0)) return out;

    const double c = std::cos(theta);
    const double log_1mc = std::log1p(-c);
    auto circle = [&](int k) {
        const auto& row = log_prefactor_[k - 1];
        std::vector<cplx> v(offsets_.size());
        for (std::size_t m = 0; m < v.size(); ++m) {
            const cplx r = half_integer_pole(k) + offsets_[m];
            v[m] = std::exp(row[m] + r * log_1mc) * pnr_at(n_, r, c);
        }
        return detail::circle_residue(v, offsets_);
    };

    ResidueSeries& s = out.series;
    s.truncation_k = k_max_;
    const double r0 = residue_at_zero(n_, theta);
    s.poles.push_back(0.0);
    s.residues.push_back(r0);
    s.coefficients.push_back(r0);
    double rounding = 0.0;
    for (int k = 0; k <= k_max_; ++k) {
        cplx res;
        if (k == 0) {
            res = residue_at_minus_half(n_, x_, theta);
        } else {
            const auto cr = circle(k);
            res = cr.value;
            rounding += cr.rounding;
        }
        s.poles.push_back(half_integer_pole(k));
        s.residues.push_back(res);
        s.coefficients.push_back(res * std::exp((k + 0.5) * -x_));
    }
    s.tail_estimate = c_x_ * std::abs(circle(k_max_ + 1).value);
    s.warning = s.tail_estimate > options_.tolerance;
    double total = s.residue_sum().real();
    if (s.warning && options_.add_remainder) {
        auto g = [&](cplx r) { return integrand_unchecked(n_, x_, theta, r); };
        const auto rem = detail::parabola_integral(g, remainder_abscissa(k_max_), d);
        s.remainder_used = true;
        s.remainder = rem.value;
        rounding += rem.rounding + rem.error;
        total += s.remainder;
    }
    s.rounding_estimate = c_x_ * rounding;
    s.ill_conditioned = s.rounding_estimate > options_.tolerance;
    out.value = c_x_ * total;
    return out;
}

double r1_excised(int n, double log_cutoff, double theta, int k_max) {
    return ExcisedDensity(n, log_cutoff, k_max)(theta);
}

namespace {

double line_abscissa(double d, std::optional<double> c) {
    if (c) {
        if (!(*c > 0.0)) throw DomainError("r1_excised_line_integral: contour must pass right of r = 0");
        return *c;
    }
    return std::min(0.5, 1.0 / std::abs(d));
}

}  // namespace

double ExcisedDensity::evaluate_line(double theta, std::optional<double> c) const {
    if (!(theta >= 0.0 && theta <= pi)) throw DomainError("r1_excised_line_integral: theta must lie in [0, pi]");
    const double d = gap_exponent(n_, x_, theta);
    if (d == 0.0) throw DomainError("r1_excised_line_integral: d(theta, X) = 0, the integral does not converge");
    if (std::isinf(d)) return 0.0;  // theta = 0: the integrand vanishes identically
    const double a = line_abscissa(d, c);
    auto g = [&](cplx r) { return integrand_unchecked(n_, x_, theta, r); };
    return c_x_ * detail::parabola_integral(g, a, d).value;
}

double r1_excised_line_integral(int n, double log_cutoff, double theta, std::optional<double> c) {
    require_size(n, "r1_excised_line_integral");
    if (!(theta >= 0.0 && theta <= pi)) throw DomainError("r1_excised_line_integral: theta must lie in [0, pi]");
    const double d = gap_exponent(n, log_cutoff, theta);
    if (d == 0.0) throw DomainError("r1_excised_line_integral: d(theta, X) = 0, the integral does not converge");
    if (std::isinf(d)) return 0.0;
    const double a = line_abscissa(d, c);
    const double c_x = c_so2n(n) / normalization_ratio_line_integral(n, log_cutoff);
    auto g = [&](cplx r) { return integrand_unchecked(n, log_cutoff, theta, r); };
    return c_x * detail::parabola_integral(g, a, d).value;
}

void DensityGrid::write_csv(std::ostream& out) const {
    std::vector<std::vector<double>> rows;
    rows.reserve(thetas.size());
    for (std::size_t i = 0; i < thetas.size(); ++i) rows.push_back({thetas[i], values[i]});
    io::write_csv(out, {"theta", "r1"}, rows);
}

DensityGrid density_grid(const ExcisedDensity& density, const std::vector<double>& thetas, int workers,
                         DensityMethod method) {
    DensityGrid grid;
    grid.thetas = thetas;
    grid.values.assign(thetas.size(), 0.0);
    grid.n_pairs = density.n_pairs();
    grid.log_cutoff = density.log_cutoff();
    std::vector<char> warn(thetas.size(), 0), line(thetas.size(), 0);
    auto work = [&](std::size_t begin, std::size_t step) {
        for (std::size_t i = begin; i < thetas.size(); i += step) {
            const double t = thetas[i];
            if (t <= density.gap_edge()) continue;
            if (method == DensityMethod::line) {
                grid.values[i] = density.evaluate_line(t);
                line[i] = 1;
                continue;
            }
            const auto v = density.evaluate(t);
            grid.values[i] = v.value;
            if (v.series.reliable()) continue;
            if (method == DensityMethod::automatic) {
                grid.values[i] = density.evaluate_line(t);
                line[i] = 1;
            } else {
                warn[i] = 1;
            }
        }
    };
    const auto w = static_cast<std::size_t>(std::max(1, workers));
    if (w == 1) {
        work(0, 1);
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < w; ++t) pool.emplace_back(work, t, w);
    }
    grid.warning = std::any_of(warn.begin(), warn.end(), [](char c) { return c != 0; });
    grid.line_points = static_cast<int>(std::count(line.begin(), line.end(), 1));
    return grid;
}

DensityMethod parse_density_method(const std::string& name) {
    if (name == "residue") return DensityMethod::residue;
    if (name == "line") return DensityMethod::line;
    if (name == "auto") return DensityMethod::automatic;
    throw DomainError("unknown density method " + name);
}

std::vector<double> theta_grid(int points) {
    if (points < 2) throw DomainError("theta_grid: need at least two points");
    std::vector<double> t(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) t[i] = pi * i / (points - 1);
    t.back() = pi;
    return t;
}

}  // namespace excised::analytic
