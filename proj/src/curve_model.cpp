#include "excised/curve_model.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <json.hpp>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "excised/errors.hpp"
#include "excised/specfun.hpp"

namespace excised::curve {

namespace {

constexpr double kPi = std::numbers::pi;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_real(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(value, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != value.size()) throw std::runtime_error("config: bad value for " + key + ": " + value);
    return x;
}

std::int64_t parse_int(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    long long x = 0;
    try {
        x = std::stoll(value, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != value.size()) throw std::runtime_error("config: bad integer for " + key + ": " + value);
    return x;
}

std::int64_t mod(std::int64_t a, std::int64_t p) {
    const std::int64_t r = a % p;
    return r < 0 ? r + p : r;
}

// number of affine points, by trying every (x, y)
std::int64_t affine_count_full(const Weierstrass& w, std::int64_t p) {
    std::int64_t count = 0;
    for (std::int64_t x = 0; x < p; ++x)
        for (std::int64_t y = 0; y < p; ++y) {
            const std::int64_t lhs = y * y + w.c1() * x * y + w.c3() * y;
            const std::int64_t rhs = x * x * x + w.c2() * x * x + w.c4() * x + w.c6();
            if (mod(lhs - rhs, p) == 0) ++count;
        }
    return count;
}

// odd p: for each x the quadratic in y has 1 + chi(D) roots, where
// D(x) = 4x^3 + (c1^2 + 4c2)x^2 + (2c1c3 + 4c4)x + c3^2 + 4c6 is stepped by
// forward differences
std::int64_t affine_count_odd(const Weierstrass& w, std::int64_t p) {
    std::vector<std::uint8_t> roots(static_cast<std::size_t>(p), 0);
    for (std::int64_t y = 0, sq = 0; y < p; ++y) {
        ++roots[static_cast<std::size_t>(sq)];
        sq += 2 * y + 1;
        while (sq >= p) sq -= p;
    }
    const std::int64_t c1 = mod(w.c1(), p), c2 = mod(w.c2(), p), c3 = mod(w.c3(), p), c4 = mod(w.c4(), p),
                       c6 = mod(w.c6(), p);
    auto d_at = [&](std::int64_t x) {
        const std::int64_t b = (c1 * x + c3) % p;
        const std::int64_t f = (((x + c2) % p * x % p + c4) * x % p + c6) % p;
        return (b * b + 4 * f) % p;
    };
    const std::int64_t d0 = d_at(0), d1 = d_at(1 % p), d2 = d_at(2 % p), d3 = d_at(3 % p);
    std::int64_t v = d0;
    std::int64_t s1 = mod(d1 - d0, p);
    std::int64_t s2 = mod(d2 - 2 * d1 + d0, p);
    const std::int64_t s3 = mod(d3 - 3 * d2 + 3 * d1 - d0, p);
    auto add = [p](std::int64_t a, std::int64_t b) {
        const std::int64_t r = a + b - p;
        return r + (p & (r >> 63));
    };
    std::int64_t count = 0;
    for (std::int64_t x = 0; x < p; ++x) {
        count += roots[static_cast<std::size_t>(v)];
        v = add(v, s1);
        s1 = add(s1, s2);
        s2 = add(s2, s3);
    }
    return count;
}

void check_omega(int omega) {
    if (omega != 1 && omega != -1) throw DomainError("omega must be +1 or -1");
}

}  // namespace

void CurveFamilyParams::validate() const {
    if (!is_prime(conductor_m)) throw DomainError("conductor must be prime");
    if (!(kappa_e > 0.0)) throw DomainError("kappa_E must be positive");
    if (!(a_minus_half > 0.0)) throw DomainError("a_minus_half must be positive");
    if (!(r1 > 0.0)) throw DomainError("r1 must be positive");
    if (!(delta > 0.0)) throw DomainError("delta must be positive");
    check_omega(sign_omega);
    if (x_bound && !(*x_bound > 0.0)) throw DomainError("X_bound must be positive");
}

CurveFamilyParams parse_config(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (kv.count(key)) throw std::runtime_error("config: duplicate key " + key);
        kv[key] = trim(line.substr(eq + 1));
    }
    CurveFamilyParams p;
    auto take = [&](const std::string& key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        std::string v = it->second;
        kv.erase(it);
        return v;
    };
    auto need = [&](const std::string& key) {
        auto v = take(key);
        if (!v) throw std::runtime_error("config: missing key " + key);
        return *v;
    };
    p.conductor_m = parse_int("conductor", need("conductor"));
    const char* names[] = {"c1", "c2", "c3", "c4", "c6"};
    for (int i = 0; i < 5; ++i) p.weierstrass.c[i] = parse_int(names[i], need(names[i]));
    p.kappa_e = parse_real("kappa_E", need("kappa_E"));
    p.a_minus_half = parse_real("a_minus_half", need("a_minus_half"));
    p.r1 = parse_real("r1", need("r1"));
    p.delta = parse_real("delta", need("delta"));
    p.sign_omega = static_cast<int>(parse_int("omega", need("omega")));
    if (auto v = take("r2")) p.r2 = parse_real("r2", *v);
    if (auto v = take("X_bound")) p.x_bound = parse_real("X_bound", *v);
    if (!kv.empty()) throw std::runtime_error("config: unknown key " + kv.begin()->first);
    p.validate();
    return p;
}

CurveFamilyParams load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config " + path);
    return parse_config(in);
}

double n_std(double conductor, double x_bound) {
    if (!(conductor >= 1.0) || !(x_bound > 0.0)) throw DomainError("n_std: requires M >= 1 and X > 0");
    return std::log(std::sqrt(conductor) * x_bound / (2.0 * kPi));
}

double n_eff(double n_std_value, double r1) {
    if (!(r1 > 0.0)) throw DomainError("n_eff: r1 must be positive");
    return n_std_value / (2.0 * r1);
}

double cutoff_std(const CurveFamilyParams& params) {
    return params.delta * params.kappa_e / (params.a_minus_half * params.a_minus_half);
}

double cutoff_eff(const CurveFamilyParams& params) { return cutoff_std(params) * std::pow(2.0 * params.r1, -0.75); }

std::string CutoffReport::to_json() const {
    nlohmann::ordered_json j;
    j["X_bound"] = x_bound;
    j["N_std"] = n_std;
    j["N_eff"] = n_eff;
    j["matrix_size_std"] = matrix_size_std;
    j["c_std"] = c_std;
    j["c_eff"] = c_eff;
    j["abs_cutoff_std"] = abs_cutoff_std;
    j["abs_cutoff_eff"] = abs_cutoff_eff;
    j["log_cutoff_std"] = log_cutoff_std;
    j["log_cutoff_eff"] = log_cutoff_eff;
    j["delta_kappa"] = delta_kappa;
    j["c_std_probability"] = c_std_probability;
    j["c_eff_probability"] = c_eff_probability;
    return j.dump(2);
}

CutoffReport cutoff_report(const CurveFamilyParams& params, double x_bound) {
    params.validate();
    CutoffReport r;
    r.x_bound = x_bound;
    r.n_std = n_std(static_cast<double>(params.conductor_m), x_bound);
    r.n_eff = n_eff(r.n_std, params.r1);
    r.matrix_size_std = static_cast<int>(std::lround(r.n_std));
    r.c_std = cutoff_std(params);
    r.c_eff = cutoff_eff(params);
    const double decay = -0.5 * r.matrix_size_std;
    r.log_cutoff_std = std::log(r.c_std) + decay;
    r.log_cutoff_eff = std::log(r.c_eff) + decay;
    r.abs_cutoff_std = std::exp(r.log_cutoff_std);
    r.abs_cutoff_eff = std::exp(r.log_cutoff_eff);
    r.delta_kappa = params.delta * params.kappa_e;
    r.c_std_probability = params.a_minus_half * params.a_minus_half * r.delta_kappa;
    r.c_eff_probability = r.c_std_probability * std::pow(2.0 * params.r1, 0.75);
    return r;
}

double vanishing_constant_factor() {
    return 8.0 / 3.0 * std::pow(2.0, -7.0 / 8.0) * specfun::barnes_g(0.5) * std::pow(kPi, -0.25);
}

double delta_from_vanishing_constant(double observed) {
    if (!(observed > 0.0)) throw DomainError("delta_from_vanishing_constant: observed must be positive");
    const double q = observed / vanishing_constant_factor();
    return q * q;
}

double vanishing_constant(double delta) {
    if (!(delta >= 0.0)) throw DomainError("vanishing_constant: delta must be nonnegative");
    return vanishing_constant_factor() * std::sqrt(delta);
}

double expected_vanishing_count(double x_bound, const CurveFamilyParams& params) {
    if (!(x_bound > 1.0)) throw DomainError("expected_vanishing_count: requires X > 1");
    const double lx = std::log(x_bound);
    return 1.0 / (4.0 * lx) * 2.0 * params.a_minus_half * std::sqrt(params.kappa_e) * std::pow(2.0, -7.0 / 8.0) *
           specfun::barnes_g(0.5) * std::pow(kPi, -0.25) * std::pow(lx, 3.0 / 8.0) * std::sqrt(params.delta) *
           (4.0 / 3.0) * std::pow(x_bound, 0.75);
}

bool is_prime(std::int64_t n) {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    for (std::int64_t d = 3; d * d <= n; d += 2)
        if (n % d == 0) return false;
    return true;
}

std::vector<std::int64_t> primes_up_to(std::int64_t n) {
    std::vector<std::int64_t> out;
    if (n < 2) return out;
    std::vector<bool> composite(static_cast<std::size_t>(n) + 1, false);
    for (std::int64_t i = 2; i <= n; ++i) {
        if (composite[i]) continue;
        out.push_back(i);
        for (std::int64_t j = i * i; j <= n; j += i) composite[j] = true;
    }
    return out;
}

std::int64_t count_points_fp(const Weierstrass& w, std::int64_t p) {
    if (!is_prime(p)) throw DomainError("count_points_fp: p = " + std::to_string(p) + " is not prime");
    if (p > 3037000499LL) throw DomainError("count_points_fp: p too large");
    const std::int64_t affine = p <= 3 ? affine_count_full(w, p) : affine_count_odd(w, p);
    return p + 1 - (affine + 1);
}

std::vector<PointCount> point_counts(const Weierstrass& w, std::int64_t p_max, int workers) {
    if (workers < 1) throw DomainError("point_counts: workers must be >= 1");
    const auto primes = primes_up_to(p_max);
    std::vector<PointCount> out(primes.size());
    auto work = [&](std::size_t first) {
        for (std::size_t i = first; i < primes.size(); i += static_cast<std::size_t>(workers)) {
            const std::int64_t p = primes[i];
            const std::int64_t a = count_points_fp(w, p);
            out[i] = {p, a, static_cast<double>(a) / std::sqrt(static_cast<double>(p))};
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        for (int k = 0; k < workers; ++k) pool.emplace_back(work, static_cast<std::size_t>(k));
    }
    return out;
}

double local_factor(double lambda_p, int psi_p, double z) {
    const double den = 1.0 - lambda_p * z + psi_p * z * z;
    if (den == 0.0) throw DomainError("local_factor: vanishing denominator");
    return 1.0 / den;
}

EulerProduct a_s_truncated(const Weierstrass& w, std::int64_t conductor, int omega, double s, std::int64_t p_max,
                           int workers) {
    if (!is_prime(conductor)) throw DomainError("a_s_truncated: conductor must be prime");
    check_omega(omega);
    if (p_max < 2) throw DomainError("a_s_truncated: p_max must be >= 2");
    const double e = 0.5 * s * (s - 1.0);
    auto log_factor = [&](std::int64_t p, double lambda) {
        const double pd = static_cast<double>(p);
        const double z = 1.0 / std::sqrt(pd);
        if (p == conductor) return e * std::log1p(-1.0 / pd) + s * std::log(local_factor(lambda, 0, omega * z));
        // p/(p+1) (1/p + (L(z)^s + L(-z)^s)/2) = 1 + p/(p+1) ((L(z)^s - 1) + (L(-z)^s - 1))/2
        const double dev = std::expm1(s * std::log(local_factor(lambda, 1, z))) +
                           std::expm1(s * std::log(local_factor(lambda, 1, -z)));
        return e * std::log1p(-1.0 / pd) + std::log1p(0.5 * pd / (pd + 1.0) * dev);
    };
    const auto counts = point_counts(w, p_max, workers);
    EulerProduct out;
    const std::int64_t half = p_max / 10;
    double total = 0.0, decade_total = 0.0;
    bool has_m = false;
    for (const auto& c : counts) {
        total += log_factor(c.p, c.lambda_p);
        if (c.p <= half) decade_total = total;
        has_m = has_m || c.p == conductor;
    }
    out.primes = static_cast<std::int64_t>(counts.size());
    if (!has_m) {
        const std::int64_t a = count_points_fp(w, conductor);
        const double lm = log_factor(conductor, a / std::sqrt(static_cast<double>(conductor)));
        total += lm;
        decade_total += lm;
        ++out.primes;
    } else if (conductor > half) {
        const std::int64_t a = count_points_fp(w, conductor);
        decade_total += log_factor(conductor, a / std::sqrt(static_cast<double>(conductor)));
    }
    out.value = std::exp(total);
    out.decade_value = std::exp(decade_total);
    out.last_increment = std::abs(out.value - out.decade_value);
    return out;
}

}  // namespace excised::curve
