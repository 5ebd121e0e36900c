#include <cmath>
#include <json.hpp>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "excised/curve_model.hpp"
#include "excised/errors.hpp"

using namespace excised::curve;
using std::numbers::pi;

namespace {

const Weierstrass kE11{{0, -1, 1, 0, 0}};

CurveFamilyParams e11() {
    std::istringstream in(R"(# twists of 11a
conductor = 11
c1 = 0
c2 = -1
c3 = 1
c4 = 0
c6 = 0
kappa_E = 6.346046521
a_minus_half = 0.732728078
r1 = 2.8600
delta = 0.185116   # from the vanishing count
omega = 1
X_bound = 400000
)");
    return parse_config(in);
}

// independent count: every (x, y) in F_p^2 against the reduced equation
long brute_a_p(const Weierstrass& w, long p) {
    long affine = 0;
    for (long x = 0; x < p; ++x)
        for (long y = 0; y < p; ++y) {
            long v = (y * y + w.c[0] * x * y + w.c[2] * y) - (x * x * x + w.c[1] * x * x + w.c[3] * x + w.c[4]);
            if (((v % p) + p) % p == 0) ++affine;
        }
    return p - affine;
}

}  // namespace

TEST_CASE("config parsing") {
    const auto p = e11();
    CHECK(p.conductor_m == 11);
    CHECK(p.weierstrass.c2() == -1);
    CHECK(p.kappa_e == 6.346046521);
    CHECK(p.x_bound.value() == 400000.0);
    CHECK_FALSE(p.r2.has_value());
    auto bad = [](const std::string& text) {
        std::istringstream in(text);
        return parse_config(in);
    };
    const std::string base =
        "conductor=11\nc1=0\nc2=-1\nc3=1\nc4=0\nc6=0\nkappa_E=1\na_minus_half=1\nr1=1\ndelta=1\nomega=1\n";
    CHECK_NOTHROW(bad(base));
    CHECK(bad(base + "r2 = 0.5\n").r2.value() == 0.5);
    CHECK_THROWS_AS(bad(base + "colour = 3\n"), std::runtime_error);
    CHECK_THROWS_AS(bad(base + "r2 = abc\n"), std::runtime_error);
    CHECK_THROWS_AS(bad("conductor=11\n"), std::runtime_error);
    CHECK_THROWS_AS(bad(base + "conductor=13\n"), std::runtime_error);
    std::string composite = base;
    composite.replace(0, 12, "conductor=15");
    CHECK_THROWS_AS(bad(composite), excised::DomainError);
    std::string omega = base;
    omega.replace(omega.find("omega=1"), 7, "omega=2");
    CHECK_THROWS_AS(bad(omega), excised::DomainError);
    CHECK_THROWS_AS(load_config("/nonexistent/e11.cfg"), std::runtime_error);
}

TEST_CASE("matrix sizes") {
    CHECK(n_std(11, 400000) == doctest::Approx(12.26).epsilon(5e-4));
    CHECK(std::abs(n_std(1, 2 * pi)) < 1e-15);
    CHECK(std::abs(n_std(4, pi)) < 1e-15);
    CHECK(n_eff(12.26, 2.86) == doctest::Approx(2.14).epsilon(2e-3));
    CHECK(n_eff(7.5, 0.5) == 7.5);
    CHECK(n_eff(0.0, 3.0) == 0.0);
    CHECK_THROWS_AS(n_std(11, 0.0), excised::DomainError);
    CHECK_THROWS_AS(n_eff(1.0, 0.0), excised::DomainError);
}

TEST_CASE("cutoff constants") {
    const auto p = e11();
    CHECK(std::abs(cutoff_std(p) - 2.188) < 5e-4);
    CHECK(std::abs(cutoff_eff(p) - 0.5916) < 5e-5);
    CHECK(std::abs(p.delta * p.kappa_e - 1.17475) < 5e-6);
    auto q = p;
    q.r1 = 0.5;
    CHECK(cutoff_eff(q) == doctest::Approx(cutoff_std(q)).epsilon(1e-15));
}

TEST_CASE("cutoff report") {
    const auto p = e11();
    const auto r = cutoff_report(p, 400000);
    CHECK(r.matrix_size_std == 12);
    CHECK(std::abs(r.abs_cutoff_std - 0.005424) < 5e-7);
    CHECK(std::abs(r.abs_cutoff_eff - 0.001466) < 5e-7);
    CHECK(r.n_eff * p.r1 == doctest::Approx(r.n_std / 2).epsilon(1e-15));
    CHECK(r.abs_cutoff_std == doctest::Approx(r.c_std * std::exp(-r.matrix_size_std / 2.0)).epsilon(1e-14));
    CHECK(r.abs_cutoff_eff == doctest::Approx(r.c_eff * std::exp(-r.matrix_size_std / 2.0)).epsilon(1e-14));
    CHECK(std::abs(r.c_std_probability - 0.6307) < 5e-5);
    CHECK(std::abs(r.c_eff_probability - 2.3328) < 5e-4);
    const auto j = nlohmann::json::parse(r.to_json());
    CHECK(j["N_std"].get<double>() == r.n_std);
    CHECK(j["log_cutoff_std"].get<double>() == r.log_cutoff_std);
    CHECK(j.contains("abs_cutoff_eff"));
}

TEST_CASE("delta from the vanishing constant") {
    CHECK(std::abs(delta_from_vanishing_constant(0.2834620) - 0.185116) < 5e-7);
    CHECK(delta_from_vanishing_constant(vanishing_constant_factor()) == doctest::Approx(1.0).epsilon(1e-15));
    for (double d : {0.01, 0.185116, 3.0})
        CHECK(std::abs(delta_from_vanishing_constant(vanishing_constant(d)) - d) < 1e-12 * d);
    CHECK_THROWS_AS(delta_from_vanishing_constant(0.0), excised::DomainError);
}

TEST_CASE("expected vanishing count") {
    auto p = e11();
    const double x = 1e7;
    const double norm =
        0.25 * p.a_minus_half * std::sqrt(p.kappa_e) * std::pow(x, 0.75) * std::pow(std::log(x), -0.625);
    CHECK(std::abs(expected_vanishing_count(x, p) / norm - 0.2834620) < 1e-6);
    const double ratio = expected_vanishing_count(16 * x, p) / expected_vanishing_count(x, p);
    CHECK(ratio == doctest::Approx(8.0 * std::pow(std::log(16 * x) / std::log(x), -0.625)).epsilon(1e-12));
    p.delta = 0.0;
    CHECK(expected_vanishing_count(x, p) == 0.0);
    CHECK_THROWS_AS(expected_vanishing_count(1.0, e11()), excised::DomainError);
}

TEST_CASE("primes") {
    CHECK(primes_up_to(30) == std::vector<std::int64_t>{2, 3, 5, 7, 11, 13, 17, 19, 23, 29});
    CHECK(primes_up_to(1).empty());
    CHECK(primes_up_to(100000).size() == 9592);
    CHECK(is_prime(2));
    CHECK_FALSE(is_prime(1));
    CHECK_FALSE(is_prime(91));
    CHECK(is_prime(999983));
}

TEST_CASE("point counts") {
    // Cremona 11a1
    const std::vector<std::pair<int, int>> known = {{2, -2}, {3, -1}, {5, 1},   {7, -2},
                                                    {11, 1}, {13, 4}, {17, -2}, {19, 0}};
    for (auto [p, a] : known) CHECK(count_points_fp(kE11, p) == a);
    CHECK(count_points_fp(kE11, 7) == brute_a_p(kE11, 7));
    for (auto p : primes_up_to(200)) CHECK(count_points_fp(kE11, p) == brute_a_p(kE11, p));
    const Weierstrass other{{1, -1, 1, -3, 5}};
    for (auto p : primes_up_to(200)) CHECK(count_points_fp(other, p) == brute_a_p(other, p));
    for (auto p : primes_up_to(100)) CHECK(std::abs(double(count_points_fp(kE11, p))) <= 2 * std::sqrt(double(p)));
    CHECK_THROWS_AS(count_points_fp(kE11, 9), excised::DomainError);
    CHECK_THROWS_AS(count_points_fp(kE11, 1), excised::DomainError);
    const auto serial = point_counts(kE11, 3000, 1);
    const auto parallel = point_counts(kE11, 3000, 3);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) CHECK(serial[i].a_p == parallel[i].a_p);
    CHECK(serial[4].lambda_p == doctest::Approx(1 / std::sqrt(11.0)));
}

TEST_CASE("local factors") {
    CHECK(local_factor(0.7, 1, 0.0) == 1.0);
    CHECK(local_factor(0.5, 0, 0.3) == doctest::Approx(1 / (1 - 0.15)));
    CHECK(local_factor(0.0, 1, 0.4) == doctest::Approx(1 / 1.16));
    CHECK_THROWS_AS(local_factor(2.0, 1, 1.0), excised::DomainError);
}

TEST_CASE("Euler product") {
    for (std::int64_t pm : {2, 100, 5000}) CHECK(a_s_truncated(kE11, 11, 1, 0.0, pm).value == 1.0);
    // p_max < M still applies the factor at M
    const auto two = a_s_truncated(kE11, 11, 1, -0.5, 2);
    CHECK(two.primes == 2);
    const double at2 = std::pow(0.5, 0.375) * (2.0 / 3.0) *
                       (0.5 + 0.5 * (std::pow(1 / (1 + 1.0 + 0.5), -0.5) + std::pow(1 / (1 - 1.0 + 0.5), -0.5)));
    const double at11 = std::pow(10.0 / 11.0, 0.375) * std::pow(11.0 / 10.0, -0.5);
    CHECK(two.value == doctest::Approx(at2 * at11).epsilon(1e-14));
    const auto e3 = a_s_truncated(kE11, 11, 1, -0.5, 1000);
    const auto e4 = a_s_truncated(kE11, 11, 1, -0.5, 10000, 2);
    CHECK(std::abs(e4.value - 0.732728078) < 1e-2);
    CHECK(e4.decade_value == doctest::Approx(e3.value).epsilon(1e-14));
    CHECK(e4.last_increment < e3.last_increment);
    CHECK(a_s_truncated(kE11, 11, 1, -0.5, 10000, 1).value == e4.value);
    CHECK_THROWS_AS(a_s_truncated(kE11, 12, 1, -0.5, 100), excised::DomainError);
    CHECK_THROWS_AS(a_s_truncated(kE11, 11, 0, -0.5, 100), excised::DomainError);
}
