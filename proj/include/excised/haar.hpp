#pragma once

// Haar-random SO(2N) matrices, their eigenphases and the characteristic
// polynomial Lambda_A(1, N) = det(I - A).

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace excised::haar {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// A 2N x 2N real matrix verified to lie in SO(2N): A A^T = I to 1e-10 in
/// the max-entry norm and det A = +1 to 1e-8.
class SpecialOrthogonalMatrix {
public:
    /// Throws IntegrityError if the invariants fail.
    explicit SpecialOrthogonalMatrix(Eigen::MatrixXd entries);

    int n_pairs() const { return static_cast<int>(entries_.rows() / 2); }
    int dimension() const { return static_cast<int>(entries_.rows()); }
    const Eigen::MatrixXd& entries() const { return entries_; }

    static constexpr double kOrthogonalityTol = 1e-10;
    static constexpr double kDeterminantTol = 1e-8;

private:
    Eigen::MatrixXd entries_;
};

/// Sorted eigenphases theta_1 <= ... <= theta_N in [0, pi], one per
/// conjugate pair e^{+-i theta}.
class EigenphaseSpectrum {
public:
    EigenphaseSpectrum() = default;
    /// Sorts the input; throws DomainError on values outside [0, pi].
    explicit EigenphaseSpectrum(std::vector<double> phases);

    int n_pairs() const { return static_cast<int>(phases_.size()); }
    std::span<const double> phases() const { return phases_; }
    double min_phase() const { return phases_.front(); }

    bool operator==(const EigenphaseSpectrum&) const = default;

private:
    std::vector<double> phases_;
};

/// Haar-distributed element of SO(2N) drawn from `rng`.
SpecialOrthogonalMatrix sample_so2n(int n_pairs, Rng& rng);

/// Deterministic for fixed (n_pairs, seed).
SpecialOrthogonalMatrix sample_so2n(int n_pairs, std::uint64_t seed);

/// Phases of the eigenvalues of A. Phases within 1e-12 of 0 or pi are
/// snapped to the endpoint.
EigenphaseSpectrum eigenphases(const SpecialOrthogonalMatrix& a);

/// log Lambda_A(1, N) = N log 2 + sum_j log(1 - cos theta_j); -inf if any
/// theta_j is exactly 0.
double log_char_poly_at_1(const EigenphaseSpectrum& spectrum);

/// Haar spectrum straight from the generator (sample + eigenphases).
EigenphaseSpectrum sample_spectrum(int n_pairs, Rng& rng);

}  // namespace excised::haar
