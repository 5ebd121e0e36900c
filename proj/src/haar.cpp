#include "excised/haar.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "excised/errors.hpp"

namespace excised::haar {

namespace {
constexpr double kPhaseSnap = 1e-12;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

SpecialOrthogonalMatrix::SpecialOrthogonalMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
    const auto n = entries_.rows();
    if (n == 0 || n != entries_.cols() || n % 2 != 0)
        throw IntegrityError("SpecialOrthogonalMatrix: expected a nonempty square matrix of even size");
    const Eigen::MatrixXd gram = entries_ * entries_.transpose() - Eigen::MatrixXd::Identity(n, n);
    const double err = gram.cwiseAbs().maxCoeff();
    if (!(err <= kOrthogonalityTol))
        throw IntegrityError("SpecialOrthogonalMatrix: |A A^T - I| = " + std::to_string(err));
    const double det = entries_.determinant();
    if (!(std::abs(det - 1.0) <= kDeterminantTol))
        throw IntegrityError("SpecialOrthogonalMatrix: det A = " + std::to_string(det));
}

EigenphaseSpectrum::EigenphaseSpectrum(std::vector<double> phases) : phases_(std::move(phases)) {
    if (phases_.empty()) throw DomainError("EigenphaseSpectrum: no phases");
    for (double t : phases_)
        if (!(t >= 0.0 && t <= std::numbers::pi)) throw DomainError("EigenphaseSpectrum: phase outside [0, pi]");
    std::sort(phases_.begin(), phases_.end());
}

SpecialOrthogonalMatrix sample_so2n(int n_pairs, Rng& rng) {
    if (n_pairs < 1) throw DomainError("sample_so2n: N must be >= 1");
    const int dim = 2 * n_pairs;
    std::normal_distribution<double> normal;
    Eigen::MatrixXd g(dim, dim);
    for (int j = 0; j < dim; ++j)
        for (int i = 0; i < dim; ++i) g(i, j) = normal(rng);

    // Haar on O(2N): Q from QR with the columns re-signed so diag(R) > 0.
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    const Eigen::MatrixXd& r = qr.matrixQR();
    for (int j = 0; j < dim; ++j)
        if (r(j, j) < 0.0) q.col(j) *= -1.0;
    // Coset flip onto SO(2N).
    if (q.determinant() < 0.0) q.col(dim - 1) *= -1.0;
    return SpecialOrthogonalMatrix(std::move(q));
}

SpecialOrthogonalMatrix sample_so2n(int n_pairs, std::uint64_t seed) {
    Rng rng(mix_seed(seed, 0));
    return sample_so2n(n_pairs, rng);
}

EigenphaseSpectrum eigenphases(const SpecialOrthogonalMatrix& a) {
    const int dim = a.dimension();
    Eigen::EigenSolver<Eigen::MatrixXd> solver(a.entries(), /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) throw IntegrityError("eigenphases: eigensolver failed");
    std::vector<double> all(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) {
        const auto lambda = solver.eigenvalues()[i];
        all[i] = std::abs(std::atan2(lambda.imag(), lambda.real()));
    }
    std::sort(all.begin(), all.end());
    // Each phase occurs twice (e^{+i theta}, e^{-i theta}); eigenvalues +-1
    // have even multiplicity in SO(2N).
    std::vector<double> phases(static_cast<std::size_t>(dim / 2));
    for (std::size_t k = 0; k < phases.size(); ++k) {
        double t = 0.5 * (all[2 * k] + all[2 * k + 1]);
        if (t < kPhaseSnap) t = 0.0;
        if (std::numbers::pi - t < kPhaseSnap) t = std::numbers::pi;
        phases[k] = t;
    }
    return EigenphaseSpectrum(std::move(phases));
}

double log_char_poly_at_1(const EigenphaseSpectrum& spectrum) {
    double sum = spectrum.n_pairs() * std::numbers::ln2;
    for (double t : spectrum.phases()) {
        if (t == 0.0) return -std::numeric_limits<double>::infinity();
        // 1 - cos t = 2 sin^2(t/2)
        const double s = std::sin(0.5 * t);
        sum += std::log(2.0 * s * s);
    }
    return sum;
}

EigenphaseSpectrum sample_spectrum(int n_pairs, Rng& rng) { return eigenphases(sample_so2n(n_pairs, rng)); }

}  // namespace excised::haar
