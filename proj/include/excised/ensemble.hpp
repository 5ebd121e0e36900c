#pragma once

// The excised ensemble T_X by rejection sampling, and empirical statistics
// over streams of spectra.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "excised/haar.hpp"

namespace excised::ensemble {

using haar::EigenphaseSpectrum;

struct ExcisionSpec {
    int n_pairs = 1;
    double log_cutoff = 0.0;  // X; -inf means no excision

    /// Throws DomainError unless n_pairs >= 1 and X < 2N log 2.
    void validate() const;
};

struct SampleOptions {
    int workers = 1;
    double min_acceptance = 1e-6;
    std::int64_t probe_draws = 100000;
};

struct SampleSummary {
    std::int64_t total_drawn = 0;
    std::int64_t accepted = 0;
    double acceptance_rate = 0.0;
    double mean_first_phase = 0.0;
};

/// Called once per accepted spectrum, in draw order, with its log Lambda.
using SpectrumSink = std::function<void(const EigenphaseSpectrum&, double)>;

/// Draws Haar matrices until `count` satisfy log Lambda >= X. Draws are
/// split into fixed-size blocks with their own seeds, so the output does
/// not depend on options.workers. Throws DomainError if the acceptance
/// rate over the first probe_draws draws is below min_acceptance.
SampleSummary sample_excised(const ExcisionSpec& spec, std::int64_t count, std::uint64_t seed, const SpectrumSink& sink,
                             const SampleOptions& options = {});

struct SampleResult {
    std::vector<EigenphaseSpectrum> spectra;
    SampleSummary summary;
};

SampleResult sample_excised(const ExcisionSpec& spec, std::int64_t count, std::uint64_t seed,
                            const SampleOptions& options = {});

/// Unexcised Haar spectra: `count` draws, every one accepted.
SampleSummary draw_haar_spectra(int n_pairs, std::int64_t count, std::uint64_t seed, const SpectrumSink& sink,
                                const SampleOptions& options = {});

enum class HistogramMode { counts, pdf, cdf };

/// Binned samples. Samples are multiplied by scale_factor before binning.
/// In pdf mode the bin values integrate to `mass` (1 for a probability
/// density, N for a one-level density); cdf mode gives the cumulative
/// fraction at each right edge.
class Histogram {
public:
    Histogram(std::vector<double> edges, double scale_factor = 1.0, double mass = 1.0,
              HistogramMode mode = HistogramMode::pdf);

    void add(double raw_value);
    /// Adds the bin counts of another histogram with identical binning.
    void merge(const Histogram& other);

    std::span<const double> edges() const { return edges_; }
    std::span<const std::uint64_t> counts() const { return counts_; }
    std::size_t bins() const { return counts_.size(); }
    std::uint64_t total() const { return total_; }
    std::uint64_t outside() const { return outside_; }
    double scale_factor() const { return scale_factor_; }
    double mass() const { return mass_; }
    HistogramMode mode() const { return mode_; }
    void set_mode(HistogramMode mode) { mode_ = mode; }

    /// Bin values in the current mode.
    std::vector<double> values() const;
    /// Piecewise-linear CDF through the bin edges (0 left, 1 right).
    double cdf_at(double x) const;

    void write_csv(std::ostream& out) const;

private:
    std::vector<double> edges_;
    std::vector<std::uint64_t> counts_;
    std::uint64_t total_ = 0;
    std::uint64_t outside_ = 0;
    double scale_factor_;
    double mass_;
    HistogramMode mode_;
};

std::vector<double> uniform_edges(double lo, double hi, int bins);

/// Histogram of scale * min(phases) in pdf mode. Default edges: 100 bins
/// on [0, pi*scale].
Histogram first_eigenvalue_distribution(std::span<const EigenphaseSpectrum> stream,
                                        std::optional<std::vector<double>> edges = std::nullopt, double scale = 1.0);

/// Histogram of all phases of all spectra, pdf mode, integrating to N.
Histogram empirical_one_level_density(std::span<const EigenphaseSpectrum> stream,
                                      std::optional<std::vector<double>> edges = std::nullopt, double scale = 1.0);

/// Histogram of a plain list of values (e.g. first zeros loaded from CSV).
Histogram histogram_of(std::span<const double> values, std::vector<double> edges, double scale = 1.0);

/// Mean of |CDF_a - CDF_b| over the grid. Default grid: 64 evenly spaced
/// points across the support of `a`. Throws DomainError if the supports are
/// disjoint.
double cdf_distance(const Histogram& a, const Histogram& b, std::optional<std::vector<double>> grid = std::nullopt);

inline constexpr int kDefaultBins = 100;
inline constexpr int kDefaultDistanceGrid = 64;

}  // namespace excised::ensemble
