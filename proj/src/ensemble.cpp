#include "excised/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>
#include <thread>

#include "excised/errors.hpp"
#include "excised/io.hpp"

namespace excised::ensemble {

namespace {

constexpr std::int64_t kBlockSize = 1024;

struct Accepted {
    std::int64_t draw;  // index within the block
    EigenphaseSpectrum spectrum;
    double log_lambda;
};

std::vector<Accepted> run_block(const ExcisionSpec& spec, std::uint64_t seed, std::int64_t block) {
    haar::Rng rng(haar::mix_seed(seed, static_cast<std::uint64_t>(block)));
    std::vector<Accepted> out;
    for (std::int64_t i = 0; i < kBlockSize; ++i) {
        auto spectrum = haar::sample_spectrum(spec.n_pairs, rng);
        const double ll = haar::log_char_poly_at_1(spectrum);
        if (ll >= spec.log_cutoff) out.push_back({i, std::move(spectrum), ll});
    }
    return out;
}

}  // namespace

void ExcisionSpec::validate() const {
    if (n_pairs < 1) throw DomainError("ExcisionSpec: N must be >= 1");
    if (std::isnan(log_cutoff) || !(log_cutoff < 2.0 * n_pairs * std::numbers::ln2))
        throw DomainError("ExcisionSpec: log cutoff must be below 2N log 2, the ensemble is empty");
}

SampleSummary sample_excised(const ExcisionSpec& spec, std::int64_t count, std::uint64_t seed, const SpectrumSink& sink,
                             const SampleOptions& options) {
    spec.validate();
    if (count < 1) throw DomainError("sample_excised: count must be >= 1");
    const int workers = std::max(1, options.workers);

    SampleSummary summary;
    double first_phase_sum = 0.0;
    std::int64_t probe_accepted = 0;
    bool probed = false;
    std::int64_t next_block = 0;
    std::vector<std::vector<Accepted>> round(static_cast<std::size_t>(workers));

    while (summary.accepted < count) {
        if (workers == 1) {
            round[0] = run_block(spec, seed, next_block);
        } else {
            std::vector<std::jthread> pool;
            for (int w = 0; w < workers; ++w)
                pool.emplace_back([&, w] { round[w] = run_block(spec, seed, next_block + w); });
        }
        for (int w = 0; w < workers && summary.accepted < count; ++w) {
            const std::int64_t base = (next_block + w) * kBlockSize;
            for (const auto& a : round[w]) {
                if (summary.accepted == count) break;
                const std::int64_t global = base + a.draw;
                if (global < options.probe_draws) ++probe_accepted;
                ++summary.accepted;
                summary.total_drawn = global + 1;
                first_phase_sum += a.spectrum.min_phase();
                sink(a.spectrum, a.log_lambda);
            }
            if (summary.accepted < count) summary.total_drawn = base + kBlockSize;
            if (!probed && summary.total_drawn >= options.probe_draws) {
                probed = true;
                const double rate = double(probe_accepted) / double(options.probe_draws);
                if (rate < options.min_acceptance)
                    throw DomainError("sample_excised: acceptance rate " + io::format_double(rate) +
                                      " over the first " + std::to_string(options.probe_draws) +
                                      " draws is below the floor " + io::format_double(options.min_acceptance));
            }
        }
        next_block += workers;
    }
    summary.acceptance_rate = double(summary.accepted) / double(summary.total_drawn);
    summary.mean_first_phase = first_phase_sum / double(summary.accepted);
    return summary;
}

SampleResult sample_excised(const ExcisionSpec& spec, std::int64_t count, std::uint64_t seed,
                            const SampleOptions& options) {
    SampleResult result;
    result.spectra.reserve(static_cast<std::size_t>(std::max<std::int64_t>(count, 0)));
    result.summary = sample_excised(
        spec, count, seed, [&](const EigenphaseSpectrum& s, double) { result.spectra.push_back(s); }, options);
    return result;
}

SampleSummary draw_haar_spectra(int n_pairs, std::int64_t count, std::uint64_t seed, const SpectrumSink& sink,
                                const SampleOptions& options) {
    const ExcisionSpec spec{n_pairs, -std::numeric_limits<double>::infinity()};
    return sample_excised(spec, count, seed, sink, options);
}

Histogram::Histogram(std::vector<double> edges, double scale_factor, double mass, HistogramMode mode)
    : edges_(std::move(edges)), scale_factor_(scale_factor), mass_(mass), mode_(mode) {
    if (edges_.size() < 2) throw DomainError("Histogram: need at least one bin");
    for (std::size_t i = 1; i < edges_.size(); ++i)
        if (!(edges_[i] > edges_[i - 1])) throw DomainError("Histogram: edges must be strictly ascending");
    if (!(scale_factor_ > 0.0)) throw DomainError("Histogram: scale factor must be positive");
    counts_.assign(edges_.size() - 1, 0);
}

void Histogram::add(double raw_value) {
    const double v = raw_value * scale_factor_;
    if (!(v >= edges_.front() && v <= edges_.back())) {
        ++outside_;
        return;
    }
    auto it = std::upper_bound(edges_.begin(), edges_.end(), v);
    std::size_t bin = static_cast<std::size_t>(it - edges_.begin());
    bin = bin == 0 ? 0 : std::min(bin - 1, counts_.size() - 1);
    ++counts_[bin];
    ++total_;
}

void Histogram::merge(const Histogram& other) {
    if (other.edges_ != edges_ || other.scale_factor_ != scale_factor_)
        throw DomainError("Histogram::merge: binning differs");
    for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
    total_ += other.total_;
    outside_ += other.outside_;
}

std::vector<double> Histogram::values() const {
    std::vector<double> v(counts_.size());
    switch (mode_) {
        case HistogramMode::counts:
            for (std::size_t i = 0; i < v.size(); ++i) v[i] = double(counts_[i]);
            break;
        case HistogramMode::pdf:
            if (total_ == 0) throw DomainError("Histogram: no samples in range");
            for (std::size_t i = 0; i < v.size(); ++i)
                v[i] = mass_ * double(counts_[i]) / (double(total_) * (edges_[i + 1] - edges_[i]));
            break;
        case HistogramMode::cdf: {
            if (total_ == 0) throw DomainError("Histogram: no samples in range");
            std::uint64_t run = 0;
            for (std::size_t i = 0; i < v.size(); ++i) {
                run += counts_[i];
                v[i] = double(run) / double(total_);
            }
            break;
        }
    }
    return v;
}

double Histogram::cdf_at(double x) const {
    if (total_ == 0) throw DomainError("Histogram: no samples in range");
    if (x <= edges_.front()) return 0.0;
    if (x >= edges_.back()) return 1.0;
    const auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
    const std::size_t bin = static_cast<std::size_t>(it - edges_.begin()) - 1;
    std::uint64_t below = 0;
    for (std::size_t i = 0; i < bin; ++i) below += counts_[i];
    const double frac = (x - edges_[bin]) / (edges_[bin + 1] - edges_[bin]);
    return (double(below) + frac * double(counts_[bin])) / double(total_);
}

void Histogram::write_csv(std::ostream& out) const {
    const auto v = values();
    std::vector<std::vector<double>> rows;
    rows.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) rows.push_back({edges_[i], edges_[i + 1], v[i]});
    io::write_csv(out, {"bin_left", "bin_right", "value"}, rows);
}

std::vector<double> uniform_edges(double lo, double hi, int bins) {
    if (bins < 1 || !(hi > lo)) throw DomainError("uniform_edges: need bins >= 1 and hi > lo");
    std::vector<double> e(static_cast<std::size_t>(bins) + 1);
    for (int i = 0; i <= bins; ++i) e[i] = lo + (hi - lo) * i / bins;
    e.back() = hi;
    return e;
}

Histogram first_eigenvalue_distribution(std::span<const EigenphaseSpectrum> stream,
                                        std::optional<std::vector<double>> edges, double scale) {
    if (stream.empty()) throw DomainError("first_eigenvalue_distribution: empty stream");
    Histogram h(edges ? std::move(*edges) : uniform_edges(0.0, std::numbers::pi * scale, kDefaultBins), scale, 1.0);
    for (const auto& s : stream) h.add(s.min_phase());
    return h;
}

Histogram empirical_one_level_density(std::span<const EigenphaseSpectrum> stream,
                                      std::optional<std::vector<double>> edges, double scale) {
    if (stream.empty()) throw DomainError("empirical_one_level_density: empty stream");
    Histogram h(edges ? std::move(*edges) : uniform_edges(0.0, std::numbers::pi * scale, kDefaultBins), scale,
                double(stream.front().n_pairs()));
    for (const auto& s : stream)
        for (double t : s.phases()) h.add(t);
    return h;
}

Histogram histogram_of(std::span<const double> values, std::vector<double> edges, double scale) {
    if (values.empty()) throw DomainError("histogram_of: no values");
    Histogram h(std::move(edges), scale, 1.0);
    for (double v : values) h.add(v);
    return h;
}

double cdf_distance(const Histogram& a, const Histogram& b, std::optional<std::vector<double>> grid) {
    const auto ea = a.edges();
    const auto eb = b.edges();
    if (ea.back() < eb.front() || eb.back() < ea.front())
        throw DomainError("cdf_distance: histogram supports are disjoint");
    const std::vector<double> points =
        grid ? std::move(*grid) : uniform_edges(ea.front(), ea.back(), kDefaultDistanceGrid - 1);
    if (points.empty()) throw DomainError("cdf_distance: empty grid");
    double sum = 0.0;
    for (double x : points) sum += std::abs(a.cdf_at(x) - b.cdf_at(x));
    return sum / double(points.size());
}

}  // namespace excised::ensemble
