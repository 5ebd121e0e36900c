#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <ostream>
#include <stdexcept>

#include "excised/analytic.hpp"
#include "excised/curve_model.hpp"
#include "excised/ensemble.hpp"
#include "excised/errors.hpp"
#include "excised/haar.hpp"
#include "excised/io.hpp"

namespace excised::cli {

namespace {

using json = nlohmann::ordered_json;
constexpr double kPi = std::numbers::pi;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    std::uint64_t seed = 1;
    int workers = 1;
    std::string out = "-";
    std::string summary;
};

struct Cutoff {
    std::optional<double> linear;
    std::optional<double> log;

    // the log form wins when both are given
    std::optional<double> resolve() const {
        if (log) return *log;
        if (linear) {
            if (!(*linear > 0.0)) throw DomainError("--cutoff must be positive");
            return std::log(*linear);
        }
        return std::nullopt;
    }
};

// Either the caller's stream ("-") or a file that must open.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : path_(path) {
        if (path == "-") {
            stream_ = &fallback;
        } else {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_) throw IoError("cannot write " + path);
            stream_ = file_.get();
        }
    }
    std::ostream& operator*() { return *stream_; }
    void finish() {
        stream_->flush();
        if (!*stream_) throw IoError("write failed: " + path_);
    }

private:
    std::string path_;
    std::unique_ptr<std::ofstream> file_;
    std::ostream* stream_ = nullptr;
};

void add_common(CLI::App* app, Common& c, bool sampling) {
    if (sampling) {
        app->add_option("--seed", c.seed, "RNG seed")->capture_default_str();
        app->add_option("--workers", c.workers, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
    }
    app->add_option("--out", c.out, "output file, - for stdout")->capture_default_str();
    app->add_option("--summary", c.summary, "JSON summary file");
}

void add_cutoff(CLI::App* app, Cutoff& c) {
    app->add_option("--cutoff", c.linear, "cutoff on Lambda_A(1, N)");
    app->add_option("--cutoff-log", c.log, "natural-log cutoff X (wins over --cutoff)");
}

json header(const std::string& command, const Common& c, bool seeded) {
    json j;
    j["command"] = command;
    j["version"] = io::kVersion;
    if (seeded) j["seed"] = c.seed;
    return j;
}

json number(double x) {
    if (std::isfinite(x)) return x;
    if (std::isnan(x)) return nullptr;
    return x > 0 ? "inf" : "-inf";
}

// JSON goes to --summary if given; otherwise to `out` when the CSV went to
// a file.
void emit_summary(const json& j, const Common& c, std::ostream& out) {
    const std::string text = j.dump(2) + "\n";
    if (!c.summary.empty()) {
        Sink s(c.summary, out);
        *s << text;
        s.finish();
    } else if (c.out != "-") {
        out << text;
    }
}

void emit_json(const json& j, const Common& c, std::ostream& out) {
    Sink s(c.out, out);
    *s << j.dump(2) << "\n";
    s.finish();
}

bool mean_density_scale(const std::string& scale) {
    if (scale == "radians") return false;
    if (scale == "mean-density") return true;
    throw DomainError("unknown --scale " + scale);
}

// bin_left,bin_right,value, plus the same in units of the mean spacing
// (theta N / pi) when requested
void write_histogram(std::ostream& os, const ensemble::Histogram& h, const std::string& value_name, bool scaled, int n,
                     bool density) {
    std::vector<std::string> cols = {"bin_left", "bin_right", value_name};
    if (scaled) {
        cols.insert(cols.end(), {"scaled_left", "scaled_right", "scaled_" + value_name});
    }
    const auto edges = h.edges();
    const auto vals = h.values();
    const double k = n / kPi;
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < vals.size(); ++i) {
        std::vector<double> row = {edges[i], edges[i + 1], vals[i]};
        if (scaled) row.insert(row.end(), {edges[i] * k, edges[i + 1] * k, density ? vals[i] / k : vals[i]});
        rows.push_back(std::move(row));
    }
    io::write_csv(os, cols, rows);
}

struct SampleArgs {
    int n = 0;
    std::int64_t count = 0;
    int bins = ensemble::kDefaultBins;
    std::string scale = "radians";
    std::string spectra;
    std::string mode = "pdf";
    Cutoff cutoff;
};

json sampling_summary(const std::string& command, const Common& c, const SampleArgs& a, double x,
                      const ensemble::SampleSummary& s, double min_phase, std::int64_t below_gap) {
    json j = header(command, c, true);
    j["parameters"] = {{"n", a.n},       {"count", a.count}, {"log_cutoff", number(x)},
                       {"bins", a.bins}, {"scale", a.scale}, {"workers", c.workers}};
    if (command == "first-eigenvalue") j["parameters"]["mode"] = a.mode;
    j["total_drawn"] = s.total_drawn;
    j["accepted"] = s.accepted;
    j["acceptance_rate"] = s.acceptance_rate;
    const double p = s.acceptance_rate;
    j["acceptance_stderr"] = s.total_drawn > 0 ? std::sqrt(p * (1 - p) / static_cast<double>(s.total_drawn)) : 0.0;
    j["mean_first_phase"] = s.mean_first_phase;
    j["min_phase"] = number(min_phase);
    if (std::isfinite(x)) {
        const analytic::ExcisedDensity dens(a.n, x);
        j["theta_inf"] = dens.gap_edge();
        j["phases_below_theta_inf"] = below_gap;
        j["normalization_ratio"] = dens.ratio();
    }
    return j;
}

int run_sampling(const std::string& command, const Common& c, const SampleArgs& a, std::ostream& out) {
    const double x = a.cutoff.resolve().value_or(-std::numeric_limits<double>::infinity());
    const ensemble::ExcisionSpec spec{a.n, x};
    spec.validate();
    if (a.count < 1) throw DomainError("--count must be >= 1");
    if (a.bins < 1) throw DomainError("--bins must be >= 1");
    const bool scaled = mean_density_scale(a.scale);
    const bool first = command == "first-eigenvalue";
    ensemble::HistogramMode mode = ensemble::HistogramMode::pdf;
    if (first && a.mode == "cdf") {
        mode = ensemble::HistogramMode::cdf;
    } else if (first && a.mode != "pdf") {
        throw DomainError("unknown --mode " + a.mode);
    }
    ensemble::Histogram hist(ensemble::uniform_edges(0.0, kPi, a.bins), 1.0, first ? 1.0 : a.n, mode);

    std::unique_ptr<Sink> raw;
    if (!a.spectra.empty()) {
        raw = std::make_unique<Sink>(a.spectra, out);
        std::vector<std::string> cols;
        for (int i = 1; i <= a.n; ++i) cols.push_back("theta_" + std::to_string(i));
        cols.push_back("log_lambda");
        io::write_csv(**raw, cols, {});
    }
    const double edge = std::isfinite(x) ? analytic::theta_inf(a.n, x) : 0.0;
    double min_phase = std::numeric_limits<double>::infinity();
    std::int64_t below = 0;
    auto sink = [&](const haar::EigenphaseSpectrum& s, double log_lambda) {
        if (first) {
            hist.add(s.min_phase());
        } else {
            for (double t : s.phases()) hist.add(t);
        }
        min_phase = std::min(min_phase, s.min_phase());
        for (double t : s.phases()) below += t < edge;
        if (raw) {
            std::vector<double> row(s.phases().begin(), s.phases().end());
            row.push_back(log_lambda);
            for (std::size_t i = 0; i < row.size(); ++i) **raw << (i ? "," : "") << io::format_double(row[i]);
            **raw << "\n";
        }
    };
    ensemble::SampleOptions opts;
    opts.workers = c.workers;
    const auto summary = ensemble::sample_excised(spec, a.count, c.seed, sink, opts);
    if (raw) raw->finish();

    Sink csv(c.out, out);
    write_histogram(*csv, hist, first ? (mode == ensemble::HistogramMode::cdf ? "cdf" : "pdf") : "density", scaled, a.n,
                    mode == ensemble::HistogramMode::pdf);
    csv.finish();
    emit_summary(sampling_summary(command, c, a, x, summary, min_phase, below), c, out);
    return 0;
}

struct DensityArgs {
    int n = 0;
    int grid = 200;
    int poles = 10;
    std::string method = "auto";
    std::string scale = "radians";
    Cutoff cutoff;
};

int run_density(const Common& c, const DensityArgs& a, std::ostream& out, std::ostream& err) {
    const auto x = a.cutoff.resolve();
    if (!x) throw UsageError("density needs --cutoff or --cutoff-log");
    const bool scaled = mean_density_scale(a.scale);
    const auto method = analytic::parse_density_method(a.method);
    const analytic::ExcisedDensity dens(a.n, *x, a.poles);
    const auto grid = analytic::density_grid(dens, analytic::theta_grid(a.grid), c.workers, method);

    Sink csv(c.out, out);
    std::vector<std::string> cols = {"theta", "r1"};
    if (scaled) cols.insert(cols.end(), {"scaled_theta", "scaled_r1"});
    std::vector<std::vector<double>> rows;
    const double k = a.n / kPi;
    for (std::size_t i = 0; i < grid.thetas.size(); ++i) {
        std::vector<double> row = {grid.thetas[i], grid.values[i]};
        if (scaled) row.insert(row.end(), {grid.thetas[i] * k, grid.values[i] / k});
        rows.push_back(std::move(row));
    }
    io::write_csv(*csv, cols, rows);
    csv.finish();

    if (grid.warning) err << "warning: residue series not reliable at some grid points\n";
    json j = header("density", c, false);
    j["parameters"] = {{"n", a.n},         {"log_cutoff", *x},   {"grid", a.grid},
                       {"poles", a.poles}, {"method", a.method}, {"scale", a.scale}};
    j["theta_inf"] = dens.gap_edge();
    j["normalization_ratio"] = dens.ratio();
    j["normalization_series"] = json::parse(dens.normalization().series.to_json());
    j["line_points"] = grid.line_points;
    j["warning"] = grid.warning;
    emit_summary(j, c, out);
    return 0;
}

struct MomentArgs {
    int n = 0;
    std::vector<double> s;
    std::int64_t mc_count = 0;
};

int run_moments(const Common& c, const MomentArgs& a, std::ostream& out) {
    if (a.n < 1) throw DomainError("--n must be >= 1");
    json j = header("moments", c, a.mc_count > 0);
    j["parameters"] = {{"n", a.n}, {"s", a.s}, {"mc_count", a.mc_count}};
    std::vector<double> sums(a.s.size(), 0.0), squares(a.s.size(), 0.0);
    if (a.mc_count > 0) {
        ensemble::SampleOptions opts;
        opts.workers = c.workers;
        ensemble::draw_haar_spectra(
            a.n, a.mc_count, c.seed,
            [&](const haar::EigenphaseSpectrum&, double log_lambda) {
                for (std::size_t i = 0; i < a.s.size(); ++i) {
                    const double v = std::exp(a.s[i] * log_lambda);
                    sums[i] += v;
                    squares[i] += v * v;
                }
            },
            opts);
    }
    json rows = json::array();
    for (std::size_t i = 0; i < a.s.size(); ++i) {
        json r = {{"s", a.s[i]}, {"exact", analytic::moments_so2n(a.n, a.s[i]).real()}};
        if (a.mc_count > 0) {
            const double m = static_cast<double>(a.mc_count);
            const double mean = sums[i] / m;
            r["monte_carlo"] = mean;
            r["stderr"] = std::sqrt(std::max(0.0, squares[i] / m - mean * mean) / m);
        }
        rows.push_back(r);
    }
    j["moments"] = rows;
    j["h_exact"] = analytic::h_exact(a.n);
    j["h_asymptotic"] = analytic::h_asymptotic(a.n);
    emit_json(j, c, out);
    return 0;
}

struct CutoffArgs {
    std::string config;
    std::optional<double> x;
    std::optional<double> observed;
};

int run_cutoff(const Common& c, const CutoffArgs& a, std::ostream& out) {
    const auto params = curve::load_config(a.config);
    const auto xb = a.x ? a.x : params.x_bound;
    if (!xb) throw UsageError("cutoff needs --x or X_bound in the config");
    const auto report = curve::cutoff_report(params, *xb);
    json j = header("cutoff", c, false);
    j["parameters"] = {{"config", a.config}, {"x", *xb}};
    j["report"] = json::parse(report.to_json());
    if (a.observed) {
        j["observed_constant"] = *a.observed;
        j["delta_from_observed"] = curve::delta_from_vanishing_constant(*a.observed);
    }
    j["vanishing_constant"] = curve::vanishing_constant(params.delta);
    emit_json(j, c, out);
    return 0;
}

struct ApArgs {
    std::string config;
    std::vector<std::int64_t> curve;
    std::int64_t conductor = 0;
    int omega = 1;
    std::int64_t p_max = 200;
    std::optional<double> s;
};

int run_ap_count(const Common& c, const ApArgs& a, std::ostream& out) {
    curve::Weierstrass w;
    std::int64_t conductor = a.conductor;
    int omega = a.omega;
    if (!a.config.empty()) {
        const auto params = curve::load_config(a.config);
        w = params.weierstrass;
        conductor = params.conductor_m;
        omega = params.sign_omega;
    } else if (a.curve.size() == 5) {
        std::copy(a.curve.begin(), a.curve.end(), w.c.begin());
    } else {
        throw UsageError("ap-count needs --config or --curve c1,c2,c3,c4,c6");
    }
    if (a.p_max < 2) throw DomainError("--p-max must be >= 2");
    const auto counts = curve::point_counts(w, a.p_max, c.workers);
    Sink csv(c.out, out);
    std::vector<std::vector<double>> rows;
    bool hasse = true;
    for (const auto& pc : counts) {
        rows.push_back({static_cast<double>(pc.p), static_cast<double>(pc.a_p), pc.lambda_p});
        hasse = hasse && std::abs(pc.lambda_p) <= 2.0;
    }
    io::write_csv(*csv, {"p", "a_p", "lambda_p"}, rows);
    csv.finish();

    json j = header("ap-count", c, false);
    j["parameters"] = {{"curve", w.c}, {"p_max", a.p_max}};
    j["primes"] = counts.size();
    j["hasse_bound_holds"] = hasse;
    if (a.s) {
        const auto e = curve::a_s_truncated(w, conductor, omega, *a.s, a.p_max, c.workers);
        j["euler_product"] = {
            {"s", *a.s},        {"conductor", conductor},         {"omega", omega},
            {"value", e.value}, {"decade_value", e.decade_value}, {"last_increment", e.last_increment}};
    }
    emit_summary(j, c, out);
    return 0;
}

struct CompareArgs {
    std::string a, b;
    int bins = ensemble::kDefaultBins;
    std::optional<double> lo, hi;
    std::optional<int> grid;
};

int run_compare(const Common& c, const CompareArgs& a, std::ostream& out) {
    const auto va = io::load_column_csv(a.a);
    const auto vb = io::load_column_csv(a.b);
    if (va.empty() || vb.empty()) throw DomainError("compare: empty input");
    const auto [amin, amax] = std::minmax_element(va.begin(), va.end());
    const auto [bmin, bmax] = std::minmax_element(vb.begin(), vb.end());
    const double lo = a.lo.value_or(std::min(*amin, *bmin));
    double hi = a.hi.value_or(std::max(*amax, *bmax));
    if (!a.hi && hi == lo) hi = lo + 1.0;
    if (!a.hi) hi = std::nextafter(hi, std::numeric_limits<double>::infinity());
    const auto edges = ensemble::uniform_edges(lo, hi, a.bins);
    const auto ha = ensemble::histogram_of(va, edges);
    const auto hb = ensemble::histogram_of(vb, edges);
    std::optional<std::vector<double>> grid;
    if (a.grid) {
        if (*a.grid < 2) throw DomainError("--grid must be >= 2");
        grid = ensemble::uniform_edges(lo, hi, *a.grid - 1);
    }
    json j = header("compare", c, false);
    j["parameters"] = {{"a", a.a}, {"b", a.b}, {"bins", a.bins}, {"lo", lo}, {"hi", hi}};
    j["count_a"] = va.size();
    j["count_b"] = vb.size();
    j["distance"] = ensemble::cdf_distance(ha, hb, grid);
    emit_json(j, c, out);
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Excised orthogonal ensemble: sampling, analytic densities and curve calibration", "excised"};
    app.require_subcommand(1);
    app.set_version_flag("--version", io::kVersion);

    Common common;
    SampleArgs sample_args, first_args;
    auto add_sampling = [&](CLI::App* sub, SampleArgs& a) {
        add_common(sub, common, true);
        add_cutoff(sub, a.cutoff);
        sub->add_option("--n", a.n, "matrix half-size N")->required()->check(CLI::PositiveNumber);
        sub->add_option("--count", a.count, "accepted samples")->required();
        sub->add_option("--bins", a.bins, "histogram bins")->capture_default_str();
        sub->add_option("--scale", a.scale, "radians or mean-density")
            ->capture_default_str()
            ->check(CLI::IsMember({"radians", "mean-density"}));
        sub->add_option("--spectra", a.spectra, "also write raw spectra CSV");
    };
    auto* sample = app.add_subcommand("sample", "one-level density histogram of the excised ensemble");
    add_sampling(sample, sample_args);
    auto* first = app.add_subcommand("first-eigenvalue", "distribution of the lowest eigenphase");
    add_sampling(first, first_args);
    first->add_option("--mode", first_args.mode, "pdf or cdf")
        ->capture_default_str()
        ->check(CLI::IsMember({"pdf", "cdf"}));

    DensityArgs density_args;
    auto* density = app.add_subcommand("density", "analytic excised one-level density on a grid");
    add_common(density, common, false);
    density->add_option("--workers", common.workers, "worker threads")->check(CLI::PositiveNumber);
    add_cutoff(density, density_args.cutoff);
    density->add_option("--n", density_args.n, "matrix half-size N")->required()->check(CLI::PositiveNumber);
    density->add_option("--grid", density_args.grid, "grid points on [0, pi]")->capture_default_str();
    density->add_option("--poles", density_args.poles, "half-integer poles K")->capture_default_str();
    density->add_option("--method", density_args.method, "residue, line or auto")
        ->capture_default_str()
        ->check(CLI::IsMember({"residue", "line", "auto"}));
    density->add_option("--scale", density_args.scale, "radians or mean-density")
        ->capture_default_str()
        ->check(CLI::IsMember({"radians", "mean-density"}));

    MomentArgs moment_args;
    auto* moments = app.add_subcommand("moments", "moments of Lambda_A(1, N) over SO(2N)");
    add_common(moments, common, true);
    moments->add_option("--n", moment_args.n, "matrix half-size N")->required();
    moments->add_option("--s", moment_args.s, "moment orders")->required();
    moments->add_option("--mc-count", moment_args.mc_count, "Monte Carlo draws")->capture_default_str();

    CutoffArgs cutoff_args;
    auto* cutoff = app.add_subcommand("cutoff", "matrix sizes and cutoff constants for a curve family");
    add_common(cutoff, common, false);
    cutoff->add_option("--config", cutoff_args.config, "curve config file")->required();
    cutoff->add_option("--x", cutoff_args.x, "discriminant bound X");
    cutoff->add_option("--observed", cutoff_args.observed, "observed vanishing constant, gives delta");

    ApArgs ap_args;
    auto* ap = app.add_subcommand("ap-count", "a_p by point counting, optionally the Euler product a_s");
    add_common(ap, common, true);
    auto* cfg = ap->add_option("--config", ap_args.config, "curve config file");
    ap->add_option("--curve", ap_args.curve, "c1,c2,c3,c4,c6")->delimiter(',')->excludes(cfg)->expected(5);
    ap->add_option("--conductor", ap_args.conductor, "prime conductor for --s")->excludes(cfg);
    ap->add_option("--omega", ap_args.omega, "root number for --s")->excludes(cfg);
    ap->add_option("--p-max", ap_args.p_max, "largest prime")->capture_default_str();
    ap->add_option("--s", ap_args.s, "evaluate a_s truncated at p-max");

    CompareArgs compare_args;
    auto* compare = app.add_subcommand("compare", "CDF distance between two one-column CSV samples");
    add_common(compare, common, false);
    compare->add_option("--a", compare_args.a, "first sample")->required();
    compare->add_option("--b", compare_args.b, "second sample")->required();
    compare->add_option("--bins", compare_args.bins, "histogram bins")->capture_default_str();
    compare->add_option("--lo", compare_args.lo, "histogram lower edge");
    compare->add_option("--hi", compare_args.hi, "histogram upper edge");
    compare->add_option("--grid", compare_args.grid, "distance grid points");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*sample) return run_sampling("sample", common, sample_args, out);
        if (*first) return run_sampling("first-eigenvalue", common, first_args, out);
        if (*density) return run_density(common, density_args, out, err);
        if (*moments) return run_moments(common, moment_args, out);
        if (*cutoff) return run_cutoff(common, cutoff_args, out);
        if (*ap) return run_ap_count(common, ap_args, out);
        if (*compare) return run_compare(common, compare_args, out);
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const IntegrityError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

}  // namespace excised::cli
