#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spectral_measure.hpp"

namespace specgap {

struct SamplePath {
    double x0 = 0.0;
    double step = 1.0;
    std::vector<double> values; // values[j] = f(x0 + j*step)
    std::uint64_t seed_tag = 0;
};

struct McEstimate {
    std::uint64_t successes = 0;
    std::uint64_t trials = 0;
    double p_hat = 0.0;
    double ci_lo = 0.0; // 95% Clopper-Pearson
    double ci_hi = 1.0;

    // Width-derived standard error, positive even at 0 successes.
    double stderr_est() const;
};

struct ShiftFunction {
    std::vector<double> support;
    std::vector<double> values;
};

McEstimate clopper_pearson(std::uint64_t successes, std::uint64_t trials);

// P{g1 >= 0, g2 >= 0} for standard bivariate normals with correlation rho.
double orthant_probability(double rho);

// Spectral measure reduced to a pure atom list for exact-in-distribution
// sampling: density pieces are replaced by Gauss-Legendre node atoms.
class SamplingModel {
public:
    explicit SamplingModel(const SpectralMeasure& mu,
                           std::size_t nodes_per_piece = 64);

    std::size_t component_count() const { return freqs_.size(); }
    // covariance of the discretized measure (equals the input's for atomic mu)
    double covariance(double x) const;
    // max |discretized covariance - exact covariance| over the given lags
    double max_covariance_error(const SpectralMeasure& mu,
                                const std::vector<double>& lags) const;

    const std::vector<double>& freqs() const { return freqs_; }
    const std::vector<double>& amps() const { return amps_; }

private:
    std::vector<double> freqs_;
    std::vector<double> amps_; // sqrt(2 * mass); freq-0 atoms use sqrt(mass)
};

// Trial-independent cos/sin tables for evaluating one realization of f at a
// fixed point set. sample() is a pure function of the stream seed.
class PathEvaluator {
public:
    PathEvaluator(const SamplingModel& model, std::vector<double> points);

    std::size_t point_count() const { return points_.size(); }
    const std::vector<double>& points() const { return points_; }

    void sample(std::uint64_t seed, std::vector<double>& out) const;

private:
    const SamplingModel& model_;
    std::vector<double> points_;
    std::vector<double> cos_, sin_; // component-major, point_count per row
};

SamplePath sample_path(const SpectralMeasure& mu, double x0, double step,
                       std::uint64_t count, std::uint64_t seed);

bool persistence_indicator(const SamplePath& path);

// Grid points 0, step, ..., floor(L/step)*step. The grid event contains the
// continuous one, so the estimate upper-approximates continuous persistence.
McEstimate mc_persistence(const SpectralMeasure& mu, double L, double step,
                          std::uint64_t trials, std::uint64_t master_seed,
                          int threads = 0);

// Common-random-numbers sweep: every trial reuses one path on the longest
// grid, so estimates are monotone in L by construction.
std::vector<McEstimate> mc_sweep(const SpectralMeasure& mu,
                                 const std::vector<double>& L_values,
                                 double step, std::uint64_t trials,
                                 std::uint64_t master_seed, int threads = 0);

// Frequency of {f + phi >= 0 on supp nu, integral of (f+phi) d nu <= threshold}
// for nu given as (positions, weights).
McEstimate mc_certificate_event(const SpectralMeasure& mu_unit,
                          const std::vector<double>& nu_positions,
                          const std::vector<double>& nu_weights,
                          const ShiftFunction& phi, double threshold,
                          std::uint64_t trials, std::uint64_t master_seed,
                          int threads = 0);

int resolve_threads(int threads);

} // namespace specgap
