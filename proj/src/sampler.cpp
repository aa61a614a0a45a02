#include "sampler.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include <boost/math/distributions/beta.hpp>

#include "errors.hpp"
#include "numerics.hpp"
#include "rng.hpp"

namespace specgap {

namespace {
constexpr double kZ95 = 1.959963984540054; // two-sided 95% normal quantile
}

double McEstimate::stderr_est() const {
    return (ci_hi - ci_lo) / (2.0 * kZ95);
}

McEstimate clopper_pearson(std::uint64_t successes, std::uint64_t trials) {
    if (trials == 0) throw ValidationError("trials must be > 0");
    if (successes > trials)
        throw ValidationError("successes exceed trials");
    McEstimate e;
    e.successes = successes;
    e.trials = trials;
    e.p_hat = static_cast<double>(successes) / static_cast<double>(trials);
    double n = static_cast<double>(trials);
    double s = static_cast<double>(successes);
    const double alpha = 0.05;
    if (successes == 0) {
        e.ci_lo = 0.0;
    } else {
        boost::math::beta_distribution<double> lo(s, n - s + 1.0);
        e.ci_lo = boost::math::quantile(lo, alpha / 2.0);
    }
    if (successes == trials) {
        e.ci_hi = 1.0;
    } else {
        boost::math::beta_distribution<double> hi(s + 1.0, n - s);
        e.ci_hi = boost::math::quantile(hi, 1.0 - alpha / 2.0);
    }
    return e;
}

double orthant_probability(double rho) {
    if (!(std::abs(rho) <= 1.0))
        throw ValidationError("orthant_probability: |rho| must be <= 1");
    return 0.25 + std::asin(rho) / kTwoPi;
}

SamplingModel::SamplingModel(const SpectralMeasure& mu,
                             std::size_t nodes_per_piece) {
    for (const auto& a : mu.atoms()) {
        freqs_.push_back(a.freq);
        amps_.push_back(a.freq == 0.0 ? std::sqrt(a.mass)
                                      : std::sqrt(2.0 * a.mass));
    }
    for (const auto& p : mu.pieces()) {
        if (p.height == 0.0) continue;
        QuadratureRule rule = gauss_legendre(nodes_per_piece, p.lo, p.hi);
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            freqs_.push_back(rule.nodes[i]);
            amps_.push_back(std::sqrt(2.0 * p.height * rule.weights[i]));
        }
    }
    if (freqs_.empty())
        throw ValidationError("cannot sample from an empty measure");
}

double SamplingModel::covariance(double x) const {
    KahanSum s;
    for (std::size_t i = 0; i < freqs_.size(); ++i)
        s.add(amps_[i] * amps_[i] * std::cos(kTwoPi * freqs_[i] * x));
    return s.value();
}

double SamplingModel::max_covariance_error(
    const SpectralMeasure& mu, const std::vector<double>& lags) const {
    double err = 0.0;
    for (double x : lags)
        err = std::max(err, std::abs(covariance(x) - mu.covariance(x)));
    return err;
}

PathEvaluator::PathEvaluator(const SamplingModel& model,
                             std::vector<double> points)
    : model_(model), points_(std::move(points)) {
    if (points_.empty())
        throw ValidationError("PathEvaluator needs at least one point");
    std::size_t nc = model_.component_count();
    std::size_t np = points_.size();
    if (nc * np > (std::size_t{1} << 25))
        throw ValidationError(
            "evaluation table too large (components x grid points > 2^25); "
            "coarsen the grid");
    cos_.resize(nc * np);
    sin_.resize(nc * np);
    for (std::size_t i = 0; i < nc; ++i) {
        double f = model_.freqs()[i];
        for (std::size_t j = 0; j < np; ++j) {
            double ang = kTwoPi * f * points_[j];
            cos_[i * np + j] = std::cos(ang);
            sin_[i * np + j] = std::sin(ang);
        }
    }
}

void PathEvaluator::sample(std::uint64_t seed, std::vector<double>& out) const {
    std::size_t np = points_.size();
    out.assign(np, 0.0);
    SplitMix64 rng(seed);
    const auto& amps = model_.amps();
    for (std::size_t i = 0; i < model_.component_count(); ++i) {
        double xi, eta;
        rng.normal_pair(xi, eta);
        double cxi = amps[i] * xi;
        double ceta = amps[i] * eta;
        const double* c = cos_.data() + i * np;
        const double* s = sin_.data() + i * np;
        for (std::size_t j = 0; j < np; ++j) out[j] += cxi * c[j] + ceta * s[j];
    }
}

int resolve_threads(int threads) {
    if (threads > 0) return std::min(threads, 64);
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(std::min(hw, 16u));
}

namespace {

// Runs fn(trial_index, scratch) over [0, trials) on nthreads workers with
// contiguous ranges. fn returns how many of the per-L events succeeded via
// the counts vector; integer counts are summed across workers, so the result
// does not depend on the partition.
template <typename Fn>
std::vector<std::uint64_t> run_counting(std::uint64_t trials, int nthreads,
                                        std::size_t n_counters, Fn fn) {
    nthreads = std::max(1, nthreads);
    std::vector<std::vector<std::uint64_t>> partial(
        nthreads, std::vector<std::uint64_t>(n_counters, 0));
    auto worker = [&](int t) {
        std::uint64_t lo = trials * static_cast<std::uint64_t>(t) /
                           static_cast<std::uint64_t>(nthreads);
        std::uint64_t hi = trials * static_cast<std::uint64_t>(t + 1) /
                           static_cast<std::uint64_t>(nthreads);
        std::vector<double> scratch;
        for (std::uint64_t j = lo; j < hi; ++j)
            fn(j, scratch, partial[static_cast<std::size_t>(t)]);
    };
    if (nthreads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nthreads);
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker, t);
        for (auto& th : pool) th.join();
    }
    std::vector<std::uint64_t> total(n_counters, 0);
    for (const auto& part : partial)
        for (std::size_t i = 0; i < n_counters; ++i) total[i] += part[i];
    return total;
}

std::vector<double> uniform_grid(double x0, double step, std::uint64_t count) {
    std::vector<double> pts(count);
    for (std::uint64_t j = 0; j < count; ++j)
        pts[j] = x0 + step * static_cast<double>(j);
    return pts;
}

} // namespace

SamplePath sample_path(const SpectralMeasure& mu, double x0, double step,
                       std::uint64_t count, std::uint64_t seed) {
    if (count == 0) throw ValidationError("sample_path: count must be > 0");
    if (count > (std::uint64_t{1} << 26))
        throw ValidationError("sample_path: more than 2^26 grid points");
    if (step <= 0.0) throw ValidationError("sample_path: step must be > 0");
    SamplingModel model(mu);
    PathEvaluator eval(model, uniform_grid(x0, step, count));
    SamplePath path;
    path.x0 = x0;
    path.step = step;
    path.seed_tag = seed;
    eval.sample(stream_seed(seed, 0), path.values);
    return path;
}

bool persistence_indicator(const SamplePath& path) {
    return std::all_of(path.values.begin(), path.values.end(),
                       [](double v) { return v >= 0.0; });
}

McEstimate mc_persistence(const SpectralMeasure& mu, double L, double step,
                          std::uint64_t trials, std::uint64_t master_seed,
                          int threads) {
    return mc_sweep(mu, {L}, step, trials, master_seed, threads).front();
}

std::vector<McEstimate> mc_sweep(const SpectralMeasure& mu,
                                 const std::vector<double>& L_values,
                                 double step, std::uint64_t trials,
                                 std::uint64_t master_seed, int threads) {
    if (trials == 0) throw ValidationError("trials must be > 0");
    if (step <= 0.0) throw ValidationError("step must be > 0");
    if (L_values.empty()) throw ValidationError("need at least one L value");
    double L_max = 0.0;
    for (double L : L_values) {
        if (L < 0.0) throw ValidationError("L must be >= 0");
        L_max = std::max(L_max, L);
    }
    if (L_max > 0.0 && step > L_max * (1.0 + 1e-12))
        throw ValidationError("step must not exceed L");
    // index of the last grid point <= L (tolerating representation fuzz)
    auto last_index = [&](double L) {
        return static_cast<std::uint64_t>(std::floor(L / step + 1e-9));
    };
    std::uint64_t count = last_index(L_max) + 1;
    if (count > (std::uint64_t{1} << 26))
        throw ValidationError("grid too fine: more than 2^26 points");
    std::vector<std::uint64_t> cut(L_values.size());
    for (std::size_t i = 0; i < L_values.size(); ++i)
        cut[i] = last_index(L_values[i]);

    SamplingModel model(mu);
    PathEvaluator eval(model, uniform_grid(0.0, step, count));
    int nthreads = resolve_threads(threads);
    auto counts = run_counting(
        trials, nthreads, L_values.size(),
        [&](std::uint64_t j, std::vector<double>& scratch,
            std::vector<std::uint64_t>& local) {
            eval.sample(stream_seed(master_seed, j), scratch);
            std::uint64_t first_neg = count;
            for (std::uint64_t i = 0; i < count; ++i) {
                if (scratch[i] < 0.0) {
                    first_neg = i;
                    break;
                }
            }
            for (std::size_t i = 0; i < cut.size(); ++i)
                if (first_neg > cut[i]) ++local[i];
        });
    std::vector<McEstimate> out;
    out.reserve(L_values.size());
    for (std::size_t i = 0; i < L_values.size(); ++i)
        out.push_back(clopper_pearson(counts[i], trials));
    return out;
}

McEstimate mc_certificate_event(const SpectralMeasure& mu_unit,
                          const std::vector<double>& nu_positions,
                          const std::vector<double>& nu_weights,
                          const ShiftFunction& phi, double threshold,
                          std::uint64_t trials, std::uint64_t master_seed,
                          int threads) {
    if (trials == 0) throw ValidationError("trials must be > 0");
    if (nu_positions.size() != nu_weights.size() || nu_positions.empty())
        throw ValidationError("nu needs matching nonempty positions/weights");
    if (phi.support.size() != phi.values.size())
        throw ValidationError("shift function support/values mismatch");
    if (phi.support.size() != nu_positions.size())
        throw ValidationError("shift function support must equal supp nu");
    for (std::size_t i = 0; i < nu_positions.size(); ++i)
        if (std::abs(phi.support[i] - nu_positions[i]) > 1e-9)
            throw ValidationError("shift function support must equal supp nu");

    SamplingModel model(mu_unit);
    PathEvaluator eval(model, nu_positions);
    int nthreads = resolve_threads(threads);
    std::size_t np = nu_positions.size();
    auto counts = run_counting(
        trials, nthreads, 1,
        [&](std::uint64_t j, std::vector<double>& scratch,
            std::vector<std::uint64_t>& local) {
            eval.sample(stream_seed(master_seed, j), scratch);
            bool nonneg = true;
            KahanSum integral;
            for (std::size_t i = 0; i < np; ++i) {
                double v = scratch[i] + phi.values[i];
                if (v < 0.0) {
                    nonneg = false;
                    break;
                }
                integral.add(nu_weights[i] * v);
            }
            if (nonneg && integral.value() <= threshold) ++local[0];
        });
    return clopper_pearson(counts[0], trials);
}

} // namespace specgap
