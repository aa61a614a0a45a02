#include "numerics.hpp"

#include <cmath>
#include <cstdint>

#include "errors.hpp"

namespace specgap {

namespace {

double simpson_fixed(const std::function<double(double)>& f, double lo,
                     double hi, std::size_t panels,
                     std::vector<double>& cache) {
    // cache holds f at the 2*panels+1 equispaced points; reused on doubling
    // (every second point of the refined grid is an old point).
    std::size_t points = 2 * panels + 1;
    double h = (hi - lo) / static_cast<double>(points - 1);
    std::vector<double> vals(points);
    if (cache.empty()) {
        for (std::size_t i = 0; i < points; ++i)
            vals[i] = f(lo + h * static_cast<double>(i));
    } else {
        for (std::size_t i = 0; i < points; ++i) {
            if (i % 2 == 0)
                vals[i] = cache[i / 2];
            else
                vals[i] = f(lo + h * static_cast<double>(i));
        }
    }
    KahanSum s;
    for (std::size_t p = 0; p < panels; ++p) {
        s.add(vals[2 * p] + 4.0 * vals[2 * p + 1] + vals[2 * p + 2]);
    }
    cache = std::move(vals);
    return s.value() * h / 3.0;
}

} // namespace

double integrate_simpson(const std::function<double(double)>& f, double lo,
                         double hi, double abs_tol, std::size_t initial_panels,
                         std::size_t max_panels) {
    if (hi <= lo) return 0.0;
    std::size_t panels = initial_panels < 2 ? 2 : initial_panels;
    std::vector<double> cache;
    double prev = simpson_fixed(f, lo, hi, panels, cache);
    while (true) {
        panels *= 2;
        if (panels > max_panels)
            throw NumericError("integrate_simpson: panel cap reached before "
                               "meeting tolerance");
        double cur = simpson_fixed(f, lo, hi, panels, cache);
        if (std::abs(cur - prev) <= 15.0 * abs_tol) return cur;
        prev = cur;
    }
}

QuadratureRule gauss_legendre(std::size_t n, double lo, double hi) {
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    double mid = 0.5 * (lo + hi);
    double half = 0.5 * (hi - lo);
    std::size_t m = (n + 1) / 2;
    for (std::size_t i = 0; i < m; ++i) {
        // Chebyshev-based initial guess, then Newton on P_n.
        double x = std::cos(M_PI * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(n) + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * static_cast<double>(j) + 1.0) * x * p1 -
                      static_cast<double>(j) * p2) /
                     (static_cast<double>(j) + 1.0);
            }
            pp = static_cast<double>(n) * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.nodes[i] = mid - half * x;
        rule.nodes[n - 1 - i] = mid + half * x;
        rule.weights[i] = half * w;
        rule.weights[n - 1 - i] = half * w;
    }
    return rule;
}

} // namespace specgap
