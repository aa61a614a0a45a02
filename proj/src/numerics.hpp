#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace specgap {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Compensated (Kahan) accumulator for long sums of mixed magnitude.
class KahanSum {
public:
    void add(double x) {
        double y = x - comp_;
        double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Composite Simpson with panel doubling until the Richardson error estimate
// |S_2n - S_n|/15 falls below abs_tol. Throws NumericError if the panel cap
// is hit first.
double integrate_simpson(const std::function<double(double)>& f, double lo,
                         double hi, double abs_tol, std::size_t initial_panels,
                         std::size_t max_panels = (std::size_t{1} << 22));

struct QuadratureRule {
    std::vector<double> nodes;   // on [lo, hi]
    std::vector<double> weights; // sum to hi - lo
};

// Gauss-Legendre rule mapped to [lo, hi]; nodes via Newton iteration on P_n.
QuadratureRule gauss_legendre(std::size_t n, double lo, double hi);

} // namespace specgap
