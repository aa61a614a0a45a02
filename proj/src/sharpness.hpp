#pragma once

#include <string>

#include "spectral_measure.hpp"
#include "toeplitz.hpp"

namespace specgap {

// Discrete gap measure whose positive part is
//   sum_{n=2}^{n_max} (1/(n 2^n)) sum_{k=1}^{n} delta_{(n+k)/(4 pi n)},
// supported in (1/(4 pi), 1/(2 pi)].
SpectralMeasure example_measure(int n_max);

struct LagrangeReport {
    int n = 0;
    int n_max = 0;
    double rho2 = 0.0;
    double rho_n = 0.0;
    double required = 0.0; // 10^{-3n}
    // numeric re-derivation of the interpolation chain on the
    // generation-(n+1) atoms
    double identity_residual = 0.0; // |sum w_k P(x_k) - 1|
    double chain_sum = 0.0;         // sum |w_k| |P(x_k)|, must be >= 1
    double weight_bound_margin = 0.0; // min over k of bound_k - |w_k|
    double combinatorial_factor = 0.0; // 3^{2n+1} 2^{n+2} (n+1)^2
    double l1_integral = 0.0;          // integral |P| d mu
    bool chain_ok = false;
    bool pass = false;

    std::string to_json() const;
};

// Checks rho_n >= 10^{-3n} on example_measure(n_max) and re-derives the
// Lagrange interpolation chain numerically. Gated at n <= 8 for Hankel
// conditioning.
LagrangeReport verify_lagrange_bound(int n, int n_max);

struct LowerBoundTrace {
    double C = 0.0;
    double R = 0.0;
    double L = 0.0;
    double L_norm = 0.0;  // 2 pi R L, the frame with R = 1/(2 pi)
    double p0 = 0.0;      // P{|g| > 1}
    double C_tilde = 0.0; // C + 7 + 1/p0
    double K = 0.0;       // smallest admissible integer (stored as double)
    double a_log10 = 0.0;     // log10 of a = e^{-C K}
    double alpha_log10 = 0.0; // log10 of alpha = (a/2) e^{-L_norm}
    double tail_ratio = 0.0;  // sum_{k>K} e^{-k}, must be <= 1/2
    double bound = 0.0;       // underflows to 0 at every admissible K
    double log10_bound = 0.0; // the meaningful representation

    std::string to_json() const;
};

// Sharpness lower bound for a measure supported in [-R, R] satisfying
// rho_n >= e^{-C n} sqrt(mass). The magnitudes are far below double range by
// construction, so log10_bound carries the value.
LowerBoundTrace lower_bound(double C, double L, double R);

} // namespace specgap
