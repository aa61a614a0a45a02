#pragma once

#include <complex>
#include <string>
#include <vector>

#include "polynomial.hpp"
#include "spectral_measure.hpp"
#include "toeplitz.hpp"

namespace specgap {

// Finite nonnegative atomic measure with unit mass; positions distinct,
// sorted ascending.
struct AtomicMeasure {
    std::vector<double> positions;
    std::vector<double> weights;

    static AtomicMeasure from_atoms(std::vector<double> positions,
                                    std::vector<double> weights);
    double max_position() const;
};

struct SemicircleReport {
    double max_violation = 0.0; // max over samples of |Q| - 6^N 2^{-m/2} |P|
    std::size_t samples = 0;
    bool pass = false;
};

// Per-band proof object emitted by the constructive pipeline.
struct Certificate {
    int n = 0;
    int N = 0; // floor(n / 23)
    int m = 0; // 8 N
    double c = 0.0; // ln 2 / 100
    double sigma2 = 0.0;
    double sigma = 0.0;
    bool sigma_exact_zero = false; // structural rank deficiency
    AtomicMeasure nu;        // positions {0..deg Q} scaled by 1/a after rescale
    Polynomial q;            // nonnegative coefficients summing to 1
    Polynomial minimizer;    // the unit-coefficient-norm Toeplitz minimizer
    double lead_factor = 0.0; // |a| of the factorization, >= 2^{-N}
    double energy = 0.0;       // integral |Q|^2 d mu (direct route)
    double energy_bound = 0.0; // 2^{-2N} sigma^2
    double threshold = 0.0;    // e^{-c n} sigma
    double prob_bound_raw = 0.0; // (n e^{-c n})^{N+1}; 0 when sigma = 0
    double prob_bound = 0.0;     // min(1, raw)
    int flat_lo = 0;
    int flat_hi = 0;
    double flat_value = 0.0; // 1/(m + 4N + 1)
    double flat_max_dev = 0.0;
    double scale = 1.0; // band scale a applied to nu positions
    SemicircleReport semicircle;

    std::string to_json() const;
};

// P_{L,simple}(z) = ((1+z)/2)^L.
Polynomial build_simple(int L);

// P_{L,universal}(z) = (1 + z + ... + z^{2L'})/(2L'+1) * P_{L',simple}(z),
// L' = floor(L/3); has L'+1 flat middle coefficients equal to 1/(2L'+1).
Polynomial build_universal(int L);

// All roots with multiplicity via Aberth-Ehrlich simultaneous iteration.
std::vector<std::complex<double>> find_roots(const Polynomial& p);

// Distance from a point to the left unit semicircle {|z| = 1, Re z <= 0}.
double dist_to_left_semicircle(std::complex<double> z);

// Low-degree replacement with nonnegative coefficients summing to 1:
// constant 1 when the root is far from the left semicircle, otherwise the
// cubic U through a convex combination of {1, z, z^2, z^3} vanishing at the
// root (reflected as z^3 U(1/z) for roots given as reciprocals).
Polynomial replace_factor(std::complex<double> root, bool inside);

Polynomial build_p_tilde(const std::vector<std::complex<double>>& roots,
                         const std::vector<bool>& inside);

// Q(z) = (1+z+...+z^{m+4N})/(m+4N+1) * ((1+z)/2)^m * p_tilde(z).
Polynomial build_q(const Polynomial& p_tilde, int N, int m);

SemicircleReport verify_semicircle_bound(const Polynomial& q,
                                         const Polynomial& p, int N, int m,
                                         std::size_t samples);

inline constexpr int kDefaultN0 = 72;
inline constexpr double kCertificateC = 0.006931471805599453; // ln 2 / 100

Certificate certify_band(const SpectralMeasure& mu_unit, int n,
                         int n0 = kDefaultN0);

Certificate rescale_certificate(const Certificate& cert, double a);

} // namespace specgap
