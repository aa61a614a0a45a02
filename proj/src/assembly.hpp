#pragma once

#include <string>
#include <vector>

#include "certificate.hpp"
#include "spectral_measure.hpp"

namespace specgap {

struct BandPlanEntry {
    int k = 0;       // band index, a = 2^k * delta
    double a = 0.0;  // band scale
    int n = 0;       // n_a = floor(c_pp * 2^{k/2} * delta * L)
    double mass = 0.0;
};

struct BandPlan {
    double delta = 0.0;
    double L = 0.0;
    double c_pp = 0.0;
    bool discrete = false;
    std::vector<BandPlanEntry> entries; // nonempty bands only
    // bands whose n_a fell below n0; nonempty means the certificate
    // machinery does not apply at this L and only the trivial 1/2 holds
    std::vector<int> below_n0;

    bool certifiable() const { return below_n0.empty(); }
};

struct ConditionReport {
    double cond1_sum = 0.0; // sum n_a / a, must be <= L
    bool cond1_ok = false;
    double cond2_sum = 0.0; // sum e^{-c n_a}, must be <= 1
    bool cond2_ok = false;
    double cond3_rhs = 0.0; // c_pp * delta * L
    int min_n = 0;
    bool cond3_ok = false;
};

struct AssembledBound {
    BandPlan plan;
    std::vector<Certificate> certificates; // rescaled to their bands
    AtomicMeasure nu_total;
    double energy_sum = 0.0; // sum e^{-3 c n_a} sigma_a
    bool all_sigma_zero = false;
    int argmax_k = -1; // band maximizing e^{-2 c n_a} sigma_a
    double sigma_alpha = 0.0;
    int n_alpha = 0;
    int N_alpha = 0;
    double tail_term = 0.0;  // exp(-e^{2 c n_alpha} / 8)
    double event_term = 0.0; // 2 (n_alpha e^{-c n_alpha})^{N_alpha + 1}
    double tail_log10 = 0.0;
    double event_log10 = 0.0;
    double total_bound_raw = 0.0; // tail + event (0 when all sigma vanish)
    double total_bound = 0.0;     // min(raw, 1/2)
    ConditionReport conditions;

    std::string to_json() const;
};

// Dyadic band plan: bands (a/4, a/2], a = 2^k delta, k >= 2, keeping only
// bands that carry mass. With discrete set, bands are restricted to a <= 1
// (delta must be a negative power of 2 and the support must fit in [0, 1/2])
// so every nu_a lives on the integers.
BandPlan plan_bands(const SpectralMeasure& mu, double delta, double L,
                    double c_pp, bool discrete = false);

// Atomic convolution of unit-mass measures; positions within 1e-12 merge.
AtomicMeasure convolve(const std::vector<AtomicMeasure>& measures);

AssembledBound assemble(const SpectralMeasure& mu, double delta, double L,
                        double c_pp, bool discrete = false,
                        int n0 = kDefaultN0);

// assemble when the plan is certifiable, otherwise the trivial bound 1/2
// with the diagnostic plan attached.
AssembledBound certified_upper_bound(const SpectralMeasure& mu, double delta,
                                     double L, double c_pp,
                                     bool discrete = false,
                                     int n0 = kDefaultN0);

inline constexpr double kDefaultCpp = 0.5; // sum_{k>=2} c'' 2^{-k/2} < 1

} // namespace specgap
