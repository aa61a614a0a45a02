#include "assembly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "errors.hpp"
#include "numerics.hpp"

namespace specgap {

BandPlan plan_bands(const SpectralMeasure& mu, double delta, double L,
                    double c_pp, bool discrete) {
    if (delta <= 0.0) throw ValidationError("plan_bands: delta must be > 0");
    if (L <= 0.0) throw ValidationError("plan_bands: L must be > 0");
    if (c_pp <= 0.0) throw ValidationError("plan_bands: c_pp must be > 0");
    if (mu.empty()) throw ValidationError("plan_bands: empty measure");
    if (mu.gap_radius() < delta)
        throw ValidationError(
            "plan_bands: delta exceeds gap_radius of the measure");
    if (discrete) {
        double l2 = std::log2(delta);
        if (std::abs(l2 - std::round(l2)) > 1e-12 || delta > 0.5)
            throw ValidationError("plan_bands: discrete mode needs delta a "
                                  "negative power of 2");
        if (mu.max_freq() > 0.5 + 1e-12)
            throw ValidationError("plan_bands: discrete mode needs support "
                                  "inside [-1/2, 1/2]");
    }

    BandPlan plan;
    plan.delta = delta;
    plan.L = L;
    plan.c_pp = c_pp;
    plan.discrete = discrete;
    double fmax = mu.max_freq();
    for (int k = 2;; ++k) {
        double a = std::ldexp(delta, k);
        if (a / 4.0 >= fmax) break;
        if (discrete && a > 1.0 + 1e-12) break;
        SpectralMeasure band = mu.dyadic_band(k, delta);
        if (band.empty()) continue;
        BandPlanEntry e;
        e.k = k;
        e.a = a;
        e.n = static_cast<int>(
            std::floor(c_pp * std::exp2(0.5 * k) * delta * L));
        e.mass = band.total_mass();
        if (e.n < kDefaultN0) plan.below_n0.push_back(k);
        plan.entries.push_back(e);
    }
    // mu = sum of bands must hold exactly; an atom exactly on the gap edge
    // would fall outside every half-open band
    KahanSum covered;
    for (const auto& e : plan.entries) covered.add(e.mass);
    double mass = mu.total_mass();
    if (std::abs(covered.value() - mass) > 1e-9 * mass)
        throw ValidationError(
            "plan_bands: dyadic bands do not cover the measure; if an atom "
            "sits exactly on the gap edge use delta strictly inside the gap "
            "(gap_radius * (1 - 1e-9))");
    return plan;
}

AtomicMeasure convolve(const std::vector<AtomicMeasure>& measures) {
    AtomicMeasure acc =
        AtomicMeasure::from_atoms({0.0}, {1.0}); // identity element
    for (const auto& m : measures) {
        if (acc.positions.size() * m.positions.size() > (std::size_t{1} << 27))
            throw NumericError(
                "convolve: intermediate atom count exceeds 2^27");
        std::vector<double> pos;
        std::vector<double> w;
        pos.reserve(acc.positions.size() * m.positions.size());
        w.reserve(pos.capacity());
        for (std::size_t i = 0; i < acc.positions.size(); ++i) {
            for (std::size_t j = 0; j < m.positions.size(); ++j) {
                pos.push_back(acc.positions[i] + m.positions[j]);
                w.push_back(acc.weights[i] * m.weights[j]);
            }
        }
        acc = AtomicMeasure::from_atoms(std::move(pos), std::move(w));
    }
    return acc;
}

AssembledBound assemble(const SpectralMeasure& mu, double delta, double L,
                        double c_pp, bool discrete, int n0) {
    AssembledBound out;
    out.plan = plan_bands(mu, delta, L, c_pp, discrete);
    if (!out.plan.certifiable())
        throw ValidationError(
            "assemble: some band has n_a below n0; L is too small for the "
            "certificate machinery (the trivial bound 1/2 applies)");

    const double c = kCertificateC;
    KahanSum energy_sum;
    KahanSum cond1;
    KahanSum cond2;
    double best_score = -1.0;
    bool any_nonzero_sigma = false;
    std::vector<AtomicMeasure> nus;
    for (const auto& e : out.plan.entries) {
        SpectralMeasure band = mu.dyadic_band(e.k, delta);
        SpectralMeasure unit = band.rescale_to_unit_band(e.a);
        Certificate cert = certify_band(unit, e.n, n0);
        cert = rescale_certificate(cert, e.a);
        energy_sum.add(std::exp(-3.0 * c * e.n) * cert.sigma);
        cond1.add(static_cast<double>(e.n) / e.a);
        cond2.add(std::exp(-c * e.n));
        if (!cert.sigma_exact_zero) any_nonzero_sigma = true;
        double score = std::exp(-2.0 * c * e.n) * cert.sigma;
        if (!cert.sigma_exact_zero && score > best_score) {
            best_score = score;
            out.argmax_k = e.k;
            out.sigma_alpha = cert.sigma;
            out.n_alpha = e.n;
            out.N_alpha = cert.N;
        }
        nus.push_back(cert.nu);
        out.certificates.push_back(std::move(cert));
    }
    out.nu_total = convolve(nus);
    out.energy_sum = energy_sum.value();

    out.conditions.cond1_sum = cond1.value();
    out.conditions.cond1_ok = out.conditions.cond1_sum <= L * (1.0 + 1e-12);
    out.conditions.cond2_sum = cond2.value();
    out.conditions.cond2_ok = out.conditions.cond2_sum <= 1.0 + 1e-12;
    out.conditions.cond3_rhs = c_pp * delta * L;
    int min_n = out.plan.entries.front().n;
    for (const auto& e : out.plan.entries) min_n = std::min(min_n, e.n);
    out.conditions.min_n = min_n;
    out.conditions.cond3_ok =
        static_cast<double>(min_n) >= out.conditions.cond3_rhs;

    out.all_sigma_zero = !any_nonzero_sigma;
    if (out.all_sigma_zero) {
        // every band is structurally singular: f can only be nonnegative on
        // supp nu by vanishing there, an event of probability 0
        out.tail_term = 0.0;
        out.event_term = 0.0;
        out.tail_log10 = -std::numeric_limits<double>::infinity();
        out.event_log10 = -std::numeric_limits<double>::infinity();
        out.total_bound_raw = 0.0;
        out.total_bound = 0.0;
        out.argmax_k = -1;
        return out;
    }

    double na = static_cast<double>(out.n_alpha);
    double tail_exponent = std::exp(2.0 * c * na) / 8.0; // e^{2 c n_a} / 8
    out.tail_term = std::exp(-tail_exponent);
    out.tail_log10 = -tail_exponent / std::log(10.0);
    double base = na * std::exp(-c * na);
    out.event_term = 2.0 * std::pow(base, out.N_alpha + 1);
    out.event_log10 = std::log10(2.0) +
                      static_cast<double>(out.N_alpha + 1) * std::log10(base);
    out.total_bound_raw = out.tail_term + out.event_term;
    out.total_bound = std::min(out.total_bound_raw, 0.5);
    return out;
}

AssembledBound certified_upper_bound(const SpectralMeasure& mu, double delta,
                                     double L, double c_pp, bool discrete,
                                     int n0) {
    BandPlan plan = plan_bands(mu, delta, L, c_pp, discrete);
    if (plan.certifiable()) return assemble(mu, delta, L, c_pp, discrete, n0);
    AssembledBound out;
    out.plan = std::move(plan);
    out.total_bound_raw = 0.5;
    out.total_bound = 0.5;
    return out;
}

std::string AssembledBound::to_json() const {
    nlohmann::json j;
    j["delta"] = plan.delta;
    j["L"] = plan.L;
    j["c_pp"] = plan.c_pp;
    j["discrete"] = plan.discrete;
    j["certifiable"] = plan.certifiable();
    j["bands_below_n0"] = plan.below_n0;
    j["bands"] = nlohmann::json::array();
    for (std::size_t i = 0; i < plan.entries.size(); ++i) {
        const auto& e = plan.entries[i];
        nlohmann::json b = {{"k", e.k}, {"a", e.a},     {"n", e.n},
                            {"mass", e.mass}};
        if (i < certificates.size()) {
            const auto& c = certificates[i];
            b["N"] = c.N;
            b["m"] = c.m;
            b["sigma"] = c.sigma;
            b["energy"] = c.energy;
            b["energy_bound"] = c.energy_bound;
            b["flat_ok"] = c.flat_max_dev <= 1e-12;
            b["semicircle_ok"] = c.semicircle.pass;
        }
        j["bands"].push_back(b);
    }
    j["conditions"] = {
        {"cond1", {{"sum_n_over_a", conditions.cond1_sum},
                   {"limit", plan.L},
                   {"ok", conditions.cond1_ok}}},
        {"cond2", {{"sum_exp", conditions.cond2_sum},
                   {"limit", 1.0},
                   {"ok", conditions.cond2_ok}}},
        {"cond3", {{"min_n", conditions.min_n},
                   {"rhs", conditions.cond3_rhs},
                   {"ok", conditions.cond3_ok}}},
    };
    if (!certificates.empty()) {
        j["energy_sum"] = energy_sum;
        j["all_sigma_zero"] = all_sigma_zero;
        j["argmax_band_k"] = argmax_k;
        j["sigma_alpha"] = sigma_alpha;
        j["n_alpha"] = n_alpha;
        j["tail_term"] = tail_term;
        j["event_term"] = event_term;
        j["tail_log10"] = tail_log10;
        j["event_log10"] = event_log10;
        j["nu_total"] = {{"positions", nu_total.positions},
                         {"weights", nu_total.weights}};
        j["nu_support_max"] = nu_total.max_position();
    }
    j["total_bound_raw"] = total_bound_raw;
    j["total_bound"] = total_bound;
    return j.dump();
}

} // namespace specgap
