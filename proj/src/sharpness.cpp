#include "sharpness.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "errors.hpp"
#include "numerics.hpp"

namespace specgap {

namespace {
constexpr double kFourPi = 2.0 * kTwoPi;
}

SpectralMeasure example_measure(int n_max) {
    if (n_max < 3)
        throw ValidationError("example_measure: n_max must be >= 3 (the n-th "
                              "bound needs generation n+1)");
    std::vector<Atom> atoms;
    for (int n = 2; n <= n_max; ++n) {
        double mass = 1.0 / (static_cast<double>(n) * std::exp2(n));
        for (int k = 1; k <= n; ++k) {
            double freq = static_cast<double>(n + k) /
                          (kFourPi * static_cast<double>(n));
            atoms.push_back({freq, mass});
        }
    }
    return SpectralMeasure(std::move(atoms), {});
}

LagrangeReport verify_lagrange_bound(int n, int n_max) {
    if (n < 0) throw ValidationError("verify_lagrange_bound: n must be >= 0");
    if (n > 8)
        throw ValidationError("verify_lagrange_bound: n is gated at 8 "
                              "(Hankel conditioning)");
    if (n >= 1 && n_max < n + 1)
        throw ValidationError("verify_lagrange_bound: need n_max >= n + 1");
    SpectralMeasure mu = example_measure(n_max);
    double mass = mu.total_mass();

    LagrangeReport rep;
    rep.n = n;
    rep.n_max = n_max;
    if (n == 0) {
        // degenerate slice: P = 1 is the only candidate
        RhoValue rv = rho(mu, 0);
        rep.rho2 = rv.rho2;
        rep.rho_n = std::sqrt(rv.rho2);
        rep.required = 0.0;
        rep.chain_ok = true;
        rep.pass = std::abs(rv.rho2 - mass) <= 1e-12 * mass;
        return rep;
    }

    RhoValue rv = rho(mu, n);
    rep.rho2 = rv.rho2;
    rep.rho_n = std::sqrt(std::max(rv.rho2, 0.0));
    rep.required = std::pow(10.0, -3.0 * n);

    // generation n+1 nodes x_k = (n+1+k)/(4 pi (n+1)), k = 1..n+1
    int g = n + 1;
    std::vector<double> nodes(static_cast<std::size_t>(g));
    for (int k = 1; k <= g; ++k)
        nodes[static_cast<std::size_t>(k - 1)] =
            static_cast<double>(g + k) / (kFourPi * static_cast<double>(g));

    auto eval_p = [&](double y) {
        double acc = 0.0;
        for (std::size_t i = rv.minimizer_moments.size(); i-- > 0;)
            acc = (acc + rv.minimizer_moments[i]) * y;
        return 1.0 + acc;
    };

    // Lagrange weights for reconstructing P(0) from the nodes, and the
    // factorial bound (2n+2)!/((k-1)!(n+1-k)!(n+1)!) they must respect
    std::vector<double> fact(2 * static_cast<std::size_t>(g) + 1, 1.0);
    for (std::size_t i = 1; i < fact.size(); ++i)
        fact[i] = fact[i - 1] * static_cast<double>(i);
    KahanSum identity;
    KahanSum chain;
    KahanSum node_abs;
    double weight_margin = std::numeric_limits<double>::infinity();
    double factor_small = 0.0; // 3^{2n+1} (2n+2)
    {
        double p3 = std::pow(3.0, 2 * n + 1);
        factor_small = p3 * static_cast<double>(2 * n + 2);
    }
    for (int k = 1; k <= g; ++k) {
        double w = 1.0;
        for (int j = 1; j <= g; ++j) {
            if (j == k) continue;
            w *= (0.0 - nodes[static_cast<std::size_t>(j - 1)]) /
                 (nodes[static_cast<std::size_t>(k - 1)] -
                  nodes[static_cast<std::size_t>(j - 1)]);
        }
        double pv = eval_p(nodes[static_cast<std::size_t>(k - 1)]);
        identity.add(w * pv);
        chain.add(std::abs(w) * std::abs(pv));
        node_abs.add(std::abs(pv));
        double bound = fact[static_cast<std::size_t>(2 * g)] /
                       (fact[static_cast<std::size_t>(k - 1)] *
                        fact[static_cast<std::size_t>(g - k)] *
                        fact[static_cast<std::size_t>(g)]);
        weight_margin = std::min(weight_margin, bound - std::abs(w));
        if (bound > factor_small * (1.0 + 1e-12))
            weight_margin = -1.0; // factorial bound must sit under 3^{2n+1}(2n+2)
    }
    rep.identity_residual = std::abs(identity.value() - 1.0);
    rep.chain_sum = chain.value();
    rep.weight_bound_margin = weight_margin;
    rep.combinatorial_factor =
        std::pow(3.0, 2 * n + 1) * std::exp2(n + 2) *
        static_cast<double>((n + 1) * (n + 1));

    // integral |P| d mu and the direct integral |P|^2 d mu over all atoms
    KahanSum l1;
    KahanSum l2;
    for (const auto& a : mu.atoms()) {
        double plus = eval_p(a.freq);
        double minus = eval_p(-a.freq);
        l1.add(a.mass * (std::abs(plus) + std::abs(minus)));
        l2.add(a.mass * (plus * plus + minus * minus));
    }
    rep.l1_integral = l1.value();
    double direct_rho2 = l2.value();

    double gen_mass = 1.0 / (static_cast<double>(g) * std::exp2(g));
    bool s1 = rep.chain_sum >= 1.0 - 1e-9;
    bool s2 = weight_margin >= -1e-9;
    bool s3 = node_abs.value() * gen_mass <= rep.l1_integral * (1.0 + 1e-9);
    bool s4 = rep.l1_integral <=
              std::sqrt(mass) * std::sqrt(direct_rho2) * (1.0 + 1e-9);
    bool s5 = rep.combinatorial_factor <= std::pow(10.0, 3.0 * n);
    bool ident = rep.identity_residual <=
                 1e-8 * std::max(1.0, rep.chain_sum);
    // the Hankel route and the direct route must agree on the energy
    bool consistent =
        std::abs(direct_rho2 - rv.rho2) <=
        1e-2 * std::max({direct_rho2, rv.rho2, 1e-280});
    rep.chain_ok = s1 && s2 && s3 && s4 && s5 && ident && consistent;
    rep.pass = rep.chain_ok && rep.rho_n >= rep.required;
    return rep;
}

std::string LagrangeReport::to_json() const {
    nlohmann::json j;
    j["n"] = n;
    j["n_max"] = n_max;
    j["rho2"] = rho2;
    j["rho_n"] = rho_n;
    j["required"] = required;
    j["identity_residual"] = identity_residual;
    j["chain_sum"] = chain_sum;
    j["weight_bound_margin"] = weight_bound_margin;
    j["combinatorial_factor"] = combinatorial_factor;
    j["l1_integral"] = l1_integral;
    j["chain_ok"] = chain_ok;
    j["pass"] = pass;
    return j.dump();
}

LowerBoundTrace lower_bound(double C, double L, double R) {
    if (!(C > 0.0)) throw ValidationError("lower_bound: C must be > 0");
    if (!(R > 0.0)) throw ValidationError("lower_bound: R must be > 0");
    if (!(L >= 1.0))
        throw ValidationError("lower_bound: the construction is stated for "
                              "L >= 1; refusing smaller L");
    LowerBoundTrace t;
    t.C = C;
    t.R = R;
    t.L = L;
    t.L_norm = kTwoPi * R * L; // normalizes the support radius to 1/(2 pi)
    t.p0 = std::erfc(1.0 / std::sqrt(2.0)); // 2 (1 - Phi(1)) = P{|g| > 1}
    t.C_tilde = C + 7.0 + 1.0 / t.p0;

    double k_floor = std::max(
        {1.0, t.L_norm, 2.0 * std::exp(2.0 * t.C_tilde + 1.0) * t.L_norm,
         std::exp(C + 2.0 * t.C_tilde + 2.0) * t.L_norm});
    t.K = std::ceil(k_floor);
    if (!std::isfinite(t.K))
        throw ValidationError("lower_bound: C or L too large, the smallest "
                              "admissible K overflows");

    const double ln10 = std::log(10.0);
    t.a_log10 = -C * t.K / ln10; // a = e^{-C K} stands in for rho_K
    t.alpha_log10 = t.a_log10 + std::log10(0.5) - t.L_norm / ln10;

    // sum_{k>K} e^{-a_k^2/2} with a_k = sqrt(2 (C~ K^2 + k)) equals
    // e^{-C~ K^2} * sum_{k>K} e^{-k}; the ratio is the geometric tail
    t.tail_ratio = std::exp(-t.K) / (1.0 - std::exp(-1.0));

    double log_main = -t.C_tilde * t.K * t.K; // natural log of e^{-C~ K^2}
    // bound = 1/2 * (e^{-C~K^2} - tail) = 1/2 e^{-C~K^2} (1 - ratio)
    double one_minus_ratio = 1.0 - t.tail_ratio;
    if (one_minus_ratio <= 0.0)
        throw NumericError("lower_bound: geometric tail swallowed the bound");
    t.log10_bound =
        std::log10(0.5) + log_main / ln10 + std::log10(one_minus_ratio);
    t.bound = std::exp(ln10 * t.log10_bound); // underflows to 0 by design
    return t;
}

std::string LowerBoundTrace::to_json() const {
    nlohmann::json j;
    j["C"] = C;
    j["R"] = R;
    j["L"] = L;
    j["L_norm"] = L_norm;
    j["p0"] = p0;
    j["C_tilde"] = C_tilde;
    j["K"] = K;
    // a = e^{-C K} and alpha = (a/2) e^{-L} underflow for every admissible
    // K; the log10 fields carry the values
    j["a"] = std::exp(std::log(10.0) * a_log10);
    j["alpha"] = std::exp(std::log(10.0) * alpha_log10);
    j["a_log10"] = a_log10;
    j["alpha_log10"] = alpha_log10;
    j["tail_ratio"] = tail_ratio;
    j["bound"] = bound;
    j["log10_bound"] = log10_bound;
    return j.dump();
}

} // namespace specgap
