#include "certificate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <json.hpp>

#include "errors.hpp"
#include "numerics.hpp"

namespace specgap {

using Complex = std::complex<double>;

AtomicMeasure AtomicMeasure::from_atoms(std::vector<double> positions,
                                        std::vector<double> weights) {
    if (positions.size() != weights.size())
        throw ValidationError("atomic measure: positions/weights mismatch");
    std::vector<std::size_t> order(positions.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return positions[a] < positions[b];
    });
    AtomicMeasure out;
    for (std::size_t idx : order) {
        double p = positions[idx];
        double w = weights[idx];
        if (w < 0.0)
            throw ValidationError("atomic measure: negative weight");
        if (w == 0.0) continue;
        // merge positions that coincide to working precision
        if (!out.positions.empty() &&
            std::abs(p - out.positions.back()) <=
                1e-12 * std::max(1.0, std::abs(p))) {
            out.weights.back() += w;
        } else {
            out.positions.push_back(p);
            out.weights.push_back(w);
        }
    }
    if (out.positions.empty())
        throw ValidationError("atomic measure: no mass");
    KahanSum s;
    for (double w : out.weights) s.add(w);
    double total = s.value();
    if (std::abs(total - 1.0) > 1e-9)
        throw ValidationError("atomic measure: mass must be 1");
    for (double& w : out.weights) w /= total;
    return out;
}

double AtomicMeasure::max_position() const {
    return positions.empty() ? 0.0 : positions.back();
}

Polynomial build_simple(int L) {
    if (L < 0) throw ValidationError("build_simple: L must be >= 0");
    // Pascal recurrence keeps every coefficient a correctly rounded binomial
    std::vector<double> c{1.0};
    for (int step = 0; step < L; ++step) {
        std::vector<double> next(c.size() + 1, 0.0);
        for (std::size_t i = 0; i < c.size(); ++i) {
            next[i] += 0.5 * c[i];
            next[i + 1] += 0.5 * c[i];
        }
        c = std::move(next);
    }
    return Polynomial(c);
}

Polynomial build_universal(int L) {
    if (L < 3) throw ValidationError("build_universal: L must be >= 3");
    int Lp = L / 3;
    return Polynomial::flat(static_cast<std::size_t>(2 * Lp + 1)) *
           build_simple(Lp);
}

namespace {

double max_coeff_abs(const std::vector<Complex>& c) {
    double m = 0.0;
    for (const auto& v : c) m = std::max(m, std::abs(v));
    return m;
}

} // namespace

std::vector<Complex> find_roots(const Polynomial& p_in) {
    // drop leading coefficients below the root-finder's resolution
    std::vector<Complex> c = p_in.coeffs();
    double cmax = max_coeff_abs(c);
    if (cmax == 0.0)
        throw ValidationError("find_roots: zero polynomial");
    std::size_t n = c.size();
    while (n > 1 && std::abs(c[n - 1]) <= 1e-12 * cmax) --n;
    c.resize(n);
    std::vector<Complex> roots;
    // exact zeros at the origin come from exactly-zero low coefficients
    std::size_t zlo = 0;
    while (zlo + 1 < c.size() && c[zlo] == Complex(0.0)) ++zlo;
    for (std::size_t i = 0; i < zlo; ++i) roots.emplace_back(0.0, 0.0);
    c.erase(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(zlo));

    std::size_t deg = c.size() - 1;
    if (deg == 0) return roots;

    Polynomial p(c);
    auto eval_pair = [&](Complex z, Complex& val, Complex& der) {
        val = Complex(0.0);
        der = Complex(0.0);
        for (std::size_t i = c.size(); i-- > 0;) {
            der = der * z + val;
            val = val * z + c[i];
        }
    };

    // initial guesses on a circle between the Cauchy-type radius bounds
    double hi = 0.0;
    for (std::size_t i = 0; i + 1 < c.size(); ++i)
        hi = std::max(hi, std::abs(c[i] / c.back()));
    hi += 1.0;
    double lo_acc = 0.0;
    for (std::size_t i = 1; i < c.size(); ++i)
        lo_acc = std::max(lo_acc, std::abs(c[i]));
    double lo = std::abs(c[0]) / (std::abs(c[0]) + lo_acc);
    double r0 = std::sqrt(std::max(lo, 1e-6) * hi);
    std::vector<Complex> z(deg);
    for (std::size_t i = 0; i < deg; ++i) {
        double ang = kTwoPi * (static_cast<double>(i) + 0.353) /
                     static_cast<double>(deg);
        z[i] = r0 * Complex(std::cos(ang), std::sin(ang));
    }

    double dmax = max_coeff_abs(c);
    auto residual_ok = [&](Complex zi) {
        double tol = 1e-9 * dmax * std::pow(1.0 + std::abs(zi),
                                            static_cast<double>(deg));
        return std::abs(p.eval(zi)) <= tol;
    };

    // iterate until the steps stall or every residual already passes; the
    // residual test after polishing is the actual acceptance gate
    const int max_iter = 1500;
    for (int iter = 0; iter < max_iter; ++iter) {
        double worst = 0.0;
        for (std::size_t i = 0; i < deg; ++i) {
            Complex val, der;
            eval_pair(z[i], val, der);
            if (val == Complex(0.0)) continue;
            Complex w;
            if (der == Complex(0.0)) {
                w = Complex(1e-8, 1e-8); // nudge off a critical point
            } else {
                w = val / der;
            }
            Complex rep(0.0);
            for (std::size_t j = 0; j < deg; ++j) {
                if (j == i) continue;
                Complex d = z[i] - z[j];
                if (std::abs(d) < 1e-300) d = Complex(1e-300, 0.0);
                rep += Complex(1.0) / d;
            }
            Complex denom = Complex(1.0) - w * rep;
            Complex delta = std::abs(denom) < 1e-300 ? w : w / denom;
            z[i] -= delta;
            worst = std::max(worst, std::abs(delta) / (1.0 + std::abs(z[i])));
        }
        if (worst < 1e-14) break;
        if (iter % 32 == 31) {
            bool all_ok = true;
            for (const auto& zi : z)
                if (!residual_ok(zi)) {
                    all_ok = false;
                    break;
                }
            if (all_ok) break;
        }
    }

    // polish with plain Newton where the derivative allows it
    for (auto& zi : z) {
        for (int k = 0; k < 3; ++k) {
            Complex val, der;
            eval_pair(zi, val, der);
            if (std::abs(der) < 1e-14 * cmax) break;
            zi -= val / der;
        }
    }

    for (const auto& zi : z) {
        if (!residual_ok(zi))
            throw NumericError("find_roots: residual check failed");
        roots.push_back(zi);
    }
    // coincident iterates must sit on a genuinely multiple root (small
    // derivative as well), otherwise some other root went uncovered
    for (std::size_t i = 0; i < z.size(); ++i) {
        for (std::size_t j = i + 1; j < z.size(); ++j) {
            if (std::abs(z[i] - z[j]) > 1e-7 * (1.0 + std::abs(z[i])))
                continue;
            Complex val, der;
            eval_pair(z[i], val, der);
            double dtol = 1e-5 * dmax * static_cast<double>(deg) *
                          std::pow(1.0 + std::abs(z[i]),
                                   static_cast<double>(deg - 1));
            if (std::abs(der) > dtol)
                throw NumericError(
                    "find_roots: spurious duplicate at a simple root");
        }
    }
    return roots;
}

double dist_to_left_semicircle(Complex z) {
    if (z.real() <= 0.0) return std::abs(std::abs(z) - 1.0);
    return std::min(std::abs(z - Complex(0.0, 1.0)),
                    std::abs(z + Complex(0.0, 1.0)));
}

namespace {

// barycentric coefficients for 0 inside the triangle (A, B, C); empty when
// the system is degenerate or the origin lies outside
std::vector<double> origin_in_triangle(Complex A, Complex B, Complex C) {
    double m00 = (B - A).real(), m01 = (C - A).real();
    double m10 = (B - A).imag(), m11 = (C - A).imag();
    double det = m00 * m11 - m01 * m10;
    double scale = std::max({std::abs(A), std::abs(B), std::abs(C), 1e-30});
    if (std::abs(det) < 1e-12 * scale * scale) return {};
    double b1 = (-A.real() * m11 + A.imag() * m01) / det;
    double b2 = (A.real() * m10 - A.imag() * m00) / det;
    double b0 = 1.0 - b1 - b2;
    const double tol = 1e-12;
    if (b0 < -tol || b1 < -tol || b2 < -tol) return {};
    return {std::max(b0, 0.0), std::max(b1, 0.0), std::max(b2, 0.0)};
}

// 0 on the segment [A, B] within tolerance -> (1-t, t), else empty
std::vector<double> origin_on_segment(Complex A, Complex B) {
    Complex d = B - A;
    double len2 = std::norm(d);
    if (len2 < 1e-30) return {};
    double t = -(A.real() * d.real() + A.imag() * d.imag()) / len2;
    if (t < -1e-12 || t > 1.0 + 1e-12) return {};
    t = std::clamp(t, 0.0, 1.0);
    Complex residue = A + t * d;
    double scale = std::max({std::abs(A), std::abs(B), 1e-30});
    if (std::abs(residue) > 1e-12 * scale) return {};
    return {1.0 - t, t};
}

} // namespace

Polynomial replace_factor(Complex root, bool inside) {
    if (std::abs(root) > 1.0 + 1e-9)
        throw ValidationError("replace_factor: root must lie in the closed "
                              "unit disk (reflect outside roots first)");
    if (dist_to_left_semicircle(root) >= 0.5) return Polynomial::one();

    // 0 lies in the convex hull of {1, z, z^2, z^3}; scan the four triangles
    // in index order (ties to the lowest), falling back to edges when a
    // triangle degenerates (e.g. z = -1 makes the powers collinear).
    Complex pts[4] = {Complex(1.0), root, root * root, root * root * root};
    static const int tri[4][3] = {
        {0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
    double alpha[4] = {0.0, 0.0, 0.0, 0.0};
    bool found = false;
    for (const auto& t : tri) {
        auto b = origin_in_triangle(pts[t[0]], pts[t[1]], pts[t[2]]);
        if (!b.empty()) {
            alpha[t[0]] = b[0];
            alpha[t[1]] = b[1];
            alpha[t[2]] = b[2];
            found = true;
            break;
        }
        for (int e = 0; e < 3 && !found; ++e) {
            int i = t[e], j = t[(e + 1) % 3];
            auto s = origin_on_segment(pts[i], pts[j]);
            if (!s.empty()) {
                alpha[i] = s[0];
                alpha[j] = s[1];
                found = true;
            }
        }
        if (found) break;
    }
    if (!found)
        throw NumericError("replace_factor: convex-hull scan found no "
                           "combination (defect: |arg z| >= pi/3 should "
                           "guarantee one)");
    double sum = alpha[0] + alpha[1] + alpha[2] + alpha[3];
    for (double& a : alpha) a /= sum;
    Polynomial U(std::vector<double>{alpha[0], alpha[1], alpha[2], alpha[3]});
    if (std::abs(U.eval(root)) > 1e-10)
        throw NumericError("replace_factor: U(root) != 0");
    if (inside) return U;
    // reflected form z^3 U(1/z)
    return Polynomial(std::vector<double>{alpha[3], alpha[2], alpha[1], alpha[0]});
}

Polynomial build_p_tilde(const std::vector<Complex>& roots,
                         const std::vector<bool>& inside) {
    if (roots.size() != inside.size())
        throw ValidationError("build_p_tilde: roots/flags length mismatch");
    Polynomial acc = Polynomial::one();
    for (std::size_t i = 0; i < roots.size(); ++i)
        acc = acc * replace_factor(roots[i], inside[i]);
    if (acc.max_imag() > 1e-9)
        throw NumericError("build_p_tilde: product is not real");
    std::vector<double> c = acc.real_coeffs();
    for (double& v : c) {
        if (v < 0.0) {
            if (v < -1e-8)
                throw NumericError(
                    "build_p_tilde: materially negative coefficient");
            v = 0.0;
        }
    }
    KahanSum s;
    for (double v : c) s.add(v);
    if (std::abs(s.value() - 1.0) > 1e-6)
        throw NumericError("build_p_tilde: coefficients do not sum to 1");
    for (double& v : c) v /= s.value();
    return Polynomial(c);
}

Polynomial build_q(const Polynomial& p_tilde, int N, int m) {
    if (N < 0 || m < 0) throw ValidationError("build_q: N, m must be >= 0");
    if (p_tilde.degree() > static_cast<std::size_t>(3 * N))
        throw ValidationError("build_q: deg(p_tilde) exceeds 3N");
    Polynomial inner = build_simple(m) * p_tilde;
    std::vector<double> c = inner.real_coeffs();
    KahanSum s;
    for (double v : c) s.add(v);
    for (double& v : c) v /= s.value();

    // window convolution with the flat factor; each output is an ascending
    // sum over its window, so every full window (indices m+3N..m+4N) sums the
    // same terms in the same order and lands on exactly 1/(m+4N+1)
    std::size_t W = static_cast<std::size_t>(m + 4 * N) + 1;
    std::vector<double> q(W + c.size() - 1, 0.0);
    for (std::size_t idx = 0; idx < q.size(); ++idx) {
        std::size_t lo = idx >= W ? idx - W + 1 : 0;
        std::size_t hi = std::min(idx, c.size() - 1);
        double acc = 0.0;
        for (std::size_t j = lo; j <= hi; ++j) acc += c[j];
        q[idx] = acc / static_cast<double>(W);
    }
    return Polynomial(q);
}

SemicircleReport verify_semicircle_bound(const Polynomial& q,
                                         const Polynomial& p, int N, int m,
                                         std::size_t samples) {
    if (samples < 2) throw ValidationError("verify_semicircle_bound: need "
                                           ">= 2 samples");
    double factor = std::pow(6.0, N) * std::pow(2.0, -0.5 * m);
    SemicircleReport rep;
    rep.samples = samples;
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < samples; ++i) {
        double t = 0.25 + 0.5 * static_cast<double>(i) /
                              static_cast<double>(samples - 1);
        double qv = std::abs(q.eval_unit_circle(t));
        double pv = std::abs(p.eval_unit_circle(t));
        worst = std::max(worst, qv - factor * pv);
    }
    rep.max_violation = worst;
    rep.pass = worst <= 1e-9;
    return rep;
}

Certificate certify_band(const SpectralMeasure& mu_unit, int n, int n0) {
    if (n < n0)
        throw ValidationError("certify_band: n below n0 (certificate "
                              "inequalities need n >= " +
                              std::to_string(n0) + ")");
    Certificate cert;
    cert.n = n;
    cert.N = n / 23;
    cert.m = 8 * cert.N;
    cert.c = kCertificateC;

    ToeplitzSpectrum spec = sigma_for_band(mu_unit, static_cast<std::size_t>(cert.N));
    cert.sigma2 = spec.sigma2;
    cert.sigma = std::sqrt(spec.sigma2);
    cert.sigma_exact_zero = spec.exact_zero;
    cert.minimizer = spec.minimizer;
    if (std::abs(spec.minimizer.coeff_norm2() - 1.0) > 1e-10)
        throw NumericError("certify_band: minimizer is not unit-norm");

    // factor the minimizer; roots outside the disk enter as reciprocals
    Polynomial trimmed = cert.minimizer.trimmed();
    std::vector<Complex> roots;
    std::vector<bool> inside;
    double lead_abs = 1.0;
    if (trimmed.degree() >= 1) {
        std::vector<Complex> raw = find_roots(cert.minimizer);
        double lead = 0.0;
        {
            const auto& c = cert.minimizer.coeffs();
            std::size_t nn = c.size();
            double cmax = max_coeff_abs(c);
            while (nn > 1 && std::abs(c[nn - 1]) <= 1e-12 * cmax) --nn;
            lead = std::abs(c[nn - 1]);
        }
        lead_abs = lead;
        for (const auto& w : raw) {
            if (std::abs(w) <= 1.0 + 1e-9) {
                roots.push_back(w);
                inside.push_back(true);
            } else {
                roots.push_back(Complex(1.0) / w);
                inside.push_back(false);
                lead_abs *= std::abs(w);
            }
        }
    }
    cert.lead_factor = lead_abs;
    double lead_lower = std::ldexp(1.0, -cert.N);
    if (trimmed.degree() >= 1 && lead_abs < lead_lower * (1.0 - 1e-6))
        throw NumericError("certify_band: |a| fell below 2^{-N}");

    Polynomial p_tilde = build_p_tilde(roots, inside);
    cert.q = build_q(p_tilde, cert.N, cert.m);

    std::size_t W = static_cast<std::size_t>(cert.m + 4 * cert.N) + 1;
    cert.flat_lo = cert.m + 3 * cert.N;
    cert.flat_hi = cert.m + 4 * cert.N;
    cert.flat_value = 1.0 / static_cast<double>(W);
    const auto& qc = cert.q.coeffs();
    double dev = 0.0;
    for (int k = cert.flat_lo; k <= cert.flat_hi; ++k)
        dev = std::max(dev, std::abs(qc[static_cast<std::size_t>(k)].real() -
                                     cert.flat_value));
    cert.flat_max_dev = dev;
    if (dev > 1e-12)
        throw NumericError("certify_band: flat coefficient block deviates");

    if (cert.q.degree() > static_cast<std::size_t>(2 * cert.m + 7 * cert.N) ||
        cert.q.degree() > static_cast<std::size_t>(n))
        throw NumericError("certify_band: deg Q out of range");

    std::vector<double> positions, weights;
    for (std::size_t k = 0; k < qc.size(); ++k) {
        if (qc[k].real() > 0.0) {
            positions.push_back(static_cast<double>(k));
            weights.push_back(qc[k].real());
        }
    }
    cert.nu = AtomicMeasure::from_atoms(std::move(positions), std::move(weights));

    cert.energy = mu_unit.energy_integral(cert.q);
    cert.energy_bound = std::ldexp(cert.sigma2, -2 * cert.N);
    double mass = mu_unit.total_mass();
    if (cert.energy >
        cert.energy_bound + 1e-12 * cert.sigma2 + 1e-20 * std::max(mass, 1.0))
        throw NumericError("certify_band: energy exceeds 2^{-2N} sigma^2");
    // 2^{-2N} <= e^{-6cn} is what n >= n0 buys; assert instead of trusting
    if (std::ldexp(1.0, -2 * cert.N) >
        std::exp(-6.0 * cert.c * n) * (1.0 + 1e-12))
        throw NumericError("certify_band: 2^{-2N} > e^{-6cn}");

    cert.threshold = std::exp(-cert.c * n) * cert.sigma;
    if (cert.sigma_exact_zero) {
        // structurally singular covariance: the event has probability 0
        cert.prob_bound_raw = 0.0;
        cert.prob_bound = 0.0;
    } else {
        double base = static_cast<double>(n) * std::exp(-cert.c * n);
        cert.prob_bound_raw = std::pow(base, cert.N + 1);
        cert.prob_bound = std::min(cert.prob_bound_raw, 1.0);
    }

    cert.semicircle =
        verify_semicircle_bound(cert.q, cert.minimizer, cert.N, cert.m, 512);
    if (!cert.semicircle.pass)
        throw NumericError("certify_band: semicircle bound violated");
    return cert;
}

Certificate rescale_certificate(const Certificate& cert, double a) {
    if (a <= 0.0)
        throw ValidationError("rescale_certificate: scale must be > 0");
    Certificate out = cert;
    for (double& p : out.nu.positions) p /= a;
    out.scale = cert.scale * a;
    return out;
}

std::string Certificate::to_json() const {
    nlohmann::json j;
    j["n"] = n;
    j["N"] = N;
    j["m"] = m;
    j["c"] = c;
    j["sigma"] = sigma;
    j["sigma2"] = sigma2;
    j["scale"] = scale;
    j["energy"] = energy;
    j["energy_bound"] = energy_bound;
    j["threshold"] = threshold;
    j["prob_bound_raw"] = prob_bound_raw;
    j["prob_bound"] = prob_bound;
    j["sigma_exact_zero"] = sigma_exact_zero;
    double base = static_cast<double>(n) * std::exp(-c * n);
    j["prob_bound_log10"] =
        sigma_exact_zero ? nullptr
                         : nlohmann::json(static_cast<double>(N + 1) *
                                          std::log10(base));
    j["flat_lo"] = flat_lo;
    j["flat_hi"] = flat_hi;
    j["flat_value"] = flat_value;
    j["nu"] = {{"positions", nu.positions}, {"weights", nu.weights}};
    std::vector<double> qc;
    for (const auto& v : q.coeffs()) qc.push_back(v.real());
    j["q_coeffs"] = qc;
    j["checks"] = {
        {"coeff_sum",
         {{"value", q.coeff_sum().real()},
          {"ok", std::abs(q.coeff_sum().real() - 1.0) <= 1e-12}}},
        {"flat_block",
         {{"count", flat_hi - flat_lo + 1},
          {"max_dev", flat_max_dev},
          {"ok", flat_max_dev <= 1e-12}}},
        {"energy",
         {{"value", energy}, {"bound", energy_bound},
          {"ok", energy <= energy_bound + 1e-12 * sigma2 + 1e-20}}},
        {"lead_factor",
         {{"value", lead_factor},
          {"lower", std::ldexp(1.0, -N)},
          {"ok", lead_factor >= std::ldexp(1.0, -N) * (1.0 - 1e-6)}}},
        {"semicircle",
         {{"max_violation", semicircle.max_violation},
          {"samples", semicircle.samples},
          {"ok", semicircle.pass}}},
    };
    return j.dump();
}

} // namespace specgap
