// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// fail. Criteria 1-8 and 10 drive the library directly; criterion 9 shells
// out to the CLI binary and byte-compares reruns.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "assembly.hpp"
#include "certificate.hpp"
#include "numerics.hpp"
#include "rng.hpp"
#include "sampler.hpp"
#include "sharpness.hpp"
#include "spectral_measure.hpp"
#include "toeplitz.hpp"

#include "oracles.hpp"

using namespace specgap;

namespace {

int g_failures = 0;

struct Criterion {
    const char* name;
    bool ok = true;
    std::string detail;
    std::chrono::steady_clock::time_point start;

    explicit Criterion(const char* n)
        : name(n), start(std::chrono::steady_clock::now()) {}

    void expect(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }

    double seconds() const {
        return std::chrono::duration<double>(
                   std::chrono::steady_clock::now() - start)
            .count();
    }

    void finish(const std::string& extra = "") {
        if (!ok) ++g_failures;
        std::printf("[%s] %s (%.1f s)%s%s\n", ok ? "PASS" : "FAIL", name,
                    seconds(), extra.empty() ? "" : " ", extra.c_str());
        if (!ok) std::printf("       %s\n", detail.c_str());
        std::fflush(stdout);
    }
};

std::vector<SpectralMeasure> band_measures() {
    return {
        SpectralMeasure({{0.26, 0.2}, {0.37, 0.2}, {0.48, 0.1}}, {}),
        SpectralMeasure({{0.27, 0.1}, {0.33, 0.15}, {0.41, 0.15},
                         {0.47, 0.1}},
                        {}),
        SpectralMeasure({}, {{0.25, 0.5, 1.0}}),
        SpectralMeasure({{0.3, 0.25}}, {{0.4, 0.5, 0.5}}),
        SpectralMeasure({{0.2618, 0.25}, {0.3236, 0.15}, {0.4854, 0.1}}, {}),
    };
}

std::string fmtd(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// ---- criterion 1: arc-length oracle ---------------------------------------

void criterion1() {
    Criterion c("criterion 1: arc-length oracle, single-frequency measures");
    const double lambda = 0.3;
    auto mu = SpectralMeasure({{lambda, 0.5}}, {});
    for (double lam_L : {0.1, 0.2, 0.3, 0.45}) {
        auto t0 = std::chrono::steady_clock::now();
        double L = lam_L / lambda;
        auto e = mc_persistence(mu, L, L / 1000.0, 100000, 20260811);
        double truth = std::max(0.0, 0.5 - lam_L);
        double point_s = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - t0)
                             .count();
        c.expect(std::abs(e.p_hat - truth) <= 3.0 * e.stderr_est(),
                 "lambda*L=" + fmtd(lam_L) + ": p_hat " + fmtd(e.p_hat) +
                     " vs " + fmtd(truth) + " +- 3*" + fmtd(e.stderr_est()));
        c.expect(point_s < 10.0, "point runtime " + fmtd(point_s) + " s");
    }
    c.finish();
}

// ---- criterion 2: orthant oracle ------------------------------------------

void criterion2() {
    Criterion c("criterion 2: two-point MC vs arcsin orthant formula");
    for (double rho : {-0.9, 0.0, 0.5, 0.9}) {
        double lambda = std::acos(rho) / kTwoPi;
        auto mu = SpectralMeasure({{lambda, 0.5}}, {});
        auto e = mc_persistence(mu, 1.0, 1.0, 100000, 77);
        double truth = orthant_probability(rho);
        c.expect(std::abs(e.p_hat - truth) <= 3.0 * e.stderr_est(),
                 "rho=" + fmtd(rho) + ": p_hat " + fmtd(e.p_hat) + " vs " +
                     fmtd(truth));
    }
    c.finish();
}

// ---- criterion 3: certificate structural suite ---------------------------------

void criterion3() {
    Criterion c("criterion 3: certificate structural suite (5 measures, "
                "n in {72, 92, 115})");
    for (const auto& mu : band_measures()) {
        for (int n : {72, 92, 115}) {
            std::string tag = "n=" + std::to_string(n) + ": ";
            Certificate cert;
            try {
                cert = certify_band(mu, n);
            } catch (const std::exception& e) {
                c.expect(false, tag + e.what());
                continue;
            }
            KahanSum sum;
            bool nonneg = true;
            for (const auto& q : cert.q.coeffs()) {
                if (q.real() < 0.0) nonneg = false;
                sum.add(q.real());
            }
            c.expect(nonneg, tag + "negative coefficient");
            c.expect(std::abs(sum.value() - 1.0) <= 1e-12,
                     tag + "coefficient sum err " +
                         fmtd(std::abs(sum.value() - 1.0)));
            c.expect(cert.flat_hi - cert.flat_lo + 1 == cert.N + 1,
                     tag + "flat block size");
            double dev = 0.0;
            for (int k = cert.flat_lo; k <= cert.flat_hi; ++k)
                dev = std::max(dev,
                               std::abs(cert.q.coeffs()[k].real() -
                                        cert.flat_value));
            c.expect(dev <= 1e-12, tag + "flat deviation " + fmtd(dev));
            c.expect(cert.energy <= cert.energy_bound * (1.0 + 1e-9) + 1e-18,
                     tag + "energy " + fmtd(cert.energy) + " > bound " +
                         fmtd(cert.energy_bound));
            auto rep = verify_semicircle_bound(cert.q, cert.minimizer,
                                               cert.N, cert.m, 512);
            c.expect(rep.pass, tag + "semicircle violation " +
                                   fmtd(rep.max_violation));
        }
    }
    c.expect(c.seconds() < 30.0, "runtime budget exceeded");
    c.finish();
}

// ---- criterion 4: certificate event validation --------------------------

void criterion4() {
    Criterion c("criterion 4: certificate event frequency vs certified bound "
                "(phi = 0 and 5 randomized)");
    SplitMix64 phi_rng(5150);
    for (const auto& mu : band_measures()) {
        auto cert = certify_band(mu, 92);
        double scale = std::sqrt(mu.total_mass());
        for (int variant = 0; variant < 6; ++variant) {
            ShiftFunction phi;
            phi.support = cert.nu.positions;
            phi.values.assign(phi.support.size(), 0.0);
            if (variant > 0) {
                for (double& v : phi.values) {
                    double a, b;
                    phi_rng.normal_pair(a, b);
                    v = scale * a;
                }
            }
            auto e = mc_certificate_event(mu, cert.nu.positions, cert.nu.weights,
                                    phi, cert.threshold, 100000,
                                    900 + variant);
            c.expect(e.p_hat <= cert.prob_bound + 3.0 * e.stderr_est(),
                     "variant " + std::to_string(variant) + ": freq " +
                         fmtd(e.p_hat) + " vs bound " +
                         fmtd(cert.prob_bound));
            // at this n the certified bound clamps at 1; the sharp check is
            // that the event is below Monte Carlo resolution entirely
            c.expect(e.successes == 0,
                     "variant " + std::to_string(variant) + ": " +
                         std::to_string(e.successes) + " successes");
        }
    }
    c.expect(c.seconds() < 60.0, "runtime budget exceeded");
    c.finish();
}

// ---- criterion 5: upper-bound validity sandwich -----------------------------

void criterion5() {
    Criterion c("criterion 5: MC p_hat <= certified upper bound (small L)");
    std::vector<double> Ls = {0.5, 1.0, 2.0};
    for (const auto& mu : band_measures()) {
        double delta = mu.admissible_gap();
        auto est = mc_sweep(mu, Ls, 0.005, 50000, 31415);
        for (std::size_t i = 0; i < Ls.size(); ++i) {
            if (est[i].p_hat < 1e-3) continue; // criterion covers p >= 1e-3
            auto bound = certified_upper_bound(mu, delta, Ls[i], kDefaultCpp);
            c.expect(est[i].p_hat <=
                         std::min(0.5, bound.total_bound) +
                             3.0 * est[i].stderr_est(),
                     "L=" + fmtd(Ls[i]) + ": p_hat " + fmtd(est[i].p_hat) +
                         " vs bound " + fmtd(bound.total_bound));
        }
    }
    c.finish();
}

// ---- criterion 6: sweep exponent check --------------------------------------

void criterion6() {
    Criterion c("criterion 6: sweep decay is strictly decreasing and "
                "concave in log");
    SpectralMeasure mu({}, {{0.25, 0.5, 1.0}});
    std::vector<double> Ls = {0.0, 0.6, 1.2, 1.8, 2.4};
    auto est = mc_sweep(mu, Ls, 0.005, 200000, 60299);
    std::vector<double> logs, ses;
    for (const auto& e : est) {
        c.expect(e.p_hat >= 1e-4, "p_hat " + fmtd(e.p_hat) + " below 1e-4");
        logs.push_back(std::log(e.p_hat));
        ses.push_back(e.stderr_est() / std::max(e.p_hat, 1e-12));
    }
    for (std::size_t i = 1; i < logs.size(); ++i)
        c.expect(logs[i] < logs[i - 1],
                 "not strictly decreasing at L=" + fmtd(Ls[i]));
    for (std::size_t i = 2; i < logs.size(); ++i) {
        double second = logs[i] - 2.0 * logs[i - 1] + logs[i - 2];
        double se = std::sqrt(ses[i] * ses[i] +
                              4.0 * ses[i - 1] * ses[i - 1] +
                              ses[i - 2] * ses[i - 2]);
        c.expect(second <= 2.0 * se,
                 "second difference " + fmtd(second) + " at L=" + fmtd(Ls[i]) +
                     " exceeds 2*" + fmtd(se));
    }
    // least-squares fit of log p against (1, L, L^2); the quadratic
    // coefficient is reported, no threshold applies
    double a[3][4] = {};
    for (std::size_t i = 0; i < Ls.size(); ++i) {
        double x[3] = {1.0, Ls[i], Ls[i] * Ls[i]};
        for (int r = 0; r < 3; ++r) {
            for (int k = 0; k < 3; ++k) a[r][k] += x[r] * x[k];
            a[r][3] += x[r] * logs[i];
        }
    }
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        for (int k = 0; k < 4; ++k) std::swap(a[col][k], a[piv][k]);
        for (int r = 0; r < 3; ++r) {
            if (r == col) continue;
            double f = a[r][col] / a[col][col];
            for (int k = col; k < 4; ++k) a[r][k] -= f * a[col][k];
        }
    }
    double slope_L2 = a[2][3] / a[2][2];
    c.finish("fitted L^2 coefficient: " + fmtd(slope_L2));
}

// ---- criterion 7: sharpness suite -------------------------------------------

void criterion7() {
    Criterion c("criterion 7: example measure, Lagrange bound, rho oracle");
    auto mu = example_measure(10);
    double quarter = 1.0 / (2.0 * kTwoPi);
    c.expect(mu.gap_radius() >= quarter - 1e-12,
             "gap radius " + fmtd(mu.gap_radius()));
    for (int n = 1; n <= 6; ++n) {
        auto rep = verify_lagrange_bound(n, 10);
        c.expect(rep.pass, "lagrange n=" + std::to_string(n) + " failed (" +
                               "rho_n " + fmtd(rep.rho_n) + " vs " +
                               fmtd(rep.required) + ")");
    }
    auto single = SpectralMeasure({{0.3, 0.5}}, {});
    c.expect(std::abs(rho(single, 0).rho2 - 1.0) <= 1e-10, "rho_0 != 1");
    c.expect(std::abs(rho(single, 1).rho2 - 1.0) <= 1e-10, "rho_1 != 1");
    c.expect(std::abs(rho(single, 2).rho2) <= 1e-10, "rho_2 != 0");
    c.finish();
}

// ---- criterion 8: lower-bound formula suite ------------------------------------

void criterion8() {
    Criterion c("criterion 8: lower-bound scalar chain and monotonicity");
    auto t = lower_bound(1.0, 1.0, 1.0 / kTwoPi);
    c.expect(std::abs(t.p0 - 0.31731) <= 1e-5, "p0 " + fmtd(t.p0));
    c.expect(std::abs(t.C_tilde - (8.0 + 1.0 / t.p0)) <= 1e-9,
             "C_tilde " + fmtd(t.C_tilde));
    // sum_{k>K} e^{-a_k^2/2} = e^{-C~K^2} * tail_ratio <= (1/2) e^{-C~K^2}
    c.expect(t.tail_ratio <= 0.5, "tail ratio " + fmtd(t.tail_ratio));
    double prev = 1.0;
    bool first = true;
    for (double L : {1.0, 2.0, 4.0}) {
        auto tr = lower_bound(1.0, L, 1.0 / kTwoPi);
        c.expect(tr.tail_ratio <= 0.5, "tail ratio at L=" + fmtd(L));
        if (!first)
            c.expect(tr.log10_bound <= prev,
                     "not monotone at L=" + fmtd(L));
        prev = tr.log10_bound;
        first = false;
    }
    c.finish();
}

// ---- criterion 9: CLI determinism across worker counts ----------------------

int run_cli(const std::string& args) {
    std::string cmd = std::string(SPECGAP_CLI_PATH) + " " + args +
                      " 2>/dev/null";
    return std::system(cmd.c_str());
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void shell(const std::string& cmd) {
    int rc = std::system(cmd.c_str());
    (void)rc;
}

void criterion9() {
    Criterion c("criterion 9: CLI outputs byte-identical across worker "
                "counts");
    std::string dir = "acceptance_tmp";
    shell("rm -rf " + dir + " && mkdir -p " + dir);
    {
        std::ofstream m(dir + "/m.json");
        m << R"({"atoms":[{"freq":0.26,"mass":0.2},{"freq":0.37,"mass":0.2},)"
          << R"({"freq":0.48,"mass":0.1}]})";
    }
    std::string meas = " --measure " + dir + "/m.json";
    std::vector<std::pair<std::string, std::string>> runs = {
        {"estimate", meas + " --L 1 --trials 20000 --seed 5 --format csv"},
        {"estimate", meas + " --L 1 --trials 20000 --seed 5 --format json"},
        {"certify", meas + " --L 368 --format json"},
        {"lower", " --C 1 --L 2 --R 0.16 --format json"},
        {"rho", meas + " --n 6 --format csv"},
        {"sigma", meas + " --n 4 --format csv"},
        {"sample", meas + " --L 0.5 --step 0.01 --seed 8 --format csv"},
        {"sweep", meas + " --Ls 0.5,1.0,1.5 --trials 20000 --seed 5 "
                         "--step 0.01 --format csv"},
        {"sweep", meas + " --Ls 0.5,1.0 --trials 5000 --seed 5 --step 0.01 "
                         "--format svg"},
        {"report", meas + " --L 1 --trials 10000 --seed 5 --n 4 --C 1"},
    };
    for (std::size_t i = 0; i < runs.size(); ++i) {
        std::string out1 = dir + "/out_" + std::to_string(i) + "_a";
        std::string out2 = dir + "/out_" + std::to_string(i) + "_b";
        int rc1 = run_cli(runs[i].first + runs[i].second +
                          " --threads 1 --out " + out1);
        int rc2 = run_cli(runs[i].first + runs[i].second +
                          " --threads 3 --out " + out2);
        c.expect(rc1 == 0 && rc2 == 0,
                 runs[i].first + " run " + std::to_string(i) + " exit codes " +
                     std::to_string(rc1) + "/" + std::to_string(rc2));
        std::string b1 = slurp(out1);
        std::string b2 = slurp(out2);
        c.expect(!b1.empty() && b1 == b2,
                 runs[i].first + " run " + std::to_string(i) +
                     " outputs differ");
    }
    shell("rm -rf " + dir);
    c.finish();
}

// ---- criterion 10: brute-force eigen oracle ----------------------------------

void criterion10() {
    Criterion c("criterion 10: Jacobi vs characteristic-polynomial "
                "bracketing (dim <= 5)");
    std::vector<Matrix> corpus;
    {
        Matrix id(2);
        id.at(0, 0) = id.at(1, 1) = 1.0;
        corpus.push_back(id);
        Matrix sing(2);
        sing.at(0, 0) = sing.at(1, 1) = 1.0;
        sing.at(0, 1) = sing.at(1, 0) = -1.0;
        corpus.push_back(sing);
        Matrix q(2);
        double h = std::sqrt(2.0) / 2.0;
        q.at(0, 0) = q.at(1, 1) = 1.0;
        q.at(0, 1) = q.at(1, 0) = -h;
        corpus.push_back(q);
    }
    SplitMix64 rng(1618);
    for (int t = 0; t < 60; ++t) {
        std::size_t d = 2 + (rng.next() % 4);
        Matrix A(d);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = i; j < d; ++j) {
                double v = 2.0 * rng.uniform01() - 1.0;
                A.at(i, j) = v;
                A.at(j, i) = v;
            }
        corpus.push_back(A);
    }
    for (const auto& mu : band_measures()) {
        if (mu.toeplitz_rank_bound() >= 5)
            corpus.push_back(build_toeplitz(mu, 4));
    }
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        double jac = min_eigenpair(corpus[i]).value;
        double brute = specgap_test::min_eig_bruteforce(corpus[i]);
        double tol = 1e-9 * std::max(1.0, corpus[i].frobenius());
        c.expect(std::abs(jac - brute) <= tol,
                 "matrix " + std::to_string(i) + ": " + fmtd(jac) + " vs " +
                     fmtd(brute));
    }
    c.finish();
}

} // namespace

int main() {
    std::printf("specgap acceptance suite\n");
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    criterion10();
    if (g_failures == 0) {
        std::printf("all criteria passed\n");
        return 0;
    }
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
}
