#include <doctest.h>

#include <cmath>

#include "errors.hpp"
#include "oracles.hpp"
#include "rng.hpp"
#include "spectral_measure.hpp"
#include "toeplitz.hpp"

using namespace specgap;

namespace {
SpectralMeasure atom(double freq, double mass) {
    return SpectralMeasure({{freq, mass}}, {});
}

Matrix mat2(double a, double b, double c, double d) {
    Matrix m(2);
    m.at(0, 0) = a;
    m.at(0, 1) = b;
    m.at(1, 0) = c;
    m.at(1, 1) = d;
    return m;
}
} // namespace

TEST_CASE("build_toeplitz: frozen values") {
    Matrix A = build_toeplitz(atom(0.25, 0.5), 1);
    CHECK(A.at(0, 0) == doctest::Approx(1.0));
    CHECK(A.at(0, 1) == doctest::Approx(0.0).epsilon(1e-14));
    Matrix B = build_toeplitz(atom(0.5, 0.5), 1);
    CHECK(B.at(0, 1) == doctest::Approx(-1.0));
    Matrix C = build_toeplitz(atom(0.3, 0.5), 0);
    CHECK(C.at(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("min_eigenpair: hand-diagonalized cases") {
    auto id = min_eigenpair(mat2(1, 0, 0, 1));
    CHECK(id.value == doctest::Approx(1.0));
    CHECK(id.vector[0] == doctest::Approx(1.0));
    CHECK(std::abs(id.vector[1]) == doctest::Approx(0.0).epsilon(1e-12));

    auto sing = min_eigenpair(mat2(1, -1, -1, 1));
    CHECK(sing.value == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(sing.vector[0] == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(sing.vector[1] == doctest::Approx(1.0 / std::sqrt(2.0)));

    double h = std::sqrt(2.0) / 2.0;
    auto q = min_eigenpair(mat2(1, -h, -h, 1));
    CHECK(q.value == doctest::Approx(1.0 - h).epsilon(1e-12));
    CHECK(q.vector[0] == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(q.vector[1] == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("min_eigenpair: rejects non-symmetric input") {
    CHECK_THROWS_AS(min_eigenpair(mat2(1, 2, 0, 1)), ValidationError);
}

TEST_CASE("min_eigenpair: residual and brute-force agreement") {
    SplitMix64 rng(424242);
    for (int trial = 0; trial < 40; ++trial) {
        std::size_t d = 2 + (rng.next() % 4); // dims 2..5
        Matrix A(d);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = i; j < d; ++j) {
                double v = 2.0 * rng.uniform01() - 1.0;
                A.at(i, j) = v;
                A.at(j, i) = v;
            }
        auto pair = min_eigenpair(A);
        double brute = specgap_test::min_eig_bruteforce(A);
        CHECK(pair.value ==
              doctest::Approx(brute).epsilon(1e-9).scale(A.frobenius()));
        // residual ||Av - lambda v|| <= 1e-10 ||A||
        double res = 0.0, norm = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < d; ++j)
                acc += A.at(i, j) * pair.vector[j];
            acc -= pair.value * pair.vector[i];
            res += acc * acc;
            norm += pair.vector[i] * pair.vector[i];
        }
        CHECK(std::sqrt(res) <= 1e-10 * std::max(A.frobenius(), 1e-12));
        CHECK(std::sqrt(norm) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("min_eigenpair: Toeplitz matrices from measures vs brute force") {
    SpectralMeasure mus[] = {
        SpectralMeasure({{0.26, 0.2}, {0.37, 0.2}, {0.48, 0.1}}, {}),
        SpectralMeasure({}, {{0.25, 0.5, 1.0}}),
    };
    for (const auto& mu : mus) {
        for (std::size_t N = 0; N <= 4; ++N) {
            Matrix A = build_toeplitz(mu, N);
            auto pair = min_eigenpair(A);
            double brute = specgap_test::min_eig_bruteforce(A);
            CHECK(pair.value ==
                  doctest::Approx(brute).epsilon(1e-9).scale(
                      std::max(A.frobenius(), 1.0)));
        }
    }
}

TEST_CASE("min_eigenpair: rank-deficient Toeplitz hits exact zero") {
    // a single atom pair gives rank 2, so N >= 2 forces sigma^2 = 0; the
    // char-poly oracle can only locate a triple root to its noise floor
    Matrix A = build_toeplitz(atom(0.3, 0.5), 4);
    auto pair = min_eigenpair(A);
    CHECK(std::abs(pair.value) <= 1e-12 * A.frobenius());
    CHECK(std::abs(specgap_test::min_eig_bruteforce(A)) <= 1e-6);
}

TEST_CASE("complex coefficients gain nothing: 2x-embedded block solve") {
    // For symmetric mu the Toeplitz form is real; a complex coefficient
    // vector splits into two real ones, i.e. the block-diagonal embedding
    // diag(A, A), whose least eigenvalue equals the real one.
    SpectralMeasure mu({{0.29, 0.3}, {0.41, 0.2}}, {});
    for (std::size_t N = 1; N <= 3; ++N) {
        Matrix A = build_toeplitz(mu, N);
        std::size_t d = A.dim();
        Matrix B(2 * d);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) {
                B.at(i, j) = A.at(i, j);
                B.at(d + i, d + j) = A.at(i, j);
            }
        CHECK(min_eigenpair(B).value ==
              doctest::Approx(min_eigenpair(A).value)
                  .epsilon(1e-10)
                  .scale(std::max(A.frobenius(), 1.0)));
    }
}

TEST_CASE("sigma_for_band: N = 0 forces P = 1") {
    auto s = sigma_for_band(atom(0.3, 0.5), 0);
    CHECK(s.sigma2 == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(s.minimizer.coeffs().size() == 1);
}

TEST_CASE("sigma_for_band: energy of minimizer equals sigma2") {
    SpectralMeasure mus[] = {
        atom(0.3, 0.5),
        SpectralMeasure({{0.3, 0.5}, {0.45, 0.5}}, {}),
        SpectralMeasure({}, {{0.25, 0.5, 1.0}}),
    };
    for (const auto& mu : mus) {
        double mass = mu.total_mass();
        double prev = mass + 1.0;
        for (std::size_t N = 0; N <= 4; ++N) {
            auto s = sigma_for_band(mu, N);
            CHECK(s.sigma2 <= mass * (1.0 + 1e-12));
            CHECK(s.sigma2 <= prev + 1e-12 * mass); // monotone in N
            prev = s.sigma2;
            double e = mu.energy_integral(s.minimizer);
            CHECK(std::abs(e - s.sigma2) <= 1e-9 * std::max(mass, 1.0));
        }
    }
}

TEST_CASE("sigma_for_band: support validation") {
    CHECK_THROWS_AS(sigma_for_band(atom(0.2, 1.0), 2), ValidationError);
    CHECK_THROWS_AS(sigma_for_band(atom(0.6, 1.0), 2), ValidationError);
}

TEST_CASE("rho: dirac at the origin gives 1 for all n") {
    SpectralMeasure delta0({{0.0, 1.0}}, {});
    for (int n : {0, 1, 2, 5, 9}) {
        auto r = rho(delta0, n);
        CHECK(r.rho2 == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("rho: single symmetric atom pair") {
    double lambda = 0.3;
    auto mu = atom(lambda, 0.5);
    CHECK(rho(mu, 0).rho2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rho(mu, 1).rho2 == doctest::Approx(1.0).epsilon(1e-10));
    auto r2 = rho(mu, 2);
    CHECK(r2.rho2 == doctest::Approx(0.0).epsilon(1e-10));
    // the annihilator is P(y) = 1 - y^2 / lambda^2
    REQUIRE(r2.minimizer_moments.size() == 2);
    CHECK(r2.minimizer_moments[1] ==
          doctest::Approx(-1.0 / (lambda * lambda)).epsilon(1e-8));
}

TEST_CASE("rho: non-increasing in n and odd steps are flat") {
    SpectralMeasure mu({{0.28, 0.2}, {0.35, 0.2}, {0.44, 0.1}}, {});
    double prev = mu.total_mass() + 1.0;
    for (int n = 0; n <= 6; ++n) {
        auto r = rho(mu, n);
        CHECK(r.rho2 <= prev * (1.0 + 1e-10) + 1e-15);
        CHECK(r.rho2 >= 0.0);
        prev = r.rho2;
    }
}

TEST_CASE("rho: conditioning gate throws a declared failure") {
    auto mu = atom(0.3, 0.5);
    CHECK_THROWS_AS(rho(mu, 13), ValidationError);
    CHECK_NOTHROW(rho(mu, 13, 20)); // explicit override
}
