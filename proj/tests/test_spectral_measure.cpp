#include <doctest.h>

#include <cmath>

#include "errors.hpp"
#include "numerics.hpp"
#include "polynomial.hpp"
#include "spectral_measure.hpp"

using namespace specgap;

namespace {
SpectralMeasure atom(double freq, double mass) {
    return SpectralMeasure({{freq, mass}}, {});
}
} // namespace

TEST_CASE("parse: atom bookkeeping") {
    auto mu = SpectralMeasure::parse(R"({"atoms":[{"freq":0.25,"mass":0.5}]})");
    CHECK(mu.total_mass() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(mu.atoms().size() == 1);
}

TEST_CASE("parse: empty measure is rejected") {
    CHECK_THROWS_AS(SpectralMeasure::parse(R"({"atoms":[],"density":[]})"),
                    ValidationError);
}

TEST_CASE("parse: density bookkeeping") {
    auto mu = SpectralMeasure::parse(
        R"({"density":[{"from":0.25,"to":0.5,"height":2.0}]})");
    CHECK(mu.total_mass() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("parse: malformed and invalid documents") {
    CHECK_THROWS_AS(SpectralMeasure::parse("{"), ValidationError);
    CHECK_THROWS_AS(
        SpectralMeasure::parse(R"({"atoms":[{"freq":0.2,"mass":-1}]})"),
        ValidationError);
    CHECK_THROWS_AS(
        SpectralMeasure::parse(R"({"atoms":[{"freq":-0.2,"mass":1}]})"),
        ValidationError);
    CHECK_THROWS_AS(
        SpectralMeasure::parse(
            R"({"density":[{"from":0.2,"to":0.4,"height":1},
                           {"from":0.3,"to":0.5,"height":1}]})"),
        ValidationError);
    CHECK_THROWS_AS(
        SpectralMeasure::parse(R"({"atoms":[{"freq":0.2,"mass":1}],"x":1})"),
        ValidationError);
}

TEST_CASE("parse/serialize fixpoint") {
    auto mu = SpectralMeasure::parse(
        R"({"atoms":[{"freq":0.3,"mass":0.25}],
            "density":[{"from":0.4,"to":0.5,"height":0.5}]})");
    std::string s1 = mu.to_json();
    std::string s2 = SpectralMeasure::parse(s1).to_json();
    CHECK(s1 == s2);
}

TEST_CASE("gap_radius") {
    CHECK(atom(0.3, 1.0).gap_radius() == doctest::Approx(0.3));
    SpectralMeasure piece({}, {{0.25, 0.5, 1.0}});
    CHECK(piece.gap_radius() == doctest::Approx(0.25));
    SpectralMeasure both({{0.5, 1.0}}, {{0.3, 0.4, 1.0}});
    CHECK(both.gap_radius() == doctest::Approx(0.3));
}

TEST_CASE("admissible_gap backs off an edge atom") {
    auto mu = atom(0.3, 1.0);
    CHECK(mu.admissible_gap() == doctest::Approx(0.3 * (1.0 - 1e-9)));
    CHECK(mu.admissible_gap() < mu.gap_radius());
    // a density edge carries no point mass, so no backoff is needed
    SpectralMeasure piece({}, {{0.25, 0.5, 1.0}});
    CHECK(piece.admissible_gap() == piece.gap_radius());
}

TEST_CASE("covariance: frozen values") {
    auto mu = atom(0.25, 0.5);
    CHECK(mu.covariance(0.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(mu.covariance(1.0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(atom(0.5, 1.0).covariance(1.0) ==
          doctest::Approx(-2.0).epsilon(1e-14));
}

TEST_CASE("covariance: piece limit at 0 and positive-definiteness bound") {
    SpectralMeasure mu({{0.3, 0.25}}, {{0.25, 0.5, 1.0}});
    double k0 = mu.covariance(0.0);
    CHECK(k0 == doctest::Approx(mu.total_mass()).epsilon(1e-13));
    // k is continuous at 0
    CHECK(mu.covariance(1e-9) == doctest::Approx(k0).epsilon(1e-6));
    for (int i = 1; i <= 200; ++i) {
        double x = 0.05 * i;
        CHECK(std::abs(mu.covariance(x)) <= k0 * (1.0 + 1e-12));
    }
}

TEST_CASE("dyadic_band: atoms and half-open edges") {
    auto mu = atom(0.3, 1.0);
    auto band2 = mu.dyadic_band(2, 0.25); // (0.25, 0.5]
    REQUIRE(band2.atoms().size() == 1);
    CHECK(band2.atoms()[0].freq == doctest::Approx(0.3));
    CHECK(mu.dyadic_band(3, 0.25).empty());

    SpectralMeasure two({{0.5, 1.0}, {0.8, 1.0}}, {});
    auto band = two.dyadic_band(2, 0.25);
    REQUIRE(band.atoms().size() == 1); // 0.5 stays, 0.8 moves up
    CHECK(band.atoms()[0].freq == doctest::Approx(0.5));
}

TEST_CASE("dyadic_band: partition of mass") {
    SpectralMeasure mu({{0.3, 0.5}, {0.5, 0.25}, {1.7, 0.125}},
                       {{0.26, 0.49, 1.0}, {0.9, 1.3, 0.5}});
    double delta = 0.25;
    KahanSum total;
    for (int k = 2; k < 10; ++k)
        total.add(mu.dyadic_band(k, delta).total_mass());
    CHECK(total.value() == doctest::Approx(mu.total_mass()).epsilon(1e-12));
}

TEST_CASE("rescale_to_unit_band") {
    CHECK(atom(0.3, 1.0).rescale_to_unit_band(1.0).atoms()[0].freq ==
          doctest::Approx(0.3));
    auto r = atom(0.6, 2.0).rescale_to_unit_band(2.0);
    CHECK(r.atoms()[0].freq == doctest::Approx(0.3));
    CHECK(r.total_mass() == doctest::Approx(4.0));
    CHECK_THROWS_AS(atom(0.2, 1.0).rescale_to_unit_band(1.0),
                    ValidationError);
}

TEST_CASE("rescale preserves covariance under x -> x/a") {
    SpectralMeasure mu({{0.6, 0.5}, {0.9, 0.25}}, {});
    double a = 2.0;
    auto unit = mu.rescale_to_unit_band(a);
    for (int i = 0; i <= 20; ++i) {
        double x = 0.35 * i;
        CHECK(unit.covariance(x) ==
              doctest::Approx(mu.covariance(x / a)).epsilon(1e-12));
    }
}

TEST_CASE("energy_integral: frozen values") {
    Polynomial q4(std::vector<double>{1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16,
                                      1.0 / 16}); // ((1+z)/2)^4
    CHECK(atom(0.5, 0.5).energy_integral(q4) ==
          doctest::Approx(0.0).epsilon(1e-20));
    CHECK(atom(0.25, 0.5).energy_integral(q4) ==
          doctest::Approx(0.0625).epsilon(1e-12));
    CHECK(atom(0.25, 0.5).energy_integral(Polynomial::one()) ==
          doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("energy_integral: both signs matter for complex q") {
    // q(z) = z - i vanishes at e^{2 pi i 0.25} but not at the mirror point
    Polynomial q(std::vector<std::complex<double>>{{0.0, -1.0}, {1.0, 0.0}});
    double e = atom(0.25, 0.5).energy_integral(q);
    // |q(i)|^2 = 0, |q(-i)|^2 = 4 -> 0.5 * (0 + 4) = 2
    CHECK(e == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("energy_integral: quadrature matches covariance identity") {
    // independent oracle: integral |q|^2 d mu = sum_jk c_j c_k k(j-k)
    SpectralMeasure mu({}, {{0.25, 0.5, 1.0}});
    Polynomial q(std::vector<double>{0.2, 0.5, 0.1, 0.2});
    double direct = mu.energy_integral(q);
    double via_cov = 0.0;
    auto c = q.real_coeffs();
    for (std::size_t j = 0; j < c.size(); ++j)
        for (std::size_t k = 0; k < c.size(); ++k)
            via_cov += c[j] * c[k] *
                       mu.covariance(static_cast<double>(j) -
                                     static_cast<double>(k));
    CHECK(direct == doctest::Approx(via_cov).epsilon(1e-9));
    CHECK(direct >= 0.0);
}

TEST_CASE("polynomial basics") {
    Polynomial p(std::vector<double>{1.0, 2.0, 3.0});
    CHECK(p.eval({2.0, 0.0}).real() == doctest::Approx(17.0));
    Polynomial prod = p * Polynomial(std::vector<double>{1.0, 1.0});
    CHECK(prod.coeffs().size() == 4);
    CHECK(prod.coeffs()[3].real() == doctest::Approx(3.0));
    CHECK(prod.coeffs()[1].real() == doctest::Approx(3.0));
    CHECK(Polynomial::flat(4).coeff_sum().real() ==
          doctest::Approx(1.0).epsilon(1e-15));
}
