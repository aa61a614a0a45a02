#pragma once

#include <string>
#include <vector>

#include "polynomial.hpp"

namespace specgap {

struct Atom {
    double freq; // cycles per unit, >= 0 (0 only for in-process test measures)
    double mass; // > 0, positive-side mass (freq 0 counted once)
};

struct DensityPiece {
    double lo;     // > 0
    double hi;     // > lo
    double height; // >= 0
};

// Symmetric finite nonnegative measure on R, described by its positive
// half-line part: an atom list plus piecewise-constant density pieces. The
// negative half is implicit by symmetry, so total_mass() doubles everything
// except an atom at frequency 0, which is its own mirror image.
class SpectralMeasure {
public:
    SpectralMeasure() = default; // empty measure (legal as a band restriction)
    SpectralMeasure(std::vector<Atom> atoms, std::vector<DensityPiece> pieces);

    // Parses the measure-description document
    //   {"atoms":[{"freq":f,"mass":m},...],
    //    "density":[{"from":a,"to":b,"height":h},...]}
    // Rejects empty measures and frequencies <= 0.
    static SpectralMeasure parse(const std::string& json_text);
    std::string to_json() const;

    const std::vector<Atom>& atoms() const { return atoms_; }
    const std::vector<DensityPiece>& pieces() const { return pieces_; }
    bool empty() const { return atoms_.empty() && pieces_.empty(); }

    double total_mass() const;
    double max_freq() const; // support radius on the positive side; 0 if empty

    // sup{ d >= 0 : no mass in [-d, d] }; +inf for the empty measure.
    double gap_radius() const;
    // gap_radius shrunk so that an atom sitting exactly on the edge stays
    // strictly outside [-d', d'].
    double admissible_gap() const;

    // k(x) = integral of e^{2*pi*i*x*y} d mu(y); real by symmetry.
    double covariance(double x) const;

    // Restriction to the half-open dyadic band (a/4, a/2], a = 2^k * delta.
    SpectralMeasure dyadic_band(int k, double delta) const;

    // Pushforward under y -> y/a; requires support inside (a/4, a/2].
    SpectralMeasure rescale_to_unit_band(double a) const;

    // integral of |q(e^{2*pi*i*y})|^2 d mu(y). Atoms are summed exactly with
    // both signs evaluated explicitly; density pieces use composite Simpson
    // with estimated error below 1e-10 * total_mass * sup|q|^2 per piece.
    double energy_integral(const Polynomial& q) const;

    // Even raw moment integral of y^(2j) d mu(y), compensated summation.
    double even_moment(int two_j) const;

    // Exact rank of any Toeplitz covariance matrix built from this measure:
    // 2 per distinct positive atom frequency, 1 for an atom at 0, unbounded
    // (SIZE_MAX) once a density piece carries mass.
    std::size_t toeplitz_rank_bound() const;

private:
    std::vector<Atom> atoms_;         // sorted by freq (ties allowed)
    std::vector<DensityPiece> pieces_; // sorted by lo, non-overlapping
};

} // namespace specgap
