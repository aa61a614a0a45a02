#include "spectral_measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "errors.hpp"
#include "numerics.hpp"

namespace specgap {

namespace {

void validate(const std::vector<Atom>& atoms,
              const std::vector<DensityPiece>& pieces) {
    for (const auto& a : atoms) {
        if (!std::isfinite(a.freq) || a.freq < 0.0)
            throw ValidationError("atom frequency must be finite and >= 0");
        if (!std::isfinite(a.mass) || a.mass <= 0.0)
            throw ValidationError("atom mass must be finite and > 0");
    }
    for (const auto& p : pieces) {
        if (!std::isfinite(p.lo) || !std::isfinite(p.hi) || p.lo <= 0.0 ||
            p.hi <= p.lo)
            throw ValidationError("density piece needs 0 < from < to");
        if (!std::isfinite(p.height) || p.height < 0.0)
            throw ValidationError("density height must be finite and >= 0");
    }
    for (std::size_t i = 1; i < pieces.size(); ++i) {
        if (pieces[i].lo < pieces[i - 1].hi)
            throw ValidationError("density pieces overlap");
    }
}

} // namespace

SpectralMeasure::SpectralMeasure(std::vector<Atom> atoms,
                                 std::vector<DensityPiece> pieces)
    : atoms_(std::move(atoms)), pieces_(std::move(pieces)) {
    std::stable_sort(atoms_.begin(), atoms_.end(),
                     [](const Atom& a, const Atom& b) { return a.freq < b.freq; });
    std::stable_sort(pieces_.begin(), pieces_.end(),
                     [](const DensityPiece& a, const DensityPiece& b) {
                         return a.lo < b.lo;
                     });
    validate(atoms_, pieces_);
}

SpectralMeasure SpectralMeasure::parse(const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed measure document: ") +
                              e.what());
    }
    if (!doc.is_object())
        throw ValidationError("measure document must be a JSON object");
    for (const auto& item : doc.items()) {
        if (item.key() != "atoms" && item.key() != "density")
            throw ValidationError("unknown key in measure document: " +
                                  item.key());
    }
    std::vector<Atom> atoms;
    std::vector<DensityPiece> pieces;
    if (doc.contains("atoms")) {
        for (const auto& a : doc.at("atoms")) {
            if (!a.is_object() || !a.contains("freq") || !a.contains("mass"))
                throw ValidationError("atom entries need \"freq\" and \"mass\"");
            double f = a.at("freq").get<double>();
            double m = a.at("mass").get<double>();
            if (f <= 0.0)
                throw ValidationError("atom frequency must be > 0");
            atoms.push_back({f, m});
        }
    }
    if (doc.contains("density")) {
        for (const auto& p : doc.at("density")) {
            if (!p.is_object() || !p.contains("from") || !p.contains("to") ||
                !p.contains("height"))
                throw ValidationError(
                    "density entries need \"from\", \"to\" and \"height\"");
            pieces.push_back({p.at("from").get<double>(),
                              p.at("to").get<double>(),
                              p.at("height").get<double>()});
        }
    }
    if (atoms.empty() && pieces.empty())
        throw ValidationError("empty measure");
    return SpectralMeasure(std::move(atoms), std::move(pieces));
}

std::string SpectralMeasure::to_json() const {
    nlohmann::json doc;
    doc["atoms"] = nlohmann::json::array();
    for (const auto& a : atoms_)
        doc["atoms"].push_back({{"freq", a.freq}, {"mass", a.mass}});
    doc["density"] = nlohmann::json::array();
    for (const auto& p : pieces_)
        doc["density"].push_back(
            {{"from", p.lo}, {"to", p.hi}, {"height", p.height}});
    return doc.dump();
}

double SpectralMeasure::total_mass() const {
    KahanSum s;
    for (const auto& a : atoms_) s.add(a.freq == 0.0 ? a.mass : 2.0 * a.mass);
    for (const auto& p : pieces_) s.add(2.0 * p.height * (p.hi - p.lo));
    return s.value();
}

double SpectralMeasure::max_freq() const {
    double m = 0.0;
    for (const auto& a : atoms_) m = std::max(m, a.freq);
    for (const auto& p : pieces_) m = std::max(m, p.hi);
    return m;
}

double SpectralMeasure::gap_radius() const {
    if (empty()) return std::numeric_limits<double>::infinity();
    double g = std::numeric_limits<double>::infinity();
    if (!atoms_.empty()) g = std::min(g, atoms_.front().freq);
    if (!pieces_.empty()) g = std::min(g, pieces_.front().lo);
    return g;
}

double SpectralMeasure::admissible_gap() const {
    double g = gap_radius();
    if (!std::isfinite(g)) return g;
    // an atom exactly on the edge carries positive mass, so back off
    for (const auto& a : atoms_)
        if (a.freq == g) return g * (1.0 - 1e-9);
    return g;
}

double SpectralMeasure::covariance(double x) const {
    if (x == 0.0) return total_mass();
    KahanSum s;
    for (const auto& a : atoms_) {
        double c = std::cos(kTwoPi * a.freq * x);
        s.add(a.freq == 0.0 ? a.mass : 2.0 * a.mass * c);
    }
    for (const auto& p : pieces_) {
        double num = std::sin(kTwoPi * p.hi * x) - std::sin(kTwoPi * p.lo * x);
        s.add(2.0 * p.height * num / (kTwoPi * x));
    }
    return s.value();
}

SpectralMeasure SpectralMeasure::dyadic_band(int k, double delta) const {
    if (delta <= 0.0) throw ValidationError("dyadic_band: delta must be > 0");
    double a = std::ldexp(delta, k);
    double lo = a / 4.0;
    double hi = a / 2.0;
    std::vector<Atom> atoms;
    for (const auto& at : atoms_)
        if (at.freq > lo && at.freq <= hi) atoms.push_back(at);
    std::vector<DensityPiece> pieces;
    for (const auto& p : pieces_) {
        double plo = std::max(p.lo, lo);
        double phi = std::min(p.hi, hi);
        if (phi > plo) pieces.push_back({plo, phi, p.height});
    }
    return SpectralMeasure(std::move(atoms), std::move(pieces));
}

SpectralMeasure SpectralMeasure::rescale_to_unit_band(double a) const {
    if (a <= 0.0)
        throw ValidationError("rescale_to_unit_band: scale must be > 0");
    double lo = a / 4.0;
    double hi = a / 2.0;
    double slack = 1e-12 * a;
    for (const auto& at : atoms_)
        if (at.freq <= lo - slack || at.freq > hi + slack)
            throw ValidationError(
                "rescale_to_unit_band: atom outside (a/4, a/2]");
    for (const auto& p : pieces_)
        if (p.lo < lo - slack || p.hi > hi + slack)
            throw ValidationError(
                "rescale_to_unit_band: density piece outside (a/4, a/2]");
    std::vector<Atom> atoms;
    atoms.reserve(atoms_.size());
    for (const auto& at : atoms_) atoms.push_back({at.freq / a, at.mass});
    std::vector<DensityPiece> pieces;
    pieces.reserve(pieces_.size());
    for (const auto& p : pieces_)
        pieces.push_back({p.lo / a, p.hi / a, p.height * a});
    return SpectralMeasure(std::move(atoms), std::move(pieces));
}

double SpectralMeasure::energy_integral(const Polynomial& q) const {
    KahanSum s;
    for (const auto& a : atoms_) {
        // both signs explicitly; |q| at +f and -f differ for complex q
        double plus = q.abs2_unit_circle(a.freq);
        if (a.freq == 0.0) {
            s.add(a.mass * plus);
        } else {
            double minus = q.abs2_unit_circle(-a.freq);
            s.add(a.mass * (plus + minus));
        }
    }
    if (!pieces_.empty()) {
        double mass = total_mass();
        // |q|^2 evaluated by Horner on the circle carries absolute noise of
        // order (eps * sum|c_k|)^2; tolerances below that are unreachable
        double l1 = 0.0;
        for (const auto& c : q.coeffs()) l1 += std::abs(c);
        double eval_noise = 256.0 * std::numeric_limits<double>::epsilon() *
                            std::max(l1, 1e-300);
        double noise_floor = eval_noise * eval_noise;
        for (const auto& p : pieces_) {
            if (p.height == 0.0) continue;
            auto f = [&](double y) {
                return p.height *
                       (q.abs2_unit_circle(y) + q.abs2_unit_circle(-y));
            };
            // initial resolution follows the oscillation rate of |q|^2
            std::size_t init = 8 + 8 * static_cast<std::size_t>(
                                       q.degree() * (p.hi - p.lo) + 1.0);
            double sup = 0.0;
            for (std::size_t i = 0; i <= 32; ++i) {
                double y = p.lo + (p.hi - p.lo) * static_cast<double>(i) / 32.0;
                sup = std::max(sup, q.abs2_unit_circle(y));
            }
            double tol = std::max(1e-10 * std::max(mass, 1e-300) * sup,
                                  2.0 * noise_floor * p.height * (p.hi - p.lo));
            s.add(integrate_simpson(f, p.lo, p.hi, tol, init));
        }
    }
    return s.value();
}

std::size_t SpectralMeasure::toeplitz_rank_bound() const {
    for (const auto& p : pieces_)
        if (p.height > 0.0) return static_cast<std::size_t>(-1);
    std::size_t rank = 0;
    double prev = -1.0;
    for (const auto& a : atoms_) {
        if (a.freq == prev) continue;
        rank += a.freq == 0.0 ? 1 : 2;
        prev = a.freq;
    }
    return rank;
}

double SpectralMeasure::even_moment(int two_j) const {
    KahanSum s;
    for (const auto& a : atoms_) {
        double t = std::pow(a.freq, two_j);
        s.add(a.freq == 0.0 ? (two_j == 0 ? a.mass : 0.0) : 2.0 * a.mass * t);
    }
    for (const auto& p : pieces_) {
        int e = two_j + 1;
        s.add(2.0 * p.height *
              (std::pow(p.hi, e) - std::pow(p.lo, e)) / static_cast<double>(e));
    }
    return s.value();
}

} // namespace specgap
