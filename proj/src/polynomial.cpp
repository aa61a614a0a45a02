#include "polynomial.hpp"

#include <cmath>

#include "errors.hpp"
#include "numerics.hpp"

namespace specgap {

Polynomial::Polynomial(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) coeffs_.assign(1, Complex(0.0));
}

Polynomial::Polynomial(const std::vector<double>& real_coeffs) {
    coeffs_.reserve(real_coeffs.empty() ? 1 : real_coeffs.size());
    for (double c : real_coeffs) coeffs_.emplace_back(c, 0.0);
    if (coeffs_.empty()) coeffs_.assign(1, Complex(0.0));
}

Polynomial Polynomial::flat(std::size_t len) {
    if (len == 0) throw ValidationError("flat polynomial needs len >= 1");
    std::vector<Complex> c(len, Complex(1.0 / static_cast<double>(len), 0.0));
    return Polynomial(std::move(c));
}

bool Polynomial::is_zero() const {
    for (const auto& c : coeffs_)
        if (c != Complex(0.0)) return false;
    return true;
}

Polynomial::Complex Polynomial::eval(Complex z) const {
    Complex acc(0.0);
    for (std::size_t i = coeffs_.size(); i-- > 0;) acc = acc * z + coeffs_[i];
    return acc;
}

Polynomial::Complex Polynomial::eval_unit_circle(double t) const {
    return eval(Complex(std::cos(kTwoPi * t), std::sin(kTwoPi * t)));
}

double Polynomial::abs2_unit_circle(double t) const {
    return std::norm(eval_unit_circle(t));
}

Polynomial Polynomial::operator*(const Polynomial& rhs) const {
    const auto& a = coeffs_;
    const auto& b = rhs.coeffs_;
    std::vector<Complex> out(a.size() + b.size() - 1, Complex(0.0));
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == Complex(0.0)) continue;
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    }
    return Polynomial(std::move(out));
}

Polynomial Polynomial::scaled(Complex factor) const {
    std::vector<Complex> out(coeffs_);
    for (auto& c : out) c *= factor;
    return Polynomial(std::move(out));
}

double Polynomial::coeff_norm2() const {
    KahanSum s;
    for (const auto& c : coeffs_) s.add(std::norm(c));
    return s.value();
}

Polynomial::Complex Polynomial::coeff_sum() const {
    KahanSum re, im;
    for (const auto& c : coeffs_) {
        re.add(c.real());
        im.add(c.imag());
    }
    return {re.value(), im.value()};
}

double Polynomial::max_imag() const {
    double m = 0.0;
    for (const auto& c : coeffs_) m = std::max(m, std::abs(c.imag()));
    return m;
}

std::vector<double> Polynomial::real_coeffs() const {
    std::vector<double> out;
    out.reserve(coeffs_.size());
    for (const auto& c : coeffs_) out.push_back(c.real());
    return out;
}

Polynomial Polynomial::trimmed() const {
    std::size_t n = coeffs_.size();
    while (n > 1 && coeffs_[n - 1] == Complex(0.0)) --n;
    return Polynomial(std::vector<Complex>(coeffs_.begin(), coeffs_.begin() + n));
}

} // namespace specgap
