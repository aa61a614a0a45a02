#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace specgap {

// Dense polynomial in z with complex coefficients; coeffs()[k] multiplies z^k.
class Polynomial {
public:
    using Complex = std::complex<double>;

    Polynomial() : coeffs_(1, Complex(0.0)) {}
    explicit Polynomial(std::vector<Complex> coeffs);
    explicit Polynomial(const std::vector<double>& real_coeffs);

    static Polynomial one() { return Polynomial(std::vector<double>{1.0}); }
    // (c0 + c1 z + ... + c_{len-1} z^{len-1}) with all coefficients 1/len.
    static Polynomial flat(std::size_t len);

    const std::vector<Complex>& coeffs() const { return coeffs_; }
    std::size_t degree() const { return coeffs_.size() - 1; }
    bool is_zero() const;

    Complex eval(Complex z) const;              // Horner
    Complex eval_unit_circle(double t) const;   // p(e^{2*pi*i*t})
    double abs2_unit_circle(double t) const;    // |p(e^{2*pi*i*t})|^2

    Polynomial operator*(const Polynomial& rhs) const; // direct convolution
    Polynomial scaled(Complex factor) const;

    double coeff_norm2() const; // sum |c_k|^2
    Complex coeff_sum() const;

    // Max |imag part| over coefficients; 0 for genuinely real polynomials.
    double max_imag() const;
    std::vector<double> real_coeffs() const;

    // Drop exact-zero leading coefficients (keeps at least one).
    Polynomial trimmed() const;

private:
    std::vector<Complex> coeffs_;
};

} // namespace specgap
