#include "toeplitz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "errors.hpp"
#include "numerics.hpp"

namespace specgap {

bool Matrix::is_symmetric(double tol) const {
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = i + 1; j < n_; ++j)
            if (std::abs(at(i, j) - at(j, i)) > tol) return false;
    return true;
}

double Matrix::frobenius() const {
    KahanSum s;
    for (double v : a_) s.add(v * v);
    return std::sqrt(s.value());
}

Matrix build_toeplitz(const SpectralMeasure& mu, std::size_t N) {
    std::vector<double> k(N + 1);
    for (std::size_t j = 0; j <= N; ++j)
        k[j] = mu.covariance(static_cast<double>(j));
    Matrix A(N + 1);
    for (std::size_t i = 0; i <= N; ++i)
        for (std::size_t j = 0; j <= N; ++j)
            A.at(i, j) = k[i > j ? i - j : j - i];
    return A;
}

EigenDecomposition jacobi_eigen(const Matrix& A_in) {
    std::size_t n = A_in.dim();
    double scale = A_in.frobenius();
    if (!A_in.is_symmetric(1e-12 * std::max(scale, 1.0)))
        throw ValidationError("jacobi_eigen: matrix is not symmetric");
    Matrix A = A_in;
    Matrix V(n);
    for (std::size_t i = 0; i < n; ++i) V.at(i, i) = 1.0;

    auto offdiag = [&]() {
        KahanSum s;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                s.add(A.at(i, j) * A.at(i, j));
        return std::sqrt(2.0 * s.value());
    };

    const double thresh = 1e-14 * std::max(scale, 1e-300);
    int sweep = 0;
    for (; sweep < 150 && offdiag() > thresh; ++sweep) {
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double apq = A.at(p, q);
                if (apq == 0.0) continue;
                double app = A.at(p, p);
                double aqq = A.at(q, q);
                double theta = (aqq - app) / (2.0 * apq);
                double t = (theta >= 0.0 ? 1.0 : -1.0) /
                           (std::abs(theta) +
                            std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (std::size_t i = 0; i < n; ++i) {
                    double aip = A.at(i, p);
                    double aiq = A.at(i, q);
                    A.at(i, p) = c * aip - s * aiq;
                    A.at(i, q) = s * aip + c * aiq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    double api = A.at(p, i);
                    double aqi = A.at(q, i);
                    A.at(p, i) = c * api - s * aqi;
                    A.at(q, i) = s * api + c * aqi;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    double vip = V.at(i, p);
                    double viq = V.at(i, q);
                    V.at(i, p) = c * vip - s * viq;
                    V.at(i, q) = s * vip + c * viq;
                }
            }
        }
    }

    // the reachable floor grows with dimension; only flag genuine stalls
    if (sweep >= 150 &&
        offdiag() > 10.0 * static_cast<double>(n) * thresh)
        throw NumericError("jacobi_eigen: sweep cap reached before "
                           "convergence");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return A.at(a, a) < A.at(b, b);
    });
    EigenDecomposition out;
    out.values.reserve(n);
    out.vectors.reserve(n);
    for (std::size_t idx : order) {
        out.values.push_back(A.at(idx, idx));
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = V.at(i, idx);
        out.vectors.push_back(std::move(v));
    }
    return out;
}

EigenPair min_eigenpair(const Matrix& A) {
    EigenDecomposition eig = jacobi_eigen(A);
    double scale = std::max(A.frobenius(), 1e-300);
    double lo = eig.values.front();
    // candidates within the degeneracy tolerance of the minimum
    std::size_t best = 0;
    for (std::size_t i = 1; i < eig.values.size(); ++i) {
        if (eig.values[i] > lo + 1e-12 * scale) break;
        const auto& a = eig.vectors[best];
        const auto& b = eig.vectors[i];
        for (std::size_t j = 0; j < a.size(); ++j) {
            double da = std::abs(a[j]);
            double db = std::abs(b[j]);
            if (std::abs(da - db) <= 1e-12) continue;
            if (db > da) best = i;
            break;
        }
    }
    EigenPair out;
    out.value = eig.values[best];
    out.vector = eig.vectors[best];
    for (double v : out.vector) {
        if (std::abs(v) > 1e-14) {
            if (v < 0.0)
                for (double& w : out.vector) w = -w;
            break;
        }
    }
    return out;
}

ToeplitzSpectrum sigma_for_band(const SpectralMeasure& mu_unit, std::size_t N) {
    double slack = 1e-12;
    if (mu_unit.gap_radius() <= 0.25 - slack || mu_unit.max_freq() > 0.5 + slack)
        throw ValidationError(
            "sigma_for_band: measure must be supported in (1/4, 1/2]");
    Matrix A = build_toeplitz(mu_unit, N);
    EigenPair pair = min_eigenpair(A);
    ToeplitzSpectrum out;
    double scale = std::max(A.frobenius(), 1e-300);
    if (pair.value < -1e-8 * scale)
        throw NumericError("sigma_for_band: covariance matrix has a "
                           "materially negative eigenvalue");
    out.exact_zero = N + 1 > mu_unit.toeplitz_rank_bound();
    out.sigma2 = out.exact_zero ? 0.0 : std::max(pair.value, 0.0);
    out.minimizer = Polynomial(pair.vector);
    out.dim = N + 1;
    return out;
}

namespace {

#if defined(__GNUC__) && defined(__x86_64__)
using WideReal = __float128; // soft-float via libgcc, arithmetic only
#else
using WideReal = long double;
#endif

// Even moments of mu in extended precision, via iterated powers (no pow).
std::vector<WideReal> wide_even_moments(const SpectralMeasure& mu, int count) {
    std::vector<WideReal> m(static_cast<std::size_t>(count), WideReal(0));
    for (const auto& a : mu.atoms()) {
        WideReal y2 = WideReal(a.freq) * WideReal(a.freq);
        WideReal w = a.freq == 0.0 ? WideReal(a.mass)
                                   : WideReal(2.0) * WideReal(a.mass);
        WideReal pw(1);
        for (int j = 0; j < count; ++j) {
            if (a.freq == 0.0) {
                if (j == 0) m[0] += w;
            } else {
                m[static_cast<std::size_t>(j)] += w * pw;
            }
            pw *= y2;
        }
    }
    for (const auto& p : mu.pieces()) {
        WideReal lo = p.lo, hi = p.hi;
        WideReal plo = lo, phi = hi;
        for (int j = 0; j < count; ++j) {
            int e = 2 * j + 1;
            m[static_cast<std::size_t>(j)] +=
                WideReal(2.0 * p.height) * (phi - plo) / WideReal(e);
            plo *= lo * lo;
            phi *= hi * hi;
        }
    }
    return m;
}

// LDLT solve of G x = e0 without pivoting; returns false if a pivot falls
// below the floor (numerically singular).
bool ldlt_solve_e0(std::vector<WideReal>& A, std::size_t n,
                   WideReal pivot_floor, std::vector<WideReal>& x) {
    std::vector<WideReal> d(n);
    for (std::size_t j = 0; j < n; ++j) {
        WideReal dj = A[j * n + j];
        for (std::size_t k = 0; k < j; ++k)
            dj -= A[j * n + k] * A[j * n + k] * d[k];
        if (dj <= pivot_floor) return false;
        d[j] = dj;
        for (std::size_t i = j + 1; i < n; ++i) {
            WideReal lij = A[i * n + j];
            for (std::size_t k = 0; k < j; ++k)
                lij -= A[i * n + k] * A[j * n + k] * d[k];
            A[i * n + j] = lij / dj;
        }
    }
    x.assign(n, WideReal(0));
    x[0] = WideReal(1); // forward solve L y = e0
    for (std::size_t i = 1; i < n; ++i) {
        WideReal acc(0);
        for (std::size_t k = 0; k < i; ++k) acc += A[i * n + k] * x[k];
        x[i] = -acc;
    }
    for (std::size_t i = 0; i < n; ++i) x[i] /= d[i];
    for (std::size_t i = n; i-- > 0;) { // back solve L^T x = y
        WideReal acc = x[i];
        for (std::size_t k = i + 1; k < n; ++k) acc -= A[k * n + i] * x[k];
        x[i] = acc;
    }
    return true;
}

// integral of |1 + sum v_k y^k|^2 d mu evaluated directly (atom sums plus
// Simpson on density pieces); independent of the moment-matrix route.
double direct_slice_energy(const SpectralMeasure& mu,
                           const std::vector<double>& v) {
    auto eval = [&](double y) {
        double acc = 0.0;
        for (std::size_t i = v.size(); i-- > 0;) acc = acc * y + v[i];
        return acc;
    };
    KahanSum s;
    for (const auto& a : mu.atoms()) {
        double plus = eval(a.freq);
        if (a.freq == 0.0) {
            s.add(a.mass * plus * plus);
        } else {
            double minus = eval(-a.freq);
            s.add(a.mass * (plus * plus + minus * minus));
        }
    }
    for (const auto& p : mu.pieces()) {
        if (p.height == 0.0) continue;
        auto f = [&](double y) {
            double pl = eval(y);
            double mi = eval(-y);
            return p.height * (pl * pl + mi * mi);
        };
        double sup = 0.0;
        for (int i = 0; i <= 16; ++i) {
            double y = p.lo + (p.hi - p.lo) * i / 16.0;
            sup = std::max(sup, std::abs(f(y)));
        }
        s.add(integrate_simpson(f, p.lo, p.hi, 1e-12 * std::max(sup, 1e-30),
                                static_cast<std::size_t>(4 * v.size() + 8)));
    }
    return s.value();
}

} // namespace

RhoValue rho(const SpectralMeasure& mu, int n, int n_gate) {
    if (n < 0) throw ValidationError("rho: n must be >= 0");
    if (n > n_gate)
        throw ValidationError(
            "rho: n exceeds the conditioning gate (Hankel moment matrices "
            "are exponentially ill-conditioned); raise the gate explicitly "
            "to override");
    std::size_t dim = static_cast<std::size_t>(n) + 1;
    std::vector<WideReal> moments = wide_even_moments(mu, 2 * n + 1);
    std::vector<WideReal> G(dim * dim, WideReal(0));
    Matrix Gd(dim);
    for (std::size_t j = 0; j < dim; ++j) {
        for (std::size_t k = 0; k < dim; ++k) {
            // odd moments vanish by the symmetry of mu
            WideReal m = ((j + k) % 2 == 0) ? moments[(j + k) / 2] : WideReal(0);
            G[j * dim + k] = m;
            Gd.at(j, k) = static_cast<double>(m);
        }
    }

    RhoValue out;
    out.n = n;
    {
        EigenDecomposition eig = jacobi_eigen(Gd);
        double lam_max = std::max(std::abs(eig.values.front()),
                                  std::abs(eig.values.back()));
        double lam_min = lam_max;
        for (double v : eig.values) lam_min = std::min(lam_min, std::abs(v));
        out.condition_estimate =
            lam_min > 0.0 ? lam_max / lam_min
                          : std::numeric_limits<double>::infinity();
    }

    WideReal max_diag(0);
    for (std::size_t j = 0; j < dim; ++j)
        max_diag = std::max(max_diag, G[j * dim + j]);
    double mass = mu.total_mass();

    std::vector<double> v(dim, 0.0);
    std::vector<WideReal> x;
    std::vector<WideReal> Gwork = G;
    if (ldlt_solve_e0(Gwork, dim, WideReal(1e-30) * max_diag, x)) {
        // rho2 = 1/(G^{-1})_{00}; minimizer v = x / x_0
        double inv00 = static_cast<double>(x[0]);
        if (inv00 <= 0.0)
            throw NumericError("rho: symmetric solve degenerated");
        out.rho2 = std::min(1.0 / inv00, mass);
        for (std::size_t j = 0; j < dim; ++j)
            v[j] = static_cast<double>(x[j] / x[0]);
        double direct = direct_slice_energy(mu, v);
        // the solved minimizer is admissible, so its direct energy brackets
        // the solve; disagreement signals conditioning breakdown
        if (std::abs(direct - out.rho2) >
            1e-2 * std::max({direct, out.rho2, 1e-280}))
            throw NumericError(
                "rho: moment solve inconsistent with direct evaluation "
                "(condition estimate " +
                std::to_string(out.condition_estimate) + ")");
    } else {
        // numerically singular: split the kernel off by eigen threshold
        EigenDecomposition eig = jacobi_eigen(Gd);
        double lam_max = std::max(std::abs(eig.values.back()), 1e-300);
        double threshold = 1e-13 * lam_max;
        std::size_t pick = dim;
        double best = 1e-9; // kernel vectors below this v0 cannot reach v0=1
        for (std::size_t i = 0; i < dim; ++i) {
            if (eig.values[i] <= threshold &&
                std::abs(eig.vectors[i][0]) > best) {
                best = std::abs(eig.vectors[i][0]);
                pick = i;
            }
        }
        if (pick < dim) {
            // a kernel direction reaches the slice v_0 = 1, so the infimum
            // is 0; it must genuinely annihilate the measure
            for (std::size_t j = 0; j < dim; ++j)
                v[j] = eig.vectors[pick][j] / eig.vectors[pick][0];
            double direct = direct_slice_energy(mu, v);
            if (direct > 1e-10 * std::max(mass, 1e-300))
                throw NumericError(
                    "rho: kernel candidate fails to annihilate the measure "
                    "(conditioning failure, condition estimate " +
                    std::to_string(out.condition_estimate) + ")");
            out.rho2 = 0.0;
        } else {
            // kernel is orthogonal to the slice: minimize over the retained
            // spectrum, rho2 = 1 / sum_{lambda > thr} V_{0i}^2 / lambda_i
            KahanSum inv_sum;
            for (std::size_t i = 0; i < dim; ++i) {
                if (eig.values[i] <= threshold) continue;
                inv_sum.add(eig.vectors[i][0] * eig.vectors[i][0] /
                            eig.values[i]);
            }
            if (inv_sum.value() <= 0.0)
                throw NumericError("rho: thresholded solve degenerated");
            out.rho2 = std::min(1.0 / inv_sum.value(), mass);
            for (std::size_t i = 0; i < dim; ++i) {
                if (eig.values[i] <= threshold) continue;
                double w = out.rho2 * eig.vectors[i][0] / eig.values[i];
                for (std::size_t j = 0; j < dim; ++j)
                    v[j] += w * eig.vectors[i][j];
            }
            double direct = direct_slice_energy(mu, v);
            if (std::abs(direct - out.rho2) >
                1e-2 * std::max({direct, out.rho2, 1e-280}))
                throw NumericError(
                    "rho: thresholded solve inconsistent with direct "
                    "evaluation (condition estimate " +
                    std::to_string(out.condition_estimate) + ")");
        }
    }
    out.minimizer_moments.assign(v.begin() + 1, v.end());
    return out;
}

} // namespace specgap
