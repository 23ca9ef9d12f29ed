#include "symbreak/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "symbreak/errors.hpp"

namespace symbreak {

Matrix Matrix::transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

double Matrix::frobenius_norm() const {
    double s = 0.0;
    for (double v : a_) s += v * v;
    return std::sqrt(s);
}

double Matrix::max_abs() const {
    double s = 0.0;
    for (double v : a_) s = std::max(s, std::fabs(v));
    return s;
}

Matrix& Matrix::operator+=(const Matrix& o) {
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& o) {
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
    return *this;
}

Matrix& Matrix::operator*=(double s) {
    for (double& v : a_) v *= s;
    return *this;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            const double* brow = b.row(k);
            double* crow = c.row(i);
            for (std::size_t j = 0; j < b.cols(); ++j) crow[j] += aik * brow[j];
        }
    }
    return c;
}

std::vector<double> matvec(const Matrix& a, const std::vector<double>& x) {
    std::vector<double> y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x.data(), a.cols());
    return y;
}

double dot(const double* x, const double* y, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
}

double norm2(const double* x, std::size_t n) { return std::sqrt(dot(x, x, n)); }

namespace {

// Householder reduction of a symmetric matrix to tridiagonal form, with the
// accumulated orthogonal transform stored in z (tred2 scheme).
void tridiagonalize(Matrix& z, std::vector<double>& d, std::vector<double>& e) {
    const std::size_t n = z.rows();
    d.assign(n, 0.0);
    e.assign(n, 0.0);
    if (n == 0) return;

    for (std::size_t i = n - 1; i >= 1; --i) {
        const std::size_t l = i - 1;
        double h = 0.0, scale = 0.0;
        if (i > 1) {
            for (std::size_t k = 0; k <= l; ++k) scale += std::fabs(z(i, k));
            if (scale == 0.0) {
                e[i] = z(i, l);
            } else {
                for (std::size_t k = 0; k <= l; ++k) {
                    z(i, k) /= scale;
                    h += z(i, k) * z(i, k);
                }
                double f = z(i, l);
                double g = (f >= 0.0) ? -std::sqrt(h) : std::sqrt(h);
                e[i] = scale * g;
                h -= f * g;
                z(i, l) = f - g;
                f = 0.0;
                for (std::size_t j = 0; j <= l; ++j) {
                    z(j, i) = z(i, j) / h;
                    g = 0.0;
                    for (std::size_t k = 0; k <= j; ++k) g += z(j, k) * z(i, k);
                    for (std::size_t k = j + 1; k <= l; ++k) g += z(k, j) * z(i, k);
                    e[j] = g / h;
                    f += e[j] * z(i, j);
                }
                const double hh = f / (h + h);
                for (std::size_t j = 0; j <= l; ++j) {
                    f = z(i, j);
                    e[j] = g = e[j] - hh * f;
                    for (std::size_t k = 0; k <= j; ++k)
                        z(j, k) -= f * e[k] + g * z(i, k);
                }
            }
        } else {
            e[i] = z(i, l);
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (d[i] != 0.0) {
            for (std::size_t j = 0; j < i; ++j) {
                double g = 0.0;
                for (std::size_t k = 0; k < i; ++k) g += z(i, k) * z(k, j);
                for (std::size_t k = 0; k < i; ++k) z(k, j) -= g * z(k, i);
            }
        }
        d[i] = z(i, i);
        z(i, i) = 1.0;
        for (std::size_t j = 0; j < i; ++j) z(j, i) = z(i, j) = 0.0;
    }
}

double hypot2(double a, double b) { return std::sqrt(a * a + b * b); }

// Implicit-shift QL on a tridiagonal matrix, accumulating eigenvectors in z.
void ql_implicit(std::vector<double>& d, std::vector<double>& e, Matrix& z) {
    const std::size_t n = d.size();
    if (n <= 1) return;
    for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;

    for (std::size_t l = 0; l < n; ++l) {
        std::size_t iter = 0;
        std::size_t m;
        do {
            for (m = l; m + 1 < n; ++m) {
                const double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
                if (std::fabs(e[m]) <= 1e-300 || std::fabs(e[m]) <= 2.3e-16 * dd) break;
            }
            if (m != l) {
                if (++iter == 60)
                    throw convergence_error("sym_eig: QL iteration did not converge");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = hypot2(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + (g >= 0.0 ? std::fabs(r) : -std::fabs(r)));
                double s = 1.0, c = 1.0, p = 0.0;
                for (std::size_t i = m; i-- > l;) {
                    double f = s * e[i];
                    const double b = c * e[i];
                    r = hypot2(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    for (std::size_t k = 0; k < n; ++k) {
                        f = z(k, i + 1);
                        z(k, i + 1) = s * z(k, i) + c * f;
                        z(k, i) = c * z(k, i) - s * f;
                    }
                }
                if (r == 0.0 && m - l > 1) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

}  // namespace

SymEig sym_eig(const Matrix& a, bool want_vectors) {
    const std::size_t n = a.rows();
    Matrix z(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) z(i, j) = 0.5 * (a(i, j) + a(j, i));

    std::vector<double> d, e;
    tridiagonalize(z, d, e);
    ql_implicit(d, e, z);

    // Sort ascending, carrying vectors along.
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return d[i] < d[j]; });

    SymEig out;
    out.values.resize(n);
    if (want_vectors) out.vectors = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = d[idx[j]];
        if (want_vectors)
            for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = z(i, idx[j]);
    }
    return out;
}

std::vector<double> lu_solve(Matrix a, std::vector<double> b, double* cond1_estimate) {
    const std::size_t n = a.rows();
    if (a.cols() != n || b.size() != n) throw domain_error("lu_solve: shape mismatch");

    double norm1_a = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double col = 0.0;
        for (std::size_t i = 0; i < n; ++i) col += std::fabs(a(i, j));
        norm1_a = std::max(norm1_a, col);
    }

    std::vector<std::size_t> swap_with(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::fabs(a(i, k)) > std::fabs(a(p, k))) p = i;
        swap_with[k] = p;
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
            std::swap(b[k], b[p]);
        }
        const double pivot = a(k, k);
        if (std::fabs(pivot) < 1e-300)
            throw convergence_error("lu_solve: singular matrix");
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = a(i, k) / pivot;
            a(i, k) = f;
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
            b[i] -= f * b[k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
        x[i] = s / a(i, i);
    }

    if (cond1_estimate) {
        // ||A^-1||_1 lower bound from solves against a few probe vectors,
        // replaying the pivot swaps before the triangular sweeps.
        auto resolve = [&](std::vector<double> y) {
            for (std::size_t k = 0; k < n; ++k)
                if (swap_with[k] != k) std::swap(y[k], y[swap_with[k]]);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < i; ++j) y[i] -= a(i, j) * y[j];
            for (std::size_t i = n; i-- > 0;) {
                for (std::size_t j = i + 1; j < n; ++j) y[i] -= a(i, j) * y[j];
                y[i] /= a(i, i);
            }
            return y;
        };
        double inv_norm = 0.0;
        std::vector<double> probe(n, 1.0);
        auto y = resolve(probe);
        double s = 0.0;
        for (double v : y) s += std::fabs(v);
        inv_norm = std::max(inv_norm, s / static_cast<double>(n));
        for (std::size_t t = 0; t < std::min<std::size_t>(n, 4); ++t) {
            std::vector<double> ek(n, 0.0);
            ek[t] = 1.0;
            y = resolve(ek);
            s = 0.0;
            for (double v : y) s += std::fabs(v);
            inv_norm = std::max(inv_norm, s);
        }
        *cond1_estimate = norm1_a * inv_norm;
    }
    return x;
}

std::vector<double> lstsq(const Matrix& a, const std::vector<double>& b, double* cond_estimate) {
    const std::size_t m = a.rows(), n = a.cols();
    if (m < n || b.size() != m) throw domain_error("lstsq: shape mismatch");
    Matrix r = a;
    std::vector<double> rhs = b;

    for (std::size_t k = 0; k < n; ++k) {
        double alpha = 0.0;
        for (std::size_t i = k; i < m; ++i) alpha += r(i, k) * r(i, k);
        alpha = std::sqrt(alpha);
        if (alpha == 0.0) throw convergence_error("lstsq: rank deficient");
        if (r(k, k) > 0.0) alpha = -alpha;
        std::vector<double> v(m - k);
        v[0] = r(k, k) - alpha;
        for (std::size_t i = k + 1; i < m; ++i) v[i - k] = r(i, k);
        double vtv = 0.0;
        for (double t : v) vtv += t * t;
        if (vtv == 0.0) continue;
        for (std::size_t j = k; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = k; i < m; ++i) s += v[i - k] * r(i, j);
            s *= 2.0 / vtv;
            for (std::size_t i = k; i < m; ++i) r(i, j) -= s * v[i - k];
        }
        double s = 0.0;
        for (std::size_t i = k; i < m; ++i) s += v[i - k] * rhs[i];
        s *= 2.0 / vtv;
        for (std::size_t i = k; i < m; ++i) rhs[i] -= s * v[i - k];
    }

    if (cond_estimate) {
        double rmax = 0.0, rmin = 1e308;
        for (std::size_t k = 0; k < n; ++k) {
            rmax = std::max(rmax, std::fabs(r(k, k)));
            rmin = std::min(rmin, std::fabs(r(k, k)));
        }
        *cond_estimate = (rmin > 0.0) ? rmax / rmin : 1e308;
    }

    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = rhs[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= r(i, j) * x[j];
        x[i] = s / r(i, i);
    }
    return x;
}

}  // namespace symbreak
