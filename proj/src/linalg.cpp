#include "mqc/linalg.hpp"

#include <numeric>

#include "mqc/config.hpp"

namespace mqc {

CMatrix to_complex(const RMatrix& a) {
    CMatrix c(a.rows(), a.cols());
    for (std::size_t k = 0; k < a.storage().size(); ++k) c.storage()[k] = a.storage()[k];
    return c;
}

RMatrix real_part(const CMatrix& a) {
    RMatrix r(a.rows(), a.cols());
    for (std::size_t k = 0; k < a.storage().size(); ++k) r.storage()[k] = a.storage()[k].real();
    return r;
}

RMatrix imag_part(const CMatrix& a) {
    RMatrix r(a.rows(), a.cols());
    for (std::size_t k = 0; k < a.storage().size(); ++k) r.storage()[k] = a.storage()[k].imag();
    return r;
}

cplx trace_product(const CMatrix& a, const CMatrix& b) {
    if (a.cols() != b.rows() || a.rows() != b.cols()) throw ShapeError("trace_product shape mismatch");
    cplx s = 0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, i);
    return s;
}

double trace_product_re(const CMatrix& a, const CMatrix& b) {
    if (a.cols() != b.rows() || a.rows() != b.cols()) throw ShapeError("trace_product shape mismatch");
    double s = 0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const cplx x = a(i, k);
            const cplx y = b(k, i);
            s += x.real() * y.real() - x.imag() * y.imag();
        }
    return s;
}

double hermiticity_defect(const CMatrix& a) {
    if (!a.square()) throw ShapeError("Hermiticity check on a non-square matrix");
    double d = 0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) d += std::norm(a(i, j) - std::conj(a(j, i)));
    return std::sqrt(d) / std::max(1.0, a.frobenius_norm());
}

bool is_hermitian(const CMatrix& a, double rel_tol) { return hermiticity_defect(a) <= rel_tol; }

CMatrix hermitian_part(const CMatrix& a) {
    CMatrix h = a + a.adjoint();
    h *= cplx(0.5);
    return h;
}

namespace {

template <class T>
EigResult<T> jacobi(Matrix<T> a) {
    const std::size_t n = a.rows();
    Matrix<T> v = Matrix<T>::identity(n);
    const double fro = a.frobenius_norm();
    const double stop = tol().jacobi * fro;
    const double skip = 1e-17 * fro;

    auto off_norm = [&] {
        double s = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j) s += detail::abs2(a(i, j));
        return std::sqrt(s);
    };

    bool converged = (n < 2) || fro == 0.0;
    for (int sweep = 0; sweep < tol().jacobi_sweeps && !converged; ++sweep) {
        if (off_norm() <= stop) {
            converged = true;
            break;
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const T apq = a(p, q);
                const double g = std::sqrt(detail::abs2(apq));
                if (g <= skip || g == 0.0) continue;
                const double app = std::real(a(p, p));
                const double aqq = std::real(a(q, q));
                const double theta = (aqq - app) / (2.0 * g);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const T phc = detail::conj_of(apq / g);
                const T upp = T(c), upq = T(s), uqp = -T(s) * phc, uqq = T(c) * phc;
                for (std::size_t k = 0; k < n; ++k) {
                    const T akp = a(k, p), akq = a(k, q);
                    a(k, p) = akp * upp + akq * uqp;
                    a(k, q) = akp * upq + akq * uqq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const T apk = a(p, k), aqk = a(q, k);
                    a(p, k) = detail::conj_of(upp) * apk + detail::conj_of(uqp) * aqk;
                    a(q, k) = detail::conj_of(upq) * apk + detail::conj_of(uqq) * aqk;
                }
                a(p, q) = T{};
                a(q, p) = T{};
                a(p, p) = T(app - t * g);
                a(q, q) = T(aqq + t * g);
                for (std::size_t k = 0; k < n; ++k) {
                    const T vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = vkp * upp + vkq * uqp;
                    v(k, q) = vkp * upq + vkq * uqq;
                }
            }
        }
        if (off_norm() <= stop) converged = true;
    }
    if (!converged) throw ConvergenceError("Jacobi eigensolver did not converge within the sweep budget");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return std::real(a(x, x)) > std::real(a(y, y)); });
    EigResult<T> r;
    r.values.resize(n);
    r.vectors = Matrix<T>(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        r.values[k] = std::real(a(order[k], order[k]));
        for (std::size_t i = 0; i < n; ++i) r.vectors(i, k) = v(i, order[k]);
    }
    return r;
}

}  // namespace

EigResult<cplx> herm_eig(const CMatrix& a) {
    if (!a.square()) throw ShapeError("herm_eig needs a square matrix");
    if (!is_hermitian(a, tol().hermitian)) throw NonHermitianError("herm_eig input is not Hermitian");
    return jacobi(hermitian_part(a));
}

EigResult<double> sym_eig(const RMatrix& a) {
    if (!a.square()) throw ShapeError("sym_eig needs a square matrix");
    double d = 0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) d += detail::abs2(a(i, j) - a(j, i));
    if (std::sqrt(d) / std::max(1.0, a.frobenius_norm()) > tol().hermitian)
        throw NonHermitianError("sym_eig input is not symmetric");
    RMatrix s = a + a.transpose();
    s *= 0.5;
    return jacobi(s);
}

std::vector<double> herm_eigvals(const CMatrix& a) { return herm_eig(a).values; }

double min_eigval(const CMatrix& a) { return herm_eig(a).values.back(); }

double max_eigval(const CMatrix& a) { return herm_eig(a).values.front(); }

CMatrix herm_function(const CMatrix& a, const std::function<double(double)>& f) {
    auto e = herm_eig(a);
    const std::size_t n = a.rows();
    CMatrix r(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const double fk = f(e.values[k]);
        if (fk == 0.0) continue;
        for (std::size_t i = 0; i < n; ++i) {
            const cplx vi = e.vectors(i, k) * fk;
            for (std::size_t j = 0; j < n; ++j) r(i, j) += vi * std::conj(e.vectors(j, k));
        }
    }
    return r;
}

RMatrix sym_function(const RMatrix& a, const std::function<double(double)>& f) {
    auto e = sym_eig(a);
    const std::size_t n = a.rows();
    RMatrix r(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const double fk = f(e.values[k]);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) r(i, j) += e.vectors(i, k) * fk * e.vectors(j, k);
    }
    return r;
}

double trace_norm(const CMatrix& a) {
    if (a.square() && is_hermitian(a, tol().hermitian)) {
        double s = 0;
        for (double x : herm_eigvals(a)) s += std::abs(x);
        return s;
    }
    // Singular values are the positive eigenvalues of the Hermitian dilation.
    const std::size_t r = a.rows(), c = a.cols();
    CMatrix d(r + c, r + c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) {
            d(i, r + j) = a(i, j);
            d(r + j, i) = std::conj(a(i, j));
        }
    double s = 0;
    for (double x : herm_eigvals(d))
        if (x > 0) s += x;
    return s;
}

double op_norm(const CMatrix& a) {
    if (a.square() && is_hermitian(a, tol().hermitian)) {
        auto v = herm_eigvals(a);
        return std::max(std::abs(v.front()), std::abs(v.back()));
    }
    return std::sqrt(std::max(0.0, max_eigval(a.adjoint() * a)));
}

double op_norm(const RMatrix& a) { return op_norm(to_complex(a)); }

CMatrix psd_project(const CMatrix& a) {
    return herm_function(a, [](double x) { return x > 0 ? x : 0.0; });
}

CMatrix sqrtm_psd(const CMatrix& a) {
    return herm_function(a, [](double x) { return x > 0 ? std::sqrt(x) : 0.0; });
}

RMatrix sqrtm_psd(const RMatrix& a) {
    return sym_function(a, [](double x) { return x > 0 ? std::sqrt(x) : 0.0; });
}

namespace {

template <class T>
T lu_det(Matrix<T> a) {
    if (!a.square()) throw ShapeError("det of a non-square matrix");
    const std::size_t n = a.rows();
    T d = T(1);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = std::abs(a(k, k));
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > best) {
                best = std::abs(a(i, k));
                piv = i;
            }
        if (best == 0.0) return T(0);
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            d = -d;
        }
        d *= a(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            const T f = a(i, k) / a(k, k);
            if (f == T{}) continue;
            for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
        }
    }
    return d;
}

template <class T>
Matrix<T> gauss_jordan_inverse(Matrix<T> a) {
    if (!a.square()) throw ShapeError("inverse of a non-square matrix");
    const std::size_t n = a.rows();
    Matrix<T> inv = Matrix<T>::identity(n);
    const double scale = std::max(1e-300, a.max_abs());
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = std::abs(a(k, k));
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > best) {
                best = std::abs(a(i, k));
                piv = i;
            }
        if (best <= 1e-14 * scale) throw InvalidArgument("matrix is singular to working precision");
        if (piv != k)
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(a(k, j), a(piv, j));
                std::swap(inv(k, j), inv(piv, j));
            }
        const T p = a(k, k);
        for (std::size_t j = 0; j < n; ++j) {
            a(k, j) /= p;
            inv(k, j) /= p;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == k) continue;
            const T f = a(i, k);
            if (f == T{}) continue;
            for (std::size_t j = 0; j < n; ++j) {
                a(i, j) -= f * a(k, j);
                inv(i, j) -= f * inv(k, j);
            }
        }
    }
    return inv;
}

template <class T>
Matrix<T> taylor_expm(const Matrix<T>& a) {
    if (!a.square()) throw ShapeError("expm of a non-square matrix");
    const std::size_t n = a.rows();
    double norm1 = 0;
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0;
        for (std::size_t i = 0; i < n; ++i) s += std::abs(a(i, j));
        norm1 = std::max(norm1, s);
    }
    int squarings = 0;
    if (norm1 > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm1 / 0.5)));
    Matrix<T> b = a / T(std::ldexp(1.0, squarings));
    Matrix<T> result = Matrix<T>::identity(n);
    Matrix<T> term = Matrix<T>::identity(n);
    for (int k = 1; k <= 30; ++k) {
        term = term * b;
        term /= T(k);
        result += term;
        if (term.max_abs() < 1e-18 * result.max_abs()) break;
    }
    for (int s = 0; s < squarings; ++s) result = result * result;
    return result;
}

}  // namespace

double det(const RMatrix& a) { return lu_det(a); }
cplx det(const CMatrix& a) { return lu_det(a); }
RMatrix inverse(const RMatrix& a) { return gauss_jordan_inverse(a); }
CMatrix inverse(const CMatrix& a) { return gauss_jordan_inverse(a); }
RMatrix expm(const RMatrix& a) { return taylor_expm(a); }
CMatrix expm(const CMatrix& a) { return taylor_expm(a); }

CMatrix outer(const CVector& a, const CVector& b) {
    CMatrix m(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) m(i, j) = a[i] * std::conj(b[j]);
    return m;
}

CMatrix projector(const CVector& v) { return outer(v, v); }

CVector matvec(const CMatrix& a, const CVector& v) {
    if (a.cols() != v.size()) throw ShapeError("matvec shape mismatch");
    CVector r(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        cplx s = 0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * v[j];
        r[i] = s;
    }
    return r;
}

cplx inner(const CVector& a, const CVector& b) {
    if (a.size() != b.size()) throw ShapeError("inner product size mismatch");
    cplx s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

double vec_norm(const CVector& v) { return std::sqrt(std::real(inner(v, v))); }

}  // namespace mqc
