#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <type_traits>
#include <vector>

#include "mqc/errors.hpp"

namespace mqc {

using cplx = std::complex<double>;

namespace detail {
inline double conj_of(double x) { return x; }
inline cplx conj_of(const cplx& x) { return std::conj(x); }
inline double abs2(double x) { return x * x; }
inline double abs2(const cplx& x) { return std::norm(x); }
}  // namespace detail

// Dense row-major matrix. Only the operations the library needs are
// provided; anything heavier goes through the free functions below.
template <class T>
class Matrix {
public:
    using value_type = T;

    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, T fill = T{})
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::initializer_list<std::initializer_list<T>> init) {
        rows_ = init.size();
        cols_ = rows_ ? init.begin()->size() : 0;
        data_.reserve(rows_ * cols_);
        for (const auto& row : init) {
            if (row.size() != cols_) throw ShapeError("ragged initializer list");
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }
    bool empty() const { return data_.empty(); }

    T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }
    std::vector<T>& storage() { return data_; }
    const std::vector<T>& storage() const { return data_; }

    Matrix& operator+=(const Matrix& o) {
        check_same(o);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
        return *this;
    }
    Matrix& operator-=(const Matrix& o) {
        check_same(o);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
        return *this;
    }
    Matrix& operator*=(T s) {
        for (auto& x : data_) x *= s;
        return *this;
    }
    Matrix& operator/=(T s) {
        for (auto& x : data_) x /= s;
        return *this;
    }

    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator-(Matrix a) {
        for (auto& x : a.data_) x = -x;
        return a;
    }
    friend Matrix operator*(Matrix a, T s) { return a *= s; }
    friend Matrix operator*(T s, Matrix a) { return a *= s; }
    friend Matrix operator/(Matrix a, T s) { return a /= s; }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_) throw ShapeError("matrix product shape mismatch");
        Matrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i) {
            T* crow = c.data() + i * c.cols_;
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const T aik = a(i, k);
                if (aik == T{}) continue;
                const T* brow = b.data() + k * b.cols_;
                for (std::size_t j = 0; j < b.cols_; ++j) crow[j] += aik * brow[j];
            }
        }
        return c;
    }

    Matrix transpose() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    Matrix adjoint() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = detail::conj_of((*this)(i, j));
        return t;
    }

    Matrix conjugate() const {
        Matrix t(*this);
        for (auto& x : t.data_) x = detail::conj_of(x);
        return t;
    }

    T trace() const {
        if (!square()) throw ShapeError("trace of a non-square matrix");
        T s{};
        for (std::size_t i = 0; i < rows_; ++i) s += (*this)(i, i);
        return s;
    }

    double frobenius_norm() const {
        double s = 0;
        for (const auto& x : data_) s += detail::abs2(x);
        return std::sqrt(s);
    }

    double max_abs() const {
        double m = 0;
        for (const auto& x : data_) m = std::max(m, std::sqrt(detail::abs2(x)));
        return m;
    }

private:
    void check_same(const Matrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) throw ShapeError("matrix shape mismatch");
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

using CMatrix = Matrix<cplx>;
using RMatrix = Matrix<double>;
using CVector = std::vector<cplx>;

CMatrix to_complex(const RMatrix& a);
RMatrix real_part(const CMatrix& a);
RMatrix imag_part(const CMatrix& a);

template <class T>
Matrix<T> kron(const Matrix<T>& a, const Matrix<T>& b) {
    Matrix<T> k(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const T aij = a(i, j);
            if (aij == T{}) continue;
            for (std::size_t p = 0; p < b.rows(); ++p)
                for (std::size_t q = 0; q < b.cols(); ++q)
                    k(i * b.rows() + p, j * b.cols() + q) = aij * b(p, q);
        }
    return k;
}

// Tr(A B) without forming the product.
cplx trace_product(const CMatrix& a, const CMatrix& b);
// Real part of Tr(A B) for Hermitian arguments.
double trace_product_re(const CMatrix& a, const CMatrix& b);

// Largest |A - A^dagger| entry relative to max(1, |A|_F).
double hermiticity_defect(const CMatrix& a);
bool is_hermitian(const CMatrix& a, double rel_tol);
CMatrix hermitian_part(const CMatrix& a);

template <class T>
struct EigResult {
    std::vector<double> values;  // descending
    Matrix<T> vectors;           // column k belongs to values[k]
};

// Cyclic Jacobi eigensolver. Rejects inputs that are not Hermitian within
// the configured relative tolerance and throws ConvergenceError when the
// sweep budget is exhausted.
EigResult<cplx> herm_eig(const CMatrix& a);
EigResult<double> sym_eig(const RMatrix& a);
std::vector<double> herm_eigvals(const CMatrix& a);
double min_eigval(const CMatrix& a);
double max_eigval(const CMatrix& a);

// f applied to the spectrum of a Hermitian matrix.
CMatrix herm_function(const CMatrix& a, const std::function<double(double)>& f);
RMatrix sym_function(const RMatrix& a, const std::function<double(double)>& f);

double trace_norm(const CMatrix& a);
double op_norm(const CMatrix& a);
double op_norm(const RMatrix& a);
CMatrix psd_project(const CMatrix& a);
CMatrix sqrtm_psd(const CMatrix& a);
RMatrix sqrtm_psd(const RMatrix& a);

// Partial pivoting LU based helpers.
double det(const RMatrix& a);
cplx det(const CMatrix& a);
RMatrix inverse(const RMatrix& a);
CMatrix inverse(const CMatrix& a);

// Scaling and squaring Taylor exponential.
RMatrix expm(const RMatrix& a);
CMatrix expm(const CMatrix& a);

CMatrix outer(const CVector& a, const CVector& b);
CMatrix projector(const CVector& v);
CVector matvec(const CMatrix& a, const CVector& v);
cplx inner(const CVector& a, const CVector& b);
double vec_norm(const CVector& v);

// Direct sum A (+) B.
template <class T>
Matrix<T> direct_sum(const Matrix<T>& a, const Matrix<T>& b) {
    Matrix<T> s(a.rows() + b.rows(), a.cols() + b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) s(i, j) = a(i, j);
    for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) s(a.rows() + i, a.cols() + j) = b(i, j);
    return s;
}

// Rows and columns selected by idx, in the given order.
template <class T>
Matrix<T> submatrix(const Matrix<T>& a, const std::vector<std::size_t>& idx) {
    Matrix<T> s(idx.size(), idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = 0; j < idx.size(); ++j) s(i, j) = a(idx[i], idx[j]);
    return s;
}

}  // namespace mqc
