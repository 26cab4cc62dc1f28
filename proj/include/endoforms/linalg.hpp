#pragma once

// Dense real matrix/vector kernel sized for desk-scale work (n up to a few dozen).
//
// Indices are zero-based throughout. Matrices are row-major and entry (i, j) is
// the i-th component of the image of the j-th basis vector.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "endoforms/errors.hpp"

namespace endo {

class Vec {
public:
    Vec() = default;
    explicit Vec(std::size_t n, double fill = 0.0) : v_(n, fill) {}
    Vec(std::initializer_list<double> init) : v_(init) {}
    explicit Vec(std::vector<double> values) : v_(std::move(values)) {}

    static Vec unit(std::size_t n, std::size_t i)
    {
        Vec e(n);
        e[i] = 1.0;
        return e;
    }

    std::size_t size() const noexcept { return v_.size(); }
    double& operator[](std::size_t i) { return v_[i]; }
    double operator[](std::size_t i) const { return v_[i]; }
    std::span<const double> values() const noexcept { return v_; }
    const std::vector<double>& data() const noexcept { return v_; }

    auto begin() noexcept { return v_.begin(); }
    auto end() noexcept { return v_.end(); }
    auto begin() const noexcept { return v_.begin(); }
    auto end() const noexcept { return v_.end(); }

    Vec& operator+=(const Vec& o)
    {
        check_same(o);
        for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
        return *this;
    }
    Vec& operator-=(const Vec& o)
    {
        check_same(o);
        for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
        return *this;
    }
    Vec& operator*=(double s)
    {
        for (auto& x : v_) x *= s;
        return *this;
    }
    Vec& operator/=(double s)
    {
        for (auto& x : v_) x /= s;
        return *this;
    }

    friend bool operator==(const Vec&, const Vec&) = default;

private:
    void check_same(const Vec& o) const
    {
        if (o.size() != size()) throw InputError("vector dimension mismatch");
    }

    std::vector<double> v_;
};

inline Vec operator+(Vec a, const Vec& b) { return a += b; }
inline Vec operator-(Vec a, const Vec& b) { return a -= b; }
inline Vec operator*(double s, Vec a) { return a *= s; }
inline Vec operator*(Vec a, double s) { return a *= s; }
inline Vec operator/(Vec a, double s) { return a /= s; }
inline Vec operator-(Vec a) { return a *= -1.0; }

inline double dot(const Vec& a, const Vec& b)
{
    if (a.size() != b.size()) throw InputError("vector dimension mismatch in dot product");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

inline double norm_max(const Vec& a)
{
    double m = 0.0;
    for (double x : a) m = std::max(m, std::abs(x));
    return m;
}

inline Vec normalized(const Vec& a)
{
    const double len = norm(a);
    if (len == 0.0) throw InputError("cannot normalize the zero vector");
    return a / len;
}

inline bool is_finite(const Vec& a)
{
    return std::all_of(a.begin(), a.end(), [](double x) { return std::isfinite(x); });
}

inline Vec cross(const Vec& a, const Vec& b)
{
    if (a.size() != 3 || b.size() != 3) throw InputError("cross product needs 3-vectors");
    return Vec{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

/// Dense real matrix. Endomorphisms are square; rectangular shapes appear only
/// in least-squares systems.
class Mat {
public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), a_(rows * cols, fill)
    {
    }
    explicit Mat(std::size_t n) : Mat(n, n) {}
    Mat(std::initializer_list<std::initializer_list<double>> rows)
        : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0)
    {
        a_.reserve(rows_ * cols_);
        for (const auto& r : rows) {
            if (r.size() != cols_) throw InputError("ragged matrix initializer");
            a_.insert(a_.end(), r.begin(), r.end());
        }
    }

    static Mat identity(std::size_t n)
    {
        Mat m(n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static Mat diagonal(const Vec& d)
    {
        Mat m(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
        return m;
    }

    static Mat from_columns(const std::vector<Vec>& cols)
    {
        if (cols.empty()) return {};
        Mat m(cols.front().size(), cols.size());
        for (std::size_t j = 0; j < cols.size(); ++j) {
            if (cols[j].size() != m.rows()) throw InputError("column length mismatch");
            for (std::size_t i = 0; i < m.rows(); ++i) m(i, j) = cols[j][i];
        }
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool is_square() const noexcept { return rows_ == cols_; }
    /// Dimension of a square matrix.
    std::size_t n() const noexcept { return rows_; }

    double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    std::span<const double> entries() const noexcept { return a_; }

    Vec col(std::size_t j) const
    {
        Vec c(rows_);
        for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
        return c;
    }
    Vec row(std::size_t i) const
    {
        Vec r(cols_);
        for (std::size_t j = 0; j < cols_; ++j) r[j] = (*this)(i, j);
        return r;
    }
    void set_col(std::size_t j, const Vec& c)
    {
        for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = c[i];
    }

    Mat transpose() const
    {
        Mat t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    Mat& operator+=(const Mat& o)
    {
        check_shape(o);
        for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
        return *this;
    }
    Mat& operator-=(const Mat& o)
    {
        check_shape(o);
        for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
        return *this;
    }
    Mat& operator*=(double s)
    {
        for (auto& x : a_) x *= s;
        return *this;
    }

    friend bool operator==(const Mat&, const Mat&) = default;

private:
    void check_shape(const Mat& o) const
    {
        if (o.rows_ != rows_ || o.cols_ != cols_) throw InputError("matrix shape mismatch");
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> a_;
};

inline Mat operator+(Mat a, const Mat& b) { return a += b; }
inline Mat operator-(Mat a, const Mat& b) { return a -= b; }
inline Mat operator*(double s, Mat a) { return a *= s; }
inline Mat operator*(Mat a, double s) { return a *= s; }
inline Mat operator-(Mat a) { return a *= -1.0; }

inline Mat operator*(const Mat& a, const Mat& b)
{
    if (a.cols() != b.rows()) throw InputError("matrix product shape mismatch");
    Mat c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

inline Vec operator*(const Mat& a, const Vec& x)
{
    if (a.cols() != x.size()) throw InputError("matrix-vector dimension mismatch");
    Vec y(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

inline void require_square(const Mat& a, const char* what)
{
    if (!a.is_square() || a.rows() == 0)
        throw InputError(std::string(what) + ": expected a non-empty square matrix");
}

inline Mat outer(const Vec& u, const Vec& v)
{
    Mat m(u.size(), v.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = u[i] * v[j];
    return m;
}

inline Mat sym_part(const Mat& a) { return 0.5 * (a + a.transpose()); }
inline Mat skew_part(const Mat& a) { return 0.5 * (a - a.transpose()); }

inline double trace(const Mat& a)
{
    double t = 0.0;
    for (std::size_t i = 0; i < std::min(a.rows(), a.cols()); ++i) t += a(i, i);
    return t;
}

inline double norm_max(const Mat& a)
{
    double m = 0.0;
    for (double x : a.entries()) m = std::max(m, std::abs(x));
    return m;
}

inline double norm_fro(const Mat& a)
{
    double s = 0.0;
    for (double x : a.entries()) s += x * x;
    return std::sqrt(s);
}

/// Maximum absolute row sum.
inline double norm_inf(const Mat& a)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += std::abs(a(i, j));
        m = std::max(m, s);
    }
    return m;
}

inline bool is_finite(const Mat& a)
{
    const auto e = a.entries();
    return std::all_of(e.begin(), e.end(), [](double x) { return std::isfinite(x); });
}

inline Mat commutator(const Mat& a, const Mat& b) { return a * b - b * a; }
inline Mat anticommutator(const Mat& a, const Mat& b) { return a * b + b * a; }

inline Mat matrix_power(const Mat& a, unsigned p)
{
    require_square(a, "matrix_power");
    Mat r = Mat::identity(a.n());
    for (unsigned i = 0; i < p; ++i) r = r * a;
    return r;
}

/// Determinant by LU factorization with partial pivoting.
inline double det(const Mat& a)
{
    if (!a.is_square()) throw InputError("det: matrix is not square");
    const std::size_t n = a.n();
    if (n == 0) return 1.0;
    Mat lu = a;
    double d = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(lu(i, k)) > std::abs(lu(piv, k))) piv = i;
        if (lu(piv, k) == 0.0) return 0.0;
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(piv, j));
            d = -d;
        }
        d *= lu(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = lu(i, k) / lu(k, k);
            for (std::size_t j = k + 1; j < n; ++j) lu(i, j) -= f * lu(k, j);
        }
    }
    return d;
}

/// Tolerances shared by the numerical routines. All values are relative.
struct ToleranceConfig {
    /// Jacobi stops when the off-diagonal Frobenius norm drops below eig_off_tol * ||Q||_F.
    double eig_off_tol = 1e-12;
    /// Rank threshold factor: singular values at or below n * rank_tol * ||A||_inf count as zero.
    double rank_tol = 1e-12;
    /// Acceptance threshold for identity residuals.
    double residual_tol = 1e-9;

    void validate() const
    {
        if (!(eig_off_tol > 0.0) || !(rank_tol > 0.0) || !(residual_tol > 0.0))
            throw InputError("tolerances must be strictly positive");
    }

    double rank_threshold(const Mat& a) const
    {
        return static_cast<double>(std::max(a.rows(), a.cols())) * rank_tol * norm_inf(a);
    }
};

/// Orthonormal basis stored as the matrix whose columns are the basis vectors
/// expressed in the ambient (natural) coordinates.
class OrthoBasis {
public:
    static constexpr double default_tol = 1e-10;

    OrthoBasis() = default;

    static OrthoBasis from_matrix(Mat p, double tol = default_tol)
    {
        require_square(p, "OrthoBasis");
        if (!is_finite(p)) throw InputError("OrthoBasis: non-finite entries");
        const double err = orthogonality_error(p);
        if (err > tol)
            throw InputError("OrthoBasis: matrix is not orthogonal (max |P^T P - I| = " +
                             std::to_string(err) + ")");
        OrthoBasis b;
        b.p_ = std::move(p);
        return b;
    }

    static OrthoBasis from_columns(const std::vector<Vec>& cols, double tol = default_tol)
    {
        return from_matrix(Mat::from_columns(cols), tol);
    }

    static OrthoBasis identity(std::size_t n)
    {
        OrthoBasis b;
        b.p_ = Mat::identity(n);
        return b;
    }

    static double orthogonality_error(const Mat& p)
    {
        return norm_max(p.transpose() * p - Mat::identity(p.cols()));
    }

    std::size_t n() const noexcept { return p_.n(); }
    const Mat& matrix() const noexcept { return p_; }
    Vec vector(std::size_t i) const { return p_.col(i); }

    /// Representation of an operator given in ambient coordinates: P^T A P.
    Mat to_basis(const Mat& a) const { return p_.transpose() * a * p_; }
    /// Inverse of to_basis: P M P^T.
    Mat from_basis(const Mat& m) const { return p_ * m * p_.transpose(); }
    /// Coordinates of an ambient vector in this basis.
    Vec coords(const Vec& u) const { return p_.transpose() * u; }
    Vec ambient(const Vec& c) const { return p_ * c; }

private:
    Mat p_;
};

struct SymEigen {
    std::vector<double> values; // ascending
    OrthoBasis vectors;          // column i pairs with values[i]
    int sweeps = 0;
};

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// The input is symmetrized first; it must be symmetric to within
/// residual_tol * ||Q||_max. Eigenvalues come back ascending.
inline SymEigen sym_eigen(const Mat& q, const ToleranceConfig& tol = {})
{
    require_square(q, "sym_eigen");
    if (!is_finite(q)) throw InputError("sym_eigen: non-finite entries");
    const std::size_t n = q.n();
    if (norm_max(q - q.transpose()) > tol.residual_tol * std::max(norm_max(q), 1e-300))
        throw InputError("sym_eigen: matrix is not symmetric");

    Mat a = sym_part(q);
    Mat v = Mat::identity(n);
    const double scale = norm_fro(a);
    constexpr int max_sweeps = 100;
    int sweep = 0;

    auto off_norm = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j) s += a(i, j) * a(i, j);
        return std::sqrt(s);
    };

    if (scale > 0.0) {
        for (;; ++sweep) {
            const double off = off_norm();
            if (off < tol.eig_off_tol * scale) break;
            if (sweep == max_sweeps)
                throw NumericalError("sym_eigen: Jacobi did not converge after 100 sweeps "
                                     "(off-diagonal norm " +
                                     std::to_string(off) + ")");
            for (std::size_t p = 0; p + 1 < n; ++p) {
                for (std::size_t r = p + 1; r < n; ++r) {
                    const double apr = a(p, r);
                    if (apr == 0.0) continue;
                    const double theta = (a(r, r) - a(p, p)) / (2.0 * apr);
                    double t;
                    if (std::abs(theta) > 1e150)
                        t = 0.5 / theta;
                    else
                        t = (theta >= 0 ? 1.0 : -1.0) /
                            (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                    const double c = 1.0 / std::sqrt(t * t + 1.0);
                    const double s = t * c;
                    for (std::size_t k = 0; k < n; ++k) {
                        const double akp = a(k, p);
                        const double akr = a(k, r);
                        a(k, p) = c * akp - s * akr;
                        a(k, r) = s * akp + c * akr;
                    }
                    for (std::size_t k = 0; k < n; ++k) {
                        const double apk = a(p, k);
                        const double ark = a(r, k);
                        a(p, k) = c * apk - s * ark;
                        a(r, k) = s * apk + c * ark;
                    }
                    a(p, r) = 0.0;
                    a(r, p) = 0.0;
                    for (std::size_t k = 0; k < n; ++k) {
                        const double vkp = v(k, p);
                        const double vkr = v(k, r);
                        v(k, p) = c * vkp - s * vkr;
                        v(k, r) = s * vkp + c * vkr;
                    }
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });
    SymEigen out;
    out.values.resize(n);
    Mat vs(n);
    for (std::size_t c = 0; c < n; ++c) {
        out.values[c] = a(order[c], order[c]);
        for (std::size_t k = 0; k < n; ++k) vs(k, c) = v(k, order[c]);
    }
    out.vectors = OrthoBasis::from_matrix(std::move(vs));
    out.sweeps = sweep;
    return out;
}

struct Svd {
    std::vector<double> sigma; // descending
    Mat v;                     // right singular vectors (columns), cols x cols
};

/// Singular values and right singular vectors by one-sided (Hestenes) Jacobi.
/// Small singular values keep absolute accuracy of order eps * ||A||.
inline Svd svd_right(const Mat& a)
{
    if (!is_finite(a)) throw InputError("svd: non-finite entries");
    const std::size_t n = a.cols();
    // pad to at least as many rows as columns
    Mat u(std::max(a.rows(), n), n);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < n; ++j) u(i, j) = a(i, j);
    const std::size_t m = u.rows();
    Mat v = Mat::identity(n);

    constexpr int max_sweeps = 100;
    constexpr double eps = std::numeric_limits<double>::epsilon();
    bool rotated = true;
    for (int sweep = 0; sweep < max_sweeps && rotated; ++sweep) {
        rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double alpha = 0.0, beta = 0.0, gamma = 0.0;
                for (std::size_t i = 0; i < m; ++i) {
                    alpha += u(i, p) * u(i, p);
                    beta += u(i, q) * u(i, q);
                    gamma += u(i, p) * u(i, q);
                }
                if (gamma == 0.0 || std::abs(gamma) <= eps * std::sqrt(alpha * beta)) continue;
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = (zeta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t i = 0; i < m; ++i) {
                    const double up = u(i, p);
                    const double uq = u(i, q);
                    u(i, p) = c * up - s * uq;
                    u(i, q) = s * up + c * uq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double vp = v(i, p);
                    const double vq = v(i, q);
                    v(i, p) = c * vp - s * vq;
                    v(i, q) = s * vp + c * vq;
                }
            }
        }
        if (sweep + 1 == max_sweeps && rotated)
            throw NumericalError("svd: one-sided Jacobi did not converge after 100 sweeps");
    }

    std::vector<double> sigma(n);
    for (std::size_t j = 0; j < n; ++j) sigma[j] = norm(u.col(j));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return sigma[i] > sigma[j]; });
    Svd out;
    out.sigma.resize(n);
    out.v = Mat(n);
    for (std::size_t c = 0; c < n; ++c) {
        out.sigma[c] = sigma[order[c]];
        for (std::size_t k = 0; k < n; ++k) out.v(k, c) = v(k, order[c]);
    }
    return out;
}

/// Orthonormal kernel basis: right singular vectors with sigma <= threshold.
/// Ties at the threshold count as kernel.
inline std::vector<Vec> nullspace_below(const Mat& a, double threshold)
{
    const Svd s = svd_right(a);
    std::vector<Vec> out;
    for (std::size_t j = 0; j < s.sigma.size(); ++j)
        if (s.sigma[j] <= threshold) out.push_back(s.v.col(j));
    return out;
}

inline std::vector<Vec> nullspace(const Mat& a, const ToleranceConfig& tol = {})
{
    return nullspace_below(a, tol.rank_threshold(a));
}

inline std::size_t numerical_rank(const Mat& a, const ToleranceConfig& tol = {})
{
    return a.cols() - nullspace(a, tol).size();
}

struct LeastSquares {
    Vec x;
    std::size_t rank = 0;
    double residual = 0.0; // ||M x - b||
};

/// Minimum-norm least-squares solution via the SVD pseudo-inverse.
inline LeastSquares least_squares(const Mat& m, const Vec& b, const ToleranceConfig& tol = {})
{
    if (m.rows() != b.size()) throw InputError("least_squares: right-hand side length mismatch");
    const Svd s = svd_right(m);
    const double thr = tol.rank_threshold(m);
    // U columns from M V / sigma
    const Mat mv = m * s.v;
    LeastSquares out;
    out.x = Vec(m.cols());
    for (std::size_t j = 0; j < s.sigma.size(); ++j) {
        if (s.sigma[j] <= thr || s.sigma[j] == 0.0) continue;
        ++out.rank;
        double ub = 0.0;
        for (std::size_t i = 0; i < m.rows(); ++i) ub += mv(i, j) * b[i];
        const double coef = ub / (s.sigma[j] * s.sigma[j]);
        for (std::size_t k = 0; k < m.cols(); ++k) out.x[k] += coef * s.v(k, j);
    }
    out.residual = norm(m * out.x - b);
    return out;
}

/// Sums of principal minors (pm^1, ..., pm^n) from traces of powers by the
/// Newton recurrence  k pm^k = sum_{i=1..k} (-1)^(i-1) pm^(k-i) tr(A^i).
inline std::vector<double> principal_minor_sums(const Mat& a)
{
    require_square(a, "principal_minor_sums");
    const std::size_t n = a.n();
    std::vector<double> power_traces(n + 1, 0.0);
    Mat p = Mat::identity(n);
    for (std::size_t k = 1; k <= n; ++k) {
        p = p * a;
        power_traces[k] = trace(p);
    }
    std::vector<double> pm(n + 1, 0.0);
    pm[0] = 1.0;
    for (std::size_t k = 1; k <= n; ++k) {
        double s = 0.0;
        for (std::size_t i = 1; i <= k; ++i) {
            const double sign = (i % 2 == 1) ? 1.0 : -1.0;
            s += sign * pm[k - i] * power_traces[i];
        }
        pm[k] = s / static_cast<double>(k);
    }
    return {pm.begin() + 1, pm.end()};
}

/// Monic characteristic polynomial coefficients, highest degree first:
/// x^n - pm^1 x^(n-1) + pm^2 x^(n-2) - ... + (-1)^n pm^n.
inline std::vector<double> char_poly(const Mat& a)
{
    const auto pm = principal_minor_sums(a);
    std::vector<double> c(pm.size() + 1);
    c[0] = 1.0;
    for (std::size_t k = 1; k < c.size(); ++k) c[k] = (k % 2 ? -1.0 : 1.0) * pm[k - 1];
    return c;
}

template <typename T>
T poly_eval(std::span<const double> coeffs, T z)
{
    T acc{0};
    for (double c : coeffs) acc = acc * z + c;
    return acc;
}

struct RealEigenvalue {
    double value = 0.0;
    int multiplicity = 1;
};

struct ComplexPair {
    double re = 0.0;
    double im = 0.0; // > 0; the pair is re +- i*im
    int multiplicity = 1;
};

struct Spectrum {
    std::vector<RealEigenvalue> real_eigs; // ascending
    std::vector<ComplexPair> complex_pairs;

    int total_multiplicity() const
    {
        int t = 0;
        for (const auto& r : real_eigs) t += r.multiplicity;
        for (const auto& c : complex_pairs) t += 2 * c.multiplicity;
        return t;
    }
};

namespace detail {

using cplx = std::complex<double>;

// Simultaneous (Weierstrass / Durand-Kerner) iteration on a monic polynomial.
inline std::vector<cplx> durand_kerner(std::span<const double> c)
{
    const std::size_t n = c.size() - 1;
    double bound = 0.0;
    for (std::size_t i = 1; i < c.size(); ++i) bound = std::max(bound, std::abs(c[i]));
    const double radius = 1.0 + bound;
    std::vector<cplx> z(n);
    for (std::size_t k = 0; k < n; ++k)
        z[k] = std::polar(0.5 * radius, 0.4 + 2.0 * std::numbers::pi * static_cast<double>(k) /
                                                 static_cast<double>(n));

    constexpr int max_iter = 5000;
    for (int it = 0; it < max_iter; ++it) {
        double max_step = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            cplx denom = 1.0;
            for (std::size_t j = 0; j < n; ++j)
                if (j != k) denom *= (z[k] - z[j]);
            if (denom == cplx(0.0)) denom = cplx(1e-300);
            const cplx step = poly_eval<cplx>(c, z[k]) / denom;
            z[k] -= step;
            max_step = std::max(max_step, std::abs(step) / std::max(1.0, std::abs(z[k])));
        }
        if (max_step < 1e-15) break;
    }

    // backward error check
    for (const auto& zk : z) {
        double mag = 0.0;
        const double az = std::abs(zk);
        for (double ci : c) mag = mag * az + std::abs(ci);
        // absolute floor: a root at exactly zero may stall at a denormal
        mag += std::numeric_limits<double>::epsilon() * bound;
        if (!(std::abs(poly_eval<cplx>(c, zk)) <= 1e-9 * mag))
            throw NumericalError("real_spectrum: Durand-Kerner iteration did not converge");
    }
    return z;
}

inline void newton_polish(std::span<const double> c, std::vector<cplx>& z)
{
    std::vector<double> dc(c.size() - 1);
    const std::size_t n = c.size() - 1;
    for (std::size_t i = 0; i < n; ++i) dc[i] = c[i] * static_cast<double>(n - i);
    for (auto& zk : z) {
        for (int step = 0; step < 5; ++step) {
            const cplx p = poly_eval<cplx>(c, zk);
            const cplx dp = poly_eval<cplx>(dc, zk);
            if (p == cplx(0.0) || dp == cplx(0.0)) break;
            const cplx cand = zk - p / dp;
            if (std::abs(poly_eval<cplx>(c, cand)) < std::abs(p))
                zk = cand;
            else
                break;
        }
    }
}

struct Cluster {
    cplx centre;
    int size = 1;
};

// Groups roots that look like one multiple root. An m-fold root computed from
// perturbed coefficients is only accurate to about eps^(1/m), so the admissible
// radius grows with the group size; larger groups are tried first.
inline std::vector<Cluster> cluster_roots(const std::vector<cplx>& roots, double scale)
{
    const std::size_t n = roots.size();
    const double eps = std::numeric_limits<double>::epsilon();
    auto radius = [&](std::size_t m) {
        return scale * 10.0 * std::pow(static_cast<double>(n) * eps, 1.0 / static_cast<double>(m));
    };
    std::vector<bool> used(n, false);
    std::vector<Cluster> cl;
    for (std::size_t m = n; m >= 2; --m) {
        for (std::size_t i = 0; i < n; ++i) {
            if (used[i]) continue;
            std::vector<std::size_t> near;
            for (std::size_t j = 0; j < n; ++j)
                if (!used[j]) near.push_back(j);
            if (near.size() < m) break;
            std::partial_sort(near.begin(), near.begin() + static_cast<std::ptrdiff_t>(m), near.end(),
                              [&](std::size_t x, std::size_t y) {
                                  return std::abs(roots[x] - roots[i]) < std::abs(roots[y] - roots[i]);
                              });
            near.resize(m);
            cplx centre = 0.0;
            for (auto j : near) centre += roots[j];
            centre /= static_cast<double>(m);
            bool tight = true;
            for (auto j : near) tight = tight && std::abs(roots[j] - centre) <= radius(m);
            if (!tight) continue;
            for (auto j : near) used[j] = true;
            cl.push_back({centre, static_cast<int>(m)});
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        if (!used[i]) cl.push_back({roots[i], 1});
    return cl;
}

// Solves m x = b column by column with partial pivoting; pivots below floor
// are clamped so shifted systems at an eigenvalue stay solvable.
inline Mat lu_solve(Mat m, Mat b, double floor)
{
    const std::size_t n = m.n();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(m(i, k)) > std::abs(m(p, k))) p = i;
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m(p, j), m(k, j));
            for (std::size_t j = 0; j < b.cols(); ++j) std::swap(b(p, j), b(k, j));
        }
        if (std::abs(m(k, k)) < floor) m(k, k) = m(k, k) < 0.0 ? -floor : floor;
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = m(i, k) / m(k, k);
            if (f == 0.0) continue;
            for (std::size_t j = k; j < n; ++j) m(i, j) -= f * m(k, j);
            for (std::size_t j = 0; j < b.cols(); ++j) b(i, j) -= f * b(k, j);
        }
    }
    for (std::size_t c = 0; c < b.cols(); ++c)
        for (std::size_t i = n; i-- > 0;) {
            double s = b(i, c);
            for (std::size_t j = i + 1; j < n; ++j) s -= m(i, j) * b(j, c);
            b(i, c) = s / m(i, i);
        }
    return b;
}

// Modified Gram-Schmidt on the columns; false if they are numerically dependent.
inline bool orthonormalize_columns(Mat& v)
{
    for (std::size_t c = 0; c < v.cols(); ++c) {
        Vec x = v.col(c);
        const double before = norm(x);
        for (int pass = 0; pass < 2; ++pass)
            for (std::size_t p = 0; p < c; ++p) {
                const Vec q = v.col(p);
                x -= dot(q, x) * q;
            }
        const double len = norm(x);
        if (!(len > 1e-10 * before) || len == 0.0) return false;
        v.set_col(c, x / len);
    }
    return true;
}

// Mean of an m-fold real eigenvalue cluster near lambda. Inverse subspace
// iteration finds the invariant subspace of the m eigenvalues closest to the
// shift; the trace of A restricted to it is well conditioned even when the
// individual eigenvalues are not.
inline double refine_real_eigenvalue(const Mat& a, double lambda, int m)
{
    const std::size_t n = a.n();
    const auto mm = static_cast<std::size_t>(m);
    const double floor = std::numeric_limits<double>::epsilon() * std::max(norm_inf(a), 1.0);
    double shift = lambda;
    for (int outer = 0; outer < 2; ++outer) {
        const Svd s = svd_right(a - shift * Mat::identity(n));
        Mat v(n, mm);
        for (std::size_t c = 0; c < mm; ++c) v.set_col(c, s.v.col(n - mm + c));
        // stepping off the cluster keeps the iterates well conditioned
        const Mat shifted = a - (shift + 1e-3) * Mat::identity(n);
        for (int it = 0; it < 8; ++it) {
            Mat w = lu_solve(shifted, v, floor);
            if (!is_finite(w) || !orthonormalize_columns(w)) break;
            v = std::move(w);
        }
        const double next = trace(v.transpose() * a * v) / static_cast<double>(m);
        if (!std::isfinite(next)) break;
        shift = next;
    }
    return shift;
}

} // namespace detail

/// Eigenvalues of a general real matrix from its characteristic polynomial.
///
/// Coefficients come from principal_minor_sums; roots from Durand-Kerner with
/// Newton polishing. Intended for n up to about 16.
inline Spectrum real_spectrum(const Mat& a, const ToleranceConfig& tol = {})
{
    require_square(a, "real_spectrum");
    if (!is_finite(a)) throw InputError("real_spectrum: non-finite entries");
    const std::size_t n = a.n();
    Spectrum out;
    const double s = norm_max(a);
    if (s == 0.0) {
        out.real_eigs.push_back({0.0, static_cast<int>(n)});
        return out;
    }
    const Mat an = (1.0 / s) * a;
    const auto c = char_poly(an);

    std::vector<detail::cplx> roots;
    if (n == 1) {
        roots.push_back(-c[1]);
    } else {
        roots = detail::durand_kerner(c);
        detail::newton_polish(c, roots);
    }

    const auto clusters = detail::cluster_roots(roots, 1.0);
    const double im_thr = static_cast<double>(n) * tol.rank_tol * norm_inf(an);
    const double eps = std::numeric_limits<double>::epsilon();

    std::vector<detail::Cluster> upper, lower;
    for (const auto& cl : clusters) {
        const double cl_thr =
            cl.size > 1 ? 10.0 * std::pow(static_cast<double>(n) * eps, 1.0 / cl.size) : 0.0;
        if (std::abs(cl.centre.imag()) <= std::max(im_thr, cl_thr)) {
            double lambda = cl.centre.real();
            if (cl.size > 1) lambda = detail::refine_real_eigenvalue(an, lambda, cl.size);
            out.real_eigs.push_back({lambda * s, cl.size});
        } else if (cl.centre.imag() > 0) {
            upper.push_back(cl);
        } else {
            lower.push_back(cl);
        }
    }
    if (upper.size() != lower.size())
        throw NumericalError("real_spectrum: complex roots do not pair into conjugates");
    for (const auto& u : upper) {
        auto it = std::min_element(lower.begin(), lower.end(), [&](const auto& x, const auto& y) {
            return std::abs(x.centre - std::conj(u.centre)) <
                   std::abs(y.centre - std::conj(u.centre));
        });
        if (it->size != u.size)
            throw NumericalError("real_spectrum: conjugate root clusters differ in multiplicity");
        out.complex_pairs.push_back({0.5 * (u.centre.real() + it->centre.real()) * s,
                                     0.5 * (u.centre.imag() - it->centre.imag()) * s, u.size});
        lower.erase(it);
    }
    std::sort(out.real_eigs.begin(), out.real_eigs.end(),
              [](const auto& x, const auto& y) { return x.value < y.value; });
    std::sort(out.complex_pairs.begin(), out.complex_pairs.end(), [](const auto& x, const auto& y) {
        return std::pair(x.re, x.im) < std::pair(y.re, y.im);
    });
    return out;
}

/// Haar-ish random orthogonal matrix: Gram-Schmidt on a standard-normal matrix.
/// The engine is caller-owned; results are deterministic for a fixed engine state.
inline OrthoBasis random_orthogonal(std::size_t n, std::mt19937_64& rng)
{
    if (n == 0) throw InputError("random_orthogonal: n must be >= 1");
    std::normal_distribution<double> normal(0.0, 1.0);
    for (;;) {
        std::vector<Vec> cols;
        bool ok = true;
        for (std::size_t j = 0; j < n && ok; ++j) {
            Vec v(n);
            for (auto& x : v) x = normal(rng);
            for (int pass = 0; pass < 2; ++pass)
                for (const auto& q : cols) v -= dot(q, v) * q;
            const double len = norm(v);
            if (len < 1e-8) {
                ok = false;
                break;
            }
            cols.push_back(v / len);
        }
        if (ok) return OrthoBasis::from_columns(cols, 1e-12);
    }
}

inline OrthoBasis random_orthogonal(std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    return random_orthogonal(n, rng);
}

} // namespace endo
