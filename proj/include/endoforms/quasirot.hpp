#pragma once

// Quasi-rotations R_kl: the quarter turn in the (b_k, b_l) plane composed with
// projection onto that plane. R_kl(u) = u^k b_l - u^l b_k.

#include <cstddef>
#include <string>
#include <vector>

#include "endoforms/linalg.hpp"

namespace endo {

/// Ordered pair of basis indices, zero-based, k < l.
struct PlanePair {
    std::size_t k = 0;
    std::size_t l = 1;

    friend bool operator==(const PlanePair&, const PlanePair&) = default;
    friend auto operator<=>(const PlanePair&, const PlanePair&) = default;

    void validate(std::size_t n) const
    {
        if (!(k < l) || l >= n)
            throw InputError("invalid plane pair (" + std::to_string(k + 1) + "," +
                             std::to_string(l + 1) + ") for dimension " + std::to_string(n));
    }

    /// 1-based "k,l" label used in reports.
    std::string label() const { return std::to_string(k + 1) + "," + std::to_string(l + 1); }
};

inline std::size_t pair_count(std::size_t n) { return n * (n - 1) / 2; }

/// All pairs for dimension n, lexicographic.
inline std::vector<PlanePair> plane_pairs(std::size_t n)
{
    std::vector<PlanePair> out;
    out.reserve(pair_count(n));
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = k + 1; l < n; ++l) out.push_back({k, l});
    return out;
}

/// Position of (k,l) in the lexicographic enumeration.
inline std::size_t pair_index(std::size_t n, PlanePair kl)
{
    kl.validate(n);
    return kl.k * (2 * n - kl.k - 1) / 2 + (kl.l - kl.k - 1);
}

/// Real coefficient for every plane pair of dimension n, lexicographic order.
class RotationCoeffs {
public:
    RotationCoeffs() = default;
    explicit RotationCoeffs(std::size_t n) : n_(n), c_(pair_count(n), 0.0) {}

    std::size_t n() const noexcept { return n_; }
    std::size_t size() const noexcept { return c_.size(); }

    double& operator[](PlanePair kl) { return c_[pair_index(n_, kl)]; }
    double operator[](PlanePair kl) const { return c_[pair_index(n_, kl)]; }
    double& at_index(std::size_t i) { return c_.at(i); }
    double at_index(std::size_t i) const { return c_.at(i); }
    const std::vector<double>& values() const noexcept { return c_; }

    double sum_squares() const
    {
        double s = 0.0;
        for (double x : c_) s += x * x;
        return s;
    }

private:
    std::size_t n_ = 0;
    std::vector<double> c_;
};

/// [R_kl]: entry (i,j) = d_il d_jk - d_ik d_jl.
inline Mat quasi_rotation(std::size_t n, PlanePair kl)
{
    kl.validate(n);
    Mat r(n);
    r(kl.l, kl.k) = 1.0;
    r(kl.k, kl.l) = -1.0;
    return r;
}

inline Vec apply_quasi_rotation(const Vec& u, PlanePair kl)
{
    kl.validate(u.size());
    Vec out(u.size());
    out[kl.l] = u[kl.k];
    out[kl.k] = -u[kl.l];
    return out;
}

/// Sum_kl c(k,l) [R_kl].
inline Mat assemble_rotations(const RotationCoeffs& c)
{
    const std::size_t n = c.n();
    Mat m(n);
    for (const auto& kl : plane_pairs(n)) {
        m(kl.l, kl.k) += c[kl];
        m(kl.k, kl.l) -= c[kl];
    }
    return m;
}

struct AlmostOrthogonalExpansion {
    double c0 = 0.0;
    RotationCoeffs c;
};

/// u = (u.v) v + sum (u . R_kl v) R_kl v for unit v. v is not normalized here.
inline AlmostOrthogonalExpansion almost_orthogonal_expand(const Vec& u, const Vec& v)
{
    if (u.size() != v.size()) throw InputError("almost_orthogonal_expand: dimension mismatch");
    if (std::abs(norm(v) - 1.0) > 1e-10)
        throw InputError("almost_orthogonal_expand: v must be a unit vector");
    AlmostOrthogonalExpansion out{dot(u, v), RotationCoeffs(u.size())};
    for (const auto& kl : plane_pairs(u.size()))
        out.c[kl] = dot(u, apply_quasi_rotation(v, kl));
    return out;
}

inline Vec reassemble(const AlmostOrthogonalExpansion& e, const Vec& v)
{
    Vec u = e.c0 * v;
    for (const auto& kl : plane_pairs(v.size())) u += e.c[kl] * apply_quasi_rotation(v, kl);
    return u;
}

inline void require_skew(const Mat& s, const char* what)
{
    require_square(s, what);
    if (norm_max(s + s.transpose()) > 1e-10 * norm_max(s))
        throw InputError(std::string(what) + ": matrix is not skew-symmetric");
}

/// S = sum c(k,l) [R_kl] with c(k,l) = -S^k_l.
inline RotationCoeffs skew_rotation_coeffs(const Mat& s)
{
    require_skew(s, "skew_rotation_coeffs");
    RotationCoeffs c(s.n());
    for (const auto& kl : plane_pairs(s.n())) c[kl] = -s(kl.k, kl.l);
    return c;
}

/// Coefficients of the (p,q) quasi-rotation of the basis P over the current
/// quasi-rotations: sum c(k,l) [R_kl] = P [R~_pq] P^T, where the columns of P
/// are the new basis vectors.
inline RotationCoeffs rotation_change_of_basis(const OrthoBasis& basis, PlanePair pq)
{
    const Mat& p = basis.matrix();
    const std::size_t n = p.n();
    pq.validate(n);
    RotationCoeffs c(n);
    for (const auto& kl : plane_pairs(n))
        c[kl] = -(p(kl.l, pq.k) * p(kl.k, pq.l) - p(kl.l, pq.l) * p(kl.k, pq.k));
    return c;
}

} // namespace endo
