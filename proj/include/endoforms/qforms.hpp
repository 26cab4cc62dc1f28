#pragma once

// Expansion and rotation quadratic forms of an endomorphism, and the
// decomposition A(u) = A^e(u^) u + sum_kl A^r_kl(u^) R_kl(u).

#include <cmath>
#include <string>
#include <vector>

#include "endoforms/linalg.hpp"
#include "endoforms/quasirot.hpp"

namespace endo {

/// Quadratic form u -> u^T M u with M symmetric.
class QForm {
public:
    QForm() = default;

    /// Symmetrizes the argument after checking it is symmetric to 1e-12 relative.
    explicit QForm(const Mat& m)
    {
        require_square(m, "QForm");
        if (norm_max(m - m.transpose()) > 1e-12 * norm_max(m))
            throw InputError("QForm: matrix is not symmetric");
        m_ = sym_part(m);
    }

    static QForm from_any(const Mat& m)
    {
        require_square(m, "QForm");
        QForm q;
        q.m_ = sym_part(m);
        return q;
    }

    std::size_t n() const noexcept { return m_.n(); }
    const Mat& matrix() const noexcept { return m_; }

private:
    Mat m_;
};

inline double polar(const QForm& q, const Vec& u, const Vec& v)
{
    if (u.size() != q.n() || v.size() != q.n()) throw InputError("polar: dimension mismatch");
    return dot(u, q.matrix() * v);
}

inline double evaluate(const QForm& q, const Vec& u)
{
    if (u.size() != q.n()) throw InputError("evaluate: dimension mismatch");
    return dot(u, q.matrix() * u);
}

inline QForm expansion_form(const Mat& a)
{
    require_square(a, "expansion_form");
    return QForm::from_any(a);
}

/// sym([R_kl]^T [A]); its value at u is A(u) . R_kl(u).
inline QForm rotation_form(const Mat& a, PlanePair kl)
{
    require_square(a, "rotation_form");
    kl.validate(a.n());
    const std::size_t n = a.n();
    // R_kl^T A has row k equal to row l of A and row l equal to minus row k of A.
    Mat rt_a(n);
    for (std::size_t j = 0; j < n; ++j) {
        rt_a(kl.k, j) = a(kl.l, j);
        rt_a(kl.l, j) = -a(kl.k, j);
    }
    return QForm::from_any(rt_a);
}

inline std::vector<QForm> rotation_forms(const Mat& a)
{
    std::vector<QForm> out;
    for (const auto& kl : plane_pairs(a.n())) out.push_back(rotation_form(a, kl));
    return out;
}

/// The zero-form test used by normality and multiplicity logic.
inline bool is_zero_form(const QForm& q, double scale)
{
    return norm_max(q.matrix()) <= 1e-12 * scale;
}

/// Expansion form and all rotation forms of A, expressed in a chosen basis.
struct FormFamily {
    OrthoBasis basis;
    QForm ae;
    std::vector<QForm> ar; // lexicographic plane pairs

    const QForm& rotation(PlanePair kl) const { return ar.at(pair_index(basis.n(), kl)); }
};

/// `a` is given in ambient coordinates; forms are built from P^T A P.
inline FormFamily form_family(const Mat& a, const OrthoBasis& basis)
{
    require_square(a, "form_family");
    if (basis.n() != a.n()) throw InputError("form_family: basis dimension mismatch");
    const Mat ab = basis.to_basis(a);
    return {basis, expansion_form(ab), rotation_forms(ab)};
}

inline FormFamily form_family(const Mat& a) { return form_family(a, OrthoBasis::identity(a.n())); }

inline double form_average(const QForm& q) { return trace(q.matrix()) / static_cast<double>(q.n()); }

struct FormExtremes {
    double min = 0.0;
    double max = 0.0;
    Vec argmin;
    Vec argmax;
};

inline FormExtremes form_extremes(const QForm& q, const ToleranceConfig& tol = {})
{
    const SymEigen e = sym_eigen(q.matrix(), tol);
    return {e.values.front(), e.values.back(), e.vectors.vector(0),
            e.vectors.vector(q.n() - 1)};
}

/// Whether span(W + {w}) stays zero-valued for q. Every element of W and w
/// must itself be a zero of q.
inline bool zero_subspace_extend(const QForm& q, const std::vector<Vec>& w_basis, const Vec& w,
                                 const ToleranceConfig& tol = {})
{
    const double scale = std::max(norm_max(q.matrix()), std::numeric_limits<double>::min());
    auto check_zero = [&](const Vec& x, const std::string& name) {
        if (std::abs(evaluate(q, x)) > tol.residual_tol * scale * dot(x, x))
            throw InputError("zero_subspace_extend: " + name + " is not a zero of the form");
    };
    for (std::size_t i = 0; i < w_basis.size(); ++i)
        check_zero(w_basis[i], "W[" + std::to_string(i) + "]");
    check_zero(w, "w");
    for (const auto& x : w_basis)
        if (std::abs(polar(q, w, x)) > tol.residual_tol * scale * norm(w) * norm(x)) return false;
    return true;
}

struct Decomposition {
    Vec u;
    double e = 0.0;
    RotationCoeffs r;
    /// ||A u - e u - sum r R_kl u|| / ||A u|| (absolute when A u = 0).
    double residual = 0.0;
    /// | ||A u^||^2 - e^2 - sum r^2 | / max(1, ||A u^||^2).
    double norm_residual = 0.0;
};

inline Decomposition decompose(const Mat& a, const Vec& u)
{
    require_square(a, "decompose");
    if (u.size() != a.n()) throw InputError("decompose: dimension mismatch");
    const double len = norm(u);
    if (len == 0.0) throw InputError("decompose: u must be nonzero");
    const Vec uh = u / len;

    Decomposition d{u, evaluate(expansion_form(a), uh), RotationCoeffs(a.n())};
    Vec rebuilt = d.e * u;
    for (const auto& kl : plane_pairs(a.n())) {
        d.r[kl] = evaluate(rotation_form(a, kl), uh);
        rebuilt += d.r[kl] * apply_quasi_rotation(u, kl);
    }
    const Vec au = a * u;
    const double au_norm = norm(au);
    const double diff = norm(au - rebuilt);
    d.residual = au_norm > 0.0 ? diff / au_norm : diff;

    const double auh2 = dot(a * uh, a * uh);
    d.norm_residual = std::abs(auh2 - d.e * d.e - d.r.sum_squares()) / std::max(1.0, auh2);
    return d;
}

struct CommutatorForms {
    QForm sym_part;  // 1/2 [A^sym, R_kl]
    QForm skew_part; // -1/2 {A^skew, R_kl}
};

inline CommutatorForms commutator_forms(const Mat& a, PlanePair kl)
{
    require_square(a, "commutator_forms");
    const Mat r = quasi_rotation(a.n(), kl);
    const Mat sigma = sym_part(a);
    const Mat omega = skew_part(a);
    return {QForm::from_any(0.5 * commutator(sigma, r)),
            QForm::from_any(-0.5 * anticommutator(omega, r))};
}

/// The (p,q) rotation form of A in the basis P, expressed in the coordinates of
/// that basis, built as P^T (sum_kl c(k,l) [A^r_kl]) P from the coefficients of
/// rotation_change_of_basis.
inline QForm rotation_form_change_of_basis(const Mat& a, const OrthoBasis& basis, PlanePair pq)
{
    require_square(a, "rotation_form_change_of_basis");
    if (basis.n() != a.n()) throw InputError("rotation_form_change_of_basis: dimension mismatch");
    const RotationCoeffs c = rotation_change_of_basis(basis, pq);
    Mat acc(a.n());
    for (const auto& kl : plane_pairs(a.n())) {
        if (c[kl] == 0.0) continue;
        acc += c[kl] * rotation_form(a, kl).matrix();
    }
    return QForm::from_any(basis.to_basis(acc));
}

/// Sum over pairs of tr(A~^r_pq) with the forms built in the basis P.
inline double rotation_trace_sum(const Mat& a, const OrthoBasis& basis)
{
    const Mat ab = basis.to_basis(a);
    double s = 0.0;
    for (const auto& kl : plane_pairs(a.n())) s += trace(rotation_form(ab, kl).matrix());
    return s;
}

inline double rotation_trace_sum(const Mat& a)
{
    return rotation_trace_sum(a, OrthoBasis::identity(a.n()));
}

/// 1/2 sum tr(A^r_kl) [R_kl]; equals the skew part of A.
inline Mat skew_from_rotation_traces(const Mat& a)
{
    RotationCoeffs c(a.n());
    for (const auto& kl : plane_pairs(a.n())) c[kl] = 0.5 * trace(rotation_form(a, kl).matrix());
    return assemble_rotations(c);
}

} // namespace endo
