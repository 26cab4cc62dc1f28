#pragma once

// Eigenstructure from the common zeros of the rotation forms, Bromwich bounds,
// the planar theory and the A^2 structure of skew operators.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "endoforms/canonical.hpp"
#include "endoforms/linalg.hpp"
#include "endoforms/qforms.hpp"
#include "endoforms/quasirot.hpp"

namespace endo {

/// Largest |A^r_kl(u^)| over all pairs.
inline double max_rotation_value(const Mat& a, const Vec& u)
{
    require_square(a, "max_rotation_value");
    const double len = norm(u);
    if (len == 0.0) throw InputError("common zero test needs a nonzero vector");
    const Vec uh = u / len;
    double m = 0.0;
    for (const auto& kl : plane_pairs(a.n()))
        m = std::max(m, std::abs(evaluate(rotation_form(a, kl), uh)));
    return m;
}

/// True iff every rotation form vanishes at u^ to within abs_tol.
inline bool common_zero_check(const Mat& a, const Vec& u, double abs_tol)
{
    return max_rotation_value(a, u) <= abs_tol;
}

inline bool common_zero_check(const Mat& a, const Vec& u, const ToleranceConfig& tol = {})
{
    return common_zero_check(a, u, tol.residual_tol * std::max(norm_max(a), 1.0));
}

struct CommonZeroSubspace {
    std::vector<Vec> basis;
    std::vector<double> gram_eigs; // ascending eigenvalues of the polarized Gram form
    double threshold = 0.0;
};

/// Common zeros of the rotation forms of A at which the expansion form equals
/// lambda, built only from form evaluations.
///
/// For unit u, F(u) = (A^e(u) - lambda)^2 + sum A^r_kl(u)^2 is a quadratic form
/// in u; it is recovered by polarization on b_i and (b_i + b_j)/sqrt2 and its
/// near-zero eigenspace is returned.
inline CommonZeroSubspace common_zero_subspace(const Mat& a, double lambda, double rel_tol = 1e-7,
                                               const ToleranceConfig& tol = {})
{
    require_square(a, "common_zero_subspace");
    const std::size_t n = a.n();
    const QForm ae = expansion_form(a);
    const auto ar = rotation_forms(a);
    auto f = [&](const Vec& uh) {
        const double e = evaluate(ae, uh) - lambda;
        double s = e * e;
        for (const auto& q : ar) {
            const double r = evaluate(q, uh);
            s += r * r;
        }
        return s;
    };
    Mat g(n);
    for (std::size_t i = 0; i < n; ++i) g(i, i) = f(Vec::unit(n, i));
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            Vec v(n);
            v[i] = inv_sqrt2;
            v[j] = inv_sqrt2;
            g(i, j) = g(j, i) = f(v) - 0.5 * (g(i, i) + g(j, j));
        }
    const SymEigen e = sym_eigen(g, tol);
    CommonZeroSubspace out;
    const double scale = std::max(norm_max(a), std::abs(lambda));
    out.threshold = rel_tol * scale;
    out.gram_eigs = e.values;
    for (std::size_t i = 0; i < n; ++i)
        if (std::sqrt(std::max(e.values[i], 0.0)) <= out.threshold)
            out.basis.push_back(e.vectors.vector(i));
    return out;
}

struct BromwichBounds {
    double nu = 0.0; // min real part
    double N = 0.0;  // max real part
    double mu = 0.0; // min imaginary part
    double M = 0.0;  // max imaginary part
};

inline BromwichBounds bromwich_bounds(const Mat& a, const ToleranceConfig& tol = {})
{
    require_square(a, "bromwich_bounds");
    const SymEigen e = sym_eigen(sym_part(a), tol);
    BromwichBounds b{e.values.front(), e.values.back(), 0.0, 0.0};
    const double kn = norm_max(skew_part(a));
    if (kn > 1e-12 * norm_max(a) && kn > 0.0) {
        const SkewBlockForm sb = skew_canonical_basis(a, tol);
        double top = 0.0;
        for (double l : sb.lambdas) top = std::max(top, std::abs(l));
        b.mu = -top;
        b.M = top;
    }
    return b;
}

struct EigenEntry {
    double lambda = 0.0;
    int algebraic_multiplicity = 1;
    int geometric_multiplicity = 0;
    std::vector<Vec> eigenspace;
    /// max |A^r_kl(u^)| over the eigenspace basis
    double rotation_residual = 0.0;
    /// max |A^e(u^) - lambda| over the eigenspace basis
    double expansion_residual = 0.0;
    /// every basis vector passed the common-zero test
    bool verified = false;
    /// no singular value fell under the rank threshold; the smallest one was used
    bool rank_override = false;
};

struct SpectralReport {
    std::vector<EigenEntry> entries;
    std::vector<ComplexPair> complex_pairs;
    BromwichBounds bromwich;
    double verify_tol = 0.0;

    bool all_verified() const
    {
        return std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.verified; });
    }
};

/// Eigenvalues from real_spectrum, eigenspaces from nullspace(A - lambda I),
/// each eigenspace vector checked against the rotation-form criterion.
inline SpectralReport eigenstructure(const Mat& a, const ToleranceConfig& tol = {})
{
    require_square(a, "eigenstructure");
    const std::size_t n = a.n();
    const Spectrum sp = real_spectrum(a, tol);
    SpectralReport rep;
    rep.complex_pairs = sp.complex_pairs;
    rep.bromwich = bromwich_bounds(a, tol);
    const double scale = std::max(norm_max(a), 1e-300);
    rep.verify_tol = 1e-7 * scale;

    const QForm ae = expansion_form(a);
    for (const auto& re : sp.real_eigs) {
        EigenEntry e;
        e.lambda = re.value;
        e.algebraic_multiplicity = re.multiplicity;
        const Mat shifted = a - re.value * Mat::identity(n);
        const Svd s = svd_right(shifted);
        const double thr = tol.rank_threshold(a);
        for (std::size_t j = 0; j < n; ++j)
            if (s.sigma[j] <= thr) e.eigenspace.push_back(s.v.col(j));
        if (e.eigenspace.empty()) {
            e.eigenspace.push_back(s.v.col(n - 1));
            e.rank_override = true;
        }
        if (e.eigenspace.size() > static_cast<std::size_t>(re.multiplicity))
            e.eigenspace.resize(static_cast<std::size_t>(re.multiplicity));
        e.geometric_multiplicity = static_cast<int>(e.eigenspace.size());
        for (auto& v : e.eigenspace) {
            detail::fix_sign(v);
            e.rotation_residual = std::max(e.rotation_residual, max_rotation_value(a, v));
            e.expansion_residual =
                std::max(e.expansion_residual, std::abs(evaluate(ae, v) - re.value));
        }
        e.verified = e.rotation_residual <= rep.verify_tol;
        rep.entries.push_back(std::move(e));
    }
    return rep;
}

enum class PlanarClass { complex, repeated_gm1, real_distinct, repeated_gm2 };

inline const char* to_string(PlanarClass c)
{
    switch (c) {
    case PlanarClass::complex: return "complex";
    case PlanarClass::repeated_gm1: return "repeated-gm1";
    case PlanarClass::real_distinct: return "real-distinct";
    case PlanarClass::repeated_gm2: return "repeated-gm2";
    }
    return "?";
}

struct PlanarReport {
    double lambda_e1 = 0.0, lambda_e2 = 0.0; // eigenvalues of A^e, descending
    double lambda_r1 = 0.0, lambda_r2 = 0.0; // eigenvalues of A^r, descending
    /// Eigenvalues: (re1, im) and (re2, -im); im = 0 when real.
    double eig1_re = 0.0, eig2_re = 0.0, eig_im = 0.0;
    PlanarClass classification = PlanarClass::real_distinct;
    /// Zeros of A^r on [0, pi); -1 stands for infinitely many.
    int zero_count = 0;
    /// |l_r1 l_r2| fell under the repeated-eigenvalue threshold.
    bool borderline = false;
    std::optional<Mat> rep_in_u_basis;
};

inline PlanarReport planar_analyze(const Mat& a, const std::optional<Vec>& u = std::nullopt,
                                   const ToleranceConfig& tol = {})
{
    if (!a.is_square() || a.n() != 2) throw InputError("planar_analyze: matrix must be 2x2");
    if (!is_finite(a)) throw InputError("planar_analyze: non-finite entries");
    PlanarReport r;
    const QForm ae = expansion_form(a);
    const QForm ar = rotation_form(a, {0, 1});
    const auto ee = sym_eigen(ae.matrix(), tol).values;
    const auto er = sym_eigen(ar.matrix(), tol).values;
    r.lambda_e1 = ee[1];
    r.lambda_e2 = ee[0];
    r.lambda_r1 = er[1];
    r.lambda_r2 = er[0];

    const double scale = norm_max(a);
    const double prod = r.lambda_r1 * r.lambda_r2;
    const double mean = 0.5 * (r.lambda_e1 + r.lambda_e2);
    if (std::abs(prod) <= 1e-12 * scale * scale) {
        r.borderline = prod != 0.0;
        const bool both_zero = std::abs(r.lambda_r1) <= 1e-6 * scale &&
                               std::abs(r.lambda_r2) <= 1e-6 * scale;
        r.classification = both_zero ? PlanarClass::repeated_gm2 : PlanarClass::repeated_gm1;
        r.zero_count = both_zero ? -1 : 1;
        r.eig1_re = r.eig2_re = mean;
    } else if (prod > 0.0) {
        r.classification = PlanarClass::complex;
        r.zero_count = 0;
        r.eig1_re = r.eig2_re = mean;
        r.eig_im = std::sqrt(prod);
    } else {
        r.classification = PlanarClass::real_distinct;
        r.zero_count = 2;
        const double d = std::sqrt(-prod);
        r.eig1_re = mean + d;
        r.eig2_re = mean - d;
    }

    if (u) {
        if (u->size() != 2) throw InputError("planar_analyze: u must be a 2-vector");
        const Vec uh = normalized(*u);
        const Vec up = apply_quasi_rotation(uh, {0, 1});
        r.rep_in_u_basis = Mat{{evaluate(ae, uh), -evaluate(ar, up)},
                               {evaluate(ar, uh), evaluate(ae, up)}};
    }
    return r;
}

struct SkewSquareSpace {
    double eigenvalue = 0.0; // eigenvalue of A^2 (<= 0)
    std::vector<Vec> eigenspace;
    double invariance_residual = 0.0; // max ||(I - P_V) A v||
};

inline std::vector<SkewSquareSpace> skew_square_structure(const Mat& a,
                                                          const ToleranceConfig& tol = {})
{
    require_skew(a, "skew_square_structure");
    const std::size_t n = a.n();
    const Mat a2 = a * a;
    const SymEigen e = sym_eigen(sym_part(a2), tol);
    const double gap = 1e-9 * std::max(norm_max(a2), 1e-300);
    std::vector<SkewSquareSpace> out;
    for (std::size_t i = 0; i < n; ++i) {
        if (out.empty() || std::abs(e.values[i] - out.back().eigenvalue) > gap)
            out.push_back({e.values[i], {}, 0.0});
        out.back().eigenspace.push_back(e.vectors.vector(i));
    }
    for (auto& sp : out) {
        double mean = 0.0;
        for (const auto& v : sp.eigenspace) mean += dot(v, a2 * v);
        sp.eigenvalue = mean / static_cast<double>(sp.eigenspace.size());
        for (const auto& v : sp.eigenspace) {
            Vec av = a * v;
            Vec rest = av;
            for (const auto& q : sp.eigenspace) rest -= dot(q, av) * q;
            sp.invariance_residual = std::max(sp.invariance_residual, norm(rest));
        }
    }
    return out;
}

} // namespace endo
