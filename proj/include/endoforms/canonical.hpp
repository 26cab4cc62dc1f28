#pragma once

// Canonical bases: eigenbases of the expansion form (A = D + S), the real block
// form of the skew part, and normality tests phrased through the D + S split.

#include <algorithm>
#include <cmath>
#include <vector>

#include "endoforms/linalg.hpp"
#include "endoforms/qforms.hpp"
#include "endoforms/quasirot.hpp"

namespace endo {

/// [A] in an eigenbasis of A^e: diag(d) + s with s skew.
struct DSSplit {
    OrthoBasis basis;
    Vec d; // descending
    Mat s;

    Mat matrix() const { return Mat::diagonal(d) + s; }
};

namespace detail {

// Flip v so its first entry that is not negligible is positive.
inline void fix_sign(Vec& v)
{
    for (double x : v) {
        if (std::abs(x) > 1e-12) {
            if (x < 0) v *= -1.0;
            return;
        }
    }
}

// Groups of indices into a descending sequence whose values agree within tol.
inline std::vector<std::vector<std::size_t>> value_groups(const std::vector<double>& desc, double tol)
{
    std::vector<std::vector<std::size_t>> g;
    for (std::size_t i = 0; i < desc.size(); ++i) {
        if (g.empty() || std::abs(desc[g.back().front()] - desc[i]) > tol)
            g.push_back({i});
        else
            g.back().push_back(i);
    }
    return g;
}

} // namespace detail

/// Eigenbasis of A^e ordered by descending eigenvalue. Inside a repeated
/// eigenvalue the vectors are sign-fixed and ordered lexicographically.
inline DSSplit expansion_eigenbasis(const Mat& a, const ToleranceConfig& tol = {})
{
    require_square(a, "expansion_eigenbasis");
    const Mat ae = sym_part(a);
    if (norm_max(ae) <= 1e-12 * norm_max(a) || norm_max(ae) == 0.0)
        throw InputError("expansion_eigenbasis: A^e is zero (pure skew operator); "
                         "use skew_canonical_basis instead");
    const std::size_t n = a.n();
    const SymEigen e = sym_eigen(ae, tol);

    std::vector<double> vals(e.values.rbegin(), e.values.rend());
    std::vector<Vec> vecs;
    for (std::size_t i = 0; i < n; ++i) {
        Vec v = e.vectors.vector(n - 1 - i);
        detail::fix_sign(v);
        vecs.push_back(v);
    }
    const double gap = 1e-10 * std::max(norm_max(ae), 1.0);
    for (const auto& grp : detail::value_groups(vals, gap)) {
        if (grp.size() < 2) continue;
        std::vector<Vec> sub;
        for (auto i : grp) sub.push_back(vecs[i]);
        std::sort(sub.begin(), sub.end(), [](const Vec& x, const Vec& y) {
            for (std::size_t k = 0; k < x.size(); ++k) {
                if (std::abs(x[k] - y[k]) > 1e-12) return x[k] > y[k];
            }
            return false;
        });
        for (std::size_t j = 0; j < grp.size(); ++j) vecs[grp[j]] = sub[j];
    }

    DSSplit out;
    out.basis = OrthoBasis::from_columns(vecs);
    const Mat ab = out.basis.to_basis(a);
    out.d = Vec(n);
    for (std::size_t i = 0; i < n; ++i) out.d[i] = vals[i];
    out.s = skew_part(ab);
    return out;
}

/// Real block form of A^skew: blocks [[0, l], [-l, 0]] with l > 0 descending,
/// followed by the kernel.
struct SkewBlockForm {
    OrthoBasis basis;
    std::vector<double> lambdas;
    std::size_t zero_dim = 0;

    /// Block-diagonal matrix the conjugated skew part should equal.
    Mat block_matrix() const
    {
        Mat m(basis.n());
        for (std::size_t b = 0; b < lambdas.size(); ++b) {
            m(2 * b, 2 * b + 1) = lambdas[b];
            m(2 * b + 1, 2 * b) = -lambdas[b];
        }
        return m;
    }
};

inline SkewBlockForm skew_canonical_basis(const Mat& a, const ToleranceConfig& tol = {})
{
    require_square(a, "skew_canonical_basis");
    const Mat k = skew_part(a);
    const double kn = norm_max(k);
    if (kn <= 1e-12 * norm_max(a) || kn == 0.0)
        throw InputError("skew_canonical_basis: A^skew is zero (symmetric operator)");
    const std::size_t n = a.n();
    // -K^2 is positive semidefinite with eigenvalues l^2 on each block.
    const Mat mk2 = -(k * k);
    const SymEigen e = sym_eigen(sym_part(mk2), tol);
    const double zero_thr = 1e-12 * norm_fro(k) * norm_fro(k);

    std::vector<Vec> chosen;
    auto residual_after_projection = [&](Vec v) {
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& q : chosen) v -= dot(q, v) * q;
        return v;
    };

    SkewBlockForm out;
    for (std::size_t idx = n; idx-- > 0;) {
        if (e.values[idx] <= zero_thr) break;
        Vec v = residual_after_projection(e.vectors.vector(idx));
        if (norm(v) < 0.5) continue; // already covered by an earlier block
        v = normalized(v);
        const double lam = std::sqrt(dot(v, mk2 * v));
        Vec w = residual_after_projection(-(k * v) / lam);
        w = normalized(w - dot(v, w) * v);
        chosen.push_back(v);
        chosen.push_back(w);
        out.lambdas.push_back(lam);
        if (2 * out.lambdas.size() == n) break;
    }
    // kernel completion
    for (std::size_t idx = 0; idx < n && chosen.size() < n; ++idx) {
        Vec v = residual_after_projection(e.vectors.vector(idx));
        if (norm(v) < 0.5) continue;
        chosen.push_back(normalized(v));
    }
    if (chosen.size() != n)
        throw NumericalError("skew_canonical_basis: failed to complete the block basis");
    out.zero_dim = n - 2 * out.lambdas.size();

    // order blocks by descending lambda, keeping vector pairs together
    std::vector<std::size_t> order(out.lambdas.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return out.lambdas[i] > out.lambdas[j]; });
    std::vector<Vec> cols;
    std::vector<double> lams;
    for (auto b : order) {
        cols.push_back(chosen[2 * b]);
        cols.push_back(chosen[2 * b + 1]);
        lams.push_back(out.lambdas[b]);
    }
    for (std::size_t i = 2 * out.lambdas.size(); i < n; ++i) cols.push_back(chosen[i]);
    out.lambdas = lams;
    out.basis = OrthoBasis::from_columns(cols, 1e-9);
    // read the block values back from the conjugated matrix
    const Mat kb = out.basis.to_basis(k);
    for (std::size_t b = 0; b < out.lambdas.size(); ++b) out.lambdas[b] = kb(2 * b, 2 * b + 1);
    return out;
}

struct ViolatingPair {
    std::size_t i = 0;
    std::size_t j = 0;
    double rotation_trace = 0.0; // tr(A^r_ij) in the expansion eigenbasis
    double expansion_gap = 0.0;  // l^e_i - l^e_j
};

struct NormalityReport {
    bool is_normal = true;
    std::vector<ViolatingPair> violating_pairs;
    double commutator_norm = 0.0; // ||DS - SD||_max
    double threshold = 0.0;
    /// ||A A^T - A^T A||_max, computed independently of the split.
    double adjoint_commutator_norm = 0.0;
    bool short_circuit = false; // A symmetric or skew

    bool all_distinct = false;
    bool any_trace_nonzero = false;
    bool is_symmetric = false;

    // The five characterizations, each evaluated as a truth value.
    bool crit_ds_commute = true;
    bool crit_trace_rule = true;
    bool crit_distinct_nonzero_trace = true; // all distinct and some trace != 0  =>  not normal
    bool crit_distinct_iff_symmetric = true; // all distinct  =>  (normal <=> A = A^e)
    bool crit_repeated_if_nonsymmetric = true; // normal and not symmetric  =>  repeated

    bool consistent() const
    {
        return crit_ds_commute == is_normal && crit_trace_rule == is_normal &&
               crit_distinct_nonzero_trace && crit_distinct_iff_symmetric &&
               crit_repeated_if_nonsymmetric;
    }
};

inline NormalityReport normality_report(const Mat& a, const ToleranceConfig& tol = {})
{
    require_square(a, "normality_report");
    NormalityReport r;
    const double amax = norm_max(a);
    r.threshold = 1e-9 * amax * amax;
    r.adjoint_commutator_norm = norm_max(a * a.transpose() - a.transpose() * a);
    const double sym_n = norm_max(sym_part(a));
    const double skew_n = norm_max(skew_part(a));
    r.is_symmetric = skew_n <= 1e-12 * amax;
    if (amax == 0.0 || r.is_symmetric || sym_n <= 1e-12 * amax || a.n() == 1) {
        r.short_circuit = true;
        r.is_normal = true;
        r.all_distinct = false;
        return r;
    }

    const DSSplit ds = expansion_eigenbasis(a, tol);
    const std::size_t n = a.n();
    const double gap_tol = 1e-8 * amax;
    const double trace_tol = 1e-8 * amax;
    r.all_distinct = true;
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (std::abs(ds.d[i] - ds.d[i + 1]) <= gap_tol) r.all_distinct = false;

    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double gap = ds.d[i] - ds.d[j];
            const double c = ds.s(i, j) * gap;
            r.commutator_norm = std::max(r.commutator_norm, std::abs(c));
            const double tr_ij = -2.0 * ds.s(i, j);
            if (std::abs(tr_ij) > trace_tol) r.any_trace_nonzero = true;
            if (std::abs(c) > r.threshold) r.violating_pairs.push_back({i, j, tr_ij, gap});
        }
    r.is_normal = r.commutator_norm <= r.threshold;
    r.crit_ds_commute = r.commutator_norm <= r.threshold;
    r.crit_trace_rule = r.violating_pairs.empty();
    r.crit_distinct_nonzero_trace = !(r.all_distinct && r.any_trace_nonzero) || !r.is_normal;
    r.crit_distinct_iff_symmetric = !r.all_distinct || (r.is_normal == r.is_symmetric);
    r.crit_repeated_if_nonsymmetric = !(r.is_normal && !r.is_symmetric) || !r.all_distinct;
    return r;
}

struct NormalPowerBasis {
    OrthoBasis basis;
    std::vector<double> power_offdiag; // p = 1..n: max off-diagonal of [(A^p)^e] / ||(A^p)^e||
    double s2_offdiag = 0.0;           // max off-diagonal of S^2 in the basis
    double max_commutator = 0.0;       // max ||[(A^p)^e, (A^q)^e]|| / (||.|| ||.||)
};

/// Basis diagonalizing S^2 and every (A^p)^e for a normal A.
inline NormalPowerBasis normal_power_basis(const Mat& a, const ToleranceConfig& tol = {})
{
    const NormalityReport nr = normality_report(a, tol);
    if (!nr.is_normal) throw InputError("normal_power_basis: operator is not normal");
    const std::size_t n = a.n();
    NormalPowerBasis out;

    OrthoBasis basis = OrthoBasis::identity(n);
    if (!nr.short_circuit) {
        const DSSplit ds = expansion_eigenbasis(a, tol);
        const Mat s2 = ds.s * ds.s;
        std::vector<double> dv(ds.d.begin(), ds.d.end());
        const auto groups = detail::value_groups(dv, 1e-8 * norm_max(a));
        Mat q(n);
        for (const auto& g : groups) {
            const std::size_t m = g.size();
            Mat sub(m);
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < m; ++j) sub(i, j) = s2(g[i], g[j]);
            const SymEigen e = sym_eigen(sym_part(sub), tol);
            for (std::size_t c = 0; c < m; ++c)
                for (std::size_t i = 0; i < m; ++i) q(g[i], g[c]) = e.vectors.matrix()(i, c);
        }
        basis = OrthoBasis::from_matrix(ds.basis.matrix() * q, 1e-9);
    } else if (skew_part(a) == Mat(n) || norm_max(skew_part(a)) <= 1e-12 * norm_max(a)) {
        basis = sym_eigen(sym_part(a), tol).vectors;
    } else {
        basis = sym_eigen(sym_part(skew_part(a) * skew_part(a)), tol).vectors;
    }
    out.basis = basis;

    auto offdiag_rel = [](const Mat& m) {
        double off = 0.0;
        for (std::size_t i = 0; i < m.n(); ++i)
            for (std::size_t j = 0; j < m.n(); ++j)
                if (i != j) off = std::max(off, std::abs(m(i, j)));
        const double sc = norm_max(m);
        return sc > 0.0 ? off / sc : 0.0;
    };

    std::vector<Mat> pe;
    Mat p = Mat::identity(n);
    for (std::size_t k = 1; k <= n; ++k) {
        p = p * a;
        pe.push_back(sym_part(p));
        out.power_offdiag.push_back(offdiag_rel(basis.to_basis(pe.back())));
    }
    const Mat sk = skew_part(a);
    out.s2_offdiag = offdiag_rel(basis.to_basis(sk * sk));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double sc = norm_max(pe[i]) * norm_max(pe[j]);
            if (sc == 0.0) continue;
            out.max_commutator =
                std::max(out.max_commutator, norm_max(commutator(pe[i], pe[j])) / sc);
        }
    return out;
}

} // namespace endo
