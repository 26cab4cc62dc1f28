#pragma once

// Matrix invariants pm^k and the identities tying them to the expansion and
// rotation forms: Newton trace formulae, Cayley-Hamilton in vector, form and
// trace versions, the pm^2 and Gram-trace identities, diagonal expansion of
// determinants, and the power-form recurrences.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "endoforms/canonical.hpp"
#include "endoforms/linalg.hpp"
#include "endoforms/qforms.hpp"
#include "endoforms/quasirot.hpp"

namespace endo {

namespace detail {

inline double safe_ratio(double num, double scale)
{
    return scale > 0.0 ? std::abs(num) / scale : std::abs(num);
}

inline void require_unit(const Vec& u, const char* what)
{
    if (std::abs(norm(u) - 1.0) > 1e-10) throw InputError(std::string(what) + ": expected a unit vector");
}

// A^0 .. A^n
inline std::vector<Mat> powers(const Mat& a, std::size_t top)
{
    std::vector<Mat> p{Mat::identity(a.n())};
    for (std::size_t k = 1; k <= top; ++k) p.push_back(p.back() * a);
    return p;
}

// pm^0 .. pm^n
inline std::vector<double> pm_with_zero(const Mat& a)
{
    auto pm = principal_minor_sums(a);
    pm.insert(pm.begin(), 1.0);
    return pm;
}

inline double sign_pow(std::size_t k) { return (k % 2) ? -1.0 : 1.0; }

} // namespace detail

/// Relative residual of each Newton trace formula, k = 1..n, for given pm^1..pm^n.
inline std::vector<double> newton_residuals(const Mat& a, const std::vector<double>& pm)
{
    require_square(a, "newton_residuals");
    const std::size_t n = a.n();
    if (pm.size() != n) throw InputError("newton_residuals: need n principal minor sums");
    std::vector<double> tr(n + 1);
    Mat p = Mat::identity(n);
    for (std::size_t k = 1; k <= n; ++k) {
        p = p * a;
        tr[k] = trace(p);
    }
    auto pmk = [&](std::size_t i) { return i == 0 ? 1.0 : pm[i - 1]; };
    std::vector<double> out;
    for (std::size_t k = 1; k <= n; ++k) {
        // the i = k term n pm^k against (n - k) pm^k on the right leaves k pm^k
        double lhs = detail::sign_pow(k) * static_cast<double>(k) * pmk(k);
        double scale = static_cast<double>(n + (n - k)) * std::abs(pmk(k));
        for (std::size_t i = 0; i < k; ++i) {
            const double t = detail::sign_pow(i) * pmk(i) * tr[k - i];
            lhs += t;
            scale += std::abs(t);
        }
        out.push_back(detail::safe_ratio(lhs, scale));
    }
    return out;
}

inline std::vector<double> newton_residuals(const Mat& a)
{
    return newton_residuals(a, principal_minor_sums(a));
}

/// | sum_k (-1)^k pm^k (A^(n-k) u) . v | relative to sum_k |pm^k| ||A^(n-k)||_F.
inline double cayley_hamilton_residual(const Mat& a, const Vec& u, const Vec& v)
{
    require_square(a, "cayley_hamilton_residual");
    detail::require_unit(u, "cayley_hamilton_residual");
    detail::require_unit(v, "cayley_hamilton_residual");
    const std::size_t n = a.n();
    const auto pm = detail::pm_with_zero(a);
    const auto pw = detail::powers(a, n);
    double s = 0.0, scale = 0.0;
    for (std::size_t k = 0; k <= n; ++k) {
        s += detail::sign_pow(k) * pm[k] * dot(pw[n - k] * u, v);
        scale += std::abs(pm[k]) * norm_fro(pw[n - k]);
    }
    return detail::safe_ratio(s, scale);
}

struct FormResiduals {
    double expansion = 0.0;
    std::vector<double> rotation; // lexicographic pairs
};

/// Cayley-Hamilton with v = u and v = R_kl(u), written through the forms of
/// the powers of A.
inline FormResiduals ch_form_residuals(const Mat& a, const Vec& u)
{
    require_square(a, "ch_form_residuals");
    detail::require_unit(u, "ch_form_residuals");
    const std::size_t n = a.n();
    const auto pm = detail::pm_with_zero(a);
    const auto pw = detail::powers(a, n);
    FormResiduals out;
    double s = 0.0, scale = 0.0;
    for (std::size_t k = 0; k <= n; ++k) {
        const double val = k == n ? dot(u, u) : evaluate(expansion_form(pw[n - k]), u);
        s += detail::sign_pow(k) * pm[k] * val;
        scale += std::abs(pm[k]) * norm_fro(pw[n - k]);
    }
    out.expansion = detail::safe_ratio(s, scale);
    for (const auto& kl : plane_pairs(n)) {
        double r = 0.0, sc = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            r += detail::sign_pow(k) * pm[k] * evaluate(rotation_form(pw[n - k], kl), u);
            sc += std::abs(pm[k]) * norm_fro(pw[n - k]);
        }
        out.rotation.push_back(detail::safe_ratio(r, sc));
    }
    return out;
}

/// Trace versions: u = b_i summed over i.
inline FormResiduals ch_trace_residuals(const Mat& a)
{
    require_square(a, "ch_trace_residuals");
    const std::size_t n = a.n();
    const auto pm = detail::pm_with_zero(a);
    const auto pw = detail::powers(a, n);
    const double dn = static_cast<double>(n);
    FormResiduals out;
    double s = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        s += detail::sign_pow(k) * pm[k] * trace(expansion_form(pw[n - k]).matrix());
        scale += std::abs(pm[k]) * dn * norm_fro(pw[n - k]);
    }
    s += detail::sign_pow(n) * dn * pm[n];
    scale += dn * std::abs(pm[n]);
    out.expansion = detail::safe_ratio(s, scale);
    for (const auto& kl : plane_pairs(n)) {
        double r = 0.0, sc = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            r += detail::sign_pow(k) * pm[k] * trace(rotation_form(pw[n - k], kl).matrix());
            sc += std::abs(pm[k]) * dn * norm_fro(pw[n - k]);
        }
        out.rotation.push_back(detail::safe_ratio(r, sc));
    }
    return out;
}

inline double pm2(const Mat& a)
{
    if (a.n() < 2) throw InputError("pm2: dimension must be at least 2");
    return principal_minor_sums(a)[1];
}

/// pm^2(A) = pm^2(A^e) + 1/4 sum tr(A^r_kl)^2, relative to ||A||_F^2.
inline double pm2_identity_residual(const Mat& a)
{
    require_square(a, "pm2_identity_residual");
    if (a.n() < 2) throw InputError("pm2_identity_residual: dimension must be at least 2");
    double s = 0.0;
    for (const auto& kl : plane_pairs(a.n())) {
        const double t = trace(rotation_form(a, kl).matrix());
        s += t * t;
    }
    const double f = norm_fro(a);
    return detail::safe_ratio(pm2(a) - pm2(sym_part(a)) - 0.25 * s, f * f);
}

/// pm^2(A) = pm^2(A^sym) + pm^2(A^skew), relative to ||A||_F^2.
inline double pm2_split_residual(const Mat& a)
{
    require_square(a, "pm2_split_residual");
    const double f = norm_fro(a);
    return detail::safe_ratio(pm2(a) - pm2(sym_part(a)) - pm2(skew_part(a)), f * f);
}

struct GramTraceResiduals {
    double first = 0.0;  // n tr(AA^T) = 2 sum tr((A^r)^2) + (tr A^e)^2
    double second = 0.0; // ... = -4 sum pm^2(A^r) + 2 sum tr(A^r)^2 + (tr A^e)^2
};

inline GramTraceResiduals gram_trace_identity_residual(const Mat& a)
{
    require_square(a, "gram_trace_identity_residual");
    const std::size_t n = a.n();
    const double dn = static_cast<double>(n);
    const double lhs = dn * trace(a * a.transpose());
    double tr_sq = 0.0, sq_tr = 0.0, pm2_sum = 0.0;
    for (const auto& kl : plane_pairs(n)) {
        const Mat r = rotation_form(a, kl).matrix();
        tr_sq += trace(r * r);
        sq_tr += trace(r) * trace(r);
        pm2_sum += pm2(r);
    }
    const double te = trace(sym_part(a));
    const double scale = std::max(lhs, std::numeric_limits<double>::min());
    return {detail::safe_ratio(lhs - 2.0 * tr_sq - te * te, scale),
            detail::safe_ratio(lhs - (-4.0 * pm2_sum + 2.0 * sq_tr + te * te), scale)};
}

struct EulerCauchyStokes {
    double theta = 0.0; // tr A
    Mat sigma;          // traceless symmetric
    Mat omega;          // skew
};

/// A = (theta / n) I + sigma + omega.
inline EulerCauchyStokes euler_cauchy_stokes(const Mat& a)
{
    require_square(a, "euler_cauchy_stokes");
    const double theta = trace(a);
    const std::size_t n = a.n();
    return {theta, sym_part(a) - (theta / static_cast<double>(n)) * Mat::identity(n),
            skew_part(a)};
}

/// det(D + B) as the sum over index subsets t of det(D(complement t)) det(B(t)).
inline double collings_det(const Mat& d, const Mat& b)
{
    require_square(d, "collings_det");
    if (b.rows() != d.n() || b.cols() != d.n()) throw InputError("collings_det: shape mismatch");
    const std::size_t n = d.n();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && d(i, j) != 0.0) throw InputError("collings_det: D is not diagonal");
    if (n > 20) throw InputError("collings_det: dimension above 20 (2^n subsets)");
    double total = 0.0;
    const std::uint32_t subsets = 1u << n;
    std::vector<std::size_t> idx;
    for (std::uint32_t mask = 0; mask < subsets; ++mask) {
        double dpart = 1.0;
        idx.clear();
        for (std::size_t i = 0; i < n; ++i) {
            if (mask & (1u << i))
                idx.push_back(i);
            else
                dpart *= d(i, i);
        }
        if (dpart == 0.0) continue;
        Mat sub(idx.size());
        for (std::size_t r = 0; r < idx.size(); ++r)
            for (std::size_t c = 0; c < idx.size(); ++c) sub(r, c) = b(idx[r], idx[c]);
        // small minors in closed form so dyadic inputs stay exact
        double minor = 1.0;
        if (idx.size() == 1) minor = sub(0, 0);
        else if (idx.size() == 2) minor = sub(0, 0) * sub(1, 1) - sub(0, 1) * sub(1, 0);
        else if (idx.size() > 2) minor = det(sub);
        total += dpart * minor;
    }
    return total;
}

struct N4Audit {
    double det_a = 0.0;
    double rhs = 0.0;
    double residual = 0.0; // |det A - rhs| / max(1, |det A|)
};

/// Six-term expression for det A on E^4 through the D + S split.
inline N4Audit n4_det_identity(const Mat& a)
{
    if (!a.is_square() || a.n() != 4) throw InputError("n4_det_identity: matrix must be 4x4");
    const DSSplit ds = expansion_eigenbasis(a);
    const Mat dm = Mat::diagonal(ds.d);
    const Mat& s = ds.s;
    const double rhs = det(dm) + det(s) - trace(dm * dm * s * s) - 0.5 * trace(s * dm * s * dm) +
                       trace(s * dm * s) * trace(dm) + pm2(dm) * pm2(s);
    const double da = det(a);
    return {da, rhs, std::abs(da - rhs) / std::max(1.0, std::abs(da))};
}

inline double n4_det_identity_residual(const Mat& a) { return n4_det_identity(a).residual; }

struct N4AuditStats {
    std::size_t trials = 0;
    double max = 0.0;
    double mean = 0.0;
    double median = 0.0;
    std::size_t below_1e9 = 0;
};

/// Residual distribution of the n = 4 identity over seeded matrices with entries in [-1, 1].
inline N4AuditStats n4_det_audit(std::size_t trials, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::vector<double> res;
    res.reserve(trials);
    for (std::size_t t = 0; t < trials; ++t) {
        Mat a(4);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) a(i, j) = unif(rng);
        res.push_back(n4_det_identity_residual(a));
    }
    N4AuditStats st;
    st.trials = trials;
    if (trials == 0) return st;
    for (double r : res) {
        st.max = std::max(st.max, r);
        st.mean += r;
        if (r < 1e-9) ++st.below_1e9;
    }
    st.mean /= static_cast<double>(trials);
    std::sort(res.begin(), res.end());
    st.median = trials % 2 ? res[trials / 2] : 0.5 * (res[trials / 2 - 1] + res[trials / 2]);
    return st;
}

/// Thrown when the recovery system for the invariants of a normal operator
/// has rank below n. Carries the assembled system.
class RankDeficiencyError : public NumericalError {
public:
    RankDeficiencyError(const std::string& msg, Mat system, Vec rhs, std::size_t rank)
        : NumericalError(msg), system_(std::move(system)), rhs_(std::move(rhs)), rank_(rank)
    {
    }
    const Mat& system() const noexcept { return system_; }
    const Vec& rhs() const noexcept { return rhs_; }
    std::size_t rank() const noexcept { return rank_; }

private:
    Mat system_;
    Vec rhs_;
    std::size_t rank_;
};

struct NormalRecovery {
    std::vector<double> pm; // pm^1 .. pm^n
    std::size_t system_rank = 0;
    std::size_t expansion_rows = 0;
    std::size_t rotation_rows = 0;
    double solve_residual = 0.0;
    Mat system;
    Vec rhs;
};

inline double binomial(unsigned n, unsigned k)
{
    double r = 1.0;
    for (unsigned i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

/// Recovers pm^1..pm^n of a normal, non-symmetric operator from the eigenvalues
/// of the expansion forms of its powers and the rotation rows of pairs coupled by S.
inline NormalRecovery normal_invariant_recover(const Mat& a, const ToleranceConfig& tol = {})
{
    require_square(a, "normal_invariant_recover");
    const std::size_t n = a.n();
    if (norm_max(skew_part(a)) <= 1e-12 * norm_max(a))
        throw InputError("normal_invariant_recover: operator is symmetric");
    const NormalPowerBasis pb = normal_power_basis(a, tol); // throws when not normal
    const OrthoBasis& basis = pb.basis;

    std::vector<std::vector<double>> rows;
    std::vector<double> rhs;
    auto push = [&](std::vector<double> row, double r) {
        double sc = std::abs(r);
        for (double x : row) sc = std::max(sc, std::abs(x));
        if (sc == 0.0) return;
        for (double& x : row) x /= sc;
        rows.push_back(std::move(row));
        rhs.push_back(r / sc);
    };

    // lam[k][i]: eigenvalue of (A^k)^e on the i-th basis vector, k = 0..n
    const auto pw = detail::powers(a, n);
    std::vector<std::vector<double>> lam(n + 1, std::vector<double>(n, 1.0));
    for (std::size_t k = 1; k <= n; ++k) {
        const Mat m = basis.to_basis(sym_part(pw[k]));
        for (std::size_t i = 0; i < n; ++i) lam[k][i] = m(i, i);
    }
    NormalRecovery out;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> row(n);
        for (std::size_t k = 1; k <= n; ++k) row[k - 1] = detail::sign_pow(k) * lam[n - k][i];
        push(row, -lam[n][i]);
    }
    out.expansion_rows = rows.size();

    const Mat ab = basis.to_basis(a);
    const Mat s = skew_part(ab);
    const Mat s2 = s * s;
    const double s_thr = 1e-9 * std::max(norm_max(a), 1e-300);
    for (const auto& kl : plane_pairs(n)) {
        const std::size_t k = kl.k, l = kl.l;
        if (std::abs(s(l, k)) <= s_thr) continue;
        const double le = ab(l, l);
        const double sq = s2(l, l);
        std::vector<double> c(n + 1, 0.0); // c[p], p = 1..n
        for (std::size_t p = 1; p <= n; ++p)
            for (std::size_t m = 0; m < p; ++m) {
                if ((p - m) % 2 == 0) continue;
                c[p] += binomial(static_cast<unsigned>(p), static_cast<unsigned>(p - m)) *
                        std::pow(le, static_cast<double>(m)) *
                        std::pow(sq, static_cast<double>((p - m - 1) / 2));
            }
        std::vector<double> row(n, 0.0);
        for (std::size_t j = 1; j < n; ++j) row[j - 1] = detail::sign_pow(j) * c[n - j];
        push(row, -c[n]);
    }
    out.rotation_rows = rows.size() - out.expansion_rows;

    out.system = Mat(rows.size(), n);
    out.rhs = Vec(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t j = 0; j < n; ++j) out.system(r, j) = rows[r][j];
        out.rhs[r] = rhs[r];
    }
    const LeastSquares ls = least_squares(out.system, out.rhs, tol);
    out.system_rank = ls.rank;
    out.solve_residual = ls.residual;
    if (ls.rank < n)
        throw RankDeficiencyError("normal_invariant_recover: system rank " +
                                      std::to_string(ls.rank) + " < " + std::to_string(n),
                                  out.system, out.rhs, ls.rank);
    out.pm.assign(ls.x.begin(), ls.x.end());
    return out;
}

struct PowerFormStep {
    double lhs_e = 0.0;
    double rhs_e = 0.0;
    std::vector<double> lhs_r; // lexicographic pairs
    std::vector<double> rhs_r;
    double scale = 1.0; // ||A^m||_F ||A||_F, for relative comparison

    double max_relative_gap() const
    {
        double m = std::abs(lhs_e - rhs_e);
        for (std::size_t i = 0; i < lhs_r.size(); ++i) m = std::max(m, std::abs(lhs_r[i] - rhs_r[i]));
        return detail::safe_ratio(m, scale);
    }
};

/// Both sides of the one-step recurrences for the forms of A^(m+1) at unit u.
inline PowerFormStep power_form_step(const Mat& a, unsigned m, const Vec& u)
{
    require_square(a, "power_form_step");
    if (m < 1) throw InputError("power_form_step: m must be at least 1");
    detail::require_unit(u, "power_form_step");
    const std::size_t n = a.n();
    const Mat am = matrix_power(a, m);
    const Mat am1 = am * a;
    const auto pairs = plane_pairs(n);

    PowerFormStep out;
    out.scale = norm_fro(am) * norm_fro(a);
    const double ame = evaluate(expansion_form(am), u);
    std::vector<double> amr;
    for (const auto& kl : pairs) amr.push_back(evaluate(rotation_form(am, kl), u));

    out.lhs_e = evaluate(expansion_form(am1), u);
    out.rhs_e = ame * evaluate(expansion_form(a), u);
    const Mat at = a.transpose();
    for (std::size_t i = 0; i < pairs.size(); ++i)
        out.rhs_e += amr[i] * evaluate(rotation_form(at, pairs[i]), u);

    std::vector<Vec> a_ru;
    for (const auto& kl : pairs) a_ru.push_back(a * apply_quasi_rotation(u, kl));
    for (const auto& pq : pairs) {
        out.lhs_r.push_back(evaluate(rotation_form(am1, pq), u));
        double r = ame * evaluate(rotation_form(a, pq), u);
        const Vec rpq = apply_quasi_rotation(u, pq);
        for (std::size_t i = 0; i < pairs.size(); ++i) r += amr[i] * dot(a_ru[i], rpq);
        out.rhs_r.push_back(r);
    }
    return out;
}

struct DiagonalRecursion {
    PlanePair pq;
    double lhs = 0.0; // (A^(m+1))^r_pq(b_p)
    double rhs = 0.0; // four-sum expression
};

/// The u = b_p specialization of the rotation recurrence, written as the
/// explicit sum over the pairs that can contribute.
inline std::vector<DiagonalRecursion> power_form_diagonal(const Mat& a, unsigned m)
{
    require_square(a, "power_form_diagonal");
    if (m < 1) throw InputError("power_form_diagonal: m must be at least 1");
    const std::size_t n = a.n();
    const Mat am = matrix_power(a, m);
    const Mat am1 = am * a;
    auto rf = [](const Mat& x, std::size_t k, std::size_t l, std::size_t at) {
        return evaluate(rotation_form(x, {k, l}), Vec::unit(x.n(), at));
    };
    auto ef = [](const Mat& x, std::size_t at) {
        return evaluate(expansion_form(x), Vec::unit(x.n(), at));
    };
    std::vector<DiagonalRecursion> out;
    for (const auto& pq : plane_pairs(n)) {
        const std::size_t p = pq.k, q = pq.l;
        double r = ef(am, p) * rf(a, p, q, p) + rf(am, p, q, p) * ef(a, q);
        for (std::size_t l = p + 1; l < q; ++l) r += rf(am, p, l, p) * rf(a, l, q, l);
        for (std::size_t l = q + 1; l < n; ++l) r -= rf(am, p, l, p) * rf(a, q, l, l);
        for (std::size_t k = 0; k < p; ++k) r -= rf(am, k, p, p) * rf(a, k, q, k);
        out.push_back({pq, rf(am1, p, q, p), r});
    }
    return out;
}

/// Everything the identities command reports for one matrix.
struct InvariantReport {
    std::vector<double> pms;
    std::vector<std::pair<std::string, double>> residuals;
    EulerCauchyStokes ecs;
    double ecs_residual = 0.0;

    double max_residual(const std::string& skip_prefix = "n4_det") const
    {
        double m = 0.0;
        for (const auto& [k, v] : residuals)
            if (k.rfind(skip_prefix, 0) != 0) m = std::max(m, v);
        return m;
    }
};

/// Runs the identity catalogue on A with unit test vectors u, v.
inline InvariantReport invariant_report(const Mat& a, const Vec& u, const Vec& v)
{
    require_square(a, "invariant_report");
    const std::size_t n = a.n();
    InvariantReport r;
    r.pms = principal_minor_sums(a);
    const auto nr = newton_residuals(a, r.pms);
    for (std::size_t k = 0; k < nr.size(); ++k)
        r.residuals.emplace_back("newton_" + std::to_string(k + 1), nr[k]);
    r.residuals.emplace_back("ch_vector", cayley_hamilton_residual(a, u, v));
    const auto pairs = plane_pairs(n);
    const auto fr = ch_form_residuals(a, u);
    r.residuals.emplace_back("ch_expansion", fr.expansion);
    for (std::size_t i = 0; i < pairs.size(); ++i)
        r.residuals.emplace_back("ch_rotation(" + pairs[i].label() + ")", fr.rotation[i]);
    const auto tr = ch_trace_residuals(a);
    r.residuals.emplace_back("tr_ch_expansion", tr.expansion);
    for (std::size_t i = 0; i < pairs.size(); ++i)
        r.residuals.emplace_back("tr_ch_rotation(" + pairs[i].label() + ")", tr.rotation[i]);
    if (n >= 2) {
        r.residuals.emplace_back("pm2", pm2_identity_residual(a));
        r.residuals.emplace_back("pm2_split", pm2_split_residual(a));
    }
    const auto g = gram_trace_identity_residual(a);
    r.residuals.emplace_back("gram_trace", g.first);
    r.residuals.emplace_back("gram_trace_alt", g.second);
    for (unsigned m = 1; m <= 3; ++m)
        r.residuals.emplace_back("power_step_m" + std::to_string(m),
                                 power_form_step(a, m, u).max_relative_gap());
    if (n == 4 && norm_max(sym_part(a)) > 1e-12 * norm_max(a))
        r.residuals.emplace_back("n4_det", n4_det_identity_residual(a));
    r.ecs = euler_cauchy_stokes(a);
    const Mat rebuilt = (r.ecs.theta / static_cast<double>(n)) * Mat::identity(n) + r.ecs.sigma +
                        r.ecs.omega;
    r.ecs_residual = norm_max(rebuilt - a);
    return r;
}

} // namespace endo
