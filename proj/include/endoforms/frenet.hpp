#pragma once

// Frenet frames and shape maps of unit flow fields on E^3 under the flat
// connection: A_T(Y) = grad_Y T, expressed in the frame {T, N, B}.

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "endoforms/linalg.hpp"
#include "endoforms/qforms.hpp"
#include "endoforms/quasirot.hpp"

namespace endo {

struct FlowField {
    std::function<Vec(const Vec&)> evaluator;
    std::function<Mat(const Vec&)> jacobian; // optional analytic jacobian
    std::optional<double> fd_step;           // absolute; default 1e-5 (1 + |x|)
    std::string name = "field";

    /// Evaluates and checks the unit-length contract.
    Vec operator()(const Vec& x) const
    {
        if (x.size() != 3) throw InputError("flow field points must be 3-vectors");
        Vec t = evaluator(x);
        if (t.size() != 3 || !is_finite(t))
            throw FieldError(name + ": evaluator returned an unusable vector");
        if (std::abs(norm(t) - 1.0) > 1e-8)
            throw FieldError(name + ": field is not unit length at the queried point (|T| = " +
                             std::to_string(norm(t)) + ")");
        return t;
    }

    double step(const Vec& x) const { return fd_step.value_or(1e-5 * (1.0 + norm(x))); }
};

namespace detail {

// Fourth-order central difference of a vector-valued map along direction d.
template <typename F>
Vec central_difference(const F& f, const Vec& x, const Vec& d, double h)
{
    const Vec fp2 = f(x + (2.0 * h) * d);
    const Vec fp1 = f(x + h * d);
    const Vec fm1 = f(x - h * d);
    const Vec fm2 = f(x - (2.0 * h) * d);
    return (-1.0 * fp2 + 8.0 * fp1 - 8.0 * fm1 + fm2) / (12.0 * h);
}

} // namespace detail

/// Column j is grad_{e_j} T.
inline Mat field_jacobian(const FlowField& field, const Vec& x)
{
    if (x.size() != 3) throw InputError("field_jacobian: point must be a 3-vector");
    field(x); // unit check at the base point
    if (field.jacobian) return field.jacobian(x);
    const double h = field.step(x);
    Mat j(3);
    for (std::size_t c = 0; c < 3; ++c)
        j.set_col(c, detail::central_difference(field, x, Vec::unit(3, c), h));
    return j;
}

struct FrenetFrame {
    Vec t, n, b;
    double kappa = 0.0;
    double tau = 0.0;
};

namespace detail {

inline Vec principal_normal(const FlowField& field, const Vec& x, double kappa_tol, double* kappa)
{
    const Vec t = field(x);
    const Vec dt = field_jacobian(field, x) * t;
    const double k = norm(dt);
    if (k <= kappa_tol)
        throw NumericalError("straight flow: curvature " + std::to_string(k) +
                             " is not above the threshold at this point");
    if (kappa) *kappa = k;
    return dt / k;
}

inline double outer_step(const Vec& x) { return 1e-3 * (1.0 + norm(x)); }

} // namespace detail

inline FrenetFrame frenet_frame(const FlowField& field, const Vec& x, double kappa_tol = 1e-8)
{
    FrenetFrame f;
    f.t = field(x);
    f.n = detail::principal_normal(field, x, kappa_tol, &f.kappa);
    f.b = cross(f.t, f.n);
    auto nfield = [&](const Vec& y) { return detail::principal_normal(field, y, kappa_tol, nullptr); };
    const Vec dn = detail::central_difference(nfield, x, f.t, detail::outer_step(x));
    f.tau = dot(dn, f.b);
    return f;
}

/// The printed model of the shape map in the Frenet frame.
inline Mat frenet_model_matrix(double kappa, double tau, double sigma)
{
    return Mat{{0.0, -kappa, 0.0}, {kappa, 0.0, sigma - tau}, {0.0, tau - sigma, 0.0}};
}

struct FrenetData {
    Vec t, n, b;
    double kappa = 0.0;
    double tau = 0.0;
    double sigma = 0.0;     // tau - A_F(3,2)
    double sigma_alt = 0.0; // -(grad_T B . N) + A_F(2,3)
    Mat a_f;                // F^T J F
    Mat model_a_f;
    double skew_residual = 0.0; // ||A_F + A_F^T||_max
    double frame_error = 0.0;   // ||F^T F - I||_max

    OrthoBasis frame() const { return OrthoBasis::from_columns({t, n, b}, 1e-6); }
};

inline FrenetData shape_map_frenet(const FlowField& field, const Vec& x, double kappa_tol = 1e-8)
{
    const FrenetFrame fr = frenet_frame(field, x, kappa_tol);
    FrenetData d;
    d.t = fr.t;
    d.n = fr.n;
    d.b = fr.b;
    d.kappa = fr.kappa;
    d.tau = fr.tau;
    const Mat f = Mat::from_columns({fr.t, fr.n, fr.b});
    d.frame_error = norm_max(f.transpose() * f - Mat::identity(3));
    d.a_f = f.transpose() * field_jacobian(field, x) * f;
    d.sigma = d.tau - d.a_f(2, 1);

    auto bfield = [&](const Vec& y) {
        const Vec t = field(y);
        return cross(t, detail::principal_normal(field, y, kappa_tol, nullptr));
    };
    const Vec db = detail::central_difference(bfield, x, fr.t, detail::outer_step(x));
    d.sigma_alt = -dot(db, fr.n) + d.a_f(1, 2);

    d.model_a_f = frenet_model_matrix(d.kappa, d.tau, d.sigma);
    d.skew_residual = norm_max(d.a_f + d.a_f.transpose());
    return d;
}

/// Frenet-frame coordinates of (sigma - tau) T - kappa B.
inline Vec frenet_kernel_coords(const FrenetData& d)
{
    return Vec{d.sigma - d.tau, 0.0, -d.kappa};
}

/// Rotation forms for the pairs (T,N), (T,B), (N,B), the printed model matrices
/// for the same pairs, and their entrywise differences.
struct FrenetRotationForms {
    std::array<QForm, 3> computed;
    std::array<Mat, 3> model;
    std::array<double, 3> max_delta{};
    QForm expansion;
    double expansion_norm = 0.0;
};

inline std::array<Mat, 3> frenet_model_rotation_forms(double kappa, double tau, double sigma)
{
    const double h = 0.5 * (sigma - tau);
    return {Mat{{kappa, 0.0, h}, {0.0, kappa, 0.0}, {h, 0.0, 0.0}},
            Mat{{0.0, -h, 0.0}, {-h, 0.0, 0.5 * kappa}, {0.0, 0.5 * kappa, 0.0}},
            Mat{{0.0, 0.0, -0.5 * kappa}, {0.0, tau - sigma, 0.0}, {-0.5 * kappa, 0.0, tau - sigma}}};
}

inline FrenetRotationForms frenet_rotation_forms(const FrenetData& d)
{
    FrenetRotationForms out;
    out.model = frenet_model_rotation_forms(d.kappa, d.tau, d.sigma);
    const auto pairs = plane_pairs(3);
    for (std::size_t i = 0; i < 3; ++i) {
        out.computed[i] = rotation_form(d.a_f, pairs[i]);
        out.max_delta[i] = norm_max(out.computed[i].matrix() - out.model[i]);
    }
    out.expansion = expansion_form(d.a_f);
    out.expansion_norm = norm_max(out.expansion.matrix());
    return out;
}

inline FrenetRotationForms frenet_rotation_forms(const FlowField& field, const Vec& x)
{
    return frenet_rotation_forms(shape_map_frenet(field, x));
}

struct ModelComparison {
    double skew_residual = 0.0;
    double entry_12 = 0.0;       // A_F(1,2)
    double model_entry_12 = 0.0; // -kappa
    double delta_12 = 0.0;
    double entry_22 = 0.0;
    double entry_33 = 0.0;
    double expansion_norm = 0.0;
    double max_entry_delta = 0.0; // ||A_F - model||_max
    double sigma_gap = 0.0;       // |sigma - sigma_alt|
    double kernel_residual = 0.0; // ||A_F k|| for the model kernel direction k
};

inline ModelComparison paper_model_compare(const Mat& a_f, double kappa, double tau, double sigma,
                                           double sigma_alt)
{
    if (!a_f.is_square() || a_f.n() != 3) throw InputError("paper_model_compare: A_F must be 3x3");
    const Mat model = frenet_model_matrix(kappa, tau, sigma);
    ModelComparison c;
    c.skew_residual = norm_max(a_f + a_f.transpose());
    c.entry_12 = a_f(0, 1);
    c.model_entry_12 = model(0, 1);
    c.delta_12 = c.entry_12 - c.model_entry_12;
    c.entry_22 = a_f(1, 1);
    c.entry_33 = a_f(2, 2);
    c.expansion_norm = norm_max(sym_part(a_f));
    c.max_entry_delta = norm_max(a_f - model);
    c.sigma_gap = std::abs(sigma - sigma_alt);
    c.kernel_residual = norm(a_f * Vec{sigma - tau, 0.0, -kappa});
    return c;
}

inline ModelComparison paper_model_compare(const FrenetData& d)
{
    return paper_model_compare(d.a_f, d.kappa, d.tau, d.sigma, d.sigma_alt);
}

inline ModelComparison paper_model_compare(const FlowField& field, const Vec& x)
{
    return paper_model_compare(shape_map_frenet(field, x));
}

/// (-y, x, c) / sqrt(x^2 + y^2 + c^2), with its analytic jacobian.
inline FlowField helix_field(double c)
{
    FlowField f;
    f.name = "helix(c=" + std::to_string(c) + ")";
    f.evaluator = [c](const Vec& p) {
        const Vec w{-p[1], p[0], c};
        return w / norm(w);
    };
    f.jacobian = [c](const Vec& p) {
        const Vec w{-p[1], p[0], c};
        const double len = norm(w);
        const Vec t = w / len;
        const Mat dw{{0.0, -1.0, 0.0}, {1.0, 0.0, 0.0}, {0.0, 0.0, 0.0}};
        return (1.0 / len) * ((Mat::identity(3) - outer(t, t)) * dw);
    };
    return f;
}

/// Circular flow about the z-axis: the helix family with c = 0.
inline FlowField circle_field()
{
    FlowField f = helix_field(0.0);
    f.name = "circle";
    return f;
}

/// Unit field sampled on a regular grid, interpolated by tensor Catmull-Rom
/// splines and renormalized. values are stored with x varying fastest.
class GridField {
public:
    GridField(Vec origin, Vec spacing, std::array<std::size_t, 3> shape, std::vector<Vec> values)
        : origin_(std::move(origin)), spacing_(std::move(spacing)), shape_(shape),
          values_(std::move(values))
    {
        if (origin_.size() != 3 || spacing_.size() != 3)
            throw InputError("grid field: origin and spacing must be 3-vectors");
        for (std::size_t a = 0; a < 3; ++a) {
            if (!(spacing_[a] > 0.0)) throw InputError("grid field: spacing must be positive");
            if (shape_[a] < 4) throw InputError("grid field: need at least 4 samples per axis");
        }
        if (values_.size() != shape_[0] * shape_[1] * shape_[2])
            throw InputError("grid field: value count does not match shape");
        for (const auto& v : values_)
            if (v.size() != 3 || !is_finite(v)) throw InputError("grid field: values must be finite 3-vectors");
    }

    Vec operator()(const Vec& p) const
    {
        std::array<std::size_t, 3> base{};
        std::array<std::array<double, 4>, 3> w{};
        for (std::size_t a = 0; a < 3; ++a) {
            const double s = (p[a] - origin_[a]) / spacing_[a];
            const double fl = std::floor(s);
            if (!(fl >= 1.0) || fl > static_cast<double>(shape_[a]) - 3.0)
                throw FieldError("grid field: point outside the interpolation domain");
            base[a] = static_cast<std::size_t>(fl) - 1;
            const double t = s - fl;
            const double t2 = t * t, t3 = t2 * t;
            w[a] = {0.5 * (-t3 + 2.0 * t2 - t), 0.5 * (3.0 * t3 - 5.0 * t2 + 2.0),
                    0.5 * (-3.0 * t3 + 4.0 * t2 + t), 0.5 * (t3 - t2)};
        }
        Vec acc(3);
        for (std::size_t k = 0; k < 4; ++k)
            for (std::size_t j = 0; j < 4; ++j)
                for (std::size_t i = 0; i < 4; ++i) {
                    const double wt = w[0][i] * w[1][j] * w[2][k];
                    acc += wt * at(base[0] + i, base[1] + j, base[2] + k);
                }
        const double len = norm(acc);
        if (len == 0.0) throw FieldError("grid field: interpolated vector vanishes");
        return acc / len;
    }

    FlowField as_flow_field(std::string name = "grid") const
    {
        FlowField f;
        f.name = std::move(name);
        f.evaluator = [g = *this](const Vec& p) { return g(p); };
        // the interpolant is only C^1, so use a step comparable to the spacing
        f.fd_step = 0.05 * std::min({spacing_[0], spacing_[1], spacing_[2]});
        return f;
    }

private:
    const Vec& at(std::size_t i, std::size_t j, std::size_t k) const
    {
        return values_[(k * shape_[1] + j) * shape_[0] + i];
    }

    Vec origin_, spacing_;
    std::array<std::size_t, 3> shape_;
    std::vector<Vec> values_;
};

} // namespace endo
