#pragma once

// Command execution for the endoforms command-line tool. Argument parsing lives
// in tools/endoforms.cpp; this header turns a request into a report.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "endoforms/canonical.hpp"
#include "endoforms/frenet.hpp"
#include "endoforms/invariants.hpp"
#include "endoforms/linalg.hpp"
#include "endoforms/matrix_io.hpp"
#include "endoforms/qforms.hpp"
#include "endoforms/report.hpp"
#include "endoforms/spectral.hpp"

namespace endo::cli {

enum class ExitCode : int { ok = 0, input_error = 2, numerical_error = 3 };

struct AnalysisRequest {
    std::string command;                // analyze | planar | identities | frenet
    std::optional<std::string> input;   // matrix file
    std::string basis_mode = "given";   // given | expansion | skew-canonical
    std::vector<std::string> tol_overrides; // name=value
    std::uint64_t seed = 0;
    std::optional<std::string> output;  // stdout when absent
    std::optional<std::string> field;   // helix | circle | file:<path>
    std::optional<std::string> params;  // c=0.5,r=1
    std::optional<std::string> point;   // x,y,z
    std::optional<std::size_t> dim;     // random matrix size for identities
    std::size_t trials = 1000;          // n = 4 audit trials
};

namespace detail {

using report::Json;

inline std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    return out;
}

inline double parse_double_arg(const std::string& tok, const std::string& what)
{
    double v = 0.0;
    if (!endo::detail::parse_number(tok, v))
        throw InputError(what + ": '" + tok + "' is not a finite number");
    return v;
}

inline ToleranceConfig build_tolerances(const std::vector<std::string>& overrides)
{
    ToleranceConfig t;
    for (const auto& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos) throw InputError("--tol expects name=value, got '" + o + "'");
        const std::string name = o.substr(0, eq);
        const double v = parse_double_arg(o.substr(eq + 1), "--tol " + name);
        if (name == "eig_off_tol")
            t.eig_off_tol = v;
        else if (name == "rank_tol")
            t.rank_tol = v;
        else if (name == "residual_tol")
            t.residual_tol = v;
        else
            throw InputError("--tol: unknown tolerance '" + name +
                             "' (eig_off_tol, rank_tol, residual_tol)");
    }
    t.validate();
    return t;
}

inline std::map<std::string, double> parse_params(const std::optional<std::string>& p)
{
    std::map<std::string, double> out;
    if (!p) return out;
    for (const auto& item : split(*p, ',')) {
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw InputError("--params expects k=v pairs, got '" + item + "'");
        out[item.substr(0, eq)] = parse_double_arg(item.substr(eq + 1), "--params " + item.substr(0, eq));
    }
    return out;
}

inline Vec parse_point(const std::string& s, std::size_t dim)
{
    const auto parts = split(s, ',');
    if (parts.size() != dim)
        throw InputError("--point expects " + std::to_string(dim) + " comma-separated numbers");
    Vec v(dim);
    for (std::size_t i = 0; i < dim; ++i) v[i] = parse_double_arg(parts[i], "--point");
    return v;
}

inline Vec random_unit(std::size_t n, std::mt19937_64& rng)
{
    std::normal_distribution<double> g(0.0, 1.0);
    for (;;) {
        Vec v(n);
        for (auto& x : v) x = g(rng);
        const double len = norm(v);
        if (len > 1e-3) return v / len;
    }
}

inline Mat random_matrix(std::size_t n, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Mat a(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = u(rng);
    return a;
}

inline Json matrix_json(const Mat& m)
{
    Json j;
    j["n"] = m.n();
    j["rows"] = report::to_json(m);
    return j;
}

inline Json forms_json(const FormFamily& f)
{
    Json j;
    j["expansion"] = report::to_json(f.ae.matrix());
    Json rot = Json::array();
    const auto pairs = plane_pairs(f.basis.n());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        Json r;
        r["pair"] = pairs[i].label();
        r["matrix"] = report::to_json(f.ar[i].matrix());
        r["trace"] = trace(f.ar[i].matrix());
        const auto ev = sym_eigen(f.ar[i].matrix()).values;
        r["eigenvalues"] = report::to_json(ev);
        rot.push_back(r);
    }
    j["rotation"] = rot;
    return j;
}

inline Json bromwich_json(const BromwichBounds& b)
{
    Json j;
    j["real_min"] = b.nu;
    j["real_max"] = b.N;
    j["imag_min"] = b.mu;
    j["imag_max"] = b.M;
    return j;
}

inline Json normality_json(const NormalityReport& r)
{
    Json j;
    j["is_normal"] = r.is_normal;
    j["commutator_norm"] = r.commutator_norm;
    j["threshold"] = r.threshold;
    j["adjoint_commutator_norm"] = r.adjoint_commutator_norm;
    Json vp = Json::array();
    for (const auto& p : r.violating_pairs) {
        Json e;
        e["pair"] = PlanePair{p.i, p.j}.label();
        e["rotation_trace"] = p.rotation_trace;
        e["expansion_gap"] = p.expansion_gap;
        vp.push_back(e);
    }
    j["violating_pairs"] = vp;
    Json c;
    c["ds_commute"] = r.crit_ds_commute;
    c["trace_rule"] = r.crit_trace_rule;
    c["distinct_with_nonzero_trace_not_normal"] = r.crit_distinct_nonzero_trace;
    c["distinct_normal_iff_symmetric"] = r.crit_distinct_iff_symmetric;
    c["normal_nonsymmetric_has_repeat"] = r.crit_repeated_if_nonsymmetric;
    c["consistent"] = r.consistent();
    j["criteria"] = c;
    return j;
}

inline Json run_analyze(const AnalysisRequest& req, const ToleranceConfig& tol,
                        std::vector<std::string>& violations)
{
    if (!req.input) throw InputError("analyze: --input is required");
    const Mat a = read_matrix_file(*req.input);
    const std::size_t n = a.n();

    OrthoBasis basis = OrthoBasis::identity(n);
    Json basis_j;
    basis_j["mode"] = req.basis_mode;
    if (req.basis_mode == "expansion") {
        const DSSplit ds = expansion_eigenbasis(a, tol);
        basis = ds.basis;
        basis_j["expansion_eigenvalues"] = report::to_json(ds.d);
    } else if (req.basis_mode == "skew-canonical") {
        const SkewBlockForm sb = skew_canonical_basis(a, tol);
        basis = sb.basis;
        basis_j["skew_lambdas"] = report::to_json(sb.lambdas);
        basis_j["zero_dim"] = sb.zero_dim;
    } else if (req.basis_mode != "given") {
        throw InputError("--basis must be given, expansion or skew-canonical");
    }
    basis_j["vectors"] = report::to_json(basis.matrix().transpose());
    const Mat ab = basis.to_basis(a);
    basis_j["matrix_in_basis"] = report::to_json(ab);

    Json out;
    out["command"] = "analyze";
    out["seed"] = req.seed;
    out["input"] = matrix_json(a);
    out["basis"] = basis_j;
    out["forms"] = forms_json(form_family(ab));

    const SpectralReport sr = eigenstructure(ab, tol);
    Json spec;
    Json eigs = Json::array();
    for (const auto& e : sr.entries) {
        Json je;
        je["lambda"] = e.lambda;
        je["algebraic_multiplicity"] = e.algebraic_multiplicity;
        je["geometric_multiplicity"] = e.geometric_multiplicity;
        je["eigenspace"] = report::vectors_json(e.eigenspace);
        je["rotation_residual"] = e.rotation_residual;
        je["expansion_residual"] = e.expansion_residual;
        je["common_zero_verified"] = e.verified;
        je["rank_threshold_override"] = e.rank_override;
        const auto cz = common_zero_subspace(ab, e.lambda, 1e-7, tol);
        je["common_zero_dimension"] = cz.basis.size();
        eigs.push_back(je);
    }
    spec["real_eigenvalues"] = eigs;
    Json cp = Json::array();
    for (const auto& c : sr.complex_pairs) {
        Json jc;
        jc["re"] = c.re;
        jc["im"] = c.im;
        jc["multiplicity"] = c.multiplicity;
        cp.push_back(jc);
    }
    spec["complex_pairs"] = cp;
    spec["bromwich"] = bromwich_json(sr.bromwich);
    out["spectral"] = spec;
    out["normality"] = normality_json(normality_report(ab, tol));

    std::mt19937_64 rng(req.seed);
    const Vec u = random_unit(n, rng);
    const Decomposition d = decompose(ab, u);
    Json dj;
    dj["u"] = report::to_json(u);
    dj["expansion"] = d.e;
    Json rj = Json::object();
    for (const auto& kl : plane_pairs(n)) rj[kl.label()] = d.r[kl];
    dj["rotation"] = rj;
    dj["residual"] = d.residual;
    dj["norm_residual"] = d.norm_residual;
    out["decomposition"] = dj;

    for (const auto& e : sr.entries)
        if (!e.verified)
            violations.push_back("rotation_residual " + report::format_double(e.rotation_residual) +
                                 " for eigenvalue " + report::format_double(e.lambda) +
                                 " exceeds the common-zero tolerance");
    if (d.residual > 1e-10)
        violations.push_back("decomposition residual " + report::format_double(d.residual));
    return out;
}

inline Json run_planar(const AnalysisRequest& req, const ToleranceConfig& tol,
                       std::vector<std::string>& violations)
{
    if (!req.input) throw InputError("planar: --input is required");
    const Mat a = read_matrix_file(*req.input);
    if (a.n() != 2) throw InputError("planar: matrix must be 2x2, got n = " + std::to_string(a.n()));
    std::optional<Vec> u;
    if (req.point) u = parse_point(*req.point, 2);
    const PlanarReport r = planar_analyze(a, u, tol);
    Json out;
    out["command"] = "planar";
    out["input"] = matrix_json(a);
    out["expansion_eigenvalues"] = report::to_json(std::vector<double>{r.lambda_e1, r.lambda_e2});
    out["rotation_eigenvalues"] = report::to_json(std::vector<double>{r.lambda_r1, r.lambda_r2});
    out["classification"] = to_string(r.classification);
    if (r.zero_count < 0)
        out["zero_count"] = "infinite";
    else
        out["zero_count"] = r.zero_count;
    out["borderline"] = r.borderline;
    Json e = Json::array();
    e.push_back(Json{{"re", r.eig1_re}, {"im", r.eig_im}});
    e.push_back(Json{{"re", r.eig2_re}, {"im", r.eig_im == 0.0 ? 0.0 : -r.eig_im}});
    out["eigenvalues"] = e;
    if (r.rep_in_u_basis) {
        out["u"] = report::to_json(normalized(*u));
        out["rep_in_u_basis"] = report::to_json(*r.rep_in_u_basis);
        const Vec uh = normalized(*u);
        const Mat q = Mat::from_columns({uh, apply_quasi_rotation(uh, {0, 1})});
        const double res = norm_max(q.transpose() * a * q - *r.rep_in_u_basis);
        if (res > 1e-12 * std::max(norm_max(a), 1.0))
            violations.push_back("rep_in_u_basis residual " + report::format_double(res));
    }
    return out;
}

inline Json run_identities(const AnalysisRequest& req, const ToleranceConfig& tol,
                           std::vector<std::string>& violations)
{
    std::mt19937_64 rng(req.seed);
    Mat a;
    if (req.input) {
        a = read_matrix_file(*req.input);
    } else {
        const std::size_t n = req.dim.value_or(4);
        if (n < 1 || n > 12) throw InputError("--dim must be between 1 and 12");
        a = random_matrix(n, rng);
    }
    const std::size_t n = a.n();
    const Vec u = random_unit(n, rng);
    const Vec v = random_unit(n, rng);
    const InvariantReport ir = invariant_report(a, u, v);

    Json out;
    out["command"] = "identities";
    out["seed"] = req.seed;
    out["input"] = matrix_json(a);
    out["u"] = report::to_json(u);
    out["v"] = report::to_json(v);
    out["pm"] = report::to_json(ir.pms);
    Json res = Json::object();
    for (const auto& [k, val] : ir.residuals) res[k] = val;
    out["residuals"] = res;
    out["residual_tol"] = tol.residual_tol;
    Json ecs;
    ecs["theta"] = ir.ecs.theta;
    ecs["sigma"] = report::to_json(ir.ecs.sigma);
    ecs["omega"] = report::to_json(ir.ecs.omega);
    ecs["reconstruction_residual"] = ir.ecs_residual;
    out["euler_cauchy_stokes"] = ecs;

    if (n == 4) {
        const N4AuditStats st = n4_det_audit(req.trials, req.seed);
        Json au;
        au["trials"] = st.trials;
        au["max_residual"] = st.max;
        au["mean_residual"] = st.mean;
        au["median_residual"] = st.median;
        au["below_1e-9"] = st.below_1e9;
        out["n4_det_audit"] = au;
    }

    const NormalityReport nr = normality_report(a, tol);
    Json nj = normality_json(nr);
    if (nr.is_normal && !nr.is_symmetric && !nr.short_circuit) {
        try {
            const NormalRecovery rec = normal_invariant_recover(a, tol);
            nj["recovered_pm"] = report::to_json(rec.pm);
            nj["system_rank"] = rec.system_rank;
        } catch (const RankDeficiencyError& e) {
            nj["recovery_error"] = e.what();
            nj["system_rank"] = e.rank();
        }
    }
    out["normality"] = nj;

    for (const auto& [k, val] : ir.residuals) {
        if (k.rfind("n4_det", 0) == 0) continue; // audit value, reported only
        if (!(val <= tol.residual_tol))
            violations.push_back("residual " + k + " = " + report::format_double(val) +
                                 " exceeds residual_tol " + report::format_double(tol.residual_tol));
    }
    return out;
}

inline FlowField load_grid_field(const std::string& path)
{
    const std::string text = read_text_file(path);
    report::Json j;
    try {
        j = report::Json::parse(text);
    } catch (const report::Json::parse_error& e) {
        std::size_t line = 0, col = 0;
        endo::detail::line_col(text, e.byte > 0 ? e.byte - 1 : 0, line, col);
        throw ParseError(path, line, col, "malformed grid field JSON");
    }
    try {
        auto vec3 = [](const report::Json& a) {
            if (!a.is_array() || a.size() != 3) throw InputError("grid field: expected a 3-array");
            return Vec{a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
        };
        const Vec origin = vec3(j.at("origin"));
        const Vec spacing = vec3(j.at("spacing"));
        const auto& sh = j.at("shape");
        if (!sh.is_array() || sh.size() != 3) throw InputError("grid field: shape must be a 3-array");
        std::array<std::size_t, 3> shape{sh[0].get<std::size_t>(), sh[1].get<std::size_t>(),
                                         sh[2].get<std::size_t>()};
        std::vector<Vec> values;
        for (const auto& v : j.at("values")) values.push_back(vec3(v));
        return GridField(origin, spacing, shape, std::move(values)).as_flow_field("file:" + path);
    } catch (const report::Json::exception& e) {
        throw InputError(path + ": grid field: " + e.what());
    }
}

inline Json run_frenet(const AnalysisRequest& req, const ToleranceConfig&,
                       std::vector<std::string>&)
{
    const std::string field_spec = req.field.value_or("helix");
    auto params = parse_params(req.params);
    FlowField field;
    Json fj;
    fj["spec"] = field_spec;
    if (field_spec == "helix" || field_spec == "circle") {
        const double c = field_spec == "circle" ? 0.0 : (params.count("c") ? params["c"] : 0.5);
        field = helix_field(c);
        fj["c"] = c;
    } else if (field_spec.rfind("file:", 0) == 0) {
        field = load_grid_field(field_spec.substr(5));
    } else {
        throw InputError("--field must be helix, circle or file:<path>");
    }
    Vec x;
    if (req.point)
        x = parse_point(*req.point, 3);
    else
        x = Vec{params.count("r") ? params["r"] : 1.0, 0.0, 0.0};

    const FrenetData d = shape_map_frenet(field, x);
    const FrenetRotationForms rf = frenet_rotation_forms(d);
    const ModelComparison mc = paper_model_compare(d);

    Json out;
    out["command"] = "frenet";
    out["field"] = fj;
    out["point"] = report::to_json(x);
    Json fr;
    fr["T"] = report::to_json(d.t);
    fr["N"] = report::to_json(d.n);
    fr["B"] = report::to_json(d.b);
    fr["orthonormality_error"] = d.frame_error;
    out["frame"] = fr;
    out["kappa"] = d.kappa;
    out["tau"] = d.tau;
    out["sigma"] = d.sigma;
    out["sigma_alt"] = d.sigma_alt;
    out["A_F"] = report::to_json(d.a_f);
    out["model_A_F"] = report::to_json(d.model_a_f);
    Json forms = Json::array();
    const char* names[3] = {"TN", "TB", "NB"};
    for (std::size_t i = 0; i < 3; ++i) {
        Json f;
        f["pair"] = names[i];
        f["computed"] = report::to_json(rf.computed[i].matrix());
        f["model"] = report::to_json(rf.model[i]);
        f["max_delta"] = rf.max_delta[i];
        forms.push_back(f);
    }
    out["rotation_forms"] = forms;
    Json cmp;
    cmp["skew_residual"] = mc.skew_residual;
    cmp["entry_12"] = mc.entry_12;
    cmp["model_entry_12"] = mc.model_entry_12;
    cmp["delta_12"] = mc.delta_12;
    cmp["entry_22"] = mc.entry_22;
    cmp["entry_33"] = mc.entry_33;
    cmp["expansion_norm"] = mc.expansion_norm;
    cmp["max_entry_delta"] = mc.max_entry_delta;
    cmp["sigma_gap"] = mc.sigma_gap;
    cmp["kernel_residual"] = mc.kernel_residual;
    out["model_comparison"] = cmp;
    return out;
}

/// Writes via a temporary file in the same directory, then renames.
inline void write_atomically(const std::string& path, const std::string& content)
{
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InputError("cannot write output file '" + path + "'");
        out << content;
        if (!out.flush()) throw InputError("failed writing output file '" + path + "'");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw InputError("cannot move report into place at '" + path + "'");
    }
}

} // namespace detail

struct BuiltReport {
    std::string text;
    std::vector<std::string> violations; // residuals that missed their tolerance
};

/// Builds the report for a request. Throws InputError / NumericalError.
inline BuiltReport build_report(const AnalysisRequest& req)
{
    const ToleranceConfig tol = detail::build_tolerances(req.tol_overrides);
    BuiltReport b;
    report::Json j;
    if (req.command == "analyze")
        j = detail::run_analyze(req, tol, b.violations);
    else if (req.command == "planar")
        j = detail::run_planar(req, tol, b.violations);
    else if (req.command == "identities")
        j = detail::run_identities(req, tol, b.violations);
    else if (req.command == "frenet")
        j = detail::run_frenet(req, tol, b.violations);
    else
        throw InputError("unknown command '" + req.command + "'");
    if (!b.violations.empty()) {
        report::Json v = report::Json::array();
        for (const auto& s : b.violations) v.push_back(s);
        j["tolerance_violations"] = v;
    }
    b.text = report::to_string(j);
    return b;
}

/// Runs a request, writing the report to the output path (or `out`) and
/// diagnostics to `err`. Returns the process exit status. A report is still
/// written when a residual misses its tolerance; the status is then 3.
inline int run(const AnalysisRequest& req, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    try {
        const BuiltReport b = build_report(req);
        if (req.output)
            detail::write_atomically(*req.output, b.text);
        else
            out << b.text;
        for (const auto& v : b.violations) err << "tolerance violation: " << v << "\n";
        return static_cast<int>(b.violations.empty() ? ExitCode::ok : ExitCode::numerical_error);
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::input_error);
    } catch (const std::exception& e) {
        err << "numerical error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::numerical_error);
    }
}

} // namespace endo::cli
