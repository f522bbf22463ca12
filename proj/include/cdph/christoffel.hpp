#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cdph/basis.hpp"
#include "cdph/core.hpp"
#include "cdph/pointcloud.hpp"
#include "cdph/transport.hpp"

namespace cdph {

/**
 * Empirical moment matrix of a basis b under a weighted point measure:
 *
 *   M[alpha][beta] = sum_i w_i * b_alpha(X_i) * b_beta(X_i) + eps * [alpha == beta]
 *
 * Symmetric positive semidefinite s x s with s = basis.size(); the diagonal
 * shift eps (default 0) regularizes near-degenerate samples.
 */
struct MomentMatrix {
    BasisSpec basis;
    std::vector<double> entries;  // s*s row-major
    double regularization_eps = 0.0;

    std::size_t size() const { return basis.size(); }
    double at(std::size_t r, std::size_t c) const { return entries[r * size() + c]; }
    double trace() const {
        double t = 0.0;
        for (std::size_t i = 0; i < size(); ++i) t += at(i, i);
        return t;
    }
};

inline MomentMatrix moment_matrix(const EmpiricalMeasure& measure, const BasisSpec& basis, double eps = 0.0) {
    if (measure.dim() != basis.dim) throw DimensionMismatch("moment matrix: measure dim " + std::to_string(measure.dim()) + " vs basis dim " + std::to_string(basis.dim));
    const std::size_t s = basis.size();
    MomentMatrix M{basis, std::vector<double>(s * s, 0.0), eps};
    std::vector<double> b;
    for (std::size_t i = 0; i < measure.size(); ++i) {
        eval_basis(basis, measure.points()[i], b);
        const double w = measure.weights()[i];
        for (std::size_t r = 0; r < s; ++r) {
            const double wr = w * b[r];
            double* row = M.entries.data() + r * s;
            for (std::size_t c = r; c < s; ++c) row[c] += wr * b[c];
        }
    }
    for (std::size_t r = 0; r < s; ++r)
        for (std::size_t c = 0; c < r; ++c) M.entries[r * s + c] = M.entries[c * s + r];
    if (eps != 0.0)
        for (std::size_t r = 0; r < s; ++r) M.entries[r * s + r] += eps;
    return M;
}

/**
 * Fitted Christoffel model: the Cholesky factor L of the moment matrix,
 * so that the Christoffel polynomial evaluates as
 *
 *   Lambda(x) = b(x)^T M^{-1} b(x) = ||v||^2,  L v = b(x).
 *
 * Lambda >= 1 everywhere for a probability measure (the constant polynomial
 * has unit norm), which makes log10(Lambda) a nonnegative filtration value.
 */
class ChristoffelModel {
public:
    ChristoffelModel(BasisSpec basis, std::vector<double> factor, std::vector<double> moment, double eps)
        : basis_(std::move(basis)), factor_(std::move(factor)), moment_(std::move(moment)), eps_(eps) {}

    const BasisSpec& basis() const { return basis_; }
    const std::vector<double>& factor() const { return factor_; }
    const std::vector<double>& moment_entries() const { return moment_; }
    double regularization_eps() const { return eps_; }

    double christoffel_eval(const Point& x) const {
        thread_local std::vector<double> b, v;
        eval_basis(basis_, x, b);
        const std::size_t s = basis_.size();
        v.resize(s);
        const double* L = factor_.data();
        double lambda = 0.0;
        for (std::size_t i = 0; i < s; ++i) {
            double acc = b[i];
            const double* row = L + i * s;
            for (std::size_t j = 0; j < i; ++j) acc -= row[j] * v[j];
            const double vi = acc / row[i];
            v[i] = vi;
            lambda += vi * vi;
        }
        return lambda;
    }

    /// log10 of the Christoffel polynomial, clamped at 0 (Lambda >= 1 up to
    /// rounding, so the clamp only absorbs ~1e-16 noise).
    double log_christoffel_eval(const Point& x) const { return std::log10(std::max(christoffel_eval(x), 1.0)); }

    std::optional<double> log_sup_norm() const { return log_sup_norm_; }
    void set_log_sup_norm(double v) { log_sup_norm_ = v; }

private:
    BasisSpec basis_;
    std::vector<double> factor_;  // s*s row-major, lower triangular
    std::vector<double> moment_;  // retained for export / diagnostics
    double eps_;
    std::optional<double> log_sup_norm_;  // grid estimate, set after a sweep
};

/**
 * Cholesky-factorize the moment matrix of `measure` in basis `basis` with
 * diagonal regularization `eps`.
 *
 * Fails with DegenerateSampleSet when a pivot drops below
 * 1e-12 * trace / s, i.e. when the samples lie (numerically) on an
 * algebraic hypersurface of degree <= basis.degree and eps does not lift
 * the spectrum.
 */
inline ChristoffelModel fit(const EmpiricalMeasure& measure, const BasisSpec& basis, double eps = 0.0) {
    MomentMatrix M = moment_matrix(measure, basis, eps);
    const std::size_t s = M.size();
    const double pivot_tol = 1e-12 * M.trace() / static_cast<double>(s);

    std::vector<double> L(s * s, 0.0);
    for (std::size_t i = 0; i < s; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double acc = M.at(i, j);
            for (std::size_t k = 0; k < j; ++k) acc -= L[i * s + k] * L[j * s + k];
            if (i == j) {
                if (!(acc > pivot_tol)) {
                    std::string msg = "moment matrix is numerically singular at pivot " + std::to_string(i) + " (samples lie on a degree-" +
                                      std::to_string(basis.degree) + " algebraic hypersurface)";
                    if (eps == 0.0) {
                        msg += "; retry with regularization eps ~= " + std::to_string(1e-10 * M.trace() / static_cast<double>(s));
                    }
                    throw DegenerateSampleSet(msg);
                }
                L[i * s + i] = std::sqrt(acc);
            } else {
                L[i * s + j] = acc / L[j * s + j];
            }
        }
    }
    return ChristoffelModel(basis, std::move(L), std::move(M.entries), eps);
}

/// Regular evaluation lattice with `per_axis`+1 points per axis covering
/// [-1,1]^n; the canonical grid for sup-norm estimates.
inline std::vector<Point> make_grid(std::size_t n, std::size_t per_axis) {
    std::vector<Point> grid;
    const std::size_t count = [&] {
        std::size_t c = 1;
        for (std::size_t i = 0; i < n; ++i) c *= per_axis + 1;
        return c;
    }();
    grid.reserve(count);
    Point p(n);
    std::vector<std::size_t> idx(n, 0);
    for (std::size_t k = 0; k < count; ++k) {
        std::size_t rem = k;
        for (std::size_t i = 0; i < n; ++i) {
            idx[i] = rem % (per_axis + 1);
            rem /= per_axis + 1;
            p[i] = -1.0 + 2.0 * static_cast<double>(idx[i]) / static_cast<double>(per_axis);
        }
        grid.push_back(p);
    }
    return grid;
}

/**
 * Numerical check of the Wasserstein stability chain between two fitted
 * models on a shared evaluation grid.
 *
 * All sup norms are grid maxima (lower bounds on the true sup). The
 * division/log bound is base-invariant, so the log10 and natural-log gaps
 * are both reported against the same bound argument
 * B = C_{n,d} * max(supX, supY) * d_W + 1.
 */
struct StabilityReport {
    double c_nd = 0.0;           // 4 * s(n,d) * d^2
    double wasserstein_dist = 0.0;
    double sup_lambda_x = 0.0;   // grid max of Lambda_X
    double sup_lambda_y = 0.0;
    double max_rel_gap = 0.0;    // max |Lambda_X - Lambda_Y| / Lambda_Y
    double log10_gap = 0.0;      // ||log10 Lambda_X - log10 Lambda_Y||_inf (grid)
    double ln_gap = 0.0;
    double bound_argument = 0.0; // B above
    bool wasstab_ok = false;     // Lambda-level inequality with C * supX
    bool logstab_ok = false;     // log-level inequality against log(B)
    bool locallip_applicable = false;  // C * supX * d_W <= 1/2
    bool locallip_ok = false;          // supY <= 2 supX (when applicable)
};

inline StabilityReport stability_gap(const ChristoffelModel& model_x, const ChristoffelModel& model_y, const EmpiricalMeasure& meas_x,
                                     const EmpiricalMeasure& meas_y, const std::vector<Point>& grid) {
    if (!model_x.basis().same_layout(model_y.basis())) throw BasisMismatch("stability_gap requires identical basis specs");
    if (grid.empty()) throw ConfigError("stability_gap requires a nonempty grid");

    StabilityReport r;
    const std::size_t s = model_x.basis().size();
    const double d = static_cast<double>(model_x.basis().degree);
    r.c_nd = 4.0 * static_cast<double>(s) * d * d;
    r.wasserstein_dist = wasserstein(meas_x, meas_y).first;

    double max_violation = 0.0;
    for (const Point& p : grid) {
        const double lx = model_x.christoffel_eval(p);
        const double ly = model_y.christoffel_eval(p);
        r.sup_lambda_x = std::max(r.sup_lambda_x, lx);
        r.sup_lambda_y = std::max(r.sup_lambda_y, ly);
        r.max_rel_gap = std::max(r.max_rel_gap, std::abs(lx - ly) / ly);
        r.log10_gap = std::max(r.log10_gap, std::abs(std::log10(lx) - std::log10(ly)));
        max_violation = std::max(max_violation, std::abs(lx - ly) / ly);
    }
    r.ln_gap = r.log10_gap * std::numbers::ln10;

    const double scale_x = r.c_nd * r.sup_lambda_x * r.wasserstein_dist;
    r.wasstab_ok = max_violation <= scale_x + 1e-6;
    r.bound_argument = r.c_nd * std::max(r.sup_lambda_x, r.sup_lambda_y) * r.wasserstein_dist + 1.0;
    r.logstab_ok = r.ln_gap <= std::log(r.bound_argument) + 1e-6;
    r.locallip_applicable = scale_x <= 0.5;
    r.locallip_ok = !r.locallip_applicable || r.sup_lambda_y <= 2.0 * r.sup_lambda_x + 1e-6;
    return r;
}

// --- model (de)serialization ------------------------------------------------

inline nlohmann::json model_to_json(const ChristoffelModel& m) {
    nlohmann::json j;
    j["basis"] = {{"dim", m.basis().dim}, {"degree", m.basis().degree}, {"family", to_string(m.basis().family)}};
    j["eps"] = m.regularization_eps();
    j["moment_matrix"] = m.moment_entries();
    j["factor"] = m.factor();
    if (m.log_sup_norm())
        j["log_sup_norm"] = *m.log_sup_norm();
    else
        j["log_sup_norm"] = nullptr;
    return j;
}

inline ChristoffelModel model_from_json(const nlohmann::json& j) {
    try {
        const auto& jb = j.at("basis");
        BasisSpec basis(jb.at("dim").get<std::size_t>(), jb.at("degree").get<std::size_t>(), basis_family_from_string(jb.at("family").get<std::string>()));
        ChristoffelModel m(std::move(basis), j.at("factor").get<std::vector<double>>(), j.at("moment_matrix").get<std::vector<double>>(),
                           j.at("eps").get<double>());
        if (j.contains("log_sup_norm") && !j.at("log_sup_norm").is_null()) m.set_log_sup_norm(j.at("log_sup_norm").get<double>());
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad model json: ") + e.what());
    }
}

inline void save_model_json(const ChristoffelModel& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << model_to_json(m).dump(2) << '\n';
}

inline ChristoffelModel load_model_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    return model_from_json(j);
}

}  // namespace cdph
