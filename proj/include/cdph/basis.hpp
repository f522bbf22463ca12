#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cdph/core.hpp"

namespace cdph {

enum class BasisFamily { monomial, chebyshev_tensor };

inline std::string to_string(BasisFamily f) { return f == BasisFamily::monomial ? "monomial" : "chebyshev-tensor"; }

inline BasisFamily basis_family_from_string(const std::string& s) {
    if (s == "monomial") return BasisFamily::monomial;
    if (s == "chebyshev-tensor") return BasisFamily::chebyshev_tensor;
    throw ConfigError("unknown basis family '" + s + "'");
}

/// C(n+d, d), the dimension of the space of n-variate polynomials of total
/// degree at most d. Throws Overflow past the 64-bit range.
inline std::uint64_t basis_size(std::size_t n, std::size_t d) {
    if (n < 1) throw ConfigError("basis_size requires n >= 1");
    std::uint64_t r = 1;
    // C(n+d, min(n,d)) by incremental multiply/divide; exact at every step.
    const std::uint64_t k = std::min<std::uint64_t>(n, d);
    for (std::uint64_t i = 1; i <= k; ++i) {
        const std::uint64_t num = n + d - k + i;
        if (r > (UINT64_MAX - 0) / num) throw Overflow("basis_size(" + std::to_string(n) + "," + std::to_string(d) + ") exceeds 64 bits");
        r = r * num / i;
    }
    return r;
}

/**
 * Basis of R[x]_d: the multi-indices alpha with |alpha| <= d in graded
 * lexicographic order (total degree ascending, lexicographic within a
 * degree), evaluated either as monomials x^alpha or as tensor Chebyshev
 * products prod_i T_{alpha_i}(x_i).
 */
struct BasisSpec {
    std::size_t dim = 1;
    std::size_t degree = 0;
    BasisFamily family = BasisFamily::chebyshev_tensor;
    std::vector<std::vector<unsigned>> multi_indices;

    BasisSpec() = default;
    BasisSpec(std::size_t n, std::size_t d, BasisFamily f = BasisFamily::chebyshev_tensor) : dim(n), degree(d), family(f) {
        multi_indices.reserve(basis_size(n, d));
        std::vector<unsigned> alpha(n, 0);
        for (unsigned t = 0; t <= d; ++t) emit_degree(alpha, 0, t);
    }

    std::size_t size() const { return multi_indices.size(); }

    bool same_layout(const BasisSpec& other) const { return dim == other.dim && degree == other.degree && family == other.family; }

private:
    void emit_degree(std::vector<unsigned>& alpha, std::size_t pos, unsigned remaining) {
        if (pos + 1 == alpha.size()) {
            alpha[pos] = remaining;
            multi_indices.push_back(alpha);
            return;
        }
        for (unsigned a = 0; a <= remaining; ++a) {
            alpha[pos] = a;
            emit_degree(alpha, pos + 1, remaining - a);
        }
    }
};

/// Evaluate all basis polynomials at x, in basis order.
inline void eval_basis(const BasisSpec& basis, const Point& x, std::vector<double>& out) {
    const std::size_t n = basis.dim;
    // Per-coordinate 1D values up to the max degree, then tensor products.
    thread_local std::vector<double> table;
    table.assign(n * (basis.degree + 1), 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        double* t = table.data() + i * (basis.degree + 1);
        if (basis.degree >= 1) t[1] = x[i];
        if (basis.family == BasisFamily::monomial) {
            for (std::size_t k = 2; k <= basis.degree; ++k) t[k] = t[k - 1] * x[i];
        } else {
            for (std::size_t k = 2; k <= basis.degree; ++k) t[k] = 2.0 * x[i] * t[k - 1] - t[k - 2];
        }
    }
    out.resize(basis.size());
    for (std::size_t a = 0; a < basis.multi_indices.size(); ++a) {
        double v = 1.0;
        const std::vector<unsigned>& alpha = basis.multi_indices[a];
        for (std::size_t i = 0; i < n; ++i) v *= table[i * (basis.degree + 1) + alpha[i]];
        out[a] = v;
    }
}

inline std::vector<double> eval_basis(const BasisSpec& basis, const Point& x) {
    std::vector<double> out;
    eval_basis(basis, x, out);
    return out;
}

}  // namespace cdph
