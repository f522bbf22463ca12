#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <vector>

#include "cdph/core.hpp"

namespace cdph {

/**
 * Freudenthal (Kuhn) triangulation K_m of [-1,1]^n on the lattice
 * (2/m) * Z^n: each grid hypercube is split into n! simplices along
 * coordinate-order chains, giving (m+1)^n vertices, n! * m^n top simplices
 * and simplex diameter 2*sqrt(n)/m.
 *
 * A k-simplex is a pair (base vertex v, chain S_1 < S_2 < ... < S_k of
 * strictly nested nonempty subsets of the axes) with vertex set
 * {v, v + e_{S_1}, ..., v + e_{S_k}}, where e_S moves one lattice step
 * along every axis in S. Every simplex of the triangulation arises from
 * exactly one such pair, so enumeration is exact (no dedup) and the face
 * of a simplex is computed arithmetically:
 *
 *   drop vertex 0:    (v + e_{S_1}; S_2 \ S_1, ..., S_k \ S_1)
 *   drop vertex j>0:  (v; chain without S_j)
 *
 * Simplices are stored per dimension as ascending vertex-index tuples in
 * flat arrays, ordered by (chain, base cell).
 */
class FreudenthalComplex {
public:
    using VertexId = std::int32_t;

    static constexpr std::size_t default_simplex_cap = std::size_t{1} << 27;

    FreudenthalComplex(std::size_t n, std::size_t m, std::size_t max_dim = SIZE_MAX, std::size_t simplex_cap = default_simplex_cap)
        : n_(n), m_(m) {
        if (n < 1 || m < 1) throw ConfigError("freudenthal: n >= 1 and m >= 1 required");
        if (n > 20) throw ResourceLimit("freudenthal: dimension too large");
        top_dim_ = std::min(max_dim, n);

        strides_.resize(n);
        strides_[0] = 1;
        for (std::size_t i = 1; i < n; ++i) strides_[i] = strides_[i - 1] * static_cast<std::int64_t>(m + 1);
        vertex_count_ = strides_[n - 1] * static_cast<std::int64_t>(m + 1);

        build_chains();

        std::size_t total = 0;
        for (std::size_t k = 0; k <= top_dim_; ++k)
            for (const Chain& c : chains_[k]) total += c.cell_count;
        if (total > simplex_cap)
            throw ResourceLimit("freudenthal: " + std::to_string(total) + " simplices exceed the cap of " + std::to_string(simplex_cap));
        total_simplices_ = total;

        build_tuples();
    }

    std::size_t dim() const { return n_; }
    std::size_t resolution() const { return m_; }
    std::size_t top_dim() const { return top_dim_; }
    std::size_t vertex_count() const { return static_cast<std::size_t>(vertex_count_); }
    std::size_t total_simplex_count() const { return total_simplices_; }
    std::size_t simplex_count(std::size_t k) const { return k <= top_dim_ ? dim_counts_[k] : 0; }

    /// Global contiguous id ranges per dimension: [dim_offset(k), dim_offset(k)+simplex_count(k)).
    std::size_t dim_offset(std::size_t k) const { return dim_offsets_[k]; }

    /// Ascending vertex tuple of the idx-th k-simplex (k+1 entries).
    const VertexId* simplex_vertices(std::size_t k, std::size_t idx) const { return tuples_[k].data() + idx * (k + 1); }

    Point vertex_coords(VertexId v) const {
        Point p(n_);
        std::int64_t rem = v;
        for (std::size_t i = 0; i < n_; ++i) {
            p[i] = -1.0 + 2.0 * static_cast<double>(rem % static_cast<std::int64_t>(m_ + 1)) / static_cast<double>(m_);
            rem /= static_cast<std::int64_t>(m_ + 1);
        }
        return p;
    }

    /// Facet ids (per-dimension indices into dimension k-1) of the idx-th
    /// k-simplex, in drop-vertex order (k+1 entries).
    void boundary_of(std::size_t k, std::size_t idx, std::size_t* out) const {
        const std::size_t ci = chain_of(k, idx);
        const Chain& chain = chains_[k][ci];
        const std::size_t rank = idx - chain.first_index;
        std::size_t coords[24];
        {
            std::size_t rem = rank;
            for (std::size_t i = 0; i < n_; ++i) {
                coords[i] = rem % chain.extent[i];
                rem /= chain.extent[i];
            }
        }
        // drop vertex 0: advance the base along S_1 and strip S_1 from the rest
        {
            const std::uint32_t s1 = chain.spans[0];
            const Chain& fc = chains_[k - 1][chain.face_chain[0]];
            std::size_t rank2 = 0;
            for (std::size_t i = 0; i < n_; ++i) rank2 += (coords[i] + ((s1 >> i) & 1u)) * fc.weight[i];
            out[0] = fc.first_index + rank2;
        }
        // drop vertex j > 0: remove the j-th span
        for (std::size_t j = 1; j <= k; ++j) {
            const Chain& fc = chains_[k - 1][chain.face_chain[j]];
            std::size_t rank2 = 0;
            for (std::size_t i = 0; i < n_; ++i) rank2 += coords[i] * fc.weight[i];
            out[j] = fc.first_index + rank2;
        }
    }

    /// Barycentric location of x in its minimal containing simplex.
    struct Location {
        std::vector<VertexId> vertices;
        std::vector<double> weights;
    };

    Location locate(const Point& x) const {
        if (x.size() != n_) throw DimensionMismatch("locate: point dimension mismatch");
        for (double c : x)
            if (!(c >= -1.0 && c <= 1.0)) throw OutOfDomain("locate: point outside [-1,1]^n");
        std::vector<std::int64_t> cell(n_);
        std::vector<double> frac(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            const double g = (x[i] + 1.0) * static_cast<double>(m_) / 2.0;
            double c = std::floor(g);
            if (c > static_cast<double>(m_ - 1)) c = static_cast<double>(m_ - 1);
            cell[i] = static_cast<std::int64_t>(c);
            frac[i] = g - c;
        }
        std::vector<std::size_t> axes(n_);
        std::iota(axes.begin(), axes.end(), 0);
        std::stable_sort(axes.begin(), axes.end(), [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });

        std::int64_t base = 0;
        for (std::size_t i = 0; i < n_; ++i) base += cell[i] * strides_[i];

        Location loc;
        std::int64_t v = base;
        double prev = 1.0;
        for (std::size_t j = 0; j <= n_; ++j) {
            const double fj = j < n_ ? frac[axes[j]] : 0.0;
            const double alpha = prev - fj;
            if (alpha > 0.0) {
                loc.vertices.push_back(static_cast<VertexId>(v));
                loc.weights.push_back(alpha);
            }
            if (j < n_) {
                v += strides_[axes[j]];
                prev = fj;
            }
        }
        return loc;
    }

private:
    struct Chain {
        std::vector<std::uint32_t> spans;  // S_1 < ... < S_k as bitmasks
        std::vector<std::size_t> extent;   // per-axis cell range (m or m+1)
        std::vector<std::size_t> weight;   // mixed-radix strides over extent
        std::vector<std::int64_t> vertex_offset;  // linear delta of e_{S_j}
        std::vector<std::size_t> face_chain;      // chain id of face j, per dropped vertex
        std::size_t cell_count = 0;
        std::size_t first_index = 0;  // per-dimension index of cell 0
    };

    void build_chains() {
        chains_.resize(top_dim_ + 1);
        const std::uint32_t full = n_ >= 32 ? 0xffffffffu : ((1u << n_) - 1u);
        std::vector<std::uint32_t> current;
        build_chains_rec(current, 0u, full);
        // k = 0: the empty chain over all vertices
        chains_[0].push_back(Chain{{}, {}, {}, {}, {}, 0, 0});

        dim_counts_.assign(top_dim_ + 1, 0);
        dim_offsets_.assign(top_dim_ + 2, 0);
        chain_lookup_.resize(top_dim_ + 1);
        for (std::size_t k = 0; k <= top_dim_; ++k) {
            std::sort(chains_[k].begin(), chains_[k].end(), [](const Chain& a, const Chain& b) { return a.spans < b.spans; });
            std::size_t running = 0;
            for (std::size_t c = 0; c < chains_[k].size(); ++c) {
                Chain& ch = chains_[k][c];
                finalize_chain(ch, k);
                ch.first_index = running;
                running += ch.cell_count;
                chain_lookup_[k][ch.spans] = c;
            }
            dim_counts_[k] = running;
        }
        for (std::size_t k = 0; k <= top_dim_; ++k) dim_offsets_[k + 1] = dim_offsets_[k] + dim_counts_[k];

        // Face chains are cell-independent: resolve them once per (chain, j).
        for (std::size_t k = 1; k <= top_dim_; ++k) {
            for (Chain& ch : chains_[k]) {
                ch.face_chain.resize(k + 1);
                std::vector<std::uint32_t> spans;
                spans.reserve(k);
                for (std::size_t j = 0; j <= k; ++j) {
                    spans.clear();
                    if (j == 0) {
                        for (std::size_t l = 1; l < k; ++l) spans.push_back(ch.spans[l] & ~ch.spans[0]);
                    } else {
                        for (std::size_t l = 0; l < k; ++l)
                            if (l != j - 1) spans.push_back(ch.spans[l]);
                    }
                    ch.face_chain[j] = chain_lookup_[k - 1].at(spans);
                }
            }
        }
    }

    void build_chains_rec(std::vector<std::uint32_t>& current, std::uint32_t last, std::uint32_t full) {
        if (!current.empty() && current.size() <= top_dim_) chains_[current.size()].push_back(Chain{current, {}, {}, {}, {}, 0, 0});
        if (current.size() >= top_dim_) return;
        for (std::uint32_t s = last + 1; s <= full; ++s) {
            if ((s & last) != last || s == last) continue;  // must strictly contain the previous span
            current.push_back(s);
            build_chains_rec(current, s, full);
            current.pop_back();
        }
    }

    void finalize_chain(Chain& ch, std::size_t k) {
        ch.extent.resize(n_);
        ch.weight.resize(n_);
        const std::uint32_t top = k == 0 ? 0u : ch.spans.back();
        std::size_t count = 1;
        for (std::size_t i = 0; i < n_; ++i) {
            ch.extent[i] = ((top >> i) & 1u) ? m_ : m_ + 1;
            ch.weight[i] = count;
            count *= ch.extent[i];
        }
        ch.cell_count = count;
        ch.vertex_offset.resize(k + 1);
        ch.vertex_offset[0] = 0;
        for (std::size_t j = 1; j <= k; ++j) {
            std::int64_t off = 0;
            for (std::size_t i = 0; i < n_; ++i)
                if ((ch.spans[j - 1] >> i) & 1u) off += strides_[i];
            ch.vertex_offset[j] = off;
        }
    }

    void build_tuples() {
        tuples_.resize(top_dim_ + 1);
        for (std::size_t k = 0; k <= top_dim_; ++k) {
            tuples_[k].resize(dim_counts_[k] * (k + 1));
            VertexId* out = tuples_[k].data();
            for (const Chain& ch : chains_[k]) {
                std::vector<std::size_t> coords(n_, 0);
                std::int64_t base = 0;
                for (std::size_t cell = 0; cell < ch.cell_count; ++cell) {
                    for (std::size_t j = 0; j <= k; ++j) *out++ = static_cast<VertexId>(base + ch.vertex_offset[j]);
                    // odometer step
                    for (std::size_t i = 0; i < n_; ++i) {
                        if (++coords[i] < ch.extent[i]) {
                            base += strides_[i];
                            break;
                        }
                        base -= strides_[i] * static_cast<std::int64_t>(ch.extent[i] - 1);
                        coords[i] = 0;
                    }
                }
            }
        }
    }

    std::size_t chain_of(std::size_t k, std::size_t idx) const {
        const auto& chains = chains_[k];
        std::size_t lo = 0, hi = chains.size() - 1;
        while (lo < hi) {
            const std::size_t mid = (lo + hi + 1) / 2;
            if (chains[mid].first_index <= idx)
                lo = mid;
            else
                hi = mid - 1;
        }
        return lo;
    }

    std::size_t n_, m_, top_dim_;
    std::int64_t vertex_count_ = 0;
    std::size_t total_simplices_ = 0;
    std::vector<std::int64_t> strides_;
    std::vector<std::vector<Chain>> chains_;
    std::vector<std::map<std::vector<std::uint32_t>, std::size_t>> chain_lookup_;
    std::vector<std::size_t> dim_counts_, dim_offsets_;
    std::vector<std::vector<VertexId>> tuples_;
};

/// Guaranteed bottleneck error of the grid approximation for an L-Lipschitz
/// function: L * diam(K_m) = L * 2 sqrt(n) / m.
inline double pl_error_bound(double lipschitz_constant, std::size_t n, std::size_t m) {
    if (!(lipschitz_constant > 0.0)) throw ConfigError("pl_error_bound requires L > 0");
    return lipschitz_constant * 2.0 * std::sqrt(static_cast<double>(n)) / static_cast<double>(m);
}

/// Piecewise-linear interpolation of vertex values at x (exact on affine
/// functions).
inline double pl_interpolate(const FreudenthalComplex& complex, const std::vector<double>& vertex_values, const Point& x) {
    const FreudenthalComplex::Location loc = complex.locate(x);
    double v = 0.0;
    for (std::size_t i = 0; i < loc.vertices.size(); ++i) v += loc.weights[i] * vertex_values[loc.vertices[i]];
    return v;
}

}  // namespace cdph
