#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <memory>
#include <numeric>
#include <vector>

#include "cdph/core.hpp"
#include "cdph/freudenthal.hpp"

namespace cdph {

/**
 * Lower-star filtration of a Freudenthal complex: each simplex enters at
 * the maximum of its vertex values, totally ordered by
 * (value, dimension, lexicographic vertex tuple) so that every face
 * precedes its cofaces.
 */
struct Filtration {
    std::shared_ptr<const FreudenthalComplex> complex;
    std::vector<double> vertex_values;
    std::vector<double> simplex_values;   // per global simplex id
    std::vector<std::size_t> order;       // position -> global id
    std::vector<std::size_t> rank;        // global id -> position

    std::size_t size() const { return order.size(); }
    std::size_t dim_of(std::size_t global_id) const {
        std::size_t k = 0;
        while (k < complex->top_dim() && global_id >= complex->dim_offset(k + 1)) ++k;
        return k;
    }
    double value_at_position(std::size_t pos) const { return simplex_values[order[pos]]; }

    double pl_interpolate(const Point& x) const { return cdph::pl_interpolate(*complex, vertex_values, x); }
};

inline Filtration lower_star(std::shared_ptr<const FreudenthalComplex> complex, std::vector<double> vertex_values) {
    const FreudenthalComplex& K = *complex;
    if (vertex_values.size() != K.vertex_count()) throw ConfigError("lower_star: one value per vertex required");
    for (double v : vertex_values)
        if (!std::isfinite(v)) throw NonFiniteValue("lower_star: vertex values must be finite");

    Filtration f;
    f.complex = std::move(complex);
    f.simplex_values.resize(K.total_simplex_count());
    for (std::size_t k = 0; k <= K.top_dim(); ++k) {
        const std::size_t base = K.dim_offset(k);
        for (std::size_t i = 0; i < K.simplex_count(k); ++i) {
            const FreudenthalComplex::VertexId* tup = K.simplex_vertices(k, i);
            double v = vertex_values[tup[0]];
            for (std::size_t j = 1; j <= k; ++j) v = std::max(v, vertex_values[tup[j]]);
            f.simplex_values[base + i] = v;
        }
    }

    f.order.resize(K.total_simplex_count());
    std::iota(f.order.begin(), f.order.end(), std::size_t{0});
    // Precompute dims once; the comparator is called O(N log N) times.
    std::vector<std::uint8_t> dims(K.total_simplex_count());
    for (std::size_t k = 0; k <= K.top_dim(); ++k)
        std::fill(dims.begin() + K.dim_offset(k), dims.begin() + K.dim_offset(k) + K.simplex_count(k), static_cast<std::uint8_t>(k));
    std::sort(f.order.begin(), f.order.end(), [&](std::size_t a, std::size_t b) {
        if (f.simplex_values[a] != f.simplex_values[b]) return f.simplex_values[a] < f.simplex_values[b];
        if (dims[a] != dims[b]) return dims[a] < dims[b];
        const std::size_t k = dims[a];
        const FreudenthalComplex::VertexId* ta = K.simplex_vertices(k, a - K.dim_offset(k));
        const FreudenthalComplex::VertexId* tb = K.simplex_vertices(k, b - K.dim_offset(k));
        return std::lexicographical_compare(ta, ta + k + 1, tb, tb + k + 1);
    });
    f.rank.resize(f.order.size());
    for (std::size_t p = 0; p < f.order.size(); ++p) f.rank[f.order[p]] = p;
    f.vertex_values = std::move(vertex_values);
    return f;
}

/// One line per simplex in filtration order: "dim,value,v0,...,vk".
inline void export_filtration(const Filtration& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out.precision(17);
    const FreudenthalComplex& K = *f.complex;
    for (std::size_t pos = 0; pos < f.size(); ++pos) {
        const std::size_t g = f.order[pos];
        const std::size_t k = f.dim_of(g);
        out << k << ',' << f.simplex_values[g];
        const FreudenthalComplex::VertexId* tup = K.simplex_vertices(k, g - K.dim_offset(k));
        for (std::size_t j = 0; j <= k; ++j) out << ',' << tup[j];
        out << '\n';
    }
}

}  // namespace cdph
