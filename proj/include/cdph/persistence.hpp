#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cdph/core.hpp"
#include "cdph/filtration.hpp"

namespace cdph {

constexpr double kInfiniteDeath = std::numeric_limits<double>::infinity();

struct PersistenceInterval {
    double birth = 0.0;
    double death = kInfiniteDeath;

    bool infinite() const { return std::isinf(death); }
    double length() const { return death - birth; }
};

/// Multiset of birth/death intervals per homology degree (Z/2 coefficients),
/// zero-length intervals discarded.
struct PersistenceDiagram {
    std::vector<std::vector<PersistenceInterval>> degrees;

    // provenance metadata carried into exports
    std::size_t basis_degree = 0;
    std::size_t resolution = 0;
    int field = 2;
    std::string kind;

    std::size_t max_degree() const { return degrees.empty() ? 0 : degrees.size() - 1; }
    const std::vector<PersistenceInterval>& at(std::size_t p) const {
        static const std::vector<PersistenceInterval> empty;
        return p < degrees.size() ? degrees[p] : empty;
    }
};

/**
 * Persistent homology of a lower-star filtration by column reduction over
 * Z/2 with the clearing (twist) optimization: boundary columns are reduced
 * dimension by dimension from the top, and every pivot row found in
 * dimension p+1 clears the corresponding positive column in dimension p.
 *
 * Pairs (sigma_i, sigma_j) yield intervals [value(sigma_i), value(sigma_j))
 * in degree dim(sigma_i); unpaired positive simplices of degree
 * <= max_degree yield [value, inf).
 */
inline PersistenceDiagram compute_persistence(const Filtration& f, std::size_t max_degree) {
    const FreudenthalComplex& K = *f.complex;
    const std::size_t N = f.size();
    const std::size_t top = std::min(K.top_dim(), max_degree + 1);

    // positions by dimension, already in filtration order
    std::vector<std::uint8_t> dim_at(N);
    for (std::size_t pos = 0; pos < N; ++pos) dim_at[pos] = static_cast<std::uint8_t>(f.dim_of(f.order[pos]));

    constexpr std::uint32_t none = 0xffffffffu;
    // lookup[i] = position of the reduced column with pivot row i; doubles as
    // the birth -> death pairing (rows of dim p are only ever pivots of
    // dim p+1 columns, which are processed before dim p clears them).
    std::vector<std::uint32_t> lookup(N, none);
    std::vector<char> cleared(N, 0), negative(N, 0);
    std::vector<std::vector<std::uint32_t>> stored(N);

    std::vector<std::uint32_t> cur, tmp, facets;
    for (std::size_t p = top; p >= 1; --p) {
        for (std::size_t pos = 0; pos < N; ++pos) {
            if (dim_at[pos] != p || cleared[pos]) continue;
            const std::size_t g = f.order[pos];
            const std::size_t local = g - K.dim_offset(p);
            std::size_t fb[24];
            K.boundary_of(p, local, fb);
            facets.clear();
            for (std::size_t j = 0; j <= p; ++j) {
                const std::size_t frank = f.rank[K.dim_offset(p - 1) + fb[j]];
                if (frank >= pos) throw InvalidFiltration("face appears after its coface");
                facets.push_back(static_cast<std::uint32_t>(frank));
            }
            std::sort(facets.begin(), facets.end());
            cur = facets;
            while (!cur.empty()) {
                const std::uint32_t low = cur.back();
                const std::uint32_t other = lookup[low];
                if (other == none) break;
                tmp.clear();
                std::set_symmetric_difference(cur.begin(), cur.end(), stored[other].begin(), stored[other].end(), std::back_inserter(tmp));
                cur.swap(tmp);
            }
            if (!cur.empty()) {
                const std::uint32_t low = cur.back();
                lookup[low] = static_cast<std::uint32_t>(pos);
                negative[pos] = 1;
                cleared[low] = 1;
                stored[pos] = std::move(cur);
            }
        }
    }

    PersistenceDiagram diagram;
    diagram.degrees.resize(max_degree + 1);
    for (std::size_t pos = 0; pos < N; ++pos) {
        if (negative[pos]) continue;  // positive simplices create classes
        const std::size_t p = dim_at[pos];
        if (p > max_degree) continue;
        const double birth = f.value_at_position(pos);
        if (lookup[pos] != none) {
            const double death = f.value_at_position(lookup[pos]);
            if (death > birth) diagram.degrees[p].push_back({birth, death});
        } else {
            diagram.degrees[p].push_back({birth, kInfiniteDeath});
        }
    }
    for (auto& v : diagram.degrees)
        std::sort(v.begin(), v.end(), [](const PersistenceInterval& a, const PersistenceInterval& b) {
            return a.birth != b.birth ? a.birth < b.birth : a.death < b.death;
        });
    diagram.resolution = K.resolution();
    return diagram;
}

/// Betti numbers at filtration time t: intervals with birth <= t < death.
inline std::vector<std::size_t> betti_at(const PersistenceDiagram& d, double t) {
    std::vector<std::size_t> betti(d.degrees.size(), 0);
    for (std::size_t p = 0; p < d.degrees.size(); ++p)
        for (const PersistenceInterval& iv : d.degrees[p])
            if (iv.birth <= t && t < iv.death) ++betti[p];
    return betti;
}

namespace detail {
inline bool longer(const PersistenceInterval& a, const PersistenceInterval& b) {
    if (a.infinite() != b.infinite()) return a.infinite();
    if (a.length() != b.length()) return a.length() > b.length();
    return a.birth < b.birth;
}
}  // namespace detail

/// The k longest intervals in degree p (infinite first, ties broken by
/// earlier birth).
inline std::vector<PersistenceInterval> significant_intervals(const PersistenceDiagram& d, std::size_t p, std::size_t k) {
    std::vector<PersistenceInterval> ivs = d.at(p);
    std::sort(ivs.begin(), ivs.end(), detail::longer);
    if (ivs.size() > k) ivs.resize(k);
    return ivs;
}

/**
 * Number of significant intervals in degree p under a multiplicative
 * length-gap threshold: infinite intervals always count, and a finite
 * interval counts when its length is within `gap_factor` of the longest
 * finite interval anywhere in the diagram.
 */
inline std::size_t significant_count(const PersistenceDiagram& d, std::size_t p, double gap_factor = 3.0) {
    double longest_finite = 0.0;
    for (const auto& deg : d.degrees)
        for (const PersistenceInterval& iv : deg)
            if (!iv.infinite()) longest_finite = std::max(longest_finite, iv.length());
    std::size_t count = 0;
    for (const PersistenceInterval& iv : d.at(p)) {
        if (iv.infinite())
            ++count;
        else if (longest_finite > 0.0 && iv.length() * gap_factor >= longest_finite)
            ++count;
    }
    return count;
}

// --- diagram (de)serialization ----------------------------------------------

inline nlohmann::json diagram_to_json(const PersistenceDiagram& d) {
    nlohmann::json out;
    out["meta"] = {{"basis_degree", d.basis_degree}, {"resolution", d.resolution}, {"field", d.field}, {"kind", d.kind}};
    nlohmann::json degs = nlohmann::json::object();
    for (std::size_t p = 0; p < d.degrees.size(); ++p) {
        nlohmann::json arr = nlohmann::json::array();
        for (const PersistenceInterval& iv : d.degrees[p]) {
            if (iv.infinite())
                arr.push_back({iv.birth, nullptr});
            else
                arr.push_back({iv.birth, iv.death});
        }
        degs[std::to_string(p)] = std::move(arr);
    }
    out["diagrams"] = std::move(degs);
    return out;
}

inline PersistenceDiagram diagram_from_json(const nlohmann::json& j) {
    PersistenceDiagram d;
    try {
        if (j.contains("meta")) {
            const auto& m = j.at("meta");
            d.basis_degree = m.value("basis_degree", std::size_t{0});
            d.resolution = m.value("resolution", std::size_t{0});
            d.field = m.value("field", 2);
            d.kind = m.value("kind", std::string{});
        }
        for (const auto& [key, arr] : j.at("diagrams").items()) {
            const std::size_t p = std::stoul(key);
            if (d.degrees.size() <= p) d.degrees.resize(p + 1);
            for (const auto& iv : arr) {
                PersistenceInterval out;
                out.birth = iv.at(0).get<double>();
                out.death = iv.at(1).is_null() ? kInfiniteDeath : iv.at(1).get<double>();
                d.degrees[p].push_back(out);
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad diagram json: ") + e.what());
    }
    return d;
}

inline void save_diagram_json(const PersistenceDiagram& d, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << diagram_to_json(d).dump(2) << '\n';
}

inline PersistenceDiagram load_diagram_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    return diagram_from_json(j);
}

inline void save_diagram_csv(const PersistenceDiagram& d, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out.precision(17);
    out << "degree,birth,death\n";
    for (std::size_t p = 0; p < d.degrees.size(); ++p)
        for (const PersistenceInterval& iv : d.degrees[p]) {
            out << p << ',' << iv.birth << ',';
            if (iv.infinite())
                out << "inf";
            else
                out << iv.death;
            out << '\n';
        }
}

}  // namespace cdph
