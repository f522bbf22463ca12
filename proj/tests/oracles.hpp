// Independent test oracles: deliberately simple implementations used to
// cross-check the production paths. Nothing here shares algorithmic code
// with the library (boundaries come from tuple matching, reductions are
// plain left-to-right, matchings are exhaustive).
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <vector>

#include "cdph/filtration.hpp"
#include "cdph/persistence.hpp"
#include "cdph/pointcloud.hpp"

namespace oracle {

/// Plain column reduction in filtration order, no clearing. Boundaries are
/// recovered by matching vertex tuples, not by the complex's arithmetic.
inline cdph::PersistenceDiagram naive_persistence(const cdph::Filtration& f, std::size_t max_degree) {
    const cdph::FreudenthalComplex& K = *f.complex;
    const std::size_t N = f.size();

    std::map<std::vector<int>, std::size_t> position_of;  // sorted tuple -> filtration position
    std::vector<std::size_t> dim_at(N);
    for (std::size_t pos = 0; pos < N; ++pos) {
        const std::size_t g = f.order[pos];
        const std::size_t k = f.dim_of(g);
        dim_at[pos] = k;
        const auto* tup = K.simplex_vertices(k, g - K.dim_offset(k));
        position_of[std::vector<int>(tup, tup + k + 1)] = pos;
    }

    std::vector<std::vector<std::size_t>> columns(N);
    for (const auto& [tuple, pos] : position_of) {
        if (tuple.size() == 1) continue;
        std::vector<std::size_t> col;
        for (std::size_t drop = 0; drop < tuple.size(); ++drop) {
            std::vector<int> face = tuple;
            face.erase(face.begin() + static_cast<long>(drop));
            col.push_back(position_of.at(face));
        }
        std::sort(col.begin(), col.end());
        columns[pos] = std::move(col);
    }

    const std::size_t none = SIZE_MAX;
    std::vector<std::size_t> lookup(N, none);
    std::vector<char> negative(N, 0);
    for (std::size_t pos = 0; pos < N; ++pos) {
        std::vector<std::size_t>& col = columns[pos];
        while (!col.empty() && lookup[col.back()] != none) {
            const std::vector<std::size_t>& other = columns[lookup[col.back()]];
            std::vector<std::size_t> merged;
            std::set_symmetric_difference(col.begin(), col.end(), other.begin(), other.end(), std::back_inserter(merged));
            col = std::move(merged);
        }
        if (!col.empty()) {
            lookup[col.back()] = pos;
            negative[pos] = 1;
        }
    }

    cdph::PersistenceDiagram d;
    d.degrees.resize(max_degree + 1);
    for (std::size_t pos = 0; pos < N; ++pos) {
        if (negative[pos] || dim_at[pos] > max_degree) continue;
        const double birth = f.value_at_position(pos);
        if (lookup[pos] != none) {
            const double death = f.value_at_position(lookup[pos]);
            if (death > birth) d.degrees[dim_at[pos]].push_back({birth, death});
        } else {
            d.degrees[dim_at[pos]].push_back({birth, cdph::kInfiniteDeath});
        }
    }
    for (auto& v : d.degrees)
        std::sort(v.begin(), v.end(), [](const cdph::PersistenceInterval& a, const cdph::PersistenceInterval& b) {
            return a.birth != b.birth ? a.birth < b.birth : a.death < b.death;
        });
    return d;
}

inline bool diagrams_equal(const cdph::PersistenceDiagram& a, const cdph::PersistenceDiagram& b) {
    const std::size_t degrees = std::max(a.degrees.size(), b.degrees.size());
    for (std::size_t p = 0; p < degrees; ++p) {
        const auto& x = a.at(p);
        const auto& y = b.at(p);
        if (x.size() != y.size()) return false;
        for (std::size_t i = 0; i < x.size(); ++i)
            if (x[i].birth != y[i].birth || x[i].death != y[i].death) return false;
    }
    return true;
}

/// Bottleneck by exhaustive enumeration of all partial matchings.
inline double exhaustive_bottleneck(const std::vector<cdph::PersistenceInterval>& a, const std::vector<cdph::PersistenceInterval>& b) {
    double best = std::numeric_limits<double>::infinity();
    std::vector<long> assign(a.size(), -1);  // index into b or -1 (unmatched)
    std::vector<char> used(b.size(), 0);

    auto cost_of = [&]() {
        double c = 0.0;
        auto c1 = [](const cdph::PersistenceInterval& iv) { return iv.infinite() ? std::numeric_limits<double>::infinity() : (iv.death - iv.birth) / 2.0; };
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (assign[i] < 0) {
                c = std::max(c, c1(a[i]));
            } else {
                const auto& x = a[i];
                const auto& y = b[static_cast<std::size_t>(assign[i])];
                const double db = std::abs(x.birth - y.birth);
                double dd;
                if (x.infinite() && y.infinite())
                    dd = 0.0;
                else if (x.infinite() || y.infinite())
                    dd = std::numeric_limits<double>::infinity();
                else
                    dd = std::abs(x.death - y.death);
                c = std::max(c, std::max(db, dd));
            }
        }
        for (std::size_t j = 0; j < b.size(); ++j)
            if (!used[j]) c = std::max(c, c1(b[j]));
        return c;
    };

    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == a.size()) {
            best = std::min(best, cost_of());
            return;
        }
        assign[i] = -1;
        rec(i + 1);
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (used[j]) continue;
            used[j] = 1;
            assign[i] = static_cast<long>(j);
            rec(i + 1);
            used[j] = 0;
        }
        assign[i] = -1;
    };
    rec(0);
    return best;
}

/// Exact 1-Wasserstein on the line: integrate |F_a - F_b| by merging the
/// sorted atoms (quantile coupling).
inline double wasserstein_1d(const cdph::EmpiricalMeasure& a, const cdph::EmpiricalMeasure& b) {
    std::vector<std::pair<double, double>> xa, xb;  // (coordinate, mass)
    for (std::size_t i = 0; i < a.size(); ++i) xa.emplace_back(a.points()[i][0], a.weights()[i]);
    for (std::size_t j = 0; j < b.size(); ++j) xb.emplace_back(b.points()[j][0], b.weights()[j]);
    std::sort(xa.begin(), xa.end());
    std::sort(xb.begin(), xb.end());
    double cost = 0.0;
    std::size_t i = 0, j = 0;
    double ra = xa[0].second, rb = xb[0].second;
    while (i < xa.size() && j < xb.size()) {
        const double m = std::min(ra, rb);
        cost += m * std::abs(xa[i].first - xb[j].first);
        ra -= m;
        rb -= m;
        if (ra <= 1e-18 && i + 1 < xa.size()) ra = xa[++i].second;
        else if (ra <= 1e-18) ++i;
        if (rb <= 1e-18 && j + 1 < xb.size()) rb = xb[++j].second;
        else if (rb <= 1e-18) ++j;
    }
    return cost;
}

/// Uniform equal-size measures: the optimum is an assignment, found by
/// brute force over permutations (N <= 8).
inline double wasserstein_assignment(const cdph::EmpiricalMeasure& a, const cdph::EmpiricalMeasure& b) {
    const std::size_t n = a.size();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double c = 0.0;
        for (std::size_t i = 0; i < n; ++i) c += cdph::euclidean_distance(a.points()[i], b.points()[perm[i]]);
        best = std::min(best, c / static_cast<double>(n));
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

}  // namespace oracle
