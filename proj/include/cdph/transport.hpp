#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "cdph/core.hpp"
#include "cdph/pointcloud.hpp"

namespace cdph {

/// Optimal coupling between two empirical measures: sparse list of
/// (source index, target index, mass) with the achieved transport cost.
struct TransportPlan {
    struct Entry {
        std::size_t from;
        std::size_t to;
        double mass;
    };
    std::vector<Entry> entries;
    double cost = 0.0;
};

namespace detail {

/**
 * Transportation simplex on the complete bipartite graph.
 *
 * The basis is a spanning tree over sources+sinks; every pivot recomputes
 * parents and duals by BFS (O(m+n)), scans all arcs for the most negative
 * reduced cost, and rotates flow around the unique tree cycle. Supplies and
 * demands are perturbed by a deterministic relative 1e-13 so that basic
 * flows stay distinct (no degenerate pivots); the final tree is re-solved
 * against the unperturbed marginals, which it satisfies exactly because
 * tree flows are determined by leaf elimination.
 */
class TransportSimplex {
public:
    TransportSimplex(const std::vector<Point>& xs, const std::vector<Point>& ys, std::vector<double> a, std::vector<double> b)
        : m_(a.size()), n_(b.size()), a_(std::move(a)), b_(std::move(b)), a0_(a_), b0_(b_) {
        cost_.resize(m_ * n_);
        double cmax = 0.0;
        for (std::size_t i = 0; i < m_; ++i)
            for (std::size_t j = 0; j < n_; ++j) {
                const double c = euclidean_distance(xs[i], ys[j]);
                cost_[i * n_ + j] = c;
                cmax = std::max(cmax, c);
            }
        tol_ = 1e-12 * (1.0 + cmax);
    }

    TransportPlan solve() {
        perturb();
        northwest_corner();
        const std::size_t max_pivots = 2000 * (m_ + n_) + 10000;
        for (std::size_t it = 0; it < max_pivots; ++it) {
            rebuild_tree();
            compute_duals();
            auto [ei, ej] = entering_arc();
            if (ei == m_) {
                return finish();
            }
            pivot(ei, ej);
        }
        throw Error("transport simplex failed to converge", 4);
    }

private:
    struct Arc {
        std::size_t i, j;
        double flow;
    };

    void perturb() {
        // Deterministic relative jitter; scaled back out in finish().
        for (std::size_t i = 0; i < m_; ++i) a_[i] *= 1.0 + 1e-13 * (static_cast<double>((i * 2654435761u) % 1024) / 1024.0);
        for (std::size_t j = 0; j < n_; ++j) b_[j] *= 1.0 + 1e-13 * (static_cast<double>(((j + m_) * 2654435761u) % 1024) / 1024.0);
        // Rebalance so total supply equals total demand exactly.
        const double sa = std::accumulate(a_.begin(), a_.end(), 0.0);
        const double sb = std::accumulate(b_.begin(), b_.end(), 0.0);
        for (double& v : b_) v *= sa / sb;
    }

    void northwest_corner() {
        arcs_.clear();
        std::vector<double> ra = a_, rb = b_;
        std::size_t i = 0, j = 0;
        while (true) {
            const double f = std::min(ra[i], rb[j]);
            arcs_.push_back({i, j, f});
            ra[i] -= f;
            rb[j] -= f;
            if (i == m_ - 1 && j == n_ - 1) break;
            if (i == m_ - 1)
                ++j;
            else if (j == n_ - 1)
                ++i;
            else if (ra[i] <= rb[j])
                ++i;
            else
                ++j;
        }
        // Staircase with m+n-1 arcs: always a spanning tree.
    }

    // node ids: sources 0..m-1, sinks m..m+n-1
    void rebuild_tree() {
        const std::size_t nodes = m_ + n_;
        adj_.assign(nodes, {});
        for (std::size_t k = 0; k < arcs_.size(); ++k) {
            adj_[arcs_[k].i].push_back(k);
            adj_[m_ + arcs_[k].j].push_back(k);
        }
        parent_.assign(nodes, SIZE_MAX);
        parent_arc_.assign(nodes, SIZE_MAX);
        bfs_order_.clear();
        bfs_order_.push_back(0);
        parent_[0] = 0;
        for (std::size_t h = 0; h < bfs_order_.size(); ++h) {
            const std::size_t u = bfs_order_[h];
            for (std::size_t k : adj_[u]) {
                const std::size_t w = arcs_[k].i == u ? m_ + arcs_[k].j : arcs_[k].i;
                if (parent_[w] == SIZE_MAX) {
                    parent_[w] = u;
                    parent_arc_[w] = k;
                    bfs_order_.push_back(w);
                }
            }
        }
    }

    void compute_duals() {
        u_.assign(m_, 0.0);
        v_.assign(n_, 0.0);
        for (std::size_t h = 1; h < bfs_order_.size(); ++h) {
            const std::size_t w = bfs_order_[h];
            const Arc& arc = arcs_[parent_arc_[w]];
            if (w >= m_)
                v_[w - m_] = cost_[arc.i * n_ + arc.j] - u_[arc.i];
            else
                u_[w] = cost_[arc.i * n_ + arc.j] - v_[arc.j];
        }
    }

    std::pair<std::size_t, std::size_t> entering_arc() const {
        double best = -tol_;
        std::size_t bi = m_, bj = n_;
        for (std::size_t i = 0; i < m_; ++i) {
            const double ui = u_[i];
            for (std::size_t j = 0; j < n_; ++j) {
                const double r = cost_[i * n_ + j] - ui - v_[j];
                if (r < best) {
                    best = r;
                    bi = i;
                    bj = j;
                }
            }
        }
        return {bi, bj};
    }

    void pivot(std::size_t ei, std::size_t ej) {
        // Unique tree path from source ei to sink ej; with the entering arc
        // it closes the pivot cycle. Arcs at odd path positions lose flow.
        const std::size_t s = ei, t = m_ + ej;
        std::vector<std::size_t> path_arcs;
        {
            std::vector<std::size_t> sp, tp;  // arc lists up to the meeting node
            std::vector<char> on_s(m_ + n_, 0);
            for (std::size_t w = s;; w = parent_[w]) {
                on_s[w] = 1;
                if (parent_[w] == w) break;
            }
            std::size_t meet = t;
            while (!on_s[meet]) {
                tp.push_back(parent_arc_[meet]);
                meet = parent_[meet];
            }
            for (std::size_t w = s; w != meet; w = parent_[w]) sp.push_back(parent_arc_[w]);
            path_arcs = sp;
            path_arcs.insert(path_arcs.end(), tp.rbegin(), tp.rend());
        }
        // Walk the path from s; alternate -theta (arcs leaving a source when
        // traversed source->sink opposite to entering direction). Because the
        // graph is bipartite, positions alternate parity starting with a
        // losing arc.
        double theta = std::numeric_limits<double>::infinity();
        std::size_t leave = SIZE_MAX;
        for (std::size_t p = 0; p < path_arcs.size(); p += 2) {
            if (arcs_[path_arcs[p]].flow < theta) {
                theta = arcs_[path_arcs[p]].flow;
                leave = path_arcs[p];
            }
        }
        for (std::size_t p = 0; p < path_arcs.size(); ++p) {
            if (p % 2 == 0)
                arcs_[path_arcs[p]].flow -= theta;
            else
                arcs_[path_arcs[p]].flow += theta;
        }
        arcs_[leave] = {ei, ej, theta};
    }

    TransportPlan finish() {
        // Re-solve flows on the optimal tree against the unperturbed
        // marginals by leaf elimination. Optimality is a property of the
        // tree (duals), not of the flow values, so this stays optimal.
        const std::size_t nodes = m_ + n_;
        std::vector<double> residual(nodes);
        for (std::size_t i = 0; i < m_; ++i) residual[i] = a0_[i];
        for (std::size_t j = 0; j < n_; ++j) residual[m_ + j] = b0_[j];

        std::vector<double> flow(arcs_.size(), 0.0);
        std::vector<std::size_t> degree(nodes, 0);
        for (const Arc& arc : arcs_) {
            ++degree[arc.i];
            ++degree[m_ + arc.j];
        }
        std::vector<char> used(arcs_.size(), 0);
        std::vector<std::size_t> stack;
        for (std::size_t w = 0; w < nodes; ++w)
            if (degree[w] == 1) stack.push_back(w);
        while (!stack.empty()) {
            const std::size_t w = stack.back();
            stack.pop_back();
            if (degree[w] == 0) continue;
            std::size_t karc = SIZE_MAX;
            for (std::size_t k : adj_[w])
                if (!used[k]) {
                    karc = k;
                    break;
                }
            if (karc == SIZE_MAX) continue;
            used[karc] = 1;
            flow[karc] = residual[w];
            const std::size_t other = arcs_[karc].i == w ? m_ + arcs_[karc].j : arcs_[karc].i;
            residual[other] -= residual[w];
            residual[w] = 0.0;
            --degree[w];
            if (--degree[other] == 1) stack.push_back(other);
        }

        TransportPlan plan;
        double total = 0.0;
        for (std::size_t k = 0; k < arcs_.size(); ++k) {
            double f = flow[k];
            if (f < 0.0) f = 0.0;  // degenerate arc, magnitude ~1e-13
            if (f <= 0.0) continue;
            plan.entries.push_back({arcs_[k].i, arcs_[k].j, f});
            total += f * cost_[arcs_[k].i * n_ + arcs_[k].j];
        }
        plan.cost = total;
        std::sort(plan.entries.begin(), plan.entries.end(),
                  [](const TransportPlan::Entry& x, const TransportPlan::Entry& y) { return x.from != y.from ? x.from < y.from : x.to < y.to; });
        return plan;
    }

    std::size_t m_, n_;
    std::vector<double> a_, b_;
    std::vector<double> a0_, b0_;
    std::vector<double> cost_;
    double tol_;
    std::vector<Arc> arcs_;
    std::vector<std::vector<std::size_t>> adj_;
    std::vector<std::size_t> parent_, parent_arc_, bfs_order_;
    std::vector<double> u_, v_;
};

inline EmpiricalMeasure subsample(const EmpiricalMeasure& m, std::size_t target, std::uint64_t seed) {
    Rng rng(seed ^ (0x9e3779b97f4a7c15ull + m.size()));
    std::vector<std::size_t> idx(m.size());
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = 0; i < target; ++i) std::swap(idx[i], idx[i + rng.uniform_index(m.size() - i)]);
    idx.resize(target);
    std::sort(idx.begin(), idx.end());
    std::vector<Point> pts;
    std::vector<double> wts;
    double sum = 0.0;
    for (std::size_t k : idx) {
        pts.push_back(m.points()[k]);
        wts.push_back(m.weights()[k]);
        sum += m.weights()[k];
    }
    for (double& w : wts) w /= sum;
    return EmpiricalMeasure(std::move(pts), std::move(wts));
}

}  // namespace detail

/**
 * Exact 1-Wasserstein distance between two finitely supported measures with
 * Euclidean ground cost, solved as the transportation LP by network simplex.
 *
 * `max_support_size` (0 = unlimited) caps the LP size: larger measures are
 * deterministically subsampled (seeded Fisher-Yates, weights renormalized)
 * before solving, trading exactness for time on very large inputs.
 */
inline std::pair<double, TransportPlan> wasserstein(const EmpiricalMeasure& a, const EmpiricalMeasure& b, std::size_t max_support_size = 0,
                                                    std::uint64_t subsample_seed = 0) {
    if (a.dim() != b.dim()) throw DimensionMismatch("wasserstein between dimensions " + std::to_string(a.dim()) + " and " + std::to_string(b.dim()));
    if (max_support_size > 0) {
        if (a.size() > max_support_size) return wasserstein(detail::subsample(a, max_support_size, subsample_seed), b, max_support_size, subsample_seed + 1);
        if (b.size() > max_support_size) return wasserstein(a, detail::subsample(b, max_support_size, subsample_seed), max_support_size, subsample_seed + 1);
    }
    detail::TransportSimplex simplex(a.points(), b.points(), a.weights(), b.weights());
    TransportPlan plan = simplex.solve();
    return {plan.cost, std::move(plan)};
}

/**
 * Test oracle for the transport inequality: with c eta-Lipschitz across the
 * two supports, checks |int c dmu_a - int c dmu_b| <= eta * d_W(a,b) + 1e-9.
 */
inline bool transport_functional_gap(const EmpiricalMeasure& a, const EmpiricalMeasure& b, const std::function<double(const Point&)>& c, double eta) {
    if (a.dim() != b.dim()) throw DimensionMismatch("transport_functional_gap between different dimensions");
    double ia = 0.0, ib = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) ia += c(a.points()[i]) * a.weights()[i];
    for (std::size_t j = 0; j < b.size(); ++j) ib += c(b.points()[j]) * b.weights()[j];
    const double dw = wasserstein(a, b).first;
    return std::abs(ia - ib) <= eta * dw + 1e-9;
}

}  // namespace cdph
