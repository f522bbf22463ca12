#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <vector>

#include <nlohmann/json.hpp>

#include "cdph/core.hpp"
#include "cdph/persistence.hpp"

namespace cdph {

/// Cost of leaving an interval unmatched: half its length (infinite for
/// infinite intervals, which therefore must always be matched).
inline double interval_cost(const PersistenceInterval& iv) { return iv.infinite() ? kInfiniteDeath : (iv.death - iv.birth) / 2.0; }

/// L-infinity distance between interval endpoints; |inf - inf| = 0,
/// |finite - inf| = inf.
inline double pair_cost(const PersistenceInterval& a, const PersistenceInterval& b) {
    const double db = std::abs(a.birth - b.birth);
    double dd;
    if (a.infinite() && b.infinite())
        dd = 0.0;
    else if (a.infinite() || b.infinite())
        dd = kInfiniteDeath;
    else
        dd = std::abs(a.death - b.death);
    return std::max(db, dd);
}

/// Partial bijection between two diagrams with the achieved bottleneck cost.
struct Matching {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;  // indices into the degree-p interval lists
    std::vector<std::size_t> unmatched_a, unmatched_b;
    double cost = 0.0;
};

namespace detail {

// Hopcroft-Karp on an explicit bipartite adjacency (left -> right ids).
class HopcroftKarp {
public:
    explicit HopcroftKarp(std::size_t nl, std::size_t nr) : nl_(nl), nr_(nr), adj_(nl) {}
    void add_edge(std::size_t l, std::size_t r) { adj_[l].push_back(r); }

    std::size_t max_matching() {
        match_l_.assign(nl_, npos);
        match_r_.assign(nr_, npos);
        std::size_t result = 0;
        while (bfs()) {
            for (std::size_t l = 0; l < nl_; ++l)
                if (match_l_[l] == npos && dfs(l)) ++result;
        }
        return result;
    }

    const std::vector<std::size_t>& left_match() const { return match_l_; }

    static constexpr std::size_t npos = SIZE_MAX;

private:
    bool bfs() {
        std::queue<std::size_t> q;
        dist_.assign(nl_, SIZE_MAX);
        for (std::size_t l = 0; l < nl_; ++l)
            if (match_l_[l] == npos) {
                dist_[l] = 0;
                q.push(l);
            }
        bool found = false;
        while (!q.empty()) {
            const std::size_t l = q.front();
            q.pop();
            for (std::size_t r : adj_[l]) {
                const std::size_t l2 = match_r_[r];
                if (l2 == npos)
                    found = true;
                else if (dist_[l2] == SIZE_MAX) {
                    dist_[l2] = dist_[l] + 1;
                    q.push(l2);
                }
            }
        }
        return found;
    }

    bool dfs(std::size_t l) {
        for (std::size_t r : adj_[l]) {
            const std::size_t l2 = match_r_[r];
            if (l2 == npos || (dist_[l2] == dist_[l] + 1 && dfs(l2))) {
                match_l_[l] = r;
                match_r_[r] = l;
                return true;
            }
        }
        dist_[l] = SIZE_MAX;
        return false;
    }

    std::size_t nl_, nr_;
    std::vector<std::vector<std::size_t>> adj_;
    std::vector<std::size_t> match_l_, match_r_, dist_;
};

}  // namespace detail

/**
 * Exact bottleneck distance between degree-p diagrams.
 *
 * Infinite intervals must match each other (unequal counts give distance
 * infinity) and pair optimally in birth order. The finite part is solved by
 * binary search over the O(k^2) candidate cost values with a
 * Hopcroft-Karp feasibility check on the threshold graph: each interval
 * gets a shadow node so that leaving it unmatched costs interval_cost.
 */
inline std::pair<double, Matching> bottleneck(const PersistenceDiagram& d1, const PersistenceDiagram& d2, std::size_t p) {
    std::vector<std::size_t> inf1, inf2, fin1, fin2;
    const auto& a = d1.at(p);
    const auto& b = d2.at(p);
    for (std::size_t i = 0; i < a.size(); ++i) (a[i].infinite() ? inf1 : fin1).push_back(i);
    for (std::size_t j = 0; j < b.size(); ++j) (b[j].infinite() ? inf2 : fin2).push_back(j);

    Matching match;

    // Infinite intervals: sorted-birth pairing is optimal for the max cost.
    auto by_birth = [](const std::vector<PersistenceInterval>& ivs) {
        return [&ivs](std::size_t x, std::size_t y) { return ivs[x].birth != ivs[y].birth ? ivs[x].birth < ivs[y].birth : x < y; };
    };
    std::sort(inf1.begin(), inf1.end(), by_birth(a));
    std::sort(inf2.begin(), inf2.end(), by_birth(b));
    double inf_cost = 0.0;
    if (inf1.size() != inf2.size()) {
        inf_cost = kInfiniteDeath;
    }
    for (std::size_t k = 0; k < std::min(inf1.size(), inf2.size()); ++k) {
        match.pairs.emplace_back(inf1[k], inf2[k]);
        if (!std::isinf(inf_cost)) inf_cost = std::max(inf_cost, std::abs(a[inf1[k]].birth - b[inf2[k]].birth));
    }
    for (std::size_t k = inf2.size(); k < inf1.size(); ++k) match.unmatched_a.push_back(inf1[k]);
    for (std::size_t k = inf1.size(); k < inf2.size(); ++k) match.unmatched_b.push_back(inf2[k]);

    // Finite part: candidate values are every achievable cost.
    const std::size_t n1 = fin1.size(), n2 = fin2.size();
    std::vector<double> candidates{0.0};
    for (std::size_t i : fin1) candidates.push_back(interval_cost(a[i]));
    for (std::size_t j : fin2) candidates.push_back(interval_cost(b[j]));
    for (std::size_t i : fin1)
        for (std::size_t j : fin2) candidates.push_back(pair_cost(a[i], b[j]));
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    // Feasibility at lambda: perfect matching on reals + shadow nodes.
    // left: fin1 reals, then one shadow per fin2; right: fin2 reals, then one
    // shadow per fin1. Shadow-shadow edges are always allowed.
    auto feasible = [&](double lambda, detail::HopcroftKarp* out) {
        detail::HopcroftKarp hk(n1 + n2, n2 + n1);
        for (std::size_t x = 0; x < n1; ++x) {
            for (std::size_t y = 0; y < n2; ++y)
                if (pair_cost(a[fin1[x]], b[fin2[y]]) <= lambda) hk.add_edge(x, y);
            if (interval_cost(a[fin1[x]]) <= lambda) hk.add_edge(x, n2 + x);
        }
        for (std::size_t y = 0; y < n2; ++y) {
            if (interval_cost(b[fin2[y]]) <= lambda) hk.add_edge(n1 + y, y);
            for (std::size_t x = 0; x < n1; ++x) hk.add_edge(n1 + y, n2 + x);
        }
        const bool ok = hk.max_matching() == n1 + n2;
        if (ok && out) *out = std::move(hk);
        return ok;
    };

    double fin_cost = 0.0;
    detail::HopcroftKarp witness(0, 0);
    if (n1 + n2 > 0) {
        std::size_t lo = 0, hi = candidates.size() - 1;
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (feasible(candidates[mid], nullptr))
                hi = mid;
            else
                lo = mid + 1;
        }
        fin_cost = candidates[lo];
        feasible(fin_cost, &witness);
        const auto& ml = witness.left_match();
        for (std::size_t x = 0; x < n1; ++x) {
            if (ml[x] < n2)
                match.pairs.emplace_back(fin1[x], fin2[ml[x]]);
            else
                match.unmatched_a.push_back(fin1[x]);
        }
        for (std::size_t y = 0; y < n2; ++y) {
            if (ml[n1 + y] == y) match.unmatched_b.push_back(fin2[y]);
        }
    }

    match.cost = std::max(inf_cost, fin_cost);
    std::sort(match.pairs.begin(), match.pairs.end());
    std::sort(match.unmatched_a.begin(), match.unmatched_a.end());
    std::sort(match.unmatched_b.begin(), match.unmatched_b.end());
    return {match.cost, std::move(match)};
}

/**
 * Signal-to-noise statistic: with k true features in degree p, the ratio
 * between the k-th and (k+1)-th longest finite interval lengths. Infinity
 * when at most k intervals exist (rendered as the ">> 10" sentinel);
 * InsufficientIntervals when fewer than k exist.
 */
inline double signal_to_noise(const PersistenceDiagram& d, std::size_t p, std::size_t k) {
    if (k < 1) throw ConfigError("signal_to_noise requires k >= 1");
    std::vector<double> lengths;
    for (const PersistenceInterval& iv : d.at(p))
        if (!iv.infinite()) lengths.push_back(iv.length());
    std::sort(lengths.rbegin(), lengths.rend());
    if (lengths.size() < k) throw InsufficientIntervals("degree " + std::to_string(p) + " has " + std::to_string(lengths.size()) + " finite intervals, need " + std::to_string(k));
    if (lengths.size() == k) return kInfiniteDeath;
    return lengths[k - 1] / lengths[k];
}

inline nlohmann::json matching_to_json(const Matching& m) {
    nlohmann::json j;
    j["cost"] = std::isinf(m.cost) ? nlohmann::json(nullptr) : nlohmann::json(m.cost);
    j["pairs"] = m.pairs;
    j["unmatched_a"] = m.unmatched_a;
    j["unmatched_b"] = m.unmatched_b;
    return j;
}

}  // namespace cdph
