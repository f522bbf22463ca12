#include <doctest.h>

#include <cmath>

#include "cdph/transport.hpp"
#include "oracles.hpp"

using namespace cdph;

namespace {

EmpiricalMeasure random_cloud(Rng& rng, std::size_t n, std::size_t dim) {
    std::vector<Point> pts;
    for (std::size_t i = 0; i < n; ++i) {
        Point p(dim);
        for (double& c : p) c = rng.uniform(-1.0, 1.0);
        pts.push_back(std::move(p));
    }
    return EmpiricalMeasure::uniform(std::move(pts));
}

EmpiricalMeasure random_weighted_cloud(Rng& rng, std::size_t n, std::size_t dim) {
    std::vector<Point> pts;
    std::vector<double> w;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        Point p(dim);
        for (double& c : p) c = rng.uniform(-1.0, 1.0);
        pts.push_back(std::move(p));
        w.push_back(rng.uniform(0.05, 1.0));
        sum += w.back();
    }
    for (double& x : w) x /= sum;
    return EmpiricalMeasure(std::move(pts), std::move(w));
}

void check_plan(const EmpiricalMeasure& a, const EmpiricalMeasure& b, const TransportPlan& plan) {
    std::vector<double> row(a.size(), 0.0), col(b.size(), 0.0);
    double cost = 0.0;
    for (const auto& e : plan.entries) {
        CHECK(e.mass >= 0.0);
        row[e.from] += e.mass;
        col[e.to] += e.mass;
        cost += e.mass * euclidean_distance(a.points()[e.from], b.points()[e.to]);
    }
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(row[i] - a.weights()[i]) < 1e-9);
    for (std::size_t j = 0; j < b.size(); ++j) CHECK(std::abs(col[j] - b.weights()[j]) < 1e-9);
    CHECK(std::abs(cost - plan.cost) < 1e-9);
}

}  // namespace

TEST_CASE("wasserstein simple examples") {
    EmpiricalMeasure a = EmpiricalMeasure::uniform({{0.0, 0.0}});
    EmpiricalMeasure b = EmpiricalMeasure::uniform({{1.0, 0.0}});
    CHECK(wasserstein(a, a).first == doctest::Approx(0.0));
    CHECK(wasserstein(a, b).first == doctest::Approx(1.0));

    EmpiricalMeasure same = EmpiricalMeasure::uniform({{0.1, 0.2}, {-0.4, 0.3}, {0.9, -0.9}});
    auto [d, plan] = wasserstein(same, same);
    CHECK(d == doctest::Approx(0.0).epsilon(1e-9));
    check_plan(same, same, plan);

    CHECK_THROWS_AS(wasserstein(a, EmpiricalMeasure::uniform({{0.0}})), DimensionMismatch);
}

TEST_CASE("wasserstein to a singleton equals the weighted mean distance") {
    Rng rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        EmpiricalMeasure a = random_weighted_cloud(rng, 12, 2);
        Point y{rng.uniform(-1, 1), rng.uniform(-1, 1)};
        EmpiricalMeasure b = EmpiricalMeasure::uniform({y});
        double expected = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) expected += a.weights()[i] * euclidean_distance(a.points()[i], y);
        auto [d, plan] = wasserstein(a, b);
        CHECK(d == doctest::Approx(expected).epsilon(1e-10));
        check_plan(a, b, plan);
    }
}

TEST_CASE("wasserstein matches the permutation oracle on uniform clouds") {
    Rng rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + trial % 6;  // up to 7: brute force stays cheap
        EmpiricalMeasure a = random_cloud(rng, n, 2);
        EmpiricalMeasure b = random_cloud(rng, n, 2);
        auto [d, plan] = wasserstein(a, b);
        CHECK(d == doctest::Approx(oracle::wasserstein_assignment(a, b)).epsilon(1e-9));
        check_plan(a, b, plan);
    }
}

TEST_CASE("wasserstein matches the 1d quantile oracle, arbitrary weights") {
    Rng rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        EmpiricalMeasure a = random_weighted_cloud(rng, 3 + trial % 20, 1);
        EmpiricalMeasure b = random_weighted_cloud(rng, 2 + (trial * 7) % 25, 1);
        auto [d, plan] = wasserstein(a, b);
        CHECK(d == doctest::Approx(oracle::wasserstein_1d(a, b)).epsilon(1e-8));
        check_plan(a, b, plan);
    }
}

TEST_CASE("wasserstein metric properties on random triples") {
    Rng rng(31);
    for (int trial = 0; trial < 8; ++trial) {
        EmpiricalMeasure a = random_cloud(rng, 10, 2);
        EmpiricalMeasure b = random_cloud(rng, 14, 2);
        EmpiricalMeasure c = random_cloud(rng, 9, 2);
        const double ab = wasserstein(a, b).first;
        const double ba = wasserstein(b, a).first;
        const double ac = wasserstein(a, c).first;
        const double cb = wasserstein(c, b).first;
        CHECK(std::abs(ab - ba) < 1e-9);
        CHECK(ab <= ac + cb + 1e-9);
    }
}

TEST_CASE("wasserstein of a measure against its split-weight duplicate is zero") {
    EmpiricalMeasure a = EmpiricalMeasure::uniform({{0.3, 0.1}, {-0.7, 0.2}});
    std::vector<Point> doubled{{0.3, 0.1}, {-0.7, 0.2}, {0.3, 0.1}, {-0.7, 0.2}};
    EmpiricalMeasure b(std::move(doubled), {0.25, 0.25, 0.25, 0.25});
    CHECK(wasserstein(a, b).first == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("max_support_size subsamples deterministically") {
    Rng rng(77);
    EmpiricalMeasure a = random_cloud(rng, 300, 2);
    EmpiricalMeasure b = random_cloud(rng, 280, 2);
    const double exact = wasserstein(a, b).first;
    const double sub1 = wasserstein(a, b, 100, 7).first;
    const double sub2 = wasserstein(a, b, 100, 7).first;
    CHECK(sub1 == sub2);                       // same seed, same subsample
    CHECK(std::abs(sub1 - exact) < 0.25);      // rough approximation, not exact
}

TEST_CASE("transport_functional_gap: constant and linear cases") {
    EmpiricalMeasure a = EmpiricalMeasure::uniform({{0.0}});
    EmpiricalMeasure b = EmpiricalMeasure::uniform({{1.0}});
    CHECK(transport_functional_gap(a, b, [](const Point&) { return 3.0; }, 0.001));
    CHECK(transport_functional_gap(a, b, [](const Point& x) { return x[0]; }, 1.0));
}

TEST_CASE("transport inequality holds for random Lipschitz functions (200 trials)") {
    Rng rng(41);
    for (int trial = 0; trial < 200; ++trial) {
        EmpiricalMeasure a = random_cloud(rng, 20, 1);
        EmpiricalMeasure b = random_cloud(rng, 20, 1);
        // random degree-2 polynomial c(x) = p0 + p1 x + p2 x^2
        const double p0 = rng.uniform(-1, 1), p1 = rng.uniform(-1, 1), p2 = rng.uniform(-1, 1);
        auto c = [&](const Point& x) { return p0 + p1 * x[0] + p2 * x[0] * x[0]; };
        // Markov: degree-2 polynomial on [-1,1] is Lipschitz with 4 * sup|c|;
        // estimate the sup on a dense grid.
        double sup = 0.0;
        for (int k = 0; k <= 400; ++k) sup = std::max(sup, std::abs(c({-1.0 + k / 200.0})));
        CHECK(transport_functional_gap(a, b, c, 4.0 * sup));
    }
}
