#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "cdph/pointcloud.hpp"
#include "cdph/shapes.hpp"

using namespace cdph;

TEST_CASE("empirical measure invariants") {
    CHECK_THROWS_AS(EmpiricalMeasure::uniform({}), InvalidShape);
    CHECK_THROWS_AS(EmpiricalMeasure({{0.0}, {0.5}}, {0.6, 0.6}), InvalidShape);       // weights sum != 1
    CHECK_THROWS_AS(EmpiricalMeasure({{0.0}, {1.5}}, {0.5, 0.5}), InvalidShape);       // outside the box
    CHECK_THROWS_AS(EmpiricalMeasure({{0.0}, {0.5}}, {1.5, -0.5}), InvalidShape);      // negative weight
    CHECK_THROWS_AS(EmpiricalMeasure({{0.0}, {0.5}}, {1.0}), InvalidShape);            // length mismatch
    EmpiricalMeasure m = EmpiricalMeasure::uniform({{0.0, 0.0}, {0.5, -0.5}});
    CHECK(m.dim() == 2);
    CHECK(m.weights()[0] == doctest::Approx(0.5));
}

TEST_CASE("distance function examples") {
    // x in the cloud
    std::vector<Point> cloud{{0.2, 0.1}, {-0.3, 0.4}};
    CHECK(distance_function(cloud, {0.2, 0.1}) == doctest::Approx(0.0));
    // 8 equidistant points on a circle of radius 0.4, queried at the center
    std::vector<Point> circle;
    for (int k = 0; k < 8; ++k) {
        const double a = 2.0 * std::numbers::pi * k / 8.0;
        circle.push_back({0.4 * std::cos(a), 0.4 * std::sin(a)});
    }
    CHECK(distance_function(circle, {0.0, 0.0}) == doctest::Approx(0.4));
    // {-1, 1} in 1D queried at 0
    CHECK(distance_function({{-1.0}, {1.0}}, {0.0}) == doctest::Approx(1.0));
}

TEST_CASE("hausdorff examples and metric properties") {
    std::vector<Point> a{{0.0}}, b{{0.0}, {1.0}};
    CHECK(hausdorff(a, a) == doctest::Approx(0.0));
    CHECK(hausdorff(a, b) == doctest::Approx(1.0));
    CHECK(hausdorff({{0.0, 0.0}}, {{-0.3 * 0 + 0.6, 0.8}}) == doctest::Approx(1.0));  // (0.6, 0.8): norm 1
    CHECK(hausdorff({{0.0, 0.0}}, {{0.6, 0.8}}) == doctest::Approx(1.0));
    CHECK_THROWS_AS(hausdorff({{0.0}}, {{0.0, 0.0}}), DimensionMismatch);

    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        auto rand_pts = [&](std::size_t n) {
            std::vector<Point> pts;
            for (std::size_t i = 0; i < n; ++i) pts.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1)});
            return pts;
        };
        std::vector<Point> x = rand_pts(4 + trial % 4), y = rand_pts(3 + trial % 5), z = rand_pts(5);
        const double xy = hausdorff(x, y), yx = hausdorff(y, x), xz = hausdorff(x, z), zy = hausdorff(z, y);
        CHECK(xy == doctest::Approx(yx));
        CHECK(xy <= xz + zy + 1e-12);
    }
}

TEST_CASE("sample_shape: five intervals") {
    ShapeSpec spec;
    spec.kind = ShapeKind::intervals_1d;
    spec.intervals = {{-0.95, -0.73}, {-0.53, -0.31}, {-0.11, 0.11}, {0.31, 0.53}, {0.73, 0.95}};
    spec.sample_count = 500;
    spec.noise.rng_seed = 42;
    EmpiricalMeasure m = sample_shape(spec);
    REQUIRE(m.size() == 500);
    CHECK(m.dim() == 1);
    for (const Point& p : m.points()) {
        bool inside = false;
        for (auto [a, b] : spec.intervals) inside = inside || (p[0] >= a && p[0] <= b);
        CHECK(inside);
    }
}

TEST_CASE("sample_shape: empty spec is invalid") {
    ShapeSpec spec;
    spec.kind = ShapeKind::circle;
    spec.center = {0.0, 0.0};
    spec.radius = 0.4;
    spec.sample_count = 0;
    CHECK_THROWS_AS(sample_shape(spec), InvalidShape);
}

TEST_CASE("sample_shape: cube skeleton counts") {
    ShapeSpec spec;
    spec.kind = ShapeKind::cube_skeleton;
    spec.edge_length = 1.5;
    spec.samples_per_edge = 50;
    spec.noise.gaussian_sigma = 0.025;
    spec.noise.rng_seed = 3;
    EmpiricalMeasure m = sample_shape(spec);
    CHECK(m.size() == 600);  // 12 edges x 50
    CHECK(m.dim() == 3);
    for (const Point& p : m.points()) CHECK(inside_box(p));
}

TEST_CASE("sample_shape: uniform noise appended, gaussian clamped") {
    ShapeSpec spec;
    spec.kind = ShapeKind::square;
    spec.center = {0.0, 0.0};
    spec.half_width = 0.9;
    spec.sample_count = 100;
    spec.noise.uniform_count = 25;
    spec.noise.gaussian_sigma = 0.5;  // large: exercises the clamp
    spec.noise.rng_seed = 9;
    EmpiricalMeasure m = sample_shape(spec);
    CHECK(m.size() == 125);
    for (const Point& p : m.points()) CHECK(inside_box(p));
}

TEST_CASE("sample_shape: deterministic given the seed") {
    ShapeSpec spec;
    spec.kind = ShapeKind::two_circles;
    spec.center = {-0.45, 0.0};
    spec.radius = 0.4;
    spec.center2 = {0.45, 0.0};
    spec.radius2 = 0.4;
    spec.sample_count = 200;
    spec.noise.gaussian_sigma = 0.02;
    spec.noise.uniform_count = 10;
    spec.noise.rng_seed = 12345;
    EmpiricalMeasure a = sample_shape(spec);
    EmpiricalMeasure b = sample_shape(spec);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t k = 0; k < a.dim(); ++k) CHECK(a.points()[i][k] == b.points()[i][k]);  // bit identical
    spec.noise.rng_seed = 12346;
    EmpiricalMeasure c = sample_shape(spec);
    bool all_same = true;
    for (std::size_t i = 0; i < a.size() && all_same; ++i) all_same = a.points()[i][0] == c.points()[i][0];
    CHECK(!all_same);
}

TEST_CASE("shape validation rejects specs leaving the box") {
    ShapeSpec spec;
    spec.kind = ShapeKind::circle;
    spec.center = {0.8, 0.0};
    spec.radius = 0.4;
    spec.sample_count = 10;
    CHECK_THROWS_AS(sample_shape(spec), InvalidShape);
}

TEST_CASE("cloud CSV and JSON round trips") {
    const std::string dir = std::filesystem::temp_directory_path().string();
    EmpiricalMeasure m({{0.25, -0.5}, {0.75, 0.125}, {-1.0, 1.0}}, {0.5, 0.25, 0.25});

    const std::string csv = dir + "/cdph_cloud_test.csv";
    save_cloud_csv(m, csv, true);
    EmpiricalMeasure back = load_cloud_csv(csv, true);
    REQUIRE(back.size() == m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        CHECK(back.points()[i][0] == m.points()[i][0]);
        CHECK(back.points()[i][1] == m.points()[i][1]);
        CHECK(back.weights()[i] == doctest::Approx(m.weights()[i]));
    }

    const std::string js = dir + "/cdph_cloud_test.json";
    save_cloud_json(m, js);
    EmpiricalMeasure back2 = load_cloud_json(js);
    REQUIRE(back2.size() == m.size());
    CHECK(back2.points()[2][1] == 1.0);
    CHECK(back2.weights()[0] == doctest::Approx(0.5));

    std::remove(csv.c_str());
    std::remove(js.c_str());
    CHECK_THROWS_AS(load_cloud_csv(dir + "/does_not_exist.csv"), IoError);
}

TEST_CASE("shape spec json round trip") {
    ShapeSpec spec;
    spec.kind = ShapeKind::intervals_1d;
    spec.intervals = {{-0.5, -0.25}, {0.25, 0.5}};
    spec.sample_count = 77;
    spec.noise.uniform_count = 5;
    spec.noise.gaussian_sigma = 0.01;
    spec.noise.rng_seed = 99;
    ShapeSpec back = shape_from_json(shape_to_json(spec));
    CHECK(back.kind == ShapeKind::intervals_1d);
    CHECK(back.intervals.size() == 2);
    CHECK(back.sample_count == 77);
    CHECK(back.noise.rng_seed == 99);
    EmpiricalMeasure a = sample_shape(spec), b = sample_shape(back);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.points()[i][0] == b.points()[i][0]);
}
