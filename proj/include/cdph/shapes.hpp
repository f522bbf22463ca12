#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cdph/core.hpp"
#include "cdph/pointcloud.hpp"

namespace cdph {

/// Noise model: M uniform points appended to the sample, plus a per-coordinate
/// Gaussian perturbation of the base points with standard deviation sigma.
struct NoiseSpec {
    std::size_t uniform_count = 0;
    double gaussian_sigma = 0.0;
    std::uint64_t rng_seed = 0;
};

enum class ShapeKind { intervals_1d, circle, two_circles, disk, triangle, square, cube_skeleton };

inline std::string to_string(ShapeKind k) {
    switch (k) {
        case ShapeKind::intervals_1d: return "intervals-1d";
        case ShapeKind::circle: return "circle";
        case ShapeKind::two_circles: return "two-circles";
        case ShapeKind::disk: return "disk";
        case ShapeKind::triangle: return "triangle";
        case ShapeKind::square: return "square";
        case ShapeKind::cube_skeleton: return "cube-skeleton";
    }
    return "?";
}

inline ShapeKind shape_kind_from_string(const std::string& s) {
    if (s == "intervals-1d") return ShapeKind::intervals_1d;
    if (s == "circle") return ShapeKind::circle;
    if (s == "two-circles") return ShapeKind::two_circles;
    if (s == "disk") return ShapeKind::disk;
    if (s == "triangle") return ShapeKind::triangle;
    if (s == "square") return ShapeKind::square;
    if (s == "cube-skeleton") return ShapeKind::cube_skeleton;
    throw ConfigError("unknown shape kind '" + s + "'");
}

/**
 * Generator spec for the experiment point clouds. Only the fields relevant
 * to `kind` are consulted:
 *
 *   intervals-1d   intervals (disjoint [a,b] pairs in (-1,1))
 *   circle         center, radius (uniform on the curve)
 *   two-circles    center, radius, center2, radius2, count1 (0 = split by
 *                  circumference)
 *   disk           center, radius (uniform on the filled disk)
 *   triangle       vertices (three corners; uniform on the filled triangle)
 *   square         center, half_width (uniform on the filled square)
 *   cube-skeleton  edge_length, samples_per_edge (evenly spaced points on
 *                  the 12 edges of a cube centered at the origin)
 */
struct ShapeSpec {
    ShapeKind kind = ShapeKind::circle;
    std::size_t sample_count = 0;
    NoiseSpec noise;

    std::vector<std::pair<double, double>> intervals;
    Point center;
    double radius = 0.0;
    Point center2;
    double radius2 = 0.0;
    std::size_t count1 = 0;
    std::vector<Point> vertices;
    double half_width = 0.0;
    double edge_length = 0.0;
    std::size_t samples_per_edge = 0;
};

namespace detail {

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw InvalidShape(msg);
}

inline void require_strictly_inside(const Point& p, double margin, const std::string& what) {
    for (double c : p) require(std::abs(c) + margin < 1.0, what + " leaves the open box (-1,1)^n");
}

inline Point on_circle(const Point& c, double r, double angle) {
    return Point{c[0] + r * std::cos(angle), c[1] + r * std::sin(angle)};
}

inline std::size_t validate_and_count(const ShapeSpec& spec) {
    switch (spec.kind) {
        case ShapeKind::intervals_1d: {
            require(!spec.intervals.empty(), "intervals-1d requires at least one interval");
            for (auto [a, b] : spec.intervals) {
                require(a < b, "interval with nonpositive length");
                require(a > -1.0 && b < 1.0, "interval leaves the open box (-1,1)");
            }
            return spec.sample_count;
        }
        case ShapeKind::circle:
        case ShapeKind::disk: {
            require(spec.center.size() == 2, "circle/disk center must be 2-dimensional");
            require(spec.radius > 0.0, "radius must be positive");
            require_strictly_inside(spec.center, spec.radius, "circle/disk");
            return spec.sample_count;
        }
        case ShapeKind::two_circles: {
            require(spec.center.size() == 2 && spec.center2.size() == 2, "two-circles centers must be 2-dimensional");
            require(spec.radius > 0.0 && spec.radius2 > 0.0, "radii must be positive");
            require_strictly_inside(spec.center, spec.radius, "two-circles");
            require_strictly_inside(spec.center2, spec.radius2, "two-circles");
            require(spec.count1 <= spec.sample_count, "count1 exceeds sample_count");
            return spec.sample_count;
        }
        case ShapeKind::triangle: {
            require(spec.vertices.size() == 3, "triangle requires three vertices");
            for (const Point& v : spec.vertices) {
                require(v.size() == 2, "triangle vertices must be 2-dimensional");
                require_strictly_inside(v, 0.0, "triangle");
            }
            return spec.sample_count;
        }
        case ShapeKind::square: {
            require(spec.center.size() == 2, "square center must be 2-dimensional");
            require(spec.half_width > 0.0, "half_width must be positive");
            require_strictly_inside(spec.center, spec.half_width, "square");
            return spec.sample_count;
        }
        case ShapeKind::cube_skeleton: {
            require(spec.edge_length > 0.0 && spec.edge_length < 2.0, "edge_length must lie in (0,2)");
            require(spec.samples_per_edge > 0, "samples_per_edge must be positive");
            return 12 * spec.samples_per_edge;
        }
    }
    throw InvalidShape("unreachable");
}

inline void append_base_points(const ShapeSpec& spec, std::size_t count, Rng& rng, std::vector<Point>& out) {
    switch (spec.kind) {
        case ShapeKind::intervals_1d: {
            // Uniform measure on the union: pick an interval by length, then
            // a uniform offset inside it.
            double total = 0.0;
            for (auto [a, b] : spec.intervals) total += b - a;
            for (std::size_t i = 0; i < count; ++i) {
                double t = rng.uniform() * total;
                std::size_t idx = spec.intervals.size() - 1;
                double acc = 0.0;
                for (std::size_t k = 0; k < spec.intervals.size(); ++k) {
                    const double len = spec.intervals[k].second - spec.intervals[k].first;
                    if (t < acc + len) {
                        idx = k;
                        break;
                    }
                    acc += len;
                }
                const auto [a, b] = spec.intervals[idx];
                out.push_back(Point{std::min(a + (t - acc), b)});
            }
            break;
        }
        case ShapeKind::circle: {
            for (std::size_t i = 0; i < count; ++i) out.push_back(on_circle(spec.center, spec.radius, rng.uniform(0.0, 2.0 * std::numbers::pi)));
            break;
        }
        case ShapeKind::two_circles: {
            std::size_t n1 = spec.count1;
            if (n1 == 0) {
                const double c1 = spec.radius, c2 = spec.radius2;
                n1 = static_cast<std::size_t>(std::llround(static_cast<double>(count) * c1 / (c1 + c2)));
            }
            for (std::size_t i = 0; i < count; ++i) {
                const bool first = i < n1;
                out.push_back(on_circle(first ? spec.center : spec.center2, first ? spec.radius : spec.radius2,
                                        rng.uniform(0.0, 2.0 * std::numbers::pi)));
            }
            break;
        }
        case ShapeKind::disk: {
            for (std::size_t i = 0; i < count; ++i) {
                const double r = spec.radius * std::sqrt(rng.uniform());
                out.push_back(on_circle(spec.center, r, rng.uniform(0.0, 2.0 * std::numbers::pi)));
            }
            break;
        }
        case ShapeKind::triangle: {
            const Point &a = spec.vertices[0], &b = spec.vertices[1], &c = spec.vertices[2];
            for (std::size_t i = 0; i < count; ++i) {
                double u = rng.uniform(), v = rng.uniform();
                if (u + v > 1.0) {
                    u = 1.0 - u;
                    v = 1.0 - v;
                }
                out.push_back(Point{a[0] + u * (b[0] - a[0]) + v * (c[0] - a[0]), a[1] + u * (b[1] - a[1]) + v * (c[1] - a[1])});
            }
            break;
        }
        case ShapeKind::square: {
            for (std::size_t i = 0; i < count; ++i)
                out.push_back(Point{spec.center[0] + rng.uniform(-spec.half_width, spec.half_width),
                                    spec.center[1] + rng.uniform(-spec.half_width, spec.half_width)});
            break;
        }
        case ShapeKind::cube_skeleton: {
            // Evenly spaced points on the 12 edges (endpoints included, so
            // corners are emitted once per incident edge).
            const double h = spec.edge_length / 2.0;
            const std::size_t k = spec.samples_per_edge;
            auto lerp = [](const Point& a, const Point& b, double t) {
                Point p(3);
                for (int i = 0; i < 3; ++i) p[i] = a[i] + t * (b[i] - a[i]);
                return p;
            };
            std::vector<std::pair<Point, Point>> edges;
            for (int axis = 0; axis < 3; ++axis)
                for (int s0 : {-1, 1})
                    for (int s1 : {-1, 1}) {
                        Point a(3), b(3);
                        a[axis] = -h;
                        b[axis] = h;
                        const int o1 = (axis + 1) % 3, o2 = (axis + 2) % 3;
                        a[o1] = b[o1] = s0 * h;
                        a[o2] = b[o2] = s1 * h;
                        edges.emplace_back(a, b);
                    }
            for (const auto& [a, b] : edges)
                for (std::size_t j = 0; j < k; ++j) out.push_back(lerp(a, b, k == 1 ? 0.5 : static_cast<double>(j) / static_cast<double>(k - 1)));
            break;
        }
    }
}

}  // namespace detail

/**
 * Sample a point cloud from a shape's uniform measure, apply per-coordinate
 * Gaussian noise, then append uniform background noise.
 *
 * Points pushed outside [-1,1]^n by the Gaussian perturbation are clamped
 * coordinatewise to the box. Identical spec and seed give bit-identical
 * output.
 */
inline EmpiricalMeasure sample_shape(const ShapeSpec& spec) {
    const std::size_t base_count = detail::validate_and_count(spec);
    const std::size_t dim = spec.kind == ShapeKind::intervals_1d ? 1 : (spec.kind == ShapeKind::cube_skeleton ? 3 : 2);
    if (base_count + spec.noise.uniform_count == 0) throw InvalidShape("empty measure cannot normalize weights");

    Rng rng(spec.noise.rng_seed);
    std::vector<Point> pts;
    pts.reserve(base_count + spec.noise.uniform_count);
    detail::append_base_points(spec, base_count, rng, pts);

    if (spec.noise.gaussian_sigma > 0.0) {
        for (Point& p : pts)
            for (double& c : p) c = std::clamp(c + rng.normal(spec.noise.gaussian_sigma), -1.0, 1.0);
    }
    for (std::size_t i = 0; i < spec.noise.uniform_count; ++i) {
        Point p(dim);
        for (double& c : p) c = rng.uniform(-1.0, 1.0);
        pts.push_back(std::move(p));
    }
    return EmpiricalMeasure::uniform(std::move(pts));
}

/// Union of several shape samples, weighted uniformly across all points.
/// Each spec draws from its own seed.
inline EmpiricalMeasure sample_shapes(const std::vector<ShapeSpec>& specs) {
    if (specs.empty()) throw InvalidShape("no shapes given");
    std::vector<Point> pts;
    for (const ShapeSpec& s : specs) {
        EmpiricalMeasure part = sample_shape(s);
        pts.insert(pts.end(), part.points().begin(), part.points().end());
    }
    return EmpiricalMeasure::uniform(std::move(pts));
}

// --- JSON (de)serialization used by CLI configs ----------------------------

inline nlohmann::json shape_to_json(const ShapeSpec& s) {
    nlohmann::json j;
    j["kind"] = to_string(s.kind);
    j["sample_count"] = s.sample_count;
    j["noise"] = {{"uniform_count", s.noise.uniform_count}, {"gaussian_sigma", s.noise.gaussian_sigma}, {"rng_seed", s.noise.rng_seed}};
    switch (s.kind) {
        case ShapeKind::intervals_1d: {
            nlohmann::json iv = nlohmann::json::array();
            for (auto [a, b] : s.intervals) iv.push_back({a, b});
            j["intervals"] = iv;
            break;
        }
        case ShapeKind::circle:
        case ShapeKind::disk:
            j["center"] = s.center;
            j["radius"] = s.radius;
            break;
        case ShapeKind::two_circles:
            j["center"] = s.center;
            j["radius"] = s.radius;
            j["center2"] = s.center2;
            j["radius2"] = s.radius2;
            if (s.count1) j["count1"] = s.count1;
            break;
        case ShapeKind::triangle:
            j["vertices"] = s.vertices;
            break;
        case ShapeKind::square:
            j["center"] = s.center;
            j["half_width"] = s.half_width;
            break;
        case ShapeKind::cube_skeleton:
            j["edge_length"] = s.edge_length;
            j["samples_per_edge"] = s.samples_per_edge;
            break;
    }
    return j;
}

inline ShapeSpec shape_from_json(const nlohmann::json& j) {
    ShapeSpec s;
    try {
        s.kind = shape_kind_from_string(j.at("kind").get<std::string>());
        s.sample_count = j.value("sample_count", std::size_t{0});
        if (j.contains("noise")) {
            const auto& n = j.at("noise");
            s.noise.uniform_count = n.value("uniform_count", std::size_t{0});
            s.noise.gaussian_sigma = n.value("gaussian_sigma", 0.0);
            s.noise.rng_seed = n.value("rng_seed", std::uint64_t{0});
        }
        if (j.contains("intervals"))
            for (const auto& iv : j.at("intervals")) s.intervals.emplace_back(iv.at(0).get<double>(), iv.at(1).get<double>());
        if (j.contains("center")) s.center = j.at("center").get<Point>();
        if (j.contains("radius")) s.radius = j.at("radius").get<double>();
        if (j.contains("center2")) s.center2 = j.at("center2").get<Point>();
        if (j.contains("radius2")) s.radius2 = j.at("radius2").get<double>();
        if (j.contains("count1")) s.count1 = j.at("count1").get<std::size_t>();
        if (j.contains("vertices")) s.vertices = j.at("vertices").get<std::vector<Point>>();
        if (j.contains("half_width")) s.half_width = j.at("half_width").get<double>();
        if (j.contains("edge_length")) s.edge_length = j.at("edge_length").get<double>();
        if (j.contains("samples_per_edge")) s.samples_per_edge = j.at("samples_per_edge").get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad shape spec: ") + e.what());
    }
    return s;
}

}  // namespace cdph
