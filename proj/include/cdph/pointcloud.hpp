#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cdph/core.hpp"

namespace cdph {

/**
 * Weighted finite point set in [-1,1]^n.
 *
 * Invariants enforced on construction: all coordinates in [-1,1], weights
 * nonnegative and summing to 1 (within 1e-12), one weight per point.
 * Uniform weights are the default; nonuniform weights host regularized
 * mixtures.
 */
class EmpiricalMeasure {
public:
    EmpiricalMeasure(std::vector<Point> points, std::vector<double> weights) : points_(std::move(points)), weights_(std::move(weights)) {
        validate();
    }

    static EmpiricalMeasure uniform(std::vector<Point> points) {
        if (points.empty()) throw InvalidShape("empty measure cannot normalize weights");
        std::vector<double> w(points.size(), 1.0 / static_cast<double>(points.size()));
        return EmpiricalMeasure(std::move(points), std::move(w));
    }

    const std::vector<Point>& points() const { return points_; }
    const std::vector<double>& weights() const { return weights_; }
    std::size_t size() const { return points_.size(); }
    std::size_t dim() const { return points_.empty() ? 0 : points_[0].size(); }

private:
    void validate() const {
        if (points_.empty()) throw InvalidShape("empty measure cannot normalize weights");
        if (weights_.size() != points_.size()) throw InvalidShape("weights length differs from points length");
        const std::size_t n = points_[0].size();
        if (n == 0) throw InvalidShape("zero-dimensional points");
        double sum = 0.0;
        for (double w : weights_) {
            if (!(w >= 0.0)) throw InvalidShape("negative or non-finite weight");
            sum += w;
        }
        if (std::abs(sum - 1.0) > 1e-12) throw InvalidShape("weights sum to " + std::to_string(sum) + ", expected 1");
        for (const Point& p : points_) {
            if (p.size() != n) throw DimensionMismatch("ragged point list");
            if (!inside_box(p)) throw InvalidShape("point outside [-1,1]^n");
        }
    }

    std::vector<Point> points_;
    std::vector<double> weights_;
};

/// min_{p in cloud} ||x - p||_2
inline double distance_function(const std::vector<Point>& cloud, const Point& x) {
    if (cloud.empty()) throw InvalidShape("distance function of empty cloud");
    double best = std::numeric_limits<double>::infinity();
    for (const Point& p : cloud) best = std::min(best, squared_distance(p, x));
    return std::sqrt(best);
}

/// Hausdorff distance: max of the two directed sup-of-inf distances.
inline double hausdorff(const std::vector<Point>& a, const std::vector<Point>& b) {
    if (a.empty() || b.empty()) throw InvalidShape("hausdorff of empty set");
    if (a[0].size() != b[0].size()) throw DimensionMismatch("hausdorff between different dimensions");
    double d = 0.0;
    for (const Point& p : a) d = std::max(d, distance_function(b, p));
    for (const Point& q : b) d = std::max(d, distance_function(a, q));
    return d;
}

// ---------------------------------------------------------------------------
// Serialization: CSV rows "x1,...,xn[,weight]" and JSON
// {"dim": n, "points": [[...]], "weights": [...]}.
// ---------------------------------------------------------------------------

inline void save_cloud_csv(const EmpiricalMeasure& m, const std::string& path, bool with_weights = false) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out.precision(17);
    for (std::size_t i = 0; i < m.size(); ++i) {
        const Point& p = m.points()[i];
        for (std::size_t k = 0; k < p.size(); ++k) {
            if (k) out << ',';
            out << p[k];
        }
        if (with_weights) out << ',' << m.weights()[i];
        out << '\n';
    }
}

inline EmpiricalMeasure load_cloud_csv(const std::string& path, bool last_column_is_weight = false) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::vector<Point> pts;
    std::vector<double> wts;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw ParseError(path + ":" + std::to_string(lineno) + ": not a number: '" + cell + "'");
            }
        }
        if (row.empty()) continue;
        if (last_column_is_weight) {
            if (row.size() < 2) throw ParseError(path + ":" + std::to_string(lineno) + ": weight column requires at least 2 fields");
            wts.push_back(row.back());
            row.pop_back();
        }
        pts.push_back(std::move(row));
    }
    if (pts.empty()) throw ParseError(path + ": no points");
    if (!last_column_is_weight) return EmpiricalMeasure::uniform(std::move(pts));
    double sum = 0.0;
    for (double w : wts) sum += w;
    if (sum <= 0.0) throw ParseError(path + ": weights sum to zero");
    for (double& w : wts) w /= sum;
    return EmpiricalMeasure(std::move(pts), std::move(wts));
}

inline nlohmann::json cloud_to_json(const EmpiricalMeasure& m) {
    nlohmann::json j;
    j["dim"] = m.dim();
    j["points"] = m.points();
    j["weights"] = m.weights();
    return j;
}

inline EmpiricalMeasure cloud_from_json(const nlohmann::json& j) {
    if (!j.contains("points")) throw ParseError("cloud json missing 'points'");
    std::vector<Point> pts = j.at("points").get<std::vector<Point>>();
    std::vector<double> wts;
    if (j.contains("weights") && !j.at("weights").is_null())
        wts = j.at("weights").get<std::vector<double>>();
    else
        wts.assign(pts.size(), pts.empty() ? 0.0 : 1.0 / static_cast<double>(pts.size()));
    if (j.contains("dim")) {
        const std::size_t n = j.at("dim").get<std::size_t>();
        for (const Point& p : pts)
            if (p.size() != n) throw ParseError("cloud json: point dimension differs from 'dim'");
    }
    return EmpiricalMeasure(std::move(pts), std::move(wts));
}

inline EmpiricalMeasure load_cloud_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    return cloud_from_json(j);
}

inline void save_cloud_json(const EmpiricalMeasure& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << cloud_to_json(m).dump(2) << '\n';
}

}  // namespace cdph
