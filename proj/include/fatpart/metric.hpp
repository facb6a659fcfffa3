#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "fatpart/errors.hpp"

namespace fatpart {

/// Finite metric space given by a symmetric distance matrix.
struct MetricSpace {
    std::vector<std::string> names;
    std::vector<double> dist; // row-major n*n, zero diagonal

    std::size_t size() const { return names.size(); }

    double d(std::size_t i, std::size_t j) const {
        return dist[i * names.size() + j];
    }
    double& d(std::size_t i, std::size_t j) {
        return dist[i * names.size() + j];
    }
};

/// Checks the matrix shape (symmetry, zero diagonal, positive off-diagonal)
/// and throws MalformedDocument when violated.
inline void validate_metric_shape(const MetricSpace& m) {
    const std::size_t n = m.size();
    if (n < 2) throw MalformedDocument("metric needs at least two points");
    if (m.dist.size() != n * n) throw MalformedDocument("distance matrix is not n-by-n");
    for (std::size_t i = 0; i < n; ++i) {
        if (m.d(i, i) != 0.0) throw MalformedDocument("nonzero diagonal entry");
        for (std::size_t j = i + 1; j < n; ++j) {
            if (m.d(i, j) != m.d(j, i)) throw MalformedDocument("distance matrix is not symmetric");
            if (!(m.d(i, j) > 0.0)) throw MalformedDocument("non-positive distance between distinct points");
        }
    }
}

/// True when D(x,z) <= max(D(x,y), D(y,z)) holds for all triples, up to a
/// 1e-9 relative tolerance that forgives serialization round-off.
inline bool validate_ultrametric(const MetricSpace& m) {
    validate_metric_shape(m);
    const std::size_t n = m.size();
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t z = x + 1; z < n; ++z) {
            const double dxz = m.d(x, z);
            for (std::size_t y = 0; y < n; ++y) {
                if (y == x || y == z) continue;
                const double cap = std::max(m.d(x, y), m.d(y, z));
                if (dxz > cap * (1.0 + 1e-9)) return false;
            }
        }
    }
    return true;
}

/// Largest pairwise distance.
inline double metric_diameter(const MetricSpace& m) {
    double best = 0.0;
    const std::size_t n = m.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) best = std::max(best, m.d(i, j));
    return best;
}

/// Smallest positive pairwise distance.
inline double metric_min_distance(const MetricSpace& m) {
    double best = 0.0;
    const std::size_t n = m.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = m.d(i, j);
            if (v > 0.0 && (best == 0.0 || v < best)) best = v;
        }
    }
    return best;
}

/// diameter / min positive distance.
inline double metric_spread(const MetricSpace& m) {
    const double lo = metric_min_distance(m);
    if (lo == 0.0) throw MalformedDocument("metric has no positive distance");
    return metric_diameter(m) / lo;
}

} // namespace fatpart
