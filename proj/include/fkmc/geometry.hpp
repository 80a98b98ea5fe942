// Mirror geometry of a point pair: the separating hyperplane through the
// midpoint, the reflection across it, and its linear part.
//
// For distinct x, y the reflection R maps v to v - 2<v - m, u>u with
// m = (x+y)/2 and u = (x-y)/|x-y|. R swaps x and y, fixes the hyperplane,
// and its linear part L is symmetric and involutive (L^2 = identity).

#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "fkmc/errors.hpp"

namespace fkmc {

struct MirrorGeometry {
    int dim = 0;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> mid;
    std::vector<double> unit; // u = (x - y) / |x - y|
    double delta = 0.0;       // |x - y|

    static MirrorGeometry make(std::span<const double> x, std::span<const double> y) {
        if (x.size() != y.size() || x.empty())
            throw DomainError("MirrorGeometry: x and y must share a positive dimension");
        MirrorGeometry g;
        g.dim = static_cast<int>(x.size());
        g.x.assign(x.begin(), x.end());
        g.y.assign(y.begin(), y.end());
        g.mid.resize(x.size());
        g.unit.resize(x.size());
        double d2 = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            g.mid[i] = 0.5 * (x[i] + y[i]);
            const double di = x[i] - y[i];
            g.unit[i] = di;
            d2 += di * di;
        }
        g.delta = std::sqrt(d2);
        if (!(g.delta > 0.0))
            throw DomainError("MirrorGeometry: start points coincide, no mirror hyperplane");
        for (auto& c : g.unit) c /= g.delta;
        return g;
    }

    // Signed distance of v to the hyperplane, positive on the x side.
    double signed_dist(const double* v) const {
        double s = 0.0;
        for (int i = 0; i < dim; ++i) s += (v[i] - mid[i]) * unit[i];
        return s;
    }

    // Affine reflection R.
    void reflect(const double* v, double* out) const {
        const double s = signed_dist(v);
        for (int i = 0; i < dim; ++i) out[i] = v[i] - 2.0 * s * unit[i];
    }

    std::vector<double> reflect(std::span<const double> v) const {
        if (static_cast<int>(v.size()) != dim)
            throw DomainError("MirrorGeometry::reflect: dimension mismatch");
        std::vector<double> out(v.size());
        reflect(v.data(), out.data());
        return out;
    }

    // Linear part L applied to a direction (increments transform by L).
    void reflect_dir(const double* v, double* out) const {
        double s = 0.0;
        for (int i = 0; i < dim; ++i) s += v[i] * unit[i];
        for (int i = 0; i < dim; ++i) out[i] = v[i] - 2.0 * s * unit[i];
    }

    std::vector<double> reflect_dir(std::span<const double> v) const {
        if (static_cast<int>(v.size()) != dim)
            throw DomainError("MirrorGeometry::reflect_dir: dimension mismatch");
        std::vector<double> out(v.size());
        reflect_dir(v.data(), out.data());
        return out;
    }
};

} // namespace fkmc
