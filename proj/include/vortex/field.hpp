#pragma once

#include <utility>
#include <vector>

#include "vortex/grid.hpp"

namespace vortex {

/// Real scalar samples on a periodic grid, one value per node, at a fixed time.
struct ScalarField {
    GridSpec grid;
    std::vector<double> values;
    double time = 0.0;

    ScalarField() = default;
    explicit ScalarField(const GridSpec& g, double t = 0.0)
        : grid(g), values(g.size(), 0.0), time(t) {}
    ScalarField(const GridSpec& g, std::vector<double> v, double t = 0.0)
        : grid(g), values(std::move(v)), time(t) {
        if (values.size() != grid.size())
            throw precondition_error("scalar field value count does not match grid");
    }

    double& at(int i1, int i2, int i3) { return values[grid.index(i1, i2, i3)]; }
    double at(int i1, int i2, int i3) const { return values[grid.index(i1, i2, i3)]; }

    double max_abs() const {
        double m = 0;
        for (double v : values) m = std::max(m, std::abs(v));
        return m;
    }

    void check_finite(const char* what = "scalar field") const {
        if (!all_finite(values))
            throw precondition_error(std::string(what) + " contains non-finite values");
    }
};

/// Three scalar component blocks sharing one grid and time.
struct VectorField {
    GridSpec grid;
    std::array<std::vector<double>, 3> comp;
    double time = 0.0;

    VectorField() = default;
    explicit VectorField(const GridSpec& g, double t = 0.0) : grid(g), time(t) {
        for (auto& c : comp) c.assign(g.size(), 0.0);
    }

    std::size_t size() const { return grid.size(); }

    double& at(int c, int i1, int i2, int i3) { return comp[c][grid.index(i1, i2, i3)]; }
    double at(int c, int i1, int i2, int i3) const { return comp[c][grid.index(i1, i2, i3)]; }

    Vec3 vec_at(std::size_t idx) const { return {comp[0][idx], comp[1][idx], comp[2][idx]}; }

    double max_norm() const {
        double m = 0;
        for (std::size_t i = 0; i < comp[0].size(); ++i) m = std::max(m, norm2(vec_at(i)));
        return std::sqrt(m);
    }

    double max_abs_component(int c) const {
        double m = 0;
        for (double v : comp[c]) m = std::max(m, std::abs(v));
        return m;
    }

    void check_finite(const char* what = "vector field") const {
        for (const auto& c : comp)
            if (!all_finite(c))
                throw precondition_error(std::string(what) + " contains non-finite values");
    }

    ScalarField component(int c) const { return ScalarField(grid, comp[c], time); }
};

/// An ordered-by-time list of velocity snapshots (shared grid).
struct SnapshotSeries {
    std::vector<VectorField> snaps;

    std::size_t size() const { return snaps.size(); }
    bool empty() const { return snaps.empty(); }
    const VectorField& operator[](std::size_t i) const { return snaps[i]; }

    const GridSpec& grid() const {
        if (snaps.empty()) throw precondition_error("empty snapshot series");
        return snaps.front().grid;
    }

    double t_begin() const { return snaps.front().time; }
    double t_end() const { return snaps.back().time; }

    void validate() const {
        if (snaps.empty()) throw precondition_error("empty snapshot series");
        for (std::size_t i = 0; i < snaps.size(); ++i) {
            snaps[i].check_finite("snapshot");
            if (!snaps[i].grid.compatible(snaps.front().grid))
                throw precondition_error("snapshot series mixes incompatible grids");
            if (i > 0 && !(snaps[i].time > snaps[i - 1].time))
                throw input_error("snapshot times are not strictly increasing");
        }
    }
};

}  // namespace vortex
