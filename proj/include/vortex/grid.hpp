#pragma once

#include <cstddef>
#include <string>

#include "vortex/core.hpp"

namespace vortex {

/// Uniform periodic grid on a box [0,L1) x [0,L2) x [0,L3).
/// Storage convention everywhere: x1 fastest, i.e. idx = i1 + n1*(i2 + n2*i3).
struct GridSpec {
    int n1 = 0, n2 = 0, n3 = 0;
    double L1 = two_pi, L2 = two_pi, L3 = two_pi;

    GridSpec() = default;
    GridSpec(int n1_, int n2_, int n3_, double L1_ = two_pi, double L2_ = two_pi,
             double L3_ = two_pi)
        : n1(n1_), n2(n2_), n3(n3_), L1(L1_), L2(L2_), L3(L3_) {
        validate();
    }

    static GridSpec cube(int n, double L = two_pi) { return GridSpec(n, n, n, L, L, L); }

    void validate() const {
        auto check_n = [](int n, const char* name) {
            if (n < 4 || n % 2 != 0)
                throw precondition_error(std::string("grid ") + name +
                                         " must be even and >= 4, got " + std::to_string(n));
        };
        check_n(n1, "n1");
        check_n(n2, "n2");
        check_n(n3, "n3");
        if (L1 <= 0 || L2 <= 0 || L3 <= 0)
            throw precondition_error("box lengths must be positive");
    }

    std::size_t size() const { return std::size_t(n1) * n2 * n3; }

    std::size_t index(int i1, int i2, int i3) const {
        return std::size_t(i1) + std::size_t(n1) * (std::size_t(i2) + std::size_t(n2) * i3);
    }

    double h1() const { return L1 / n1; }
    double h2() const { return L2 / n2; }
    double h3() const { return L3 / n3; }
    double min_h() const { return std::min(h1(), std::min(h2(), h3())); }
    double min_L() const { return std::min(L1, std::min(L2, L3)); }
    double cell_volume() const { return h1() * h2() * h3(); }

    Vec3 node(int i1, int i2, int i3) const { return {i1 * h1(), i2 * h2(), i3 * h3()}; }

    Vec3 box_center() const { return {L1 / 2, L2 / 2, L3 / 2}; }

    /// Minimal-image displacement a-b on the periodic box.
    Vec3 periodic_delta(const Vec3& a, const Vec3& b) const {
        auto wrap = [](double d, double L) {
            d = std::fmod(d, L);
            if (d > L / 2) d -= L;
            if (d < -L / 2) d += L;
            return d;
        };
        return {wrap(a.x - b.x, L1), wrap(a.y - b.y, L2), wrap(a.z - b.z, L3)};
    }

    double periodic_distance(const Vec3& a, const Vec3& b) const {
        return norm(periodic_delta(a, b));
    }

    bool compatible(const GridSpec& o) const {
        return n1 == o.n1 && n2 == o.n2 && n3 == o.n3 && L1 == o.L1 && L2 == o.L2 && L3 == o.L3;
    }
};

}  // namespace vortex
