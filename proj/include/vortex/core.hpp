#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace vortex {

/// Error raised when an operation's precondition is violated
/// (bad geometry, non-finite data, incompatible grids, ...).
class precondition_error : public std::runtime_error {
  public:
    explicit precondition_error(const std::string& what) : std::runtime_error(what) {}
};

/// Error raised when input data (files, headers) cannot be parsed or validated.
class input_error : public std::runtime_error {
  public:
    explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

struct Vec3 {
    double x = 0, y = 0, z = 0;

    double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }
inline double norm2(const Vec3& v) { return dot(v, v); }

inline Vec3 normalized(const Vec3& v) {
    double n = norm(v);
    if (n == 0.0) throw precondition_error("cannot normalize zero vector");
    return v / n;
}

inline double det3(const Vec3& a, const Vec3& b, const Vec3& c) {
    return dot(a, cross(b, c));
}

/// 3x3 matrix stored row-major; m[i][j] = d(component i)/d(x_j) for gradients.
struct Mat3 {
    std::array<std::array<double, 3>, 3> m{};
    std::array<double, 3>& operator[](int i) { return m[i]; }
    const std::array<double, 3>& operator[](int i) const { return m[i]; }
};

inline Vec3 mat_vec(const Mat3& A, const Vec3& v) {
    return {A[0][0] * v.x + A[0][1] * v.y + A[0][2] * v.z,
            A[1][0] * v.x + A[1][1] * v.y + A[1][2] * v.z,
            A[2][0] * v.x + A[2][1] * v.y + A[2][2] * v.z};
}

/// xi' * A * xi
inline double quad_form(const Mat3& A, const Vec3& xi) { return dot(xi, mat_vec(A, xi)); }

inline bool all_finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

/// Chunked parallel map over [0, n). Results written by index stay
/// deterministic regardless of the worker count. Thread count 0 means
/// "use the configured global default".
class Parallel {
  public:
    static int& default_threads() {
        static int n = 1;
        return n;
    }

    static void for_each(std::size_t n, const std::function<void(std::size_t)>& fn,
                         int threads = 0) {
        if (threads <= 0) threads = default_threads();
        if (threads <= 1 || n < 2) {
            for (std::size_t i = 0; i < n; ++i) fn(i);
            return;
        }
        std::size_t nt = std::min<std::size_t>(threads, n);
        std::vector<std::thread> pool;
        pool.reserve(nt);
        for (std::size_t t = 0; t < nt; ++t) {
            pool.emplace_back([&, t]() {
                for (std::size_t i = t; i < n; i += nt) fn(i);
            });
        }
        for (auto& th : pool) th.join();
    }
};

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 6.28318530717958647692;

}  // namespace vortex
