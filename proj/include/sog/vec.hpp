#pragma once

#include <cmath>
#include <cstdint>
#include <ostream>

namespace sog {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    constexpr Vec3() = default;
    constexpr Vec3(double vx, double vy, double vz) : x(vx), y(vy), z(vz) {}

    double operator[](int axis) const { return (&x)[axis]; }
    double& operator[](int axis) { return (&x)[axis]; }

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double length() const { return std::sqrt(dot(*this)); }
    Vec3 normalized() const { return *this / length(); }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }

    bool operator==(const Vec3& o) const = default;
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline Vec3 min(const Vec3& a, const Vec3& b) {
    return {std::fmin(a.x, b.x), std::fmin(a.y, b.y), std::fmin(a.z, b.z)};
}
inline Vec3 max(const Vec3& a, const Vec3& b) {
    return {std::fmax(a.x, b.x), std::fmax(a.y, b.y), std::fmax(a.z, b.z)};
}

inline std::ostream& operator<<(std::ostream& os, const Vec3& v) {
    return os << "(" << v.x << ", " << v.y << ", " << v.z << ")";
}

struct Vec3i {
    int x = 0, y = 0, z = 0;

    constexpr Vec3i() = default;
    constexpr Vec3i(int vx, int vy, int vz) : x(vx), y(vy), z(vz) {}

    int operator[](int axis) const { return (&x)[axis]; }
    int& operator[](int axis) { return (&x)[axis]; }

    Vec3i operator+(const Vec3i& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3i operator-(const Vec3i& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3i operator*(int s) const { return {x * s, y * s, z * s}; }

    bool operator==(const Vec3i& o) const = default;
};

inline std::ostream& operator<<(std::ostream& os, const Vec3i& v) {
    return os << "(" << v.x << ", " << v.y << ", " << v.z << ")";
}

/// Floor division that stays correct for negative coordinates.
inline int floor_div(int a, int b) {
    int q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

inline Vec3i floor_div(const Vec3i& v, int b) {
    return {floor_div(v.x, b), floor_div(v.y, b), floor_div(v.z, b)};
}

} // namespace sog
