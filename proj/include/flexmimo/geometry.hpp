#pragma once

#include <cmath>
#include <vector>

namespace flexmimo {

// Planar position, meters.
struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend constexpr bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }

    double norm() const { return std::hypot(x, y); }
};

inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

// Square service region [0,L]^2 with K users on the ground and M flexible
// antennas mounted at height h0.
struct Scene {
    double region_size = 10.0;     // L, meters
    double antenna_height = 2.0;   // h0, meters
    std::vector<Vec2> users;
    std::vector<Vec2> antenna_init;

    bool contains(Vec2 p) const {
        return p.x >= 0.0 && p.x <= region_size && p.y >= 0.0 && p.y <= region_size;
    }

    // Throws std::invalid_argument on empty user/antenna lists, points outside
    // the region, or negative height.
    void validate() const;
};

}  // namespace flexmimo
