#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace volpot {

struct Vec2 {
    double x = 0.0, y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }

    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double cross(Vec2 o) const { return x * o.y - y * o.x; }
    double norm2() const { return x * x + y * y; }
    double norm() const { return std::hypot(x, y); }
    Vec2 normalized() const { double n = norm(); return {x / n, y / n}; }
    Vec2 perp() const { return {-y, x}; }  // rotate +90 degrees
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }

inline double dot(Vec2 a, Vec2 b) { return a.dot(b); }
inline double cross(Vec2 a, Vec2 b) { return a.cross(b); }

inline double dist(Vec2 a, Vec2 b) { return (a - b).norm(); }

// Distance from point p to segment [a, b].
double point_segment_dist(Vec2 p, Vec2 a, Vec2 b);

// Global worker count used by the parallel helpers; 0 means "use
// hardware_concurrency".  Set once from the CLI / env before heavy work.
void set_thread_count(int n);
int thread_count();

// Runs fn(i) for i in [0, n) across the configured worker threads.  Each
// index writes only to its own output slots, so results are independent of
// the partitioning and of the thread count.
void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& fn);

// Chunked variant: fn(begin, end) over a partition of [0, n).
void parallel_chunks(std::int64_t n, std::int64_t chunk,
                     const std::function<void(std::int64_t, std::int64_t)>& fn);

}  // namespace volpot
