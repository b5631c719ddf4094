#pragma once

#include <algorithm>
#include <cmath>
#include <compare>

namespace ifslab {

// The circle S^1 is [0,1) with unit circumference and counterclockwise
// orientation; all lengths and distances are fractions of the circumference.

inline double wrap01(double t) {
    double r = t - std::floor(t);
    return r < 1.0 ? r : r - 1.0;
}

struct CirclePoint {
    double value = 0.0;  // invariant: 0 <= value < 1

    constexpr CirclePoint() = default;
    explicit CirclePoint(double t) : value(wrap01(t)) {}

    friend auto operator<=>(const CirclePoint&, const CirclePoint&) = default;
};

// Closed counterclockwise arc [start, end]; start == end is a single point.
struct Arc {
    CirclePoint start;
    CirclePoint end;

    friend bool operator==(const Arc&, const Arc&) = default;
};

inline double arc_length(const Arc& a) {
    return wrap01(a.end.value - a.start.value);
}

// Shorter of the two arcs joining x and y; symmetric, bounded by 1/2.
inline double circ_dist(CirclePoint x, CirclePoint y) {
    double l = wrap01(x.value - y.value);
    return std::min(l, 1.0 - l);
}

// Endpoint-inclusive membership on the counterclockwise path start -> end.
inline bool arc_contains(const Arc& a, CirclePoint z) {
    return wrap01(z.value - a.start.value) <= arc_length(a);
}

// Closed complement [end, start]; shares both endpoints with the arc.
inline Arc complement_arc(const Arc& a) {
    return Arc{a.end, a.start};
}

}  // namespace ifslab
