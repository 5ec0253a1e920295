#pragma once

#include <cmath>
#include <cstdint>

namespace roadcross {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

// Axis-aligned pixel box, half-open nowhere: [x_min, x_max] x [y_min, y_max].
// A box is valid when x_min < x_max and y_min < y_max.
struct Box {
    int x_min = 0;
    int y_min = 0;
    int x_max = 0;
    int y_max = 0;

    int width() const { return x_max - x_min; }
    int height() const { return y_max - y_min; }
    double area() const { return static_cast<double>(width()) * height(); }
    bool valid() const { return x_min < x_max && y_min < y_max; }

    Point centroid() const
    {
        return {(x_min + x_max) / 2.0, (y_min + y_max) / 2.0};
    }
};

inline double iou(const Box& a, const Box& b)
{
    const double ow = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
    const double oh = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
    if (ow <= 0.0 || oh <= 0.0)
        return 0.0;
    const double inter = ow * oh;
    const double uni = a.area() + b.area() - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

inline double distance(const Point& a, const Point& b)
{
    return std::hypot(a.x - b.x, a.y - b.y);
}

inline double frame_diagonal(int frame_width, int frame_height)
{
    return std::hypot(static_cast<double>(frame_width),
                      static_cast<double>(frame_height));
}

} // namespace roadcross
