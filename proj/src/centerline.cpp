#include "pcat/centerline.hpp"

#include <cmath>
#include <stdexcept>

namespace pcat {

void Centerline::validate() const {
    if (points.size() < 2) throw std::runtime_error("centerline: needs at least 2 points");
    if (arc_length.size() != points.size())
        throw std::runtime_error("centerline: arc length table size mismatch");
    if (arc_length.front() != 0.0) throw std::runtime_error("centerline: arc length must start at 0");
    for (std::size_t i = 1; i < arc_length.size(); ++i)
        if (!(arc_length[i] > arc_length[i - 1]))
            throw std::runtime_error("centerline: arc lengths must be strictly increasing");
}

Vec3 Centerline::at_arc(double s) const {
    if (points.empty()) throw std::runtime_error("centerline: empty");
    if (s <= 0.0) return points.front();
    if (s >= total_length()) return points.back();
    // binary search for the segment containing s
    std::size_t lo = 0, hi = arc_length.size() - 1;
    while (hi - lo > 1) {
        std::size_t mid = (lo + hi) / 2;
        if (arc_length[mid] <= s) lo = mid;
        else hi = mid;
    }
    double t = (s - arc_length[lo]) / (arc_length[hi] - arc_length[lo]);
    Vec3 p;
    for (int a = 0; a < 3; ++a) p[a] = points[lo][a] + t * (points[hi][a] - points[lo][a]);
    return p;
}

Centerline make_centerline(std::uint8_t artery, std::vector<Vec3> points) {
    Centerline cl;
    cl.artery = artery;
    cl.points = std::move(points);
    cl.arc_length.resize(cl.points.size());
    if (!cl.points.empty()) {
        cl.arc_length[0] = 0.0;
        for (std::size_t i = 1; i < cl.points.size(); ++i) {
            double dx = cl.points[i][0] - cl.points[i - 1][0];
            double dy = cl.points[i][1] - cl.points[i - 1][1];
            double dz = cl.points[i][2] - cl.points[i - 1][2];
            cl.arc_length[i] = cl.arc_length[i - 1] + std::sqrt(dx * dx + dy * dy + dz * dz);
        }
    }
    cl.validate();
    return cl;
}

} // namespace pcat
