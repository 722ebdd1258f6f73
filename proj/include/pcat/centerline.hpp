// Ordered 3D centerline with arc-length parameterization.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pcat/volume.hpp"

namespace pcat {

struct Centerline {
    std::uint8_t artery = 0; // kLabelLAD/LCX/RCA
    std::vector<Vec3> points; // mm, ordered
    std::vector<double> arc_length; // cumulative, arc_length[0] == 0

    double total_length() const { return arc_length.empty() ? 0.0 : arc_length.back(); }
    // point at arc-length s (clamped to [0, total]), linear along segments
    Vec3 at_arc(double s) const;
    void validate() const; // >= 2 points, strictly increasing arc lengths
};

// Builds cumulative arc lengths from the point sequence.
Centerline make_centerline(std::uint8_t artery, std::vector<Vec3> points);

} // namespace pcat
