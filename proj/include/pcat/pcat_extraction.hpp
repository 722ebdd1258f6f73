// Axial-disk PCAT extraction: segment selection along the centerline,
// per-slice equivalent-area circle fit of the lumen, dilated capped disks,
// and fat-window thresholding after axial median filtering.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pcat/centerline.hpp"
#include "pcat/volume.hpp"

namespace pcat {

struct AxialDisk {
    int slice_index = 0;
    double center_x = 0.0, center_y = 0.0; // mm
    double lumen_radius = 0.0;             // mm, equivalent-area circle
    double disk_radius = 0.0;              // mm, min(2*lumen_radius, 4.0)
    bool synthesized = false;              // true when the slice had no lumen voxels
};

struct DiskSet {
    std::uint8_t artery = 0;
    std::vector<AxialDisk> disks; // slice indices strictly increasing
};

struct PCATRegion {
    std::uint8_t artery = 0;
    LabelMask mask;                      // 1 where PCAT, grid of the source volume
    std::vector<double> values;          // filtered HU of PCAT voxels, grid scan order (x fastest)
    std::vector<double> slice_areas_mm2; // one entry per disk slice (may be 0)
    std::vector<int> slice_indices;      // matching slice index per area entry
    std::size_t voxel_count() const { return values.size(); }
};

// PCAT fat window, closed on both ends.
constexpr double kFatWindowLo = -190.0;
constexpr double kFatWindowHi = -30.0;

// Maximum disk radius (8-mm diameter cap).
constexpr double kMaxDiskRadius = 4.0;

struct SegmentRules {
    double length_mm = 40.0;   // analyzed arc span
    double rca_skip_mm = 10.0; // arc excluded at the RCA start
    // when false, RCA keeps span [10, 10+length]; when true, [10, length]
    bool rca_trim_to_length = false;
    double step_mm = 0.5; // resampling step of the returned segment
    double start_offset_mm = 0.0;
};

// Sub-centerline over arc [0,40] mm (LAD/LCX) or [10,50] mm (RCA),
// resampled to uniform 0.5-mm arc steps. Throws when the centerline is
// shorter than the required span, naming the artery and available length.
Centerline select_segment(const Centerline& cl, const SegmentRules& rules = {});

// Equivalent-area circle of a set of in-plane voxel centers:
// centroid + sqrt(total area / pi). Throws on an empty set.
struct CircleFit {
    double cx = 0.0, cy = 0.0; // mm
    double radius = 0.0;       // mm
};
CircleFit fit_circle_axial(const std::vector<std::array<double, 2>>& voxel_centers_mm,
                           double pixel_area_mm2);

// One AxialDisk per axial slice whose center z lies in the segment z-range.
// Lumen voxels are restricted to the segment artery's label within 5 mm
// in-plane of the segment point at that z. Slices without lumen voxels get
// a synthesized disk (center from the segment, radius from the nearest
// populated slice) flagged in the output.
DiskSet build_disk_set(const LabelMask& lumen, const Centerline& segment, const GridSpec& grid);

// Median-filters vol per axial slice, then collects voxels whose in-plane
// center is within disk_radius of the slice disk center and whose filtered
// HU lies in the closed fat window. Throws "empty PCAT region" when no
// voxel qualifies.
PCATRegion extract_pcat(const Volume& vol, const DiskSet& disks,
                        double fat_lo = kFatWindowLo, double fat_hi = kFatWindowHi);

} // namespace pcat
