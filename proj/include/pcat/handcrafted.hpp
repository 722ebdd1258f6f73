// The 22 hand-crafted PCAT features: histogram statistics, histogram
// shape, axial-area features and fat-window HU-range probabilities.
#pragma once

#include <array>
#include <string>
#include <vector>

#include "pcat/features.hpp"
#include "pcat/pcat_extraction.hpp"

namespace pcat {

// 8 fat-window bins of 20 HU: [-190,-170), ..., [-70,-50), [-50,-30].
// The final bin is right-closed. Probabilities sum to 1.
std::array<double, 8> hu_histogram8(const PCATRegion& region);

// Canonical ordered names of the 22 hand-crafted features.
const std::vector<std::string>& handcrafted_feature_names();

// 22 entries in dictionary order:
//   1 mean HU, 2 skewness, 3 kurtosis (non-excess),
//   4 std, 5 median, 6 IQR, 7 histogram entropy (bits),
//   8-12 min/max/mean/std/median per-slice area (mm^2),
//   13 total volume (cm^3), 14 fraction of disk slices with nonzero area,
//   15-22 the 8 histogram probabilities.
// Dispersion features are undefined-flagged for single-voxel regions;
// skewness/kurtosis also when the value variance is zero.
FeatureVector handcrafted_vector(const PCATRegion& region, double slice_thickness_mm);

// Percentile with linear interpolation between order statistics
// (rank = (n-1)*p), on a pre-sorted sequence.
double percentile_sorted(const std::vector<double>& sorted, double p);

} // namespace pcat
